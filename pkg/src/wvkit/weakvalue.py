"""
Weak values of pre-/post-selected (PPS) ensembles and their split into the
pre-selected average plus an anomalous interference term.

For an observable ``A`` and pre-selection ``psi`` the centred vector
``(A - <A>)|psi>`` has norm ``dA`` and, when ``dA > 0``, direction
``|psi_bar>`` orthogonal to ``psi``.  The anomalous part of the weak value is
then ``dA <phi|psi_bar> / <phi|psi>``: it is non-zero only if the
post-selection ``phi`` overlaps ``psi_bar``.
"""
from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (
    ConditioningWarning,
    DimensionMismatch,
    IncompleteBasis,
    InequalityViolation,
    NonOrthonormalBasis,
    OrthogonalPostSelection,
    PhaseUndefined,
)
from .hilbert import (
    IDENTITY_TOL,
    PHYSICAL_TOL,
    Observable,
    State,
    commutator,
    expectation,
    inner,
)

DEFAULT_OVERLAP_THRESHOLD = 1e-9
CONDITIONING_THRESHOLD = 1e-6
BOUND_SLACK = 1e-9
EIGENSTATE_TOL = 1e-10
ZERO_WEIGHT = 1e-14
# |<phi|psi_bar>| at or below this is treated as exactly orthogonal when
# assigning a phase.
PHASE_ZERO = 1e-14
PHASE_TOL = 1e-9


def principal_angle(theta: float) -> float:
    """Reduce an angle into (-pi, pi]."""
    wrapped = math.remainder(theta, 2 * math.pi)
    if wrapped <= -math.pi:
        wrapped += 2 * math.pi
    return wrapped


def phase(z: complex) -> float:
    return principal_angle(cmath.phase(z))


@dataclass(frozen=True, eq=False)
class PpsEnsemble:
    """Pre-selected state ``pre`` (psi) and post-selected state ``post`` (phi)."""

    pre: State
    post: State
    overlap_threshold: float = DEFAULT_OVERLAP_THRESHOLD
    overlap: complex = field(init=False)

    def __post_init__(self):
        if self.pre.dim != self.post.dim:
            raise DimensionMismatch(f"pre dim {self.pre.dim} != post dim {self.post.dim}")
        ov = inner(self.post, self.pre)
        if abs(ov) <= self.overlap_threshold:
            raise OrthogonalPostSelection(
                f"|<phi|psi>| = {abs(ov):.3e} <= threshold {self.overlap_threshold:.1e}"
            )
        if abs(ov) < CONDITIONING_THRESHOLD:
            warnings.warn(
                f"|<phi|psi>| = {abs(ov):.3e}: weak value rounding is amplified by 1/|<phi|psi>|",
                ConditioningWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "overlap", ov)

    @property
    def dim(self) -> int:
        return self.pre.dim


def _checked_overlap(e: PpsEnsemble) -> complex:
    if abs(e.overlap) <= e.overlap_threshold:
        raise OrthogonalPostSelection(f"|<phi|psi>| = {abs(e.overlap):.3e}")
    return e.overlap


def weak_value(A: Observable, e: PpsEnsemble) -> complex:
    """``<phi|A|psi> / <phi|psi>``."""
    if A.dim != e.dim:
        raise DimensionMismatch(f"observable dim {A.dim} != ensemble dim {e.dim}")
    ov = _checked_overlap(e)
    return complex(np.vdot(e.post.amplitudes, A.apply(e.pre))) / ov


class Vaidman(NamedTuple):
    average: float
    delta_a: float
    psi_bar: Optional[State]


def vaidman_decompose(A: Observable, psi: State) -> Vaidman:
    """Split ``A|psi> = <A>|psi> + dA|psi_bar>``.

    ``psi_bar`` is ``None`` when ``psi`` is an eigenvector of ``A``
    (``dA < 1e-10``).
    """
    if A.dim != psi.dim:
        raise DimensionMismatch(f"observable dim {A.dim} != state dim {psi.dim}")
    average = expectation(A, psi)
    centred = A.apply(psi) - average * psi.amplitudes
    delta_a = float(np.linalg.norm(centred))
    if delta_a < EIGENSTATE_TOL:
        return Vaidman(average, delta_a, None)
    return Vaidman(average, delta_a, State(centred / delta_a))


@dataclass(frozen=True, eq=False)
class WeakValueReport:
    weak_value: complex
    average: float
    delta_a: float
    psi_bar: Optional[State]
    anomalous: complex
    eigenstate_flag: bool
    phase_phi: float
    phase_phi_bar: Optional[float]
    overlap: complex
    bar_overlap: complex

    @property
    def is_anomalous(self) -> bool:
        return abs(self.anomalous) > IDENTITY_TOL


def decompose_weak_value(A: Observable, e: PpsEnsemble) -> WeakValueReport:
    wv = weak_value(A, e)
    average, delta_a, psi_bar = vaidman_decompose(A, e.pre)
    ov = e.overlap
    if psi_bar is None:
        bar_ov = 0j
        anomalous = 0j
    else:
        bar_ov = inner(e.post, psi_bar)
        anomalous = delta_a * bar_ov / ov
    phi_bar = phase(bar_ov) if abs(bar_ov) > PHASE_ZERO else None
    return WeakValueReport(
        weak_value=wv,
        average=average,
        delta_a=delta_a,
        psi_bar=psi_bar,
        anomalous=anomalous,
        eigenstate_flag=psi_bar is None,
        phase_phi=phase(ov),
        phase_phi_bar=phi_bar,
        overlap=ov,
        bar_overlap=bar_ov,
    )


class PhaseAnalysis(NamedTuple):
    re_predicted: float
    im_predicted: float
    in_phase: bool
    phase_difference: float


def phase_analysis(report: WeakValueReport) -> PhaseAnalysis:
    """Rebuild Re/Im of the weak value from moduli and relative phases."""
    if report.phase_phi_bar is None:
        raise PhaseUndefined(
            "psi is an eigenstate" if report.eigenstate_flag else "<phi|psi_bar> = 0"
        )
    diff = principal_angle(report.phase_phi_bar - report.phase_phi)
    ratio = report.delta_a * abs(report.bar_overlap) / abs(report.overlap)
    in_phase = abs(report.bar_overlap.imag) < IDENTITY_TOL and report.bar_overlap.real > 0
    return PhaseAnalysis(
        re_predicted=report.average + ratio * math.cos(diff),
        im_predicted=ratio * math.sin(diff),
        in_phase=in_phase,
        phase_difference=diff,
    )


def is_multiple_of(angle: float, step: float, odd: bool = False, tol: float = PHASE_TOL) -> bool:
    """Whether ``angle`` is an (odd) integer multiple of ``step`` within ``tol`` radians."""
    n = round(angle / step)
    if odd and n % 2 == 0:
        return False
    return abs(angle - n * step) <= tol


class IntermediateTerm(NamedTuple):
    weight: float
    weak_value: Optional[complex]
    anomalous: Optional[complex]
    skipped: bool


class IdentityResolution(NamedTuple):
    weighted_sum: float
    anomalous_weighted_sum: complex
    terms: list


def _basis_matrix(basis) -> np.ndarray:
    if isinstance(basis, np.ndarray):
        return np.asarray(basis, dtype=complex)
    return np.column_stack([np.asarray(b.amplitudes if isinstance(b, State) else b, dtype=complex)
                            for b in basis])


def identity_resolution_average(
    A: Observable, psi: State, basis: Sequence[State]
) -> IdentityResolution:
    """Write ``<A>`` as the weight-averaged weak values over post-selections ``basis``.

    ``basis`` is a sequence of states or a matrix whose columns are the
    basis vectors.  Terms with ``|<psi|psi_k>|^2 < 1e-14`` have no defined
    weak value; they are flagged ``skipped`` and contribute exactly 0.
    """
    vecs = _basis_matrix(basis)
    if vecs.shape[0] != A.dim or psi.dim != A.dim:
        raise DimensionMismatch("basis, state and observable dimensions differ")
    gram = vecs.conj().T @ vecs
    if np.max(np.abs(gram - np.eye(gram.shape[0]))) >= IDENTITY_TOL:
        raise NonOrthonormalBasis("basis vectors are not orthonormal")
    if vecs.shape[1] != A.dim or np.max(np.abs(vecs @ vecs.conj().T - np.eye(A.dim))) >= IDENTITY_TOL:
        raise IncompleteBasis(f"{vecs.shape[1]} vectors do not resolve the identity in dim {A.dim}")

    _, delta_a, psi_bar = vaidman_decompose(A, psi)
    amps = vecs.conj().T @ psi.amplitudes  # <psi_k|psi>
    numerators = vecs.conj().T @ A.apply(psi)  # <psi_k|A|psi>
    bar_amps = vecs.conj().T @ psi_bar.amplitudes if psi_bar is not None else None

    terms = []
    total = 0j
    anomalous_total = 0j
    for k in range(vecs.shape[1]):
        c = complex(amps[k])
        weight = abs(c) ** 2
        if weight < ZERO_WEIGHT:
            terms.append(IntermediateTerm(weight, None, None, True))
            continue
        wv = complex(numerators[k]) / c
        anom = delta_a * complex(bar_amps[k]) / c if bar_amps is not None else 0j
        terms.append(IntermediateTerm(weight, wv, anom, False))
        total += weight * wv
        anomalous_total += weight * anom
    return IdentityResolution(total.real, anomalous_total, terms)


@dataclass(frozen=True)
class BoundsReport:
    anomaly_modulus: float
    lower: float
    upper: float
    lambda_max_gap: float
    lambda_gap_bound: float

    def violations(self, slack: float = BOUND_SLACK) -> dict:
        """Map of each inequality broken by more than ``slack`` to its raw ``lhs - rhs``."""
        excess = {
            "lower_bound": self.lower - self.anomaly_modulus,
            "upper_bound": self.anomaly_modulus - self.upper,
            "lambda_max_gap": self.lambda_max_gap - self.lambda_gap_bound,
        }
        return {name: x for name, x in excess.items() if x > slack}

    @property
    def satisfied(self) -> bool:
        return not self.violations()


def anomaly_bounds(A: Observable, e: PpsEnsemble, report: WeakValueReport = None) -> BoundsReport:
    if report is None:
        report = decompose_weak_value(A, e)
    scale = report.delta_a / abs(report.overlap)
    return BoundsReport(
        anomaly_modulus=abs(report.anomalous),
        lower=report.delta_a * abs(report.bar_overlap),
        upper=scale,
        lambda_max_gap=report.weak_value.real - A.lambda_max,
        lambda_gap_bound=scale,
    )


class Tradeoff(NamedTuple):
    lhs: float
    rhs: float
    satisfied: bool


def tradeoff_check(
    A: Observable, B: Observable, e: PpsEnsemble, slack: float = BOUND_SLACK
) -> Tradeoff:
    """Compare ``|dA_w| |dB_w|`` with ``|<[A,B]>|/2 |<phi|psi_bar_A>| |<phi|psi_bar_B>|``."""
    if A.dim != B.dim:
        raise DimensionMismatch(f"A dim {A.dim} != B dim {B.dim}")
    ra = decompose_weak_value(A, e)
    rb = decompose_weak_value(B, e)
    comm = complex(np.vdot(e.pre.amplitudes, commutator(A, B) @ e.pre.amplitudes))
    if ra.eigenstate_flag or rb.eigenstate_flag:
        # Robertson: |<[A,B]>| <= 2 dA dB, so an eigenstate forces it to ~0.
        if abs(comm) > 2 * ra.delta_a * rb.delta_a + PHYSICAL_TOL:
            raise InequalityViolation(
                f"|<[A,B]>| = {abs(comm):.3e} with dA={ra.delta_a:.3e}, dB={rb.delta_a:.3e}"
            )
    lhs = abs(ra.anomalous) * abs(rb.anomalous)
    rhs = 0.5 * abs(comm) * abs(ra.bar_overlap) * abs(rb.bar_overlap)
    return Tradeoff(lhs, rhs, lhs >= rhs - slack)


def equivalent_pps(e: PpsEnsemble) -> PpsEnsemble:
    """Rephase the pre-selection so that ``<phi|chi>`` is real and positive."""
    ov = e.overlap
    if ov.imag == 0.0 and ov.real > 0.0:
        return PpsEnsemble(e.pre, e.post, e.overlap_threshold)
    multiplier = ov.conjugate() / abs(ov)  # <psi|phi>/|<psi|phi>|
    chi = State(multiplier * e.pre.amplitudes)
    return PpsEnsemble(chi, e.post, e.overlap_threshold)
