"""
Small dense Hilbert-space linear algebra: states, Hermitian observables,
tensor products and seeded random sampling.

Tolerance tiers used across the package:

* ``CONSTRUCTION_TOL`` (1e-12): representation checks (normalization, Hermiticity)
* ``IDENTITY_TOL`` (1e-10): single-operation algebraic identities
* ``PHYSICAL_TOL`` (1e-8): quantities accumulated over several operations
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import (
    ConvergenceFailure,
    DimensionMismatch,
    HermiticityViolation,
    InvalidDimension,
    NegativeVariance,
    NotNormalized,
    ParseError,
)

CONSTRUCTION_TOL = 1e-12
IDENTITY_TOL = 1e-10
PHYSICAL_TOL = 1e-8

__all__ = [
    "State",
    "Observable",
    "normalize",
    "inner",
    "expectation",
    "uncertainty",
    "eig",
    "commutator",
    "tensor",
    "tensor_op",
    "random_state",
    "random_hermitian",
    "random_unitary",
    "same_ray",
    "pauli",
    "state_to_json",
    "state_from_json",
    "matrix_to_json",
    "matrix_from_json",
]


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class State:
    """Normalized ket with ``dim >= 2`` complex amplitudes.

    Amplitudes are stored exactly as given; use :func:`normalize` to build a
    state from an arbitrary non-zero vector.
    """

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1:
            raise InvalidDimension(f"state amplitudes must be 1-d, got shape {amps.shape}")
        if amps.size < 2:
            raise InvalidDimension(f"state dimension must be >= 2, got {amps.size}")
        norm2 = float(np.vdot(amps, amps).real)
        if abs(norm2 - 1.0) > CONSTRUCTION_TOL:
            raise NotNormalized(f"sum |a_k|^2 = {norm2!r}, expected 1")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def __array__(self, dtype=None, copy=None):
        return self.amplitudes if dtype is None else self.amplitudes.astype(dtype)

    def __len__(self):
        return self.dim


def normalize(vector) -> State:
    vec = np.asarray(vector, dtype=complex)
    norm = np.linalg.norm(vec)
    if norm == 0.0 or not np.isfinite(norm):
        raise NotNormalized("cannot normalize a zero or non-finite vector")
    return State(vec / norm)


@dataclass(frozen=True, eq=False)
class Observable:
    """Hermitian matrix together with its ascending eigendecomposition.

    The eigensystem is computed once at construction.  A caller that already
    knows it (e.g. a Fourier-diagonal momentum operator) may pass
    ``spectrum`` and ``eigenvectors``; they are checked against ``matrix``.
    """

    matrix: np.ndarray
    spectrum: np.ndarray = field(default=None)
    eigenvectors: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        mat = _frozen(self.matrix)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise InvalidDimension(f"observable must be square, got shape {mat.shape}")
        if mat.shape[0] < 2:
            raise InvalidDimension("observable dimension must be >= 2")
        residue = np.max(np.abs(mat - mat.conj().T))
        if residue >= CONSTRUCTION_TOL:
            raise HermiticityViolation(f"max |A_jk - conj(A_kj)| = {residue:.3e}")
        object.__setattr__(self, "matrix", mat)

        if self.spectrum is None:
            spectrum, vectors = _eigh(mat)
        else:
            spectrum = np.asarray(self.spectrum, dtype=float)
            vectors = np.asarray(self.eigenvectors, dtype=complex)
            order = np.argsort(spectrum, kind="stable")
            spectrum, vectors = spectrum[order], vectors[:, order]
            recon = (vectors * spectrum) @ vectors.conj().T
            if np.max(np.abs(recon - mat)) >= IDENTITY_TOL:
                raise ValueError("supplied eigensystem does not reconstruct the matrix")
        spectrum = np.array(spectrum, dtype=float)
        spectrum.flags.writeable = False
        object.__setattr__(self, "spectrum", spectrum)
        object.__setattr__(self, "eigenvectors", _frozen(vectors))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.spectrum[0])

    @property
    def lambda_max(self) -> float:
        return float(self.spectrum[-1])

    def apply(self, psi: State) -> np.ndarray:
        _check_dims(self.dim, psi.dim)
        return self.matrix @ psi.amplitudes

    def __array__(self, dtype=None, copy=None):
        return self.matrix if dtype is None else self.matrix.astype(dtype)


def _eigh(mat):
    try:
        return np.linalg.eigh(mat)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc


def _check_dims(da: int, db: int):
    if da != db:
        raise DimensionMismatch(f"dimension {da} != {db}")


def inner(a: State, b: State) -> complex:
    """Return <a|b> (antilinear in the first argument)."""
    _check_dims(a.dim, b.dim)
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def expectation(A: Observable, psi: State) -> float:
    value = complex(np.vdot(psi.amplitudes, A.apply(psi)))
    if abs(value.imag) >= IDENTITY_TOL:
        raise HermiticityViolation(f"<psi|A|psi> has imaginary part {value.imag:.3e}")
    return value.real


def uncertainty(A: Observable, psi: State) -> float:
    """Standard deviation of ``A`` in ``psi``.

    Evaluated as ``||(A - <A>)|psi>||``, which equals the square root of
    ``<psi|(A - <A>)^2|psi>`` without the cancellation of ``<A^2> - <A>^2``.
    """
    centred = A.apply(psi) - expectation(A, psi) * psi.amplitudes
    variance = float(np.vdot(centred, centred).real)
    if variance < -IDENTITY_TOL:
        raise NegativeVariance(f"variance {variance:.3e}")
    return float(np.sqrt(max(variance, 0.0)))


def eig(A: Observable):
    """Return ``(spectrum, eigenvectors)``; column ``k`` pairs with ``spectrum[k]``."""
    return A.spectrum, A.eigenvectors


def commutator(A: Observable, B: Observable) -> np.ndarray:
    _check_dims(A.dim, B.dim)
    return A.matrix @ B.matrix - B.matrix @ A.matrix


def tensor(a: State, b: State) -> State:
    """Kronecker product, system (``a``) index slowest-varying."""
    return State(np.kron(a.amplitudes, b.amplitudes))


def tensor_op(A: Observable, B: Observable) -> Observable:
    spectrum = np.kron(A.spectrum, B.spectrum)
    vectors = np.kron(A.eigenvectors, B.eigenvectors)
    return Observable(np.kron(A.matrix, B.matrix), spectrum, vectors)


def same_ray(a: State, b: State, tol: float = IDENTITY_TOL) -> bool:
    """True when ``a`` and ``b`` differ only by a global phase."""
    return abs(abs(inner(a, b)) - 1.0) < tol


def _complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def _checked_dim(dim) -> int:
    if int(dim) != dim or dim < 2:
        raise InvalidDimension(f"dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def random_state(dim: int, rng=None) -> State:
    """Haar-random state. ``rng`` is a seed or a ``numpy.random.Generator``."""
    dim = _checked_dim(dim)
    rng = np.random.default_rng(rng)
    return normalize(_complex_gaussian(rng, dim))


def random_hermitian(dim: int, rng=None) -> Observable:
    """GUE-style observable ``(G + G^dagger)/2``."""
    dim = _checked_dim(dim)
    rng = np.random.default_rng(rng)
    g = _complex_gaussian(rng, (dim, dim))
    return Observable((g + g.conj().T) / 2)


def random_unitary(dim: int, rng=None) -> np.ndarray:
    """Haar unitary from QR of a complex Gaussian matrix (phase-corrected)."""
    dim = _checked_dim(dim)
    rng = np.random.default_rng(rng)
    q, r = np.linalg.qr(_complex_gaussian(rng, (dim, dim)))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


_PAULI = {
    "i": [[1, 0], [0, 1]],
    "x": [[0, 1], [1, 0]],
    "y": [[0, -1j], [1j, 0]],
    "z": [[1, 0], [0, -1]],
}


def pauli(name: str) -> Observable:
    return Observable(np.array(_PAULI[name.lower()], dtype=complex))


# JSON-compatible interchange: complex -> [re, im], matrices row-major.

def complex_to_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair, where: str = "value") -> complex:
    if isinstance(pair, (int, float)) and not isinstance(pair, bool):
        return complex(pair)
    if (
        not isinstance(pair, (list, tuple))
        or len(pair) != 2
        or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in pair)
    ):
        raise ParseError(f"{where}: expected [re, im], got {pair!r}")
    return complex(pair[0], pair[1])


def vector_from_json(data, where: str = "state") -> np.ndarray:
    if not isinstance(data, (list, tuple)):
        raise ParseError(f"{where}: expected a list of [re, im] pairs")
    return np.array(
        [complex_from_json(v, f"{where}[{k}]") for k, v in enumerate(data)], dtype=complex
    )


def state_to_json(psi: State) -> list:
    return [complex_to_json(a) for a in psi.amplitudes]


def state_from_json(data, where: str = "state") -> State:
    return State(vector_from_json(data, where))


def matrix_to_json(A) -> list:
    mat = A.matrix if isinstance(A, Observable) else np.asarray(A)
    return [[complex_to_json(v) for v in row] for row in mat]


def matrix_from_json(data, where: str = "matrix") -> np.ndarray:
    if not isinstance(data, (list, tuple)) or not data:
        raise ParseError(f"{where}: expected a non-empty list of rows")
    rows = [vector_from_json(row, f"{where}[{j}]") for j, row in enumerate(data)]
    if len({r.size for r in rows}) != 1:
        raise ParseError(f"{where}: ragged rows")
    return np.vstack(rows)


def observable_from_json(data, where: str = "observable") -> Observable:
    return Observable(matrix_from_json(data, where))


def basis_from_states(states: Sequence[State]) -> np.ndarray:
    """Stack states as the columns of a matrix."""
    return np.column_stack([s.amplitudes for s in states])
