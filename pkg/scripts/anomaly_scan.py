"""Sweep the post-selection toward orthogonality and tabulate the anomaly and its bounds.

    python3 scripts/anomaly_scan.py --steps 25
"""
import argparse
import math

import numpy as np

from wvkit import PpsEnsemble, anomaly_bounds, decompose_weak_value, pauli
from wvkit.hilbert import State, normalize


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=20)
    ap.add_argument("--min-overlap", type=float, default=1e-3)
    args = ap.parse_args()

    A = pauli("z")
    psi = normalize([1, 1])
    # phi(theta) = cos(theta)|+> + sin(theta)|->, so |<phi|psi>| = cos(theta)
    theta_max = math.acos(args.min_overlap)
    print(f"{'overlap':>10} {'Re A_w':>12} {'|anomaly|':>12} {'lower':>10} {'upper':>12}")
    for theta in np.linspace(0, theta_max, args.steps):
        phi = State(math.cos(theta) * psi.amplitudes
                    + math.sin(theta) * np.array([1, -1]) / math.sqrt(2))
        e = PpsEnsemble(psi, phi)
        r = decompose_weak_value(A, e)
        b = anomaly_bounds(A, e, r)
        print(f"{abs(e.overlap):10.4g} {r.weak_value.real:12.5g} {b.anomaly_modulus:12.5g}"
              f" {b.lower:10.4g} {b.upper:12.5g}")


if __name__ == "__main__":
    main()
