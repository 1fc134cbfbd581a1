"""Observed convergence order of the first-order meter predictions as the coupling shrinks.

    python3 scripts/pointer_convergence.py --k0 0.3
"""
import argparse

from wvkit import MeterConfig, PpsEnsemble, first_order_checks, pauli
from wvkit.hilbert import normalize
from wvkit.meter_sim import RESIDUAL_FLOOR, observed_order


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--k0", type=float, default=0.3)
    ap.add_argument("--n-grid", type=int, default=512)
    ap.add_argument("--post", default="2,-1+1j",
                    help="comma-separated post-selection amplitudes (pre is |+>)")
    args = ap.parse_args()

    A = pauli("z")
    e = PpsEnsemble(normalize([1, 1]), normalize([complex(s) for s in args.post.split(",")]))
    cfg = MeterConfig(n_grid=args.n_grid, k0=args.k0)
    g = 0.04
    print(f"{'g':>8} {'order_x':>8} {'order_m':>8} {'order_p':>8}")
    while g > 0.002:
        rep = first_order_checks(A, e, cfg, g)
        orders = [observed_order(*r) if r and min(r) > RESIDUAL_FLOOR else float("nan")
                  for r in (rep.residual_x, rep.residual_m, rep.residual_p)]
        print(f"{g:8.4f} " + " ".join(f"{q:8.3f}" for q in orders))
        g /= 2


if __name__ == "__main__":
    main()
