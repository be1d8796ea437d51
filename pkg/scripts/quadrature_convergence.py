"""Convergence of the fundamental frequency under both quadrature rules.

Run: python scripts/quadrature_convergence.py
"""

from spectral_beam.pipeline import BeamCase
from spectral_beam.quadrature import RuleKind
from spectral_beam.studies import convergence_study

N_LIST = tuple(range(6, 21))


def main():
    cols = {}
    for kind in RuleKind:
        res = convergence_study(N_LIST, 40, BeamCase(quadrature=kind))
        cols[kind] = res
    print(f"{'N':>3}  " + "  ".join(f"{k.value:>24}" for k in cols))
    for i, n in enumerate(N_LIST):
        print(f"{n:>3}  " + "  ".join(f"{cols[k].eps_rel[i]:>24.3e}" for k in cols))
    for k, res in cols.items():
        slope = "none" if res.fit is None else f"{res.fit.coefficients[1]:.3f}"
        print(f"{k.value}: log-linear slope {slope}, largest round-off floor {max(res.floor):.1e}")


if __name__ == "__main__":
    main()
