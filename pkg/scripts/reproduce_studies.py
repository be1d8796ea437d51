"""Reference-beam studies printed next to the published reference values.

Run: python scripts/reproduce_studies.py [--mc]
"""

import argparse

import numpy as np

from spectral_beam.basis import BoundaryCondition
from spectral_beam.material import ProfileKind
from spectral_beam.pipeline import BeamCase, build_model, evaluate
from spectral_beam.solvers import fit_backbone_beta, hbm_backbone
from spectral_beam.studies import (
    SweepSpec,
    bc_comparison,
    convergence_study,
    distribution_comparison,
    eta_sensitivity_slope,
    fit_quadratic_v,
    mixed_partial,
    sweep,
)
from spectral_beam.uq import MCProtocol, monte_carlo, pipeline_quantity, table4_uncertainties


def row(label, ours, reference):
    print(f"{label:<34} {ours:<28} {reference}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--mc", action="store_true", help="also run the 5 x 1000 Monte Carlo study")
    ap.add_argument("--threads", type=int, default=4)
    args = ap.parse_args()

    base = BeamCase()
    row("quantity", "this implementation", "reference")

    v = (0.0, 0.05, 0.10, 0.15, 0.20)
    rows = sweep(SweepSpec("V_cnt", v, base), threads=args.threads)
    f = [r.f_hat for r in rows]
    row("f_hat gain V 0 -> 0.2", f"{100 * (f[-1] / f[0] - 1):.0f}%", "66%")
    fit = fit_quadratic_v(v, f)
    c = fit.coefficients
    row("quadratic fit (c1, c2)", f"({c[1]:.2f}, {c[2]:.2f}) R2={fit.r_squared:.4f}", "(3.65, -1.82)")

    eta = eta_sensitivity_slope(np.linspace(0.7, 1.0, 7), base, threads=args.threads)
    row("d f_hat / d eta_E", f"{eta.coefficients[1]:.3f} R2={eta.r_squared:.4f}", "0.62")

    model, _, _ = build_model(base)
    scale = evaluate(base.replace(amplitude=0.0)).f_hat
    curve = hbm_backbone(model, 1, np.linspace(0.1, 1.0, 10), n_harmonics=3, frequency_scale=scale)
    beta, r2 = fit_backbone_beta(curve)
    row("backbone beta", f"{beta:.4f} R2={r2:.4f}", "0.18")

    conv = convergence_study()
    slope = "skipped" if conv.fit is None else f"{conv.fit.coefficients[1]:.2f}"
    row("log eps vs N slope", slope, "-0.82")
    row("eps(10)", f"{conv.eps_rel[conv.N.index(10)]:.2e}", "1.6e-3")

    bcs = bc_comparison(base)
    row("f_hat CC / SS (CC baseline)", f"{bcs[BoundaryCondition.CC]:.3f} / {bcs[BoundaryCondition.SS]:.3f}", "")

    dist = distribution_comparison(base)
    ei = dist[ProfileKind.FG_X][0] / dist[ProfileKind.UD][0]
    fr = dist[ProfileKind.FG_X][1] / dist[ProfileKind.UD][1]
    row("FG_X / UD: EI, f_hat", f"{ei:.3f}, {fr:.3f}", "")

    value, stencil = mixed_partial(base)
    row("d2 f_hat / dV d(w0/h)", f"{value:.3f}", "1.24")
    print(f"  ({stencil})")

    if args.mc:
        q = pipeline_quantity(base, baseline=base)
        r = monte_carlo(MCProtocol(), table4_uncertainties(), q, threads=args.threads)
        lo, hi = r.ci
        row("MC mean f_hat", f"{r.mean:.3f} [{lo:.3f}, {hi:.3f}]", "1.72")


if __name__ == "__main__":
    main()
