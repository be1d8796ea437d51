"""``spectral-beam`` command-line interface.

Exit codes: 0 success, 1 validation failure, 2 configuration error,
3 numerical error. The config path comes from ``--config`` or the
``SPECTRAL_BEAM_CONFIG`` environment variable; without either, the reference
beam defaults are used.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigError, DomainError, NumericalError, ProfileError, SpectralBeamError
from .config import default_config, load_config
from .io import config_hash, fmt, save_model, write_csv

ENV_CONFIG = "SPECTRAL_BEAM_CONFIG"

EXIT_OK, EXIT_VALIDATION, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _meta(cfg, seed=None, **extra):
    meta = {
        "version": __version__,
        "config_hash": config_hash(cfg.canonical()),
        "seed": "none" if seed is None else seed,
    }
    meta.update(extra)
    return meta


def _out(args, cfg, name):
    d = Path(args.out or cfg["output"]["directory"])
    d.mkdir(parents=True, exist_ok=True)
    return d / name


def cmd_modes(cfg, args):
    from .pipeline import baseline_frequency, build_model
    from .solvers import linear_modes

    case = cfg.case()
    model, _, nd = build_model(case)
    k = min(cfg["model"]["modes"], model.N)
    res = linear_modes(model, k)
    base = baseline_frequency(case)
    rows = [(i + 1, w, w * nd.f_ref, w * nd.f_ref / base) for i, w in enumerate(res.omega_hat)]
    write_csv(_out(args, cfg, "modes.csv"), ("mode_index", "omega_hat", "f_hz", "f_hat"), rows, _meta(cfg))
    return EXIT_OK


def cmd_backbone(cfg, args):
    from .pipeline import build_model, evaluate
    from .solvers import fit_backbone_beta, hbm_backbone

    case = cfg.case()
    model, _, _ = build_model(case)
    scale = evaluate(case.replace(amplitude=0.0)).f_hat
    grid = cfg["solver"]["amplitude_grid"]
    curve = hbm_backbone(
        model, 1, grid, n_harmonics=case.n_harmonics, config=cfg.solver_config(), frequency_scale=scale
    )
    extra = {}
    if sum(a <= 1.0 for a in grid) >= 4:
        beta, r2 = fit_backbone_beta(curve)
        extra = {"beta": beta, "beta_r_squared": r2}
    rows = [(s.amplitude, s.f_hat, curve.n_harmonics) for s in curve.samples]
    write_csv(_out(args, cfg, "backbone.csv"), ("amplitude", "f_hat", "n_harmonics"), rows, _meta(cfg, **extra))
    return EXIT_OK


def cmd_sweep(cfg, args):
    from .studies import SweepSpec, fit_linear, fit_quadratic_v, sweep

    st = cfg["study"]
    param = st["param"]
    values = tuple(int(v) for v in st["values"]) if param == "N" else st["values"]
    rows = sweep(SweepSpec(param, values, cfg.case()), threads=args.threads)
    extra = {}
    if param == "V_cnt" and len(rows) >= 4:
        fit = fit_quadratic_v([r.value for r in rows], [r.f_hat for r in rows])
        extra = {"fit": "quadratic-in-V", "fit_coefficients": " ".join(fmt(c) for c in fit.coefficients),
                 "fit_r_squared": fit.r_squared}
    elif param == "eta_E" and len(rows) >= 3:
        fit = fit_linear([r.value for r in rows], [r.f_hat for r in rows])
        extra = {"fit": "linear-in-eta", "fit_coefficients": " ".join(fmt(c) for c in fit.coefficients),
                 "fit_r_squared": fit.r_squared}
    table = [(r.param, r.value, r.f_lin_hz, r.f_hat, r.alpha, r.EI) for r in rows]
    write_csv(_out(args, cfg, "sweep.csv"), ("param", "value", "f_lin_hz", "f_hat", "alpha", "EI"), table,
              _meta(cfg, **extra))
    return EXIT_OK


def cmd_converge(cfg, args):
    from .studies import convergence_study

    st = cfg["study"]
    res = convergence_study(st["N_list"], st["reference_N"], cfg.case())
    extra = {"reference_N": res.reference_N}
    if res.fit is not None:
        extra.update(fit="log-linear-in-N", fit_intercept=res.fit.coefficients[0],
                     fit_slope=res.fit.coefficients[1], fit_r_squared=res.fit.r_squared)
    else:
        extra["fit"] = "skipped (all points at round-off floor)"
    rows = list(zip(res.N, res.f_hat, res.eps_rel))
    write_csv(_out(args, cfg, "converge.csv"), ("N", "f_hat", "eps_rel"), rows, _meta(cfg, **extra))
    return EXIT_OK


def cmd_uq(cfg, args):
    from .uq import design_ranges, monte_carlo, pipeline_quantity, sobol_first_order, table4_uncertainties

    u = cfg["uq"]
    seed = args.seed if args.seed is not None else u["seed"]
    case = cfg.case()
    if u["analysis"] == "mc":
        proto = cfg.protocol(seed)
        inputs = table4_uncertainties(u["family"])
        # fixed reference beam: the nominal unreinforced beam
        q = pipeline_quantity(case, baseline=case, config=cfg.solver_config())
        r = monte_carlo(proto, inputs, q, threads=args.threads)
        lo, hi = r.ci
        clips = " ".join(f"{k}:{v}" for k, v in r.clip_counts.items())
        meta = _meta(cfg, seed, analysis="mc", n_mc=proto.n_mc, R=proto.R, confidence=proto.confidence,
                     failed=r.n_failed, clipped=clips)
        write_csv(_out(args, cfg, "uq.csv"), ("quantity", "mean", "run_sd", "ci_lo", "ci_hi", "seed"),
                  [("f_hat", r.mean, r.run_sd, lo, hi, seed)], meta)
    else:
        inputs = design_ranges() if u["ranges"] == "design" else table4_uncertainties(u["family"])
        baseline = None if u["ranges"] == "design" else case
        q = pipeline_quantity(case, baseline=baseline, config=cfg.solver_config())
        r = sobol_first_order(inputs, q, n_base=u["n_base"], seed=seed, n_bootstrap=u["n_bootstrap"],
                              threads=args.threads)
        meta = _meta(cfg, seed, analysis="sobol", n_base=u["n_base"], n_bootstrap=u["n_bootstrap"],
                     ranges=u["ranges"], flagged=" ".join(r.flagged) or "none")
        write_csv(_out(args, cfg, "uq.csv"), ("param", "sobol_s1", "sobol_sd"),
                  list(zip(r.names, r.indices, r.index_sd)), meta)
    return EXIT_OK


def cmd_export(cfg, args):
    from .pipeline import build_model

    model, _, _ = build_model(cfg.case())
    save_model(model, _out(args, cfg, "model.txt"))
    return EXIT_OK


def cmd_validate(cfg, args):
    from .validation import format_table, run_suite

    results = run_suite(nonlinear_factor=args.perturb_nonlinear_factor)
    sys.stdout.write(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VALIDATION


COMMANDS = {
    "modes": cmd_modes,
    "backbone": cmd_backbone,
    "sweep": cmd_sweep,
    "converge": cmd_converge,
    "uq": cmd_uq,
    "export": cmd_export,
    "validate": cmd_validate,
}


def build_parser():
    p = argparse.ArgumentParser(prog="spectral-beam", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"spectral-beam {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help=f"config file (default: ${ENV_CONFIG})")
        s.add_argument("--out", help="output directory (default: output.directory)")
        s.add_argument("--seed", type=int, help="unsigned 64-bit seed for uq")
        s.add_argument("--threads", type=int, default=1)
        if name == "validate":
            s.add_argument("--perturb-nonlinear-factor", type=float, default=None,
                           help=argparse.SUPPRESS)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        path = args.config or os.environ.get(ENV_CONFIG)
        cfg = load_config(path) if path else default_config()
        cfg.require(args.command)
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise ConfigError("--seed must be an unsigned 64-bit integer")
        if args.threads < 1:
            raise ConfigError("--threads must be at least 1")
        if args.command != "validate":
            cfg.case()  # enforce model invariants before any computation
    except (ConfigError, DomainError, ProfileError, ValueError) as exc:
        print(f"spectral-beam: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, DomainError, ProfileError) as exc:
        print(f"spectral-beam: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, SpectralBeamError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"spectral-beam: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
