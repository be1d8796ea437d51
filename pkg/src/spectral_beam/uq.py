"""Monte Carlo replication and first-order Sobol indices.

Random numbers come from numpy's Philox counter-based generator. A single
``SeedSequence(seed)`` is spawned into independent child streams: one per
Monte Carlo run, and for a Sobol study one each for the ``A`` and ``B``
matrices and one for the bootstrap. Samples are drawn up front, so results do
not depend on evaluation order or thread count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Sequence

import numpy as np
from scipy import stats

from .errors import DomainError, SpectralBeamError

PARAMETERS = (
    "E_m", "rho_m", "E_cnt", "rho_cnt", "eta_E", "L", "b", "h", "V_cnt", "w0_over_h",
    "bc", "distribution",
)

_PHYSICAL_BOUNDS = {
    "eta_E": (np.nextafter(0.0, 1.0), 1.0),
    "V_cnt": (0.0, np.nextafter(1.0, 0.0)),
}
_POSITIVE = ("E_m", "rho_m", "E_cnt", "rho_cnt", "L", "b", "h", "w0_over_h")


class UQError(SpectralBeamError):
    pass


class DegenerateVarianceError(UQError, ValueError):
    pass


@dataclass(frozen=True)
class ParamDistribution:
    """Distribution of one input.

    ``kind`` is ``"normal"`` (``a`` = mean, ``b`` = SD), ``"uniform"``
    (``a`` = low, ``b`` = high) or ``"discrete"`` (uniform over ``choices``).
    """

    name: str
    kind: str
    a: float = 0.0
    b: float = 0.0
    choices: tuple = ()

    def __post_init__(self):
        if self.kind not in ("normal", "uniform", "discrete"):
            raise DomainError(f"unknown distribution kind {self.kind!r}")
        if self.kind == "normal" and not self.b >= 0:
            raise DomainError(f"{self.name}: standard deviation must be nonnegative")
        if self.kind == "uniform" and not self.b >= self.a:
            raise DomainError(f"{self.name}: uniform bounds must satisfy low <= high")
        if self.kind == "discrete" and not self.choices:
            raise DomainError(f"{self.name}: discrete distribution needs choices")

    @classmethod
    def normal(cls, name, mean, sd):
        return cls(name, "normal", float(mean), float(sd))

    @classmethod
    def uniform(cls, name, low, high):
        return cls(name, "uniform", float(low), float(high))

    @classmethod
    def discrete(cls, name, choices):
        return cls(name, "discrete", choices=tuple(choices))

    def bounds(self):
        if self.name in _PHYSICAL_BOUNDS:
            return _PHYSICAL_BOUNDS[self.name]
        if self.name in _POSITIVE:
            return (np.nextafter(0.0, 1.0), np.inf)
        return (-np.inf, np.inf)

    def draw(self, rng, n):
        """``n`` samples plus the number of values clipped to physical bounds."""
        if self.kind == "discrete":
            idx = rng.integers(0, len(self.choices), size=n)
            return np.array(self.choices, dtype=object)[idx], 0
        if self.kind == "normal":
            x = self.a + self.b * rng.standard_normal(n)
        else:
            x = self.a + (self.b - self.a) * rng.random(n)
        lo, hi = self.bounds()
        clipped = int(np.count_nonzero((x < lo) | (x > hi)))
        return np.clip(x, lo, hi), clipped


@dataclass(frozen=True)
class RandomInputSpec:
    params: tuple

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise DomainError("duplicate parameter names")

    @property
    def names(self):
        return tuple(p.name for p in self.params)

    def sample(self, rng, n):
        """Column samples ``{name: array}`` and per-parameter clip counts."""
        cols, clips = {}, {}
        for p in self.params:
            cols[p.name], clips[p.name] = p.draw(rng, n)
        return cols, clips


@dataclass(frozen=True)
class MCProtocol:
    n_mc: int = 1000
    R: int = 5
    seed: int = 20240601
    confidence: float = 0.95

    def __post_init__(self):
        if self.n_mc < 2 or self.R < 2:
            raise DomainError("n_mc and R must both be at least 2")
        if not 0 <= self.seed < 2**64:
            raise DomainError("seed must be an unsigned 64-bit integer")
        if not 0 < self.confidence < 1:
            raise DomainError("confidence must lie in (0, 1)")


@dataclass(frozen=True, eq=False)
class StudyResult:
    mean: float = float("nan")
    run_sd: float = float("nan")
    ci_half_width: float = float("nan")
    run_means: tuple = ()
    n_failed: int = 0
    clip_counts: Mapping[str, int] = field(default_factory=dict)
    names: tuple = ()
    indices: tuple = ()
    index_sd: tuple = ()
    flagged: tuple = ()
    seed: Optional[int] = None
    metadata: Mapping = field(default_factory=dict)

    @property
    def ci(self):
        return (self.mean - self.ci_half_width, self.mean + self.ci_half_width)


def _rows(cols, n):
    return [{k: v[i] for k, v in cols.items()} for i in range(n)]


def _evaluate_all(quantity, rows, threads):
    def safe(row):
        try:
            y = float(quantity(row))
        except Exception:
            return np.nan
        return y if np.isfinite(y) else np.nan

    if threads <= 1:
        return np.array([safe(r) for r in rows])
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return np.array(list(pool.map(safe, rows)))


def _streams(seed, n):
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def monte_carlo(protocol, inputs, quantity: Callable[[dict], float], threads=1):
    """Replicated Monte Carlo estimate of ``E[quantity(X)]``.

    Each of the ``R`` runs draws ``n_mc`` samples from its own substream. The
    grand mean is the average of run means; the interval is a Student-t
    interval with ``R - 1`` degrees of freedom on the run means. Failed
    evaluations are dropped and counted; more than 1 % failures aborts.
    """
    run_means, failed = [], 0
    clip_totals = {name: 0 for name in inputs.names}
    for rng in _streams(protocol.seed, protocol.R):
        cols, clips = inputs.sample(rng, protocol.n_mc)
        for k, c in clips.items():
            clip_totals[k] += c
        y = _evaluate_all(quantity, _rows(cols, protocol.n_mc), threads)
        bad = ~np.isfinite(y)
        failed += int(bad.sum())
        if failed > 0.01 * protocol.n_mc * protocol.R:
            raise UQError(
                f"{failed} failed evaluations exceed 1% of {protocol.n_mc * protocol.R} samples"
            )
        run_means.append(float(np.mean(y[~bad])))
    run_means = np.array(run_means)
    mean = float(run_means.mean())
    sd = float(run_means.std(ddof=1))
    t = float(stats.t.ppf(0.5 * (1 + protocol.confidence), protocol.R - 1))
    return StudyResult(
        mean=mean,
        run_sd=sd,
        ci_half_width=t * sd / np.sqrt(protocol.R),
        run_means=tuple(run_means.tolist()),
        n_failed=failed,
        clip_counts=clip_totals,
        names=inputs.names,
        seed=protocol.seed,
        metadata={"n_mc": protocol.n_mc, "R": protocol.R, "confidence": protocol.confidence},
    )


def _first_order(yA, yB, yAB):
    y = np.concatenate([yA, yB])
    var = np.var(y, ddof=1)
    if not var > 0:
        raise DegenerateVarianceError("output variance is zero; Sobol indices undefined")
    # centering f(B) leaves the expectation unchanged and cuts the variance
    return np.mean((yB - y.mean())[None, :] * (yAB - yA[None, :]), axis=1) / var


def sobol_first_order(inputs, quantity, n_base=1024, seed=0, n_bootstrap=100, threads=1):
    """First-order Sobol indices by the two-matrix (Saltelli) estimator.

    With independent sample matrices ``A`` and ``B`` and ``AB_i`` equal to
    ``A`` with column ``i`` taken from ``B``,

        S_i = mean((f(B) - mean f) * (f(AB_i) - f(A))) / Var(f)

    at a cost of ``n_base * (d + 2)`` evaluations. Standard deviations come
    from ``n_bootstrap`` resamples of the base rows. Indices outside
    ``[-0.05, 1.05]`` are flagged.
    """
    d = len(inputs.params)
    if d < 2:
        raise DomainError("Sobol analysis needs at least 2 parameters")
    if n_base < 256:
        raise DomainError("n_base must be at least 256")
    rng_a, rng_b, rng_boot = _streams(seed, 3)
    A, clipA = inputs.sample(rng_a, n_base)
    B, clipB = inputs.sample(rng_b, n_base)
    names = inputs.names
    blocks = [A, B] + [{k: (B[k] if k == name else A[k]) for k in names} for name in names]
    rows = [r for blk in blocks for r in _rows(blk, n_base)]
    y = _evaluate_all(quantity, rows, threads).reshape(d + 2, n_base)
    if not np.all(np.isfinite(y)):
        raise UQError(f"{int((~np.isfinite(y)).sum())} evaluations failed in the Sobol design")
    yA, yB, yAB = y[0], y[1], y[2:]
    S = _first_order(yA, yB, yAB)
    boot = np.empty((n_bootstrap, d))
    for k in range(n_bootstrap):
        idx = rng_boot.integers(0, n_base, size=n_base)
        boot[k] = _first_order(yA[idx], yB[idx], yAB[:, idx])
    sd = boot.std(axis=0, ddof=1) if n_bootstrap > 1 else np.zeros(d)
    flagged = tuple(names[i] for i in range(d) if not -0.05 <= S[i] <= 1.05)
    return StudyResult(
        names=names,
        indices=tuple(S.tolist()),
        index_sd=tuple(sd.tolist()),
        flagged=flagged,
        clip_counts={k: clipA[k] + clipB[k] for k in names},
        seed=seed,
        metadata={"n_base": n_base, "n_bootstrap": n_bootstrap, "evaluations": int(y.size)},
    )


def ishigami(x1, x2, x3, a=7.0, b=0.1):
    return np.sin(x1) + a * np.sin(x2) ** 2 + b * x3**4 * np.sin(x1)


def ishigami_first_order(a=7.0, b=0.1):
    """Closed-form first-order indices of the Ishigami function."""
    v1 = 0.5 * (1 + b * np.pi**4 / 5) ** 2
    v2 = a * a / 8
    var = v1 + v2 + b * b * np.pi**8 * (1 / 18 - 1 / 50)
    return v1 / var, v2 / var, 0.0


# --- inputs of the pipeline studies ---------------------------------------

def table4_uncertainties(distribution="normal"):
    """Constituent and geometric scatter as mean +/- SD."""
    entries = (
        ("E_m", 3.0e9, 0.2e9),
        ("rho_m", 1200.0, 60.0),
        ("E_cnt", 1.0e12, 0.05e12),
        ("rho_cnt", 1400.0, 70.0),
        ("eta_E", 0.80, 0.02),
        ("L", 0.200, 0.001),
        ("b", 0.0100, 0.0005),
        ("h", 0.0020, 0.0001),
    )
    if distribution == "normal":
        return RandomInputSpec(tuple(ParamDistribution.normal(n, m, s) for n, m, s in entries))
    if distribution == "uniform":
        # same mean and SD: half-width sqrt(3) SD
        w = np.sqrt(3.0)
        return RandomInputSpec(
            tuple(ParamDistribution.uniform(n, m - w * s, m + w * s) for n, m, s in entries)
        )
    raise DomainError(f"unknown distribution family {distribution!r}")


def design_ranges():
    """The five factors of the global sensitivity study over their design ranges."""
    return RandomInputSpec(
        (
            ParamDistribution.uniform("V_cnt", 0.0, 0.20),
            ParamDistribution.uniform("w0_over_h", 0.1, 1.0),
            ParamDistribution.discrete("bc", ("CC", "SS")),
            ParamDistribution.discrete("distribution", ("UD", "FG_LINEAR", "FG_X")),
            ParamDistribution.uniform("eta_E", 0.70, 1.00),
        )
    )


def pipeline_quantity(base=None, baseline=None, config=None):
    """Evaluator mapping a sample dict to f_hat through the full pipeline.

    ``baseline`` fixes the unreinforced reference beam; ``None`` uses each
    sampled case's own matrix-only beam.
    """
    from .pipeline import BeamCase, evaluate

    base = base or BeamCase()

    def quantity(sample):
        case = base
        for name in PARAMETERS:
            if name in sample:
                case = case.with_param(name, sample[name])
        return evaluate(case, baseline=baseline, config=config).f_hat

    return quantity


def sobol_ranking(result: StudyResult) -> Sequence[str]:
    order = np.argsort(result.indices)[::-1]
    return [result.names[i] for i in order]
