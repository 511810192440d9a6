"""Seeded, replicated Monte Carlo experiments tying the walks to the theory.

Each operation draws one replication per stream derived from
(seed, operation, replication index), materializes the per-replication
values indexed by replication number, and reduces them in index order, so a
report is a pure function of (parameters, seed) no matter how many workers
executed it.  Statistical pass bands are 3 batch-means standard errors where
the target is exact-order, and the spec'd relative tolerances where the
underlying convergence carries no rate.
"""

from __future__ import annotations

import math
import os
import time
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from . import analytic
from .graph_oracle import exact_component_distribution, marginal_sizes_via_walk
from .report import ExperimentReport
from .streams import replication_rng
from .walks import WalkPath, decompose, rescale_time

__all__ = [
    "RegimeGrid",
    "ExperimentReport",
    "run_supercrit_fluctuations",
    "run_bsc_fluctuations",
    "run_donsker_marginal",
    "run_doob_meyer_check",
    "run_local_time_check",
    "run_oracle_equivalence",
    "resolve_workers",
]

WORKERS_ENV = "SBFW_WORKERS"

# nu = n*eps^3 is the effective sample count of the barely super-critical
# CLT; below this the regime is too shallow for the asymptotics to show.
MIN_BSC_EFFECTIVE_N = 50.0


@dataclass(frozen=True)
class RegimeGrid:
    """Parameter grid for one regime.

    ``super_critical`` carries a strictly increasing c-grid in (1, inf);
    ``barely_super_critical`` carries a t-grid in (0, inf) plus the exponent
    a of eps_n = n^-a, constrained to (0, 1/3) so that n*eps^3 -> infinity.
    """

    kind: str
    n: int
    c_grid: tuple[float, ...] | None = None
    t_grid: tuple[float, ...] | None = None
    eps_exponent: float | None = None

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.kind == "super_critical":
            if not self.c_grid:
                raise ValueError("super_critical grid requires c_grid")
            grid = tuple(float(c) for c in self.c_grid)
            if any(c2 <= c1 for c1, c2 in zip(grid, grid[1:])):
                raise ValueError("c_grid must be strictly increasing")
            if grid[0] <= 1.0 + analytic.NEAR_CRITICAL_GUARD:
                raise ValueError("c_grid must lie in the super-critical region c > 1")
            object.__setattr__(self, "c_grid", grid)
        elif self.kind == "barely_super_critical":
            if not self.t_grid:
                raise ValueError("barely_super_critical grid requires t_grid")
            grid = tuple(float(t) for t in self.t_grid)
            if any(t2 <= t1 for t1, t2 in zip(grid, grid[1:])):
                raise ValueError("t_grid must be strictly increasing")
            if grid[0] <= 0.0:
                raise ValueError("t_grid must be strictly positive")
            a = self.eps_exponent
            if a is None or not 0.0 < a < 1.0 / 3.0:
                raise ValueError(
                    f"eps_exponent must lie in (0, 1/3), got {a}: "
                    "n*eps^3 must diverge"
                )
            object.__setattr__(self, "t_grid", grid)
            if self.n ** (1.0 - 3.0 * a) < MIN_BSC_EFFECTIVE_N:
                warnings.warn(
                    f"n^(1-3a) = {self.n ** (1.0 - 3.0 * a):.1f} < "
                    f"{MIN_BSC_EFFECTIVE_N:g}: the barely super-critical "
                    "asymptotics will be badly biased at this size",
                    UserWarning,
                    stacklevel=2,
                )
        else:
            raise ValueError(f"unknown regime kind {self.kind!r}")

    @property
    def eps(self) -> float:
        if self.kind != "barely_super_critical":
            raise ValueError("eps is defined only for the barely_super_critical kind")
        return float(self.n) ** (-self.eps_exponent)


# ----------------------------------------------------------------------
# replication plumbing


def resolve_workers(workers: int | None) -> int:
    """Explicit argument, else SBFW_WORKERS, else available parallelism."""
    if workers is not None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        return int(workers)
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            value = int(env)
        except ValueError as exc:
            raise ValueError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
        if value < 1:
            raise ValueError(f"{WORKERS_ENV} must be >= 1, got {value}")
        return value
    return os.cpu_count() or 1


def _map_reps(fn: Callable[[int], object], reps: int, workers: int | None) -> list:
    """Evaluate fn(0..reps-1), in index order, on the requested workers."""
    w = resolve_workers(workers)
    if w <= 1 or reps < 4:
        return [fn(r) for r in range(reps)]
    chunk = max(1, reps // (w * 8))
    with ProcessPoolExecutor(max_workers=w) as pool:
        return list(pool.map(fn, range(reps), chunksize=chunk))


def _n_batches(reps: int, requested: int = 20) -> int:
    return min(requested, max(2, reps // 5))


def _batch_se(values: np.ndarray, stat: Callable[[np.ndarray], np.ndarray], reps: int):
    """SE of a statistic from batch means over contiguous replication blocks."""
    b = _n_batches(reps)
    size = reps // b
    per_batch = np.array([stat(values[i * size : (i + 1) * size]) for i in range(b)])
    return per_batch.std(axis=0, ddof=1) / math.sqrt(b)


def _within_se(est, target, se, k: float = 3.0) -> bool:
    return bool(abs(est - target) <= k * se)


def _within_rel(est, target, rel: float) -> bool:
    return bool(abs(est - target) <= rel * abs(target))


def _fmt(x: float) -> str:
    return f"{x:g}"


# ----------------------------------------------------------------------
# per-replication kernels (module level: picklable for worker processes)


def _walk_base(xi_sorted: np.ndarray, mass: float) -> WalkPath:
    return WalkPath(xi_sorted, np.full(xi_sorted.size, mass), _trusted=True)


def _top_two(es) -> tuple[float, float]:
    top = es.largest_lengths(2)
    return float(top[0]), float(top[1]) if top.size > 1 else 0.0


def _supercrit_rep(rep: int, *, seed: int, n: int, c_grid: tuple[float, ...]):
    g = replication_rng(seed, "supercrit", rep)
    xi = g.standard_exponential(n)
    xi.sort()
    base = _walk_base(xi, 1.0 / n)  # walk at c = 1; rescale gives every c
    out = np.empty((2, len(c_grid)))
    for i, c in enumerate(c_grid):
        l1, l2 = _top_two(decompose(rescale_time(base, c)))
        out[0, i] = l1
        out[1, i] = l2
    return out


def _bsc_rep(rep: int, *, seed: int, n: int, t_grid: tuple[float, ...], eps: float):
    g = replication_rng(seed, "bsc", rep)
    xi = g.standard_exponential(n)
    xi.sort()
    base = _walk_base(xi, 1.0 / (n * eps))
    out = np.empty((2, len(t_grid)))
    for i, t in enumerate(t_grid):
        l1, l2 = _top_two(decompose(rescale_time(base, eps * (1.0 + t * eps))))
        out[0, i] = l1
        out[1, i] = l2
    return out


def _donsker_rep(rep: int, *, seed: int, n: int, c: float, s_points: tuple[float, ...]):
    g = replication_rng(seed, "donsker", rep)
    xi = g.standard_exponential(n)
    s = np.asarray(s_points)
    counts = (xi[:, None] <= c * s[None, :]).sum(axis=0)
    f = -np.expm1(-c * s)
    # sqrt(n) * (Z(s) - phi(s)) collapses to the centered empirical CDF
    return math.sqrt(n) * (counts / n - f)


def _local_time_rep(
    rep: int, *, seed: int, n: int, t: float, eps: float, min_length: float
):
    g = replication_rng(seed, "local_time", rep)
    xi = g.standard_exponential(n)
    xi.sort()
    base = _walk_base(xi, 1.0 / (n * eps))
    es = decompose(rescale_time(base, eps * (1.0 + t * eps)))
    keep = es.lengths >= min_length
    return es.lengths[keep], -es.pre_infima[keep]


def _oracle_rep(rep: int, *, seed: int, n: int, c: float):
    g = replication_rng(seed, "oracle", rep)
    return marginal_sizes_via_walk(n, c, g)


# ----------------------------------------------------------------------
# operations


def run_supercrit_fluctuations(
    grid: RegimeGrid, reps: int, seed: int, *, workers: int | None = None
) -> ExperimentReport:
    """Fluctuations of the largest excursion over a c-grid.

    Per replication one clock sample is drawn and rescaled to every grid
    density; the statistic is Y_n(c) = sqrt(n)*(largest/n - rho(c)).  The
    empirical mean, variance and covariance matrix are compared against the
    limit law (mean 0, covariance ``analytic.cov_supercrit_limit``); the
    coupling must make the largest length non-decreasing in c on every
    replication, and the second-largest must stay macroscopically small.
    """
    if grid.kind != "super_critical":
        raise ValueError(f"expected a super_critical grid, got {grid.kind!r}")
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    t0 = time.perf_counter()
    n, c_grid = grid.n, grid.c_grid
    k = len(c_grid)

    fn = partial(_supercrit_rep, seed=seed, n=n, c_grid=c_grid)
    res = np.stack(_map_reps(fn, reps, workers))  # (reps, 2, k)
    l1, l2 = res[:, 0, :], res[:, 1, :]

    rhos = np.array([analytic.rho(c) for c in c_grid])
    y = math.sqrt(n) * (l1 - rhos[None, :])

    mean = y.mean(axis=0)
    mean_se = _batch_se(y, lambda b: b.mean(axis=0), reps)
    var = y.var(axis=0, ddof=1)
    var_se = _batch_se(y, lambda b: b.var(axis=0, ddof=1), reps)
    cov = np.cov(y, rowvar=False, ddof=1).reshape(k, k)
    cov_se = _batch_se(
        y, lambda b: np.cov(b, rowvar=False, ddof=1).reshape(k, k), reps
    )

    cov_target = np.array(
        [[analytic.cov_supercrit_limit(a, b) for b in c_grid] for a in c_grid]
    )
    monotone = np.all(np.diff(l1, axis=1) >= 0.0, axis=1)
    sup_second = l2.max(axis=1)
    frac_second_small = float(np.mean(sup_second < 0.01))

    passes: dict[str, bool] = {}
    for i, c in enumerate(c_grid):
        passes[f"mean_zero_3se[c={_fmt(c)}]"] = _within_se(mean[i], 0.0, mean_se[i])
        passes[f"var_3se[c={_fmt(c)}]"] = _within_se(var[i], cov_target[i, i], var_se[i])
    for i in range(k):
        for j in range(i, k):
            passes[f"cov_3se[c={_fmt(c_grid[i])},c={_fmt(c_grid[j])}]"] = _within_se(
                cov[i, j], cov_target[i, j], cov_se[i, j]
            )
    passes["monotone_all_reps"] = bool(monotone.all())
    passes["second_largest_sup_lt_0.01_in_99pct"] = frac_second_small >= 0.99

    raw = [
        (r, f"c={_fmt(c_grid[i])}", float(y[r, i]))
        for r in range(reps)
        for i in range(k)
    ]
    report = ExperimentReport(
        op="supercrit",
        parameters={"n": n, "c_grid": list(c_grid)},
        seed=seed,
        reps=reps,
        statistics={
            "mean": mean,
            "mean_se": mean_se,
            "variance": var,
            "variance_se": var_se,
            "covariance": cov,
            "covariance_se": cov_se,
            "monotone_fraction": float(monotone.mean()),
            "second_largest_sup_small_fraction": frac_second_small,
            "second_largest_sup_max": float(sup_second.max()),
        },
        targets={
            "mean": [0.0] * k,
            "variance": [analytic.sigma2(c) for c in c_grid],
            "covariance": cov_target,
        },
        passes=passes,
        raw_rows=raw,
    )
    report.wall_clock_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_bsc_fluctuations(
    grid: RegimeGrid, reps: int, seed: int, *, workers: int | None = None
) -> ExperimentReport:
    """Fluctuations of the early giant over a t-grid.

    The statistic is W_n(t) = sqrt(n*eps^3)*(largest/(n*eps) - rho_n(t)/eps)
    with rho_n(t) = rho(1 + t*eps); its limit variance is 2/t and the limit
    covariance 2*min(t1,t2)/(t1*t2).  Also recorded: the concentration
    statistic largest/(2*t*eps*n) (limit 1) and the normalized second
    largest t^2*eps^2/(2*log(n*t^3*eps^3)) * second (limit 1, log-slow).
    """
    if grid.kind != "barely_super_critical":
        raise ValueError(f"expected a barely_super_critical grid, got {grid.kind!r}")
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    t0 = time.perf_counter()
    n, t_grid, eps = grid.n, grid.t_grid, grid.eps
    k = len(t_grid)
    scale = math.sqrt(n * eps**3)

    fn = partial(_bsc_rep, seed=seed, n=n, t_grid=t_grid, eps=eps)
    res = np.stack(_map_reps(fn, reps, workers))
    l1, l2 = res[:, 0, :], res[:, 1, :]

    zeros = np.array([analytic.rho(1.0 + t * eps) / eps for t in t_grid])
    w = scale * (l1 - zeros[None, :])
    t_arr = np.array(t_grid)
    conc = l1 / (2.0 * t_arr[None, :])

    # second-largest in vertex units, against the log-scale normalization
    log_arg = n * t_arr**3 * eps**3
    second_norm = np.full((reps, k), np.nan)
    norm_ok = log_arg > math.e  # normalization meaningless below
    if norm_ok.any():
        const = t_arr**2 * eps**2 / (2.0 * np.log(log_arg, where=norm_ok, out=np.ones_like(log_arg)))
        second_norm[:, norm_ok] = (l2[:, norm_ok] * n * eps) * const[None, norm_ok]

    mean = w.mean(axis=0)
    mean_se = _batch_se(w, lambda b: b.mean(axis=0), reps)
    var = w.var(axis=0, ddof=1)
    var_se = _batch_se(w, lambda b: b.var(axis=0, ddof=1), reps)
    cov = np.cov(w, rowvar=False, ddof=1).reshape(k, k)
    cov_se = _batch_se(
        w, lambda b: np.cov(b, rowvar=False, ddof=1).reshape(k, k), reps
    )
    conc_mean = conc.mean(axis=0)
    conc_se = _batch_se(conc, lambda b: b.mean(axis=0), reps)
    second_mean = second_norm.mean(axis=0)

    var_target = np.array([analytic.cov_bsc_limit(t, t) for t in t_grid])
    cov_target = np.array(
        [[analytic.cov_bsc_limit(a, b) for b in t_grid] for a in t_grid]
    )

    passes: dict[str, bool] = {}
    for i, t in enumerate(t_grid):
        passes[f"var_within_15pct[t={_fmt(t)}]"] = _within_rel(var[i], var_target[i], 0.15)
        passes[f"concentration_within_5pct[t={_fmt(t)}]"] = _within_rel(
            conc_mean[i], 1.0, 0.05
        )
    if k >= 2:
        passes[f"cov_within_20pct[t={_fmt(t_grid[0])},t={_fmt(t_grid[-1])}]"] = _within_rel(
            cov[0, k - 1], cov_target[0, k - 1], 0.20
        )
    for i, t in enumerate(t_grid):
        if t == 1.0 and norm_ok[i]:
            passes["second_largest_norm_within_30pct[t=1]"] = _within_rel(
                second_mean[i], 1.0, 0.30
            )

    raw = [
        (r, f"t={_fmt(t_grid[i])}", float(w[r, i]))
        for r in range(reps)
        for i in range(k)
    ]
    report = ExperimentReport(
        op="bsc",
        parameters={
            "n": n,
            "t_grid": list(t_grid),
            "eps_exponent": grid.eps_exponent,
            "eps": eps,
            "n_eps3": n * eps**3,
        },
        seed=seed,
        reps=reps,
        statistics={
            "mean_w": mean,
            "mean_w_se": mean_se,
            "variance": var,
            "variance_se": var_se,
            "covariance": cov,
            "covariance_se": cov_se,
            "concentration_mean": conc_mean,
            "concentration_se": conc_se,
            "second_largest_norm_mean": second_mean,
        },
        targets={
            "variance": var_target,
            "covariance": cov_target,
            "concentration_mean": [1.0] * k,
            "second_largest_norm_mean": [1.0] * k,
        },
        passes=passes,
        raw_rows=raw,
    )
    report.wall_clock_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_donsker_marginal(
    n: int,
    c: float,
    s_points: Sequence[float],
    reps: int,
    seed: int,
    *,
    workers: int | None = None,
) -> ExperimentReport:
    """Marginal law of the centered walk at fixed evaluation points.

    sqrt(n)*(Z(s) - phi(s)) converges to a Brownian bridge evaluated at
    F(s) = 1 - exp(-c*s): each marginal is tested by KS against
    Normal(0, F(1-F)), and the pairwise covariances against
    min(F(s), F(u)) - F(s)*F(u).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not c > 1.0:
        raise ValueError(f"c must exceed 1, got {c}")
    pts = tuple(sorted(float(s) for s in s_points))
    if not pts or any(s <= 0.0 for s in pts):
        raise ValueError("s_points must be positive")
    if len(set(pts)) != len(pts):
        raise ValueError("s_points must be distinct")
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    t0 = time.perf_counter()
    k = len(pts)

    fn = partial(_donsker_rep, seed=seed, n=n, c=c, s_points=pts)
    d = np.stack(_map_reps(fn, reps, workers))  # (reps, k)

    f = np.array([analytic.big_f(c, s) for s in pts])
    var_target = f * (1.0 - f)
    cov_target = np.minimum.outer(f, f) - np.outer(f, f)

    ks_stat = np.empty(k)
    ks_p = np.empty(k)
    for j in range(k):
        res = sps.kstest(d[:, j], "norm", args=(0.0, math.sqrt(var_target[j])))
        ks_stat[j], ks_p[j] = res.statistic, res.pvalue

    mean = d.mean(axis=0)
    var = d.var(axis=0, ddof=1)
    var_se = _batch_se(d, lambda b: b.var(axis=0, ddof=1), reps)
    cov = np.cov(d, rowvar=False, ddof=1).reshape(k, k)
    cov_se = _batch_se(
        d, lambda b: np.cov(b, rowvar=False, ddof=1).reshape(k, k), reps
    )

    passes: dict[str, bool] = {}
    for j, s in enumerate(pts):
        passes[f"ks_p_gt_0.01[s={_fmt(s)}]"] = bool(ks_p[j] > 0.01)
    for i in range(k):
        for j in range(i, k):
            passes[f"cov_3se[s={_fmt(pts[i])},s={_fmt(pts[j])}]"] = _within_se(
                cov[i, j], cov_target[i, j], cov_se[i, j]
            )

    raw = [
        (r, f"s={_fmt(pts[j])}", float(d[r, j])) for r in range(reps) for j in range(k)
    ]
    report = ExperimentReport(
        op="donsker",
        parameters={"n": n, "c": c, "s_points": list(pts)},
        seed=seed,
        reps=reps,
        statistics={
            "mean": mean,
            "variance": var,
            "variance_se": var_se,
            "covariance": cov,
            "covariance_se": cov_se,
            "ks_stat": ks_stat,
            "ks_pvalue": ks_p,
        },
        targets={"variance": var_target, "covariance": cov_target},
        passes=passes,
        raw_rows=raw,
    )
    report.wall_clock_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_doob_meyer_check(
    q: float, s: float, samples: int, seed: int, *, workers: int | None = None
) -> ExperimentReport:
    """Monte Carlo check of the compensator moments of the single-jump walk.

    With xi ~ Exponential(q): A(s) = q*(s - xi)^+ must match the closed-form
    mean and variance, the martingale part M(s) = 1{xi <= s} - q*min(s, xi)
    must be centered, and E[M^2] must agree with E[q*min(s, xi)].
    """
    if not q > 0.0 or not s > 0.0:
        raise ValueError(f"q and s must be positive, got q={q}, s={s}")
    if samples < 10_000:
        raise ValueError(f"samples must be >= 10000, got {samples}")
    del workers  # a single vectorized batch; kept for interface symmetry
    t0 = time.perf_counter()

    g = replication_rng(seed, "doob_meyer", 0)
    xi = g.standard_exponential(samples) / q
    a = q * np.maximum(s - xi, 0.0)
    qmin = q * np.minimum(s, xi)
    m = (xi <= s).astype(np.float64) - qmin
    quad_gap = m * m - qmin  # zero-mean by the compensator identity

    mean_a = a.mean()
    mean_a_se = _batch_se(a, lambda b: b.mean(), samples)
    var_a = a.var(ddof=1)
    var_a_se = _batch_se(a, lambda b: b.var(ddof=1), samples)
    mean_m = m.mean()
    mean_m_se = _batch_se(m, lambda b: b.mean(), samples)
    mean_gap = quad_gap.mean()
    mean_gap_se = _batch_se(quad_gap, lambda b: b.mean(), samples)

    target_mean, target_var = analytic.doob_meyer_moments(q, s)
    passes = {
        "mean_A_3se": _within_se(mean_a, target_mean, mean_a_se),
        "var_A_3se": _within_se(var_a, target_var, var_a_se),
        "mean_M_zero_3se": _within_se(mean_m, 0.0, mean_m_se),
        "mean_M2_matches_qmin_3se": _within_se(mean_gap, 0.0, mean_gap_se),
    }
    report = ExperimentReport(
        op="doob_meyer",
        parameters={"q": q, "s": s, "samples": samples},
        seed=seed,
        reps=samples,
        statistics={
            "mean_A": mean_a,
            "mean_A_se": mean_a_se,
            "var_A": var_a,
            "var_A_se": var_a_se,
            "mean_M": mean_m,
            "mean_M_se": mean_m_se,
            "mean_M2": float((m * m).mean()),
            "mean_qmin": float(qmin.mean()),
            "mean_M2_minus_qmin": mean_gap,
            "mean_M2_minus_qmin_se": mean_gap_se,
        },
        targets={
            "mean_A": target_mean,
            "var_A": target_var,
            "mean_M": 0.0,
            "mean_M2": -math.expm1(-q * s),
        },
        passes=passes,
    )
    report.wall_clock_ms = (time.perf_counter() - t0) * 1e3
    return report


def run_local_time_check(
    n: int,
    t: float,
    eps_exponent: float,
    min_length: float,
    reps: int,
    seed: int,
    *,
    workers: int | None = None,
) -> ExperimentReport:
    """Conditional-exponential law of excursion-start depths.

    For every excursion of length L starting at T, the depth -Z(T-) is,
    conditionally on the lengths, Exponential with rate q_n(t)*L.  Across
    replications, u = q_n(t) * L * (-Z(T-)) for excursions longer than
    ``min_length`` is therefore an i.i.d. Exponential(1) sample, which is
    KS-tested.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got {t}")
    if not 0.0 < eps_exponent < 1.0 / 3.0:
        raise ValueError(f"eps_exponent must lie in (0, 1/3), got {eps_exponent}")
    if not min_length > 0.0:
        raise ValueError(f"min_length must be positive, got {min_length}")
    if reps < 1:
        raise ValueError(f"reps must be >= 1, got {reps}")
    t0 = time.perf_counter()
    eps = float(n) ** (-eps_exponent)
    q = analytic.q_n(n, eps, t)

    fn = partial(_local_time_rep, seed=seed, n=n, t=t, eps=eps, min_length=min_length)
    pairs = _map_reps(fn, reps, workers)

    rep_idx = np.concatenate(
        [np.full(lengths.size, r) for r, (lengths, _) in enumerate(pairs)]
    ) if pairs else np.empty(0, dtype=int)
    lengths = np.concatenate([p[0] for p in pairs]) if pairs else np.empty(0)
    depths = np.concatenate([p[1] for p in pairs]) if pairs else np.empty(0)
    u = q * lengths * depths

    if u.size < 10:
        raise RuntimeError(
            f"insufficient excursions above min_length={min_length}: got {u.size}"
        )
    ks = sps.kstest(u, "expon")
    passes = {"ks_p_gt_0.01": bool(ks.pvalue > 0.01)}

    raw = [
        (int(rep_idx[i]), f"t={_fmt(t)}", float(u[i])) for i in range(u.size)
    ]
    report = ExperimentReport(
        op="local_time",
        parameters={
            "n": n,
            "t": t,
            "eps_exponent": eps_exponent,
            "eps": eps,
            "q_n": q,
            "min_length": min_length,
        },
        seed=seed,
        reps=reps,
        statistics={
            "n_samples": int(u.size),
            "samples_per_rep": float(u.size / reps),
            "mean_u": float(u.mean()),
            "ks_stat": float(ks.statistic),
            "ks_pvalue": float(ks.pvalue),
        },
        targets={"mean_u": 1.0, "law": "Exponential(1)"},
        passes=passes,
        raw_rows=raw,
    )
    report.wall_clock_ms = (time.perf_counter() - t0) * 1e3
    return report


def _merge_small_expected(
    observed: dict[tuple[int, ...], int], expected: dict[tuple[int, ...], float]
):
    """Pool categories until every expected count reaches 5 (chi-square rule)."""
    keys = sorted(expected, key=lambda k: (expected[k], k))
    obs = [observed.get(k, 0) for k in keys]
    exp = [expected[k] for k in keys]
    labels: list[str] = ["+".join(map(str, k)) for k in keys]
    while len(exp) > 1 and exp[0] < 5.0:
        exp[1] += exp[0]
        obs[1] += obs[0]
        labels[1] = labels[0] + "|" + labels[1]
        del exp[0], obs[0], labels[0]
    return labels, np.array(obs, dtype=float), np.array(exp, dtype=float)


def run_oracle_equivalence(
    n: int, c: float, reps: int, seed: int, *, workers: int | None = None
) -> ExperimentReport:
    """Equality in law of the walk route and the exact partition law.

    Empirical partition frequencies from ``marginal_sizes_via_walk`` are
    compared with ``exact_component_distribution(n, 1 - exp(-c/n))`` by
    total variation distance and a chi-square goodness-of-fit test.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"oracle equivalence supports 1 <= n <= 6, got {n}")
    if not c > 0.0:
        raise ValueError(f"c must be positive, got {c}")
    if reps < 100:
        raise ValueError(f"reps must be >= 100, got {reps}")
    t0 = time.perf_counter()
    p = -math.expm1(-c / n)
    law = exact_component_distribution(n, p)

    fn = partial(_oracle_rep, seed=seed, n=n, c=c)
    partitions = _map_reps(fn, reps, workers)
    observed: dict[tuple[int, ...], int] = {}
    for part in partitions:
        observed[part] = observed.get(part, 0) + 1

    empirical = {k: v / reps for k, v in observed.items()}
    tv = law.tv_distance(empirical)

    impossible = sorted(set(observed) - set(law.pmf))
    if impossible:
        chi2_stat, chi2_p = math.inf, 0.0
    else:
        expected = {k: v * reps for k, v in law.pmf.items()}
        labels, obs_arr, exp_arr = _merge_small_expected(observed, expected)
        if len(labels) <= 1:
            chi2_stat, chi2_p = 0.0, 1.0
        else:
            chi2_stat = float(((obs_arr - exp_arr) ** 2 / exp_arr).sum())
            chi2_p = float(sps.chi2.sf(chi2_stat, df=len(labels) - 1))

    passes = {
        "tv_lt_0.01": bool(tv < 0.01),
        "chi2_p_gt_0.01": bool(chi2_p > 0.01),
        "no_impossible_partitions": not impossible,
    }
    key_str = lambda k: "+".join(map(str, k))  # noqa: E731
    raw = [(r, "partition", key_str(partitions[r])) for r in range(reps)]
    report = ExperimentReport(
        op="oracle",
        parameters={"n": n, "c": c, "p": p},
        seed=seed,
        reps=reps,
        statistics={
            "tv_distance": tv,
            "chi2_stat": chi2_stat,
            "chi2_pvalue": chi2_p,
            "pmf_exact": {key_str(k): v for k, v in sorted(law.pmf.items())},
            "pmf_empirical": {key_str(k): v for k, v in sorted(empirical.items())},
        },
        targets={"tv_distance": 0.0, "chi2_pvalue": "uniform under the null"},
        passes=passes,
        raw_rows=raw,
    )
    report.wall_clock_ms = (time.perf_counter() - t0) * 1e3
    return report
