"""Closed-form curves, fixed points and limit (co)variances.

Super-critical regime (edge density c/n, c > 1):

* ``phi(c, s)``   = 1 - s - exp(-c*s), the deterministic limit shape of the
  walk; its unique positive root ``rho(c)`` is the survival probability of a
  Poisson(c) branching process and the relative size of the giant component.
* ``pi_conjugate(c)`` = c*(1 - rho(c)), the dual parameter with
  pi * exp(-pi) = c * exp(-c) and pi < 1 < c.
* ``sigma2(c)``   = rho*(1-rho)/(1-pi)^2, the limit variance of the centered
  and sqrt(n)-scaled giant component size.
* ``big_f(c, s)`` = 1 - exp(-c*s), the CDF of a rate-c exponential; the
  fluctuation field of the walk is a Brownian bridge composed with big_f.
* ``cov_supercrit_limit(c1, c2)``: covariance of the limiting giant-size
  fluctuation process at two densities.  Derived here from the Brownian
  bridge covariance u ^ v - u*v and the monotonicity of rho; it is a
  consequence of the limit representation rather than an independently
  published constant.

Barely super-critical regime (edge density (1 + t*eps)/n, eps -> 0 with
n*eps^3 -> infty):

* ``upsilon_n(t, eps, s)`` = phi(1 + t*eps, eps*s)/eps^2, the finite-n mean
  curve of the rescaled walk; its unique positive zero is
  rho(1 + t*eps)/eps.
* ``upsilon_limit(t, s)``  = t*s - s^2/2, the eps -> 0 limit, with zero 2t.
* ``cov_bsc_limit(t1, t2)`` = 2*min(t1,t2)/(t1*t2), the covariance of the
  limiting process B(2t)/t.

``doob_meyer_moments`` gives the exact mean and variance of the increasing
part A(s) = q*(s - xi)^+ of the compensated single-jump indicator
1{xi <= s} - q*s, xi ~ Exponential(q).

All functions are pure and safe to call concurrently.  Everything is double
precision; evaluations near cancellation points go through ``expm1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

__all__ = [
    "phi",
    "phi_prime",
    "rho",
    "rho_via_lambert",
    "lambert_w0",
    "pi_conjugate",
    "sigma2",
    "big_f",
    "upsilon_n",
    "upsilon_limit",
    "q_n",
    "cov_supercrit_limit",
    "cov_bsc_limit",
    "doob_meyer_moments",
    "SuperCriticalCurves",
    "BarelyCriticalCurves",
    "NEAR_CRITICAL_GUARD",
]

# rho is ill-conditioned as c -> 1+ (the root collides with the trivial root
# at 0); refuse to evaluate below this rather than return garbage.
NEAR_CRITICAL_GUARD = 1e-6

_DUAL_ROUTE_TOL = 1e-12


def phi(c: float, s: float) -> float:
    """1 - s - exp(-c*s), evaluated stably as -expm1(-c*s) - s.

    Raises ValueError unless c > 0 and s >= 0.
    """
    if not c > 0.0:
        raise ValueError(f"phi requires c > 0, got c={c}")
    if not s >= 0.0:
        raise ValueError(f"phi requires s >= 0, got s={s}")
    return -math.expm1(-c * s) - s


def phi_prime(c: float, s: float) -> float:
    """d/ds of phi: c*exp(-c*s) - 1."""
    if not c > 0.0:
        raise ValueError(f"phi_prime requires c > 0, got c={c}")
    if not s >= 0.0:
        raise ValueError(f"phi_prime requires s >= 0, got s={s}")
    return c * math.exp(-c * s) - 1.0


def _rho_newton(c: float) -> float:
    # Safeguarded Newton on phi(c, .) over the bracket (1e-12, 1).  phi is
    # strictly concave with phi(0) = 0, positive slope c-1 at 0 and
    # phi(1) < 0, so the positive root is unique and the bracket is valid.
    lo, hi = 1e-12, 1.0
    if phi(c, lo) <= 0.0:  # pragma: no cover - excluded by the guard in rho()
        raise ValueError(f"no bracket for the positive root at c={c}")
    s = 1.0 - math.exp(-c) if c > 2.0 else min(0.9, 2.0 * (c - 1.0) / (c * c))
    if not lo < s < hi:
        s = 0.5 * (lo + hi)
    for _ in range(100):
        f = phi(c, s)
        if f > 0.0:
            lo = s
        elif f < 0.0:
            hi = s
        else:
            return s
        d = phi_prime(c, s)
        step = f / d if d != 0.0 else math.inf
        s_new = s - step
        if not lo < s_new < hi:
            s_new = 0.5 * (lo + hi)  # bisection fallback keeps the bracket
        if abs(s_new - s) <= 1e-15 * max(1.0, abs(s_new)):
            return s_new
        s = s_new
    # Newton did not settle; polish with plain bisection.
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if phi(c, mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lambert_w0(x: float) -> float:
    """Principal branch of the Lambert W function, real arguments >= -1/e.

    Halley iteration; the initial guess uses the series at the branch point
    for x near -1/e and w ~ x*(1 - x) otherwise.
    """
    if math.isnan(x) or x < -1.0 / math.e:
        raise ValueError(f"lambert_w0 requires x >= -1/e, got x={x}")
    if x == 0.0:
        return 0.0
    # branch-point series in p = sqrt(2*(1 + e*x))
    p2 = 2.0 * (1.0 + math.e * x)
    if p2 <= 0.0:
        return -1.0
    if p2 < 0.5:
        p = math.sqrt(p2)
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p2
    elif x < 1.0:
        w = x * (1.0 - x)
    else:
        w = math.log(x) - math.log(math.log(x)) if x > math.e else 1.0
    for _ in range(100):
        ew = math.exp(w)
        f = w * ew - x
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        step = f / denom
        w_new = w - step
        if abs(w_new - w) <= 1e-16 * max(1.0, abs(w_new)):
            return w_new
        w = w_new
    return w


def rho_via_lambert(c: float) -> float:
    """rho(c) = 1 + W0(-c*exp(-c))/c, used as a redundant second route."""
    if not c > 1.0 + NEAR_CRITICAL_GUARD:
        raise ValueError(
            f"rho requires c > 1 + {NEAR_CRITICAL_GUARD:g} (got c={c}): "
            "the positive root degenerates at c = 1"
        )
    return 1.0 + lambert_w0(-c * math.exp(-c)) / c


def rho(c: float) -> float:
    """Unique root of phi(c, .) in (0, 1), for c > 1.

    The value is computed by safeguarded Newton and cross-checked against
    the Lambert-W representation; disagreement beyond 1e-12 means one of the
    two routes is broken and raises ArithmeticError.
    """
    r = _rho_newton_guarded(c)
    r_w = rho_via_lambert(c)
    if abs(r - r_w) > _DUAL_ROUTE_TOL:
        raise ArithmeticError(
            f"rho routes disagree at c={c}: newton={r!r}, lambert={r_w!r}"
        )
    return r


def _rho_newton_guarded(c: float) -> float:
    if not c > 1.0 + NEAR_CRITICAL_GUARD:
        raise ValueError(
            f"rho requires c > 1 + {NEAR_CRITICAL_GUARD:g} (got c={c}): "
            "the positive root degenerates at c = 1"
        )
    return _rho_newton(c)


def pi_conjugate(c: float) -> float:
    """Dual parameter pi(c) = c*(1 - rho(c)); satisfies pi*e^-pi = c*e^-c."""
    return c * (1.0 - rho(c))


def sigma2(c: float) -> float:
    """Limit variance rho*(1 - rho)/(1 - pi)^2 of the scaled giant size."""
    r = rho(c)
    one_minus_pi = 1.0 - c * (1.0 - r)
    return r * (1.0 - r) / (one_minus_pi * one_minus_pi)


def big_f(c: float, s: float) -> float:
    """CDF 1 - exp(-c*s) of a rate-c exponential variable; in [0, 1)."""
    if not c > 0.0:
        raise ValueError(f"big_f requires c > 0, got c={c}")
    if not s >= 0.0:
        raise ValueError(f"big_f requires s >= 0, got s={s}")
    return -math.expm1(-c * s)


def upsilon_n(t: float, eps: float, s: float) -> float:
    """Finite-n mean curve phi(1 + t*eps, eps*s)/eps^2 of the rescaled walk.

    Converges to ``upsilon_limit(t, s)`` uniformly on compacts as eps -> 0.
    """
    if not t > 0.0:
        raise ValueError(f"upsilon_n requires t > 0, got t={t}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"upsilon_n requires eps in (0, 1), got eps={eps}")
    if not s >= 0.0:
        raise ValueError(f"upsilon_n requires s >= 0, got s={s}")
    return phi(1.0 + t * eps, eps * s) / (eps * eps)


def upsilon_limit(t: float, s: float) -> float:
    """Limit mean curve t*s - s^2/2; unique positive zero at 2t."""
    if not t > 0.0:
        raise ValueError(f"upsilon_limit requires t > 0, got t={t}")
    if not s >= 0.0:
        raise ValueError(f"upsilon_limit requires s >= 0, got s={s}")
    return t * s - 0.5 * s * s


def q_n(n: int, eps: float, t: float) -> float:
    """Coalescent time window n*eps^2*(1 + t*eps) for the barely
    super-critical phase (mass 1/(n*eps) per vertex)."""
    if n < 1:
        raise ValueError(f"q_n requires n >= 1, got n={n}")
    if not 0.0 < eps < 1.0:
        raise ValueError(f"q_n requires eps in (0, 1), got eps={eps}")
    if not t > 0.0:
        raise ValueError(f"q_n requires t > 0, got t={t}")
    return n * eps * eps * (1.0 + t * eps)


def cov_supercrit_limit(c1: float, c2: float) -> float:
    """Covariance of the limiting giant-size fluctuations at c1 and c2.

    The limit process is Pi(rho(c)) / (1 - pi(c)) for a standard Brownian
    bridge Pi; since rho is increasing, the bridge covariance
    u ^ v - u*v gives rho(c_min)*(1 - rho(c_max)).
    """
    r1, r2 = rho(c1), rho(c2)
    p1 = 1.0 - c1 * (1.0 - r1)
    p2 = 1.0 - c2 * (1.0 - r2)
    rmin, rmax = (r1, r2) if r1 <= r2 else (r2, r1)
    return rmin * (1.0 - rmax) / (p1 * p2)


def cov_bsc_limit(t1: float, t2: float) -> float:
    """Covariance 2*min(t1,t2)/(t1*t2) of B(2t)/t; diagonal 2/t."""
    if not (t1 > 0.0 and t2 > 0.0):
        raise ValueError(f"cov_bsc_limit requires t1, t2 > 0, got {t1}, {t2}")
    return 2.0 * min(t1, t2) / (t1 * t2)


def doob_meyer_moments(q: float, s: float) -> tuple[float, float]:
    """Exact mean and variance of A(s) = q*(s - xi)^+, xi ~ Exponential(q).

    mean     = exp(-q*s) - 1 + q*s        ~ (q*s)^2/2  as q*s -> 0
    variance = 1 - exp(-2*q*s) - 2*q*s*exp(-q*s) ~ (q*s)^3/3
    """
    if not q > 0.0:
        raise ValueError(f"doob_meyer_moments requires q > 0, got q={q}")
    if not s >= 0.0:
        raise ValueError(f"doob_meyer_moments requires s >= 0, got s={s}")
    x = q * s
    mean = math.expm1(-x) + x
    variance = -math.expm1(-2.0 * x) - 2.0 * x * math.exp(-x)
    return mean, variance


@dataclass(frozen=True)
class SuperCriticalCurves:
    """Bundle of the super-critical curves at a fixed density c > 1."""

    c: float
    rho: float = field(init=False)
    pi: float = field(init=False)
    sigma2: float = field(init=False)

    def __post_init__(self) -> None:
        r = rho(self.c)
        p = self.c * (1.0 - r)
        object.__setattr__(self, "rho", r)
        object.__setattr__(self, "pi", p)
        object.__setattr__(self, "sigma2", r * (1.0 - r) / (1.0 - p) ** 2)
        if not 0.0 < r < 1.0 or not 0.0 < p < 1.0:
            raise ArithmeticError(f"degenerate curves at c={self.c}")
        if abs(p * math.exp(-p) - self.c * math.exp(-self.c)) > 1e-12:
            raise ArithmeticError(f"conjugacy violated at c={self.c}")
        if abs(phi(self.c, r)) > 1e-12:
            raise ArithmeticError(f"rho is not a root of phi at c={self.c}")


@dataclass(frozen=True)
class BarelyCriticalCurves:
    """Bundle of the barely super-critical curves at (t, eps, n)."""

    t: float
    eps: float
    n: int
    rho_n: float = field(init=False)
    zero: float = field(init=False)  # rho_n/eps, the positive zero of upsilon_n
    q_n: float = field(init=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        rn = rho(1.0 + self.t * self.eps)
        object.__setattr__(self, "rho_n", rn)
        object.__setattr__(self, "zero", rn / self.eps)
        object.__setattr__(self, "q_n", q_n(self.n, self.eps, self.t))
        if abs(upsilon_n(self.t, self.eps, self.zero)) > 1e-10:
            raise ArithmeticError(
                f"rho_n/eps is not a zero of upsilon_n at t={self.t}, eps={self.eps}"
            )
