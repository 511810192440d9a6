"""Independent ground truth for the excursion encoding.

Two routes to component-size laws that do not touch the walk machinery:

* ``simulate_graph_process`` runs the multiplicative coalescent directly:
  every vertex pair gets an exponential edge clock with rate equal to the
  product of the masses, and arrivals are processed through a union-find.
* ``exact_component_distribution`` computes the exact law of the sorted
  component-size partition of ER(n, p) for n <= 8, via the classical
  recursion on the component containing the lowest-labelled vertex
  (and, for n <= 6, by raw enumeration of all edge subsets as a
  cross-check of the recursion).

``marginal_sizes_via_walk`` is the walk route for the same marginal: with
unit masses 1/n and time parameter c*n, the excursion lengths times n are
the component sizes of ER(n, 1 - exp(-c/n)) in law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .walks import MassVector, build_sbfw, decompose

__all__ = [
    "CoalescentState",
    "ExactComponentLaw",
    "simulate_graph_process",
    "exact_component_distribution",
    "enumerate_component_distribution",
    "marginal_sizes_via_walk",
]

_MAX_DIRECT_N = 10_000  # O(n^2) edge clocks are drawn eagerly
_MAX_EXACT_N = 8


class CoalescentState:
    """Union-find over vertices with component masses and a merge log."""

    __slots__ = ("parent", "rank", "mass", "n_components", "merge_log")

    def __init__(self, masses: np.ndarray) -> None:
        n = masses.size
        self.parent = list(range(n))
        self.rank = [0] * n
        self.mass = [float(m) for m in masses]
        self.n_components = n
        self.merge_log: list[tuple[float, int, int]] = []

    def find(self, i: int) -> int:
        parent = self.parent
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:  # path compression
            parent[i], i = root, parent[i]
        return root

    def union(self, time: float, i: int, j: int) -> bool:
        ri, rj = self.find(i), self.find(j)
        if ri == rj:
            return False
        if self.rank[ri] < self.rank[rj]:
            ri, rj = rj, ri
        self.parent[rj] = ri
        if self.rank[ri] == self.rank[rj]:
            self.rank[ri] += 1
        self.mass[ri] += self.mass[rj]
        self.n_components -= 1
        self.merge_log.append((time, ri, rj))
        return True

    def component_masses(self) -> np.ndarray:
        """Masses of current components, sorted non-increasing."""
        roots = [self.find(i) for i in range(len(self.parent))]
        out = sorted((self.mass[r] for r in set(roots)), reverse=True)
        return np.asarray(out)


def simulate_graph_process(x, query_times, rng) -> list[np.ndarray]:
    """Component-mass vectors of the mass-weighted graph process.

    Each pair i < j receives an independent Exponential clock with rate
    x_i * x_j; arrivals before each query time are merged through the
    union-find and the sorted component-mass vector is emitted per query.
    Guarded to n <= 10^4 since all clocks are drawn eagerly.
    """
    masses = x.masses if isinstance(x, MassVector) else np.asarray(x, dtype=np.float64)
    n = masses.size
    if n > _MAX_DIRECT_N:
        raise ValueError(f"n={n} exceeds the direct-simulation guard {_MAX_DIRECT_N}")
    queries = np.asarray(query_times, dtype=np.float64)
    if queries.ndim != 1 or queries.size == 0:
        raise ValueError("query_times must be a non-empty 1-d sequence")
    if np.any(np.diff(queries) < 0.0):
        raise ValueError("query_times must be sorted ascending")

    state = CoalescentState(masses)
    if n >= 2:
        ii, jj = np.triu_indices(n, k=1)
        rates = masses[ii] * masses[jj]
        arrivals = rng.standard_exponential(rates.size) / rates
        keep = arrivals <= queries[-1]
        arrivals, ii, jj = arrivals[keep], ii[keep], jj[keep]
        order = np.argsort(arrivals, kind="stable")
        arrivals, ii, jj = arrivals[order], ii[order], jj[order]
    else:
        arrivals = np.empty(0)
        ii = jj = np.empty(0, dtype=np.intp)

    out: list[np.ndarray] = []
    pos = 0
    for q in queries:
        while pos < arrivals.size and arrivals[pos] <= q:
            state.union(float(arrivals[pos]), int(ii[pos]), int(jj[pos]))
            pos += 1
        out.append(state.component_masses())
    return out


@dataclass(frozen=True)
class ExactComponentLaw:
    """Exact pmf of the sorted component-size partition of ER(n, p)."""

    n: int
    p: float
    pmf: dict[tuple[int, ...], float] = field(compare=False)

    def __post_init__(self) -> None:
        total = math.fsum(self.pmf.values())
        if abs(total - 1.0) > 1e-12:
            raise ArithmeticError(f"pmf sums to {total!r}, not 1")

    def tv_distance(self, empirical: dict[tuple[int, ...], float]) -> float:
        keys = set(self.pmf) | set(empirical)
        return 0.5 * math.fsum(
            abs(self.pmf.get(k, 0.0) - empirical.get(k, 0.0)) for k in keys
        )


def _connectivity_probabilities(n: int, p: float) -> list[float]:
    # conn[k] = P(ER(k, p) is connected), by the classical recursion
    # conn(k) = 1 - sum_j C(k-1, j-1) conn(j) (1-p)^(j*(k-j)).
    q = 1.0 - p
    conn = [0.0] * (n + 1)
    conn[1] = 1.0
    for k in range(2, n + 1):
        s = 0.0
        for j in range(1, k):
            s += math.comb(k - 1, j - 1) * conn[j] * q ** (j * (k - j))
        conn[k] = 1.0 - s
    return conn


def exact_component_distribution(n: int, p: float) -> ExactComponentLaw:
    """Exact partition law of ER(n, p) for n <= 8.

    Recursion on the component of the lowest-labelled vertex: a set of size
    k containing it is connected with probability conn(k) and isolated from
    the remaining n-k vertices with probability (1-p)^(k*(n-k)).
    """
    if not 1 <= n <= _MAX_EXACT_N:
        raise ValueError(f"exact enumeration supports 1 <= n <= {_MAX_EXACT_N}, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    q = 1.0 - p
    conn = _connectivity_probabilities(n, p)
    pmf: dict[tuple[int, ...], float] = {}

    def rec(m: int, partition: tuple[int, ...], prob: float) -> None:
        if m == 0:
            key = tuple(sorted(partition, reverse=True))
            pmf[key] = pmf.get(key, 0.0) + prob
            return
        for k in range(1, m + 1):
            w = math.comb(m - 1, k - 1) * conn[k] * q ** (k * (m - k))
            if w > 0.0:
                rec(m - k, partition + (k,), prob * w)

    rec(n, (), 1.0)
    return ExactComponentLaw(n=n, p=p, pmf=pmf)


def enumerate_component_distribution(n: int, p: float) -> ExactComponentLaw:
    """Raw 2^C(n,2) enumeration of ER(n, p) partitions, for n <= 6.

    Kept as an independent exact method so the recursion above can be
    cross-checked; too slow beyond n = 6.
    """
    if not 1 <= n <= 6:
        raise ValueError(f"raw enumeration supports 1 <= n <= 6, got {n}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    pairs = list(combinations(range(n), 2))
    m = len(pairs)
    pmf: dict[tuple[int, ...], float] = {}
    for mask in range(1 << m):
        edges = mask.bit_count()
        prob = p**edges * (1.0 - p) ** (m - edges)
        if prob == 0.0:
            continue
        parent = list(range(n))

        def find(i: int) -> int:
            while parent[i] != i:
                parent[i] = parent[parent[i]]
                i = parent[i]
            return i

        for b, (u, v) in enumerate(pairs):
            if mask >> b & 1:
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
        sizes: dict[int, int] = {}
        for i in range(n):
            r = find(i)
            sizes[r] = sizes.get(r, 0) + 1
        key = tuple(sorted(sizes.values(), reverse=True))
        pmf[key] = pmf.get(key, 0.0) + prob
    return ExactComponentLaw(n=n, p=p, pmf=pmf)


def marginal_sizes_via_walk(n: int, c: float, rng) -> tuple[int, ...]:
    """Component sizes via the walk route, sorted non-increasing.

    Draws unit-rate clocks, builds the walk with masses 1/n and jumps at
    xi_i/c, decomposes, and converts excursion lengths back to integer
    component sizes.  Marginally these are the component sizes of
    ER(n, 1 - exp(-c/n)).
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if not c > 0.0:
        raise ValueError(f"c must be positive, got {c}")
    xi = rng.standard_exponential(n)
    walk = build_sbfw(MassVector.uniform(n, 1.0 / n), xi, c)
    lengths = decompose(walk).lengths * n
    rounded = np.rint(lengths)
    if np.any(np.abs(lengths - rounded) > 1e-9):
        raise RuntimeError(
            "excursion masses are not integer multiples of 1/n; "
            "this signals a decomposition bug"
        )
    sizes = sorted((int(r) for r in rounded), reverse=True)
    return tuple(sizes)
