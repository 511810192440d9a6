"""Walk paths with unit negative drift and their excursion decomposition.

A walk is a cadlag path Z(s) = sum of jump sizes with jump time <= s, minus
s.  Its excursions above past infima are the maximal intervals on which the
path stays strictly above its running infimum; for unit drift, the length of
an excursion equals the total jump mass it contains, which is how component
masses are read off.

The decomposition is a single busy-period scan.  With jumps sorted by time,
let P_k be the prefix mass sum and a_k = tau_k - P_{k-1} (jump time minus
mass before it).  A jump opens a new excursion exactly when a_k reaches a new
running maximum (ties open a new excursion, see ``decompose``), and the value
of the walk just before an excursion start, i.e. the past infimum there, is
-a_k.  This makes the scan a handful of vectorized passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from ._accum import compensated_cumsum

__all__ = [
    "MassVector",
    "WalkPath",
    "Excursion",
    "ExcursionSet",
    "build_sbfw",
    "decompose",
    "largest_k",
    "rescale_time",
]


@dataclass(frozen=True)
class MassVector:
    """Non-increasing positive vertex masses; the coalescent initial state."""

    masses: np.ndarray
    total_mass: float

    def __init__(self, masses) -> None:
        arr = np.asarray(masses, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("masses must be a non-empty 1-d sequence")
        if not np.all(arr > 0.0):
            raise ValueError("all masses must be positive")
        if np.any(arr[1:] > arr[:-1]):
            raise ValueError("masses must be non-increasing")
        arr.flags.writeable = False
        object.__setattr__(self, "masses", arr)
        object.__setattr__(self, "total_mass", math.fsum(arr))

    @classmethod
    def uniform(cls, n: int, mass: float) -> "MassVector":
        if n < 1:
            raise ValueError(f"n must be positive, got {n}")
        if not mass > 0.0:
            raise ValueError(f"mass must be positive, got {mass}")
        return cls(np.full(n, mass))

    def __len__(self) -> int:
        return int(self.masses.size)


class WalkPath:
    """Immutable jump walk with drift -1.

    ``jump_times`` is strictly increasing (duplicate construction times are
    merged, summing their sizes); ``prefix_sums[k]`` is the compensated
    cumulative mass of jumps 0..k.  For uniform jump sizes the prefix is the
    exact product count * size instead of an accumulated sum.
    """

    __slots__ = ("jump_times", "jump_sizes", "prefix_sums", "total_mass", "_scan")

    def __init__(self, jump_times, jump_sizes, *, _trusted: bool = False) -> None:
        times = np.asarray(jump_times, dtype=np.float64)
        sizes = np.asarray(jump_sizes, dtype=np.float64)
        if times.ndim != 1 or sizes.ndim != 1 or times.size != sizes.size:
            raise ValueError("jump_times and jump_sizes must be 1-d of equal length")
        if not _trusted:
            if np.any(times < 0.0):
                raise ValueError("jump times must be >= 0")
            if not np.all(sizes > 0.0):
                raise ValueError("jump sizes must be > 0")
            order = np.argsort(times, kind="stable")
            times = times[order]
            sizes = sizes[order]
            if times.size and np.any(times[1:] == times[:-1]):
                times, sizes = _merge_duplicate_times(times, sizes)
        self.jump_times = times
        self.jump_sizes = sizes
        self.prefix_sums = _prefix_mass(sizes)
        self.total_mass = float(self.prefix_sums[-1]) if sizes.size else 0.0
        self._scan = None

    def __len__(self) -> int:
        return int(self.jump_times.size)

    def evaluate(self, s: float) -> float:
        """Walk value at s: mass of jumps at times <= s, minus s."""
        if not s >= 0.0:
            raise ValueError(f"evaluate requires s >= 0, got s={s}")
        k = int(np.searchsorted(self.jump_times, s, side="right"))
        mass = float(self.prefix_sums[k - 1]) if k else 0.0
        return mass - s

    def evaluate_many(self, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=np.float64)
        if np.any(s < 0.0):
            raise ValueError("evaluate requires s >= 0")
        k = np.searchsorted(self.jump_times, s, side="right")
        mass = np.where(k > 0, self.prefix_sums[np.maximum(k - 1, 0)], 0.0)
        return mass - s

    def past_infimum(self, s: float) -> float:
        """inf of the walk over [0, s].

        The infimum is attained either at a left limit of some jump time
        tau_k <= s (value -a_k) or at s itself, so it is the min of the
        running maximum of a and s - prefix mass.
        """
        if not s >= 0.0:
            raise ValueError(f"past_infimum requires s >= 0, got s={s}")
        a_runmax = self._scan_arrays()[1]
        k = int(np.searchsorted(self.jump_times, s, side="right"))
        tail = s - (float(self.prefix_sums[k - 1]) if k else 0.0)
        if k == 0:
            return -tail
        return -max(float(a_runmax[k - 1]), tail)

    def _scan_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        # a_k = tau_k - P_{k-1} and its running maximum, cached (immutable).
        if self._scan is None:
            if len(self) == 0:
                a = np.empty(0)
                self._scan = (a, a)
            else:
                a = self.jump_times.copy()
                a[1:] -= self.prefix_sums[:-1]
                self._scan = (a, np.maximum.accumulate(a))
        return self._scan


def _merge_duplicate_times(times: np.ndarray, sizes: np.ndarray):
    # Duplicate jump times have probability zero for continuous inputs;
    # merging preserves the path function exactly.
    uniq, inverse = np.unique(times, return_inverse=True)
    merged = np.zeros(uniq.size)
    np.add.at(merged, inverse, sizes)
    return uniq, merged


def _prefix_mass(sizes: np.ndarray) -> np.ndarray:
    if sizes.size == 0:
        return np.empty(0)
    first = sizes[0]
    if np.all(sizes == first):
        return np.arange(1, sizes.size + 1, dtype=np.float64) * first
    return compensated_cumsum(sizes)


@dataclass(frozen=True)
class Excursion:
    """One excursion above past infima.

    ``length`` is the total jump mass contained in [start, start+length);
    ``pre_start_infimum`` is the walk value just before the start, equal to
    -(start - mass of jumps strictly before start) and <= 0.
    """

    start: float
    length: float
    pre_start_infimum: float

    @property
    def end(self) -> float:
        return self.start + self.length


class ExcursionSet(Sequence):
    """Ordered excursions of a walk, array-backed.

    ``starts``, ``lengths`` and ``pre_infima`` are parallel arrays in
    increasing start order; indexing yields ``Excursion`` values.
    """

    __slots__ = ("starts", "lengths", "pre_infima", "total_mass")

    def __init__(self, starts, lengths, pre_infima, total_mass: float) -> None:
        self.starts = np.asarray(starts, dtype=np.float64)
        self.lengths = np.asarray(lengths, dtype=np.float64)
        self.pre_infima = np.asarray(pre_infima, dtype=np.float64)
        self.total_mass = float(total_mass)

    def __len__(self) -> int:
        return int(self.starts.size)

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return Excursion(
            float(self.starts[i]), float(self.lengths[i]), float(self.pre_infima[i])
        )

    def __iter__(self) -> Iterator[Excursion]:
        for i in range(len(self)):
            yield self[i]

    def largest_lengths(self, k: int) -> np.ndarray:
        """The k largest excursion lengths, non-increasing (fewer if fewer)."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        if len(self) <= k:
            return np.sort(self.lengths)[::-1]
        idx = np.argpartition(self.lengths, len(self) - k)[-k:]
        return np.sort(self.lengths[idx])[::-1]


def build_sbfw(x, xi, t: float) -> WalkPath:
    """Walk with one jump of size x_i at time xi_i / t for each vertex i.

    ``x`` may be a MassVector or any positive mass sequence; ``xi`` are the
    per-vertex exponential clocks and ``t`` the coalescent time parameter.
    """
    masses = x.masses if isinstance(x, MassVector) else np.asarray(x, dtype=np.float64)
    clocks = np.asarray(xi, dtype=np.float64)
    if masses.shape != clocks.shape:
        raise ValueError(
            f"mass/clock length mismatch: {masses.size} masses, {clocks.size} clocks"
        )
    if not np.all(clocks > 0.0):
        raise ValueError("all clocks must be positive")
    if not t > 0.0:
        raise ValueError(f"t must be positive, got t={t}")
    if not np.all(masses > 0.0):
        raise ValueError("all masses must be positive")
    return WalkPath(clocks / t, masses)


def rescale_time(w: WalkPath, factor: float) -> WalkPath:
    """Same jumps with times divided by ``factor`` (sizes unchanged).

    Builds the walk at time parameter t*factor from the walk at t without
    resampling; size and prefix arrays are shared with the source walk.
    """
    if not factor > 0.0:
        raise ValueError(f"factor must be positive, got {factor}")
    out = WalkPath.__new__(WalkPath)
    out.jump_times = w.jump_times / factor if factor != 1.0 else w.jump_times
    out.jump_sizes = w.jump_sizes
    out.prefix_sums = w.prefix_sums
    out.total_mass = w.total_mass
    out._scan = None
    return out


def decompose(w: WalkPath) -> ExcursionSet:
    """Complete ordered excursion set of a walk, in one left-to-right scan.

    Maintaining the current excursion end E, a jump (tau, m) with tau < E
    extends the excursion (E += m) while a jump with tau >= E closes it and
    opens a new one at tau.  A jump at exactly tau == E opens a new
    excursion: for continuous inputs the tie has probability zero, and this
    convention keeps the scan equivalent to the running-maximum test below.
    """
    n = len(w)
    if n == 0:
        return ExcursionSet(np.empty(0), np.empty(0), np.empty(0), 0.0)
    a, a_runmax = w._scan_arrays()
    is_start = np.empty(n, dtype=bool)
    is_start[0] = True
    np.greater_equal(a[1:], a_runmax[:-1], out=is_start[1:])
    start_idx = np.flatnonzero(is_start)
    starts = w.jump_times[start_idx]
    # mass in each excursion: prefix difference over its contiguous jump block
    prev = w.prefix_sums[start_idx[1:] - 1]
    total = w.prefix_sums[-1]
    bounds = np.concatenate((prev, (total,)))
    before = np.concatenate(((0.0,), prev))
    lengths = bounds - before
    pre_infima = -a[start_idx]
    return ExcursionSet(starts, lengths, pre_infima, float(total))


def largest_k(es: ExcursionSet, k: int) -> list[Excursion]:
    """The k longest excursions, non-increasing length, ties by earlier start.

    Returns fewer than k if the set is smaller.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if len(es) == 0:
        return []
    order = np.lexsort((es.starts, -es.lengths))[: min(k, len(es))]
    return [es[int(i)] for i in order]


def jumps_to_csv_rows(w: WalkPath) -> Iterator[tuple[float, float]]:
    """(jump_time, jump_size) rows for path dumps."""
    for t, m in zip(w.jump_times, w.jump_sizes):
        yield float(t), float(m)


def excursions_to_csv_rows(es: ExcursionSet) -> Iterator[tuple[float, float, float]]:
    """(start, length, pre_start_infimum) rows for path dumps."""
    for e in es:
        yield e.start, e.length, e.pre_start_infimum
