"""High-order synchronization metrics over pulse leading-edge trains.

Two oscillators lock at a rational ratio when pulses of one recur at a
fixed phase of the other. We detect this directly on the edge trains:
edges of train i and train j that fall within ``tol`` timesteps of each
other are phase-locked events; the span between consecutive events is one
synchronization period. Counting how many periods of each train fall into
each synchronization period gives integer pairs (M_i, M_j); the weight of
a pair is the percentage of train-i periods it covers,

    P(M_j : M_i) = 100 * count(M_j : M_i) * M_i / N_i,

with N_i the total period count of train i. The dominant pair is the
subharmonic ratio SHR = M_j : M_i of the pair, its weight is the
synchronization effectiveness eta, and the pair of signals counts as
synchronized when eta >= eta_th. Pairs are keyed as exact integer tuples
(2:4 and 1:2 are distinct states), since the weight formula scales with
M_i itself.

Spectral estimation of the ratio is deliberately avoided: pulse trains of
noisy relaxation oscillators are not strictly periodic and their spectral
lines smear, while edge coincidences stay sharp.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 2          # coincidence window, timesteps
DEFAULT_ETA_TH = 90.0    # percent
DEFAULT_DISCARD = 5      # cold-start pulses dropped from each train


def _as_edges(train) -> np.ndarray:
    edges = getattr(train, "edges", train)
    return np.asarray(edges, dtype=np.int64)


@dataclass(frozen=True)
class LockedEventList:
    """Phase-locked pulse pairs as indices into the two edge arrays."""

    events: np.ndarray  # (n_events, 2) int64, strictly increasing in both columns

    def __len__(self) -> int:
        return int(self.events.shape[0])


@dataclass
class SyncResult:
    """Synchronization state of an (i, j) train pair.

    ``shr`` is the dominant (M_j, M_i) pair, unreduced; None when no
    locking was observed. ``eta`` is its weight in percent and equals the
    histogram maximum. ``histogram`` maps (M_j, M_i) -> percent.
    """

    shr: tuple[int, int] | None
    shr_real: float
    eta: float
    histogram: dict[tuple[int, int], float]
    n_periods_i: int
    synchronized: bool

    def to_json_dict(self) -> dict:
        hist = sorted(
            ((mj, mi, pct) for (mj, mi), pct in self.histogram.items()),
            key=lambda row: (-row[2], row[0], row[1]),
        )
        return {
            "shr": list(self.shr) if self.shr is not None else None,
            "shr_real": self.shr_real if self.shr is not None else None,
            "eta": self.eta,
            "synchronized": self.synchronized,
            "histogram": [[mj, mi, pct] for mj, mi, pct in hist],
            "n_periods": self.n_periods_i,
        }


def match_locked_edges(le_i, le_j, tol: int = DEFAULT_TOL) -> LockedEventList:
    """Greedily pair edges of the two trains that lie within ``tol`` steps.

    Walks both trains in time order and records the earliest coincidences
    first; each edge participates in at most one event. Returns an empty
    list when no coincidence exists.
    """
    if tol < 0:
        raise ValueError("tol must be >= 0")
    ei = _as_edges(le_i)
    ej = _as_edges(le_j)
    events = []
    a = b = 0
    na, nb = ei.size, ej.size
    while a < na and b < nb:
        d = int(ei[a]) - int(ej[b])
        if -tol <= d <= tol:
            events.append((a, b))
            a += 1
            b += 1
        elif d < 0:
            a += 1
        else:
            b += 1
    return LockedEventList(np.asarray(events, dtype=np.int64).reshape(-1, 2))


def period_counts(events: LockedEventList, le_i, le_j) -> list[tuple[int, int]]:
    """Per synchronization period, the (M_i, M_j) period counts.

    One entry per consecutive event pair: M_i is the number of train-i
    inter-edge intervals inside the span (left edge inclusive, right
    exclusive), which is the difference of the event's edge indices; M_j
    likewise. Fewer than two events mean no measurable period: returns [].
    """
    ev = events.events
    if ev.shape[0] < 2:
        return []
    ni, nj = _as_edges(le_i).size, _as_edges(le_j).size
    if ev[-1, 0] >= ni or ev[-1, 1] >= nj:
        raise ValueError("event indices exceed the supplied trains")
    d = np.diff(ev, axis=0)
    return [(int(mi), int(mj)) for mi, mj in d]


def pair_histogram(
    pairs: list[tuple[int, int]], n_i: int
) -> dict[tuple[int, int], float]:
    """Weight each distinct (M_i, M_j) pair by the share of train-i periods.

    Keys are (M_j, M_i) tuples; values are percentages. Periods outside
    every synchronization period dilute the weights (values sum to 100
    only when the events cover the whole train).
    """
    if n_i <= 0:
        raise ValueError("n_i must be positive")
    covered = sum(mi for mi, _ in pairs)
    if covered > n_i:
        raise ValueError(f"pairs cover {covered} periods but n_i is only {n_i}")
    counts = Counter(pairs)
    return {
        (mj, mi): 100.0 * cnt * mi / n_i for (mi, mj), cnt in counts.items()
    }


def shr_eta(
    hist: dict[tuple[int, int], float],
    eta_th: float = DEFAULT_ETA_TH,
    n_periods: int = 0,
) -> SyncResult:
    """Reduce a pair histogram to the dominant ratio and its effectiveness.

    The dominant pair is the histogram argmax; exact ties break to the
    lexicographically smallest (M_j, M_i). An empty histogram yields
    eta = 0, not synchronized, and no ratio.
    """
    if not hist:
        return SyncResult(None, math.nan, 0.0, {}, n_periods, False)
    eta = max(hist.values())
    best = min(k for k, v in hist.items() if v == eta)
    return SyncResult(
        shr=best,
        shr_real=shr_real(best),
        eta=eta,
        histogram=dict(hist),
        n_periods_i=n_periods,
        synchronized=eta >= eta_th,
    )


def shr_real(shr: tuple[int, int]) -> float:
    """The ratio (M_j, M_i) as a real number M_j / M_i."""
    mj, mi = shr
    if mi <= 0:
        raise ValueError("M_i must be positive")
    return mj / mi


def compute_sync(
    le_i,
    le_j,
    tol: int = DEFAULT_TOL,
    eta_th: float = DEFAULT_ETA_TH,
    discard: int = DEFAULT_DISCARD,
) -> SyncResult:
    """Full pipeline from two raw pulse trains to a SyncResult.

    Drops the first ``discard`` cold-start pulses of each train, matches
    locked events, and weights the period-count pairs against the total
    period count N_i of the (trimmed) first train. Partial spans before
    the first and after the last locked event count toward N_i but belong
    to no pair.
    """
    ei = _as_edges(le_i)[discard:]
    ej = _as_edges(le_j)[discard:]
    n_periods = max(ei.size - 1, 0)
    if n_periods == 0 or ej.size == 0:
        return SyncResult(None, math.nan, 0.0, {}, n_periods, False)
    events = match_locked_edges(ei, ej, tol)
    pairs = period_counts(events, ei, ej)
    if not pairs:
        return SyncResult(None, math.nan, 0.0, {}, n_periods, False)
    hist = pair_histogram(pairs, n_periods)
    return shr_eta(hist, eta_th, n_periods)
