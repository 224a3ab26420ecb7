"""Random-search training of the network parameters.

The trainable parameters are the four feed currents (pattern ON/OFF
currents plus the reference and output currents) and the three coupling
strengths. A parameter set is scored by simulating the representative
pattern of every symmetry class and reading the (0, 10) synchronization:
the score P is the number of classes that synchronize, provided every
synchronized class locks at a distinct exact (M_j, M_i) ratio and no two
share one. Duplicate ratios make the whole attempt invalid (scored 0);
ratios are compared as exact integer pairs, so 2:4 and 1:2 are distinct
synchronous states.

Search runs in three steps of pure random sampling: the full ranges, the
ranges narrowed 5x around the best attempt so far, then 25x (both factors
relative to the original ranges, clipped to the global bounds). Currents
are drawn on a 1 uA lattice; coupling strengths on a grid of 0.1% of the
active range width. Draws that would let a coupling sum pull an effective
threshold below the holder voltage are rejected and redrawn.

Every attempt is reproducible in isolation: attempt (step, k) derives its
parameter draw and all of its per-class simulation seeds from the master
seed through a fixed spawn-key hierarchy, so results are identical no
matter how many workers run or in which order attempts finish.
"""
from __future__ import annotations

import math
import multiprocessing
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .metrics import DEFAULT_DISCARD, DEFAULT_ETA_TH, DEFAULT_TOL, compute_sync
from .network import (
    NetworkConfig,
    OUT_OSC,
    REF_OSC,
    build_coupling_matrix,
    check_coupling_constraint,
    simulate,
)
from .patterns import ClassTable, enumerate_classes, pattern_currents
from .switch import SwitchParams

CURRENT_LO = 550e-6
CURRENT_HI = 1061e-6
CURRENT_STEP = 1e-6
COUPLING_GRID_POINTS = 1000  # pitch = range width / 1000 (0.1%)


@dataclass(frozen=True)
class ParamSet:
    """One trainable parameter set (currents in amperes, couplings in volts)."""

    i_on: float
    i_off: float
    i_0: float
    i_10: float
    s_r: float
    s_m: float
    s_o: float
    u_n0: float = 80e-6      # fixed during a search
    eta_th: float = DEFAULT_ETA_TH

    def check(self, switch: SwitchParams | None = None) -> bool:
        """True when all values lie in the global ranges and satisfy the
        coupling constraint."""
        cur_ok = all(
            CURRENT_LO - 1e-12 <= v <= CURRENT_HI + 1e-12
            for v in (self.i_on, self.i_off, self.i_0, self.i_10)
        )
        rng_full = ParamRanges()
        cpl_ok = (
            rng_full.s_r[0] <= self.s_r <= rng_full.s_r[1]
            and rng_full.s_m[0] <= self.s_m <= rng_full.s_m[1]
            and rng_full.s_o[0] <= self.s_o <= rng_full.s_o[1]
        )
        return cur_ok and cpl_ok and check_coupling_constraint(
            self.s_r, self.s_m, self.s_o, switch
        )


@dataclass(frozen=True)
class ParamRanges:
    """Per-parameter (lo, hi) sampling intervals."""

    i_on: tuple[float, float] = (CURRENT_LO, CURRENT_HI)
    i_off: tuple[float, float] = (CURRENT_LO, CURRENT_HI)
    i_0: tuple[float, float] = (CURRENT_LO, CURRENT_HI)
    i_10: tuple[float, float] = (CURRENT_LO, CURRENT_HI)
    s_r: tuple[float, float] = (0.0, 0.2)
    s_m: tuple[float, float] = (0.0, 0.5)
    s_o: tuple[float, float] = (0.0, 0.3)

    @classmethod
    def full(cls) -> "ParamRanges":
        return cls()

    def narrowed(self, factor: float, center: ParamSet) -> "ParamRanges":
        """Ranges shrunk to 1/factor of the *original* widths around ``center``,
        clipped to the global bounds."""
        full = ParamRanges()

        def clip(full_rng, c):
            lo_f, hi_f = full_rng
            half = (hi_f - lo_f) / factor / 2.0
            return (max(lo_f, c - half), min(hi_f, c + half))

        return ParamRanges(
            i_on=clip(full.i_on, center.i_on),
            i_off=clip(full.i_off, center.i_off),
            i_0=clip(full.i_0, center.i_0),
            i_10=clip(full.i_10, center.i_10),
            s_r=clip(full.s_r, center.s_r),
            s_m=clip(full.s_m, center.s_m),
            s_o=clip(full.s_o, center.s_o),
        )


@dataclass(frozen=True)
class SolutionRecord:
    """Evaluation outcome of one parameter set."""

    params: ParamSet
    mapping: tuple[tuple[int, tuple[int, int]], ...]  # (class_id, (M_j, M_i))
    p_value: int
    valid: bool


@dataclass(frozen=True)
class AttemptRecord:
    step: int
    attempt: int
    record: SolutionRecord


@dataclass(frozen=True)
class SearchSettings:
    """Knobs of one annealing run (network geometry excluded: it is fixed)."""

    u_n0: float = 80e-6
    eta_th: float = DEFAULT_ETA_TH
    attempts_per_step: int = 1000
    seed: int = 0
    n_points: int = 250_000
    tol: int = DEFAULT_TOL
    discard: int = DEFAULT_DISCARD
    workers: int = 1
    narrow_factors: tuple[float, ...] = (1.0, 5.0, 25.0)
    capacitance: float = 100e-9
    dt: float = 1e-5


@dataclass
class AnnealResult:
    best: SolutionRecord | None
    attempts: list[AttemptRecord]
    histograms: list[dict[int, int]]  # per step: P -> attempt count


def _draw_current(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Uniform draw on the 1 uA lattice inside [lo, hi]."""
    k_lo = math.ceil((lo - CURRENT_LO) / CURRENT_STEP - 1e-9)
    k_hi = math.floor((hi - CURRENT_LO) / CURRENT_STEP + 1e-9)
    if k_hi < k_lo:
        k_hi = k_lo  # degenerate interval between lattice points
    k = int(rng.integers(k_lo, k_hi + 1))
    return round(550 + k) * 1e-6


def _draw_coupling(rng: np.random.Generator, lo: float, hi: float) -> float:
    """Uniform draw on the 0.1%-of-range grid anchored at lo."""
    if hi <= lo:
        return lo
    step = (hi - lo) / COUPLING_GRID_POINTS
    k = int(rng.integers(0, COUPLING_GRID_POINTS + 1))
    return lo + step * k


def sample_params(
    ranges: ParamRanges,
    rng: np.random.Generator,
    *,
    u_n0: float = 80e-6,
    eta_th: float = DEFAULT_ETA_TH,
    switch: SwitchParams | None = None,
    max_tries: int = 100_000,
) -> ParamSet:
    """Rejection-sample one grid-aligned parameter set satisfying the
    coupling constraint."""
    for _ in range(max_tries):
        ps = ParamSet(
            i_on=_draw_current(rng, *ranges.i_on),
            i_off=_draw_current(rng, *ranges.i_off),
            i_0=_draw_current(rng, *ranges.i_0),
            i_10=_draw_current(rng, *ranges.i_10),
            s_r=_draw_coupling(rng, *ranges.s_r),
            s_m=_draw_coupling(rng, *ranges.s_m),
            s_o=_draw_coupling(rng, *ranges.s_o),
            u_n0=u_n0,
            eta_th=eta_th,
        )
        if check_coupling_constraint(ps.s_r, ps.s_m, ps.s_o, switch):
            return ps
    raise RuntimeError(
        f"no constraint-satisfying parameter point found in {max_tries} draws; "
        f"ranges {ranges} admit no valid couplings"
    )


def build_feed(ps: ParamSet, pattern_n: int) -> np.ndarray:
    """Feed-current vector for one pattern: reference, nine cells, output."""
    feed = np.empty(11)
    feed[REF_OSC] = ps.i_0
    feed[1:10] = pattern_currents(pattern_n, ps.i_on, ps.i_off)
    feed[OUT_OSC] = ps.i_10
    return feed


def evaluate_params(
    ps: ParamSet,
    table: ClassTable,
    *,
    seed: "int | np.random.SeedSequence" = 0,
    n_points: int = 250_000,
    tol: int = DEFAULT_TOL,
    discard: int = DEFAULT_DISCARD,
    capacitance: float = 100e-9,
    dt: float = 1e-5,
    switch: SwitchParams | None = None,
    short_circuit: bool = True,
) -> SolutionRecord:
    """Score a parameter set over every symmetry class.

    Simulates the class representatives in class order, reads the (0, 10)
    synchronization, and collects the class -> ratio mapping. A ratio seen
    twice invalidates the attempt; with ``short_circuit`` the remaining
    classes are skipped at that point (the outcome is already decided).
    """
    switch = switch or SwitchParams()
    seed_root = (
        seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    )
    class_seeds = seed_root.spawn(len(table))
    coupling = build_coupling_matrix(ps.s_r, ps.s_m, ps.s_o)
    mapping: list[tuple[int, tuple[int, int]]] = []
    seen: set[tuple[int, int]] = set()
    duplicate = False
    for cls, cls_seed in zip(table.classes, class_seeds):
        cfg = NetworkConfig(
            feed_currents=build_feed(ps, cls.representative),
            coupling=coupling,
            noise_amplitude=ps.u_n0,
            capacitance=capacitance,
            dt=dt,
            n_points=n_points,
            seed=cls_seed,
            switch=switch,
        )
        result = simulate(cfg, record_currents=False)
        sync = compute_sync(
            result.pulse_trains[REF_OSC],
            result.pulse_trains[OUT_OSC],
            tol=tol,
            eta_th=ps.eta_th,
            discard=discard,
        )
        if not sync.synchronized:
            continue
        if sync.shr in seen:
            duplicate = True
            if short_circuit:
                break
            continue
        seen.add(sync.shr)
        mapping.append((cls.class_id, sync.shr))
    if duplicate:
        return SolutionRecord(ps, (), 0, False)
    return SolutionRecord(ps, tuple(mapping), len(mapping), True)


_worker_table: ClassTable | None = None


def _init_worker() -> None:
    global _worker_table
    _worker_table = enumerate_classes()


def _run_attempt(payload) -> SolutionRecord:
    seed, seed_prefix, step_idx, attempt_idx, ranges, settings = payload
    table = _worker_table if _worker_table is not None else enumerate_classes()
    ss = np.random.SeedSequence(
        seed, spawn_key=(*seed_prefix, step_idx, attempt_idx)
    )
    param_ss, sim_ss = ss.spawn(2)
    rng = np.random.Generator(np.random.SFC64(param_ss))
    ps = sample_params(ranges, rng, u_n0=settings.u_n0, eta_th=settings.eta_th)
    return evaluate_params(
        ps,
        table,
        seed=sim_ss,
        n_points=settings.n_points,
        tol=settings.tol,
        discard=settings.discard,
        capacitance=settings.capacitance,
        dt=settings.dt,
    )


def run_search_step(
    ranges: ParamRanges,
    settings: SearchSettings,
    table: ClassTable | None = None,
    step_idx: int = 0,
    seed_prefix: tuple[int, ...] = (),
    progress=None,
) -> list[SolutionRecord]:
    """Evaluate ``attempts_per_step`` independent random draws from ``ranges``.

    Attempt results depend only on (master seed, seed_prefix, step_idx,
    attempt index), never on worker count or scheduling. ``progress`` is an
    optional callable invoked with (done, total).
    """
    payloads = [
        (settings.seed, seed_prefix, step_idx, k, ranges, settings)
        for k in range(settings.attempts_per_step)
    ]
    records: list[SolutionRecord]
    if settings.workers > 1:
        global _worker_table
        if table is not None:
            _worker_table = table  # reused by fork-based workers
        chunk = max(1, len(payloads) // (settings.workers * 8))
        with multiprocessing.Pool(settings.workers, initializer=_init_worker) as pool:
            records = []
            for done, rec in enumerate(pool.imap(_run_attempt, payloads, chunk), 1):
                records.append(rec)
                if progress:
                    progress(done, len(payloads))
    else:
        if table is None:
            table = enumerate_classes()
        records = []
        for done, payload in enumerate(payloads, 1):
            records.append(_run_attempt_with_table(payload, table))
            if progress:
                progress(done, len(payloads))
    return records


def _run_attempt_with_table(payload, table: ClassTable) -> SolutionRecord:
    global _worker_table
    prev, _worker_table = _worker_table, table
    try:
        return _run_attempt(payload)
    finally:
        _worker_table = prev


def _better(a: SolutionRecord, b: SolutionRecord | None) -> bool:
    """True when a outranks b: valid first, then higher P (earlier wins ties)."""
    if b is None:
        return True
    return (a.valid, a.p_value) > (b.valid, b.p_value)


def anneal(
    settings: SearchSettings,
    table: ClassTable | None = None,
    progress=None,
) -> AnnealResult:
    """Three-step random search with range narrowing around the running best.

    Returns the best record across all steps (None only when every attempt
    failed to produce a record, which cannot happen for positive attempt
    counts), the full attempt log, and the per-step histogram of P values.
    """
    if table is None:
        table = enumerate_classes()
    attempts: list[AttemptRecord] = []
    histograms: list[dict[int, int]] = []
    best: SolutionRecord | None = None
    ranges = ParamRanges.full()
    for step_idx, factor in enumerate(settings.narrow_factors):
        if step_idx > 0 and best is not None:
            ranges = ParamRanges.full().narrowed(factor, best.params)
        step_progress = None
        if progress:
            step_progress = lambda done, total, s=step_idx: progress(s, done, total)
        records = run_search_step(
            ranges, settings, table, step_idx=step_idx, progress=step_progress
        )
        for k, rec in enumerate(records):
            attempts.append(AttemptRecord(step_idx + 1, k, rec))
            if _better(rec, best):
                best = rec
        histograms.append(dict(Counter(rec.p_value for rec in records)))
    return AnnealResult(best, attempts, histograms)


def write_attempt_log_csv(path, attempts: list[AttemptRecord]) -> None:
    """Attempt log: step,attempt,i_on,i_off,i_0,i_10,s_r,s_m,s_o,p_value,valid."""
    with open(path, "w") as f:
        f.write("step,attempt,i_on,i_off,i_0,i_10,s_r,s_m,s_o,p_value,valid\n")
        for rec in attempts:
            ps = rec.record.params
            vals = [ps.i_on, ps.i_off, ps.i_0, ps.i_10, ps.s_r, ps.s_m, ps.s_o]
            row = ",".join(repr(v) for v in vals)
            f.write(
                f"{rec.step},{rec.attempt},{row},"
                f"{rec.record.p_value},{int(rec.record.valid)}\n"
            )


def solution_json_dict(record: SolutionRecord | None) -> dict:
    """Best-solution report: full parameter list plus the class -> ratio map."""
    if record is None:
        return {"found": False}
    ps = record.params
    return {
        "found": True,
        "valid": record.valid,
        "p_value": record.p_value,
        "params": {
            "i_on": ps.i_on,
            "i_off": ps.i_off,
            "i_0": ps.i_0,
            "i_10": ps.i_10,
            "s_r": ps.s_r,
            "s_m": ps.s_m,
            "s_o": ps.s_o,
            "u_n0": ps.u_n0,
            "eta_th": ps.eta_th,
        },
        "mapping": [
            {"class_id": cid, "shr": [mj, mi], "shr_real": mj / mi}
            for cid, (mj, mi) in record.mapping
        ],
        "note": "ratios compared as exact integer pairs; 2:4 and 1:2 are distinct states",
    }
