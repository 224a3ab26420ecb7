"""Network of 11 thermally coupled relaxation oscillators.

Topology: oscillator 0 is the reference and unidirectionally drives every
other oscillator with strength ``s_r``; oscillators 1..9 form a 3x3 grid
with symmetric nearest-neighbour (4-neighbour) couplings ``s_m`` and each
unidirectionally drives the output oscillator 10 with strength ``s_o``.
Nothing drives oscillator 0 and oscillator 10 drives nothing.

Each oscillator is a current-fed capacitor across a two-state switch (see
:mod:`vo2onn.switch`) with an independent Gaussian noise source in series
with the switch, so the switch sees ``u = u_c - u_n``. While a switch
conducts it lowers the thresholds of its coupling targets, which can make
a target fire in the same timestep (the cascade is resolved to a fixed
point before the capacitors are advanced). The capacitor update is the
closed-form relaxation of the active linear branch over one ``dt``, with
the noise sample held constant across the step:

    OFF: u_c -> I_p*r_off + u_n + (u_c - I_p*r_off - u_n) * exp(-dt/(r_off*C))
    ON:  u_c -> u_cf + I_p*r_on + u_n + (...) * exp(-dt/(r_on*C))

A simulation records the switch-current oscillograms and, per oscillator,
the pulse leading edges: the timestep indices of every OFF->ON transition.
Runs are bitwise reproducible from (config, seed); noise is drawn from one
per-oscillator substream each, spawned from the master seed, so results do
not depend on worker scheduling.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import simcore
from .switch import SwitchParams

N_OSC = 11
REF_OSC = 0
OUT_OSC = 10
GRID_OSC = range(1, 10)

# Feed-current band that sustains self-oscillation for the default switch;
# values outside it are allowed but warned about (noise can still trigger
# switching near the edges).
OSC_CURRENT_MIN = 550e-6
OSC_CURRENT_MAX = 1061e-6


@dataclass(frozen=True)
class CouplingMatrix:
    """11x11 thermal coupling strengths in volts, indexed [source][target]."""

    s: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=np.float64)
        if s.shape != (N_OSC, N_OSC):
            raise ValueError(f"coupling matrix must be {N_OSC}x{N_OSC}, got {s.shape}")
        if np.any(s < 0.0):
            raise ValueError("coupling strengths must be non-negative")
        if np.any(np.diag(s) != 0.0):
            raise ValueError("self-coupling entries must be zero")
        if np.any(s[:, REF_OSC] != 0.0):
            raise ValueError("nothing may drive the reference oscillator")
        if np.any(s[OUT_OSC, :] != 0.0):
            raise ValueError("the output oscillator drives nothing")
        object.__setattr__(self, "s", s)

    def incoming_sum(self, target: int) -> float:
        """Largest possible threshold reduction seen by ``target``."""
        return float(self.s[:, target].sum())


def _grid_neighbors() -> list[tuple[int, int]]:
    pairs = []
    for a in GRID_OSC:
        ra, ca = divmod(a - 1, 3)
        for b in GRID_OSC:
            if b <= a:
                continue
            rb, cb = divmod(b - 1, 3)
            if abs(ra - rb) + abs(ca - cb) == 1:
                pairs.append((a, b))
    return pairs


_NEIGHBOR_PAIRS = _grid_neighbors()


def build_coupling_matrix(s_r: float, s_m: float, s_o: float) -> CouplingMatrix:
    """Assemble the network coupling matrix from the three strengths.

    ``s_r``: reference 0 -> everyone, ``s_m``: symmetric 4-neighbour grid
    couplings among 1..9, ``s_o``: grid -> output 10. Strengths in volts,
    all must be non-negative.
    """
    if s_r < 0.0 or s_m < 0.0 or s_o < 0.0:
        raise ValueError(f"coupling strengths must be >= 0, got ({s_r}, {s_m}, {s_o})")
    s = np.zeros((N_OSC, N_OSC))
    s[REF_OSC, 1:] = s_r
    for a, b in _NEIGHBOR_PAIRS:
        s[a, b] = s_m
        s[b, a] = s_m
    s[1:10, OUT_OSC] = s_o
    return CouplingMatrix(s)


def check_coupling_constraint(
    s_r: float, s_m: float, s_o: float, p: SwitchParams | None = None
) -> bool:
    """True when no oscillator's threshold can be pulled down to the holder.

    The worst-case incoming sums are s_r + 9*s_o (output oscillator) and
    s_r + 4*s_m (central grid oscillator); both must stay strictly below
    u_th - u_h (3.5 V for the default switch).
    """
    p = p or SwitchParams()
    bound = p.u_th - p.u_h
    return (s_r + 9.0 * s_o) < bound and (s_r + 4.0 * s_m) < bound


@dataclass
class NetworkConfig:
    """Everything one simulation needs, including its RNG seed."""

    feed_currents: np.ndarray                  # 11 values, amperes
    coupling: CouplingMatrix
    noise_amplitude: float = 0.0               # volts (std dev scale)
    capacitance: float = 100e-9                # farads
    dt: float = 1e-5                           # seconds
    n_points: int = 250_000
    seed: "int | np.random.SeedSequence" = 0
    switch: SwitchParams = field(default_factory=SwitchParams)

    def __post_init__(self) -> None:
        feed = np.asarray(self.feed_currents, dtype=np.float64)
        if feed.shape != (N_OSC,):
            raise ValueError(f"feed_currents must have shape ({N_OSC},), got {feed.shape}")
        self.feed_currents = feed
        if self.dt <= 0.0:
            raise ValueError("dt must be positive")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")
        if self.noise_amplitude < 0.0:
            raise ValueError("noise_amplitude must be >= 0")
        outside = [
            i for i, v in enumerate(feed)
            if not (OSC_CURRENT_MIN - 1e-12 <= v <= OSC_CURRENT_MAX + 1e-12)
        ]
        if outside:
            warnings.warn(
                f"feed currents outside the self-oscillation band "
                f"[{OSC_CURRENT_MIN*1e6:.0f}, {OSC_CURRENT_MAX*1e6:.0f}] uA "
                f"for oscillators {outside}; those may not oscillate",
                stacklevel=2,
            )


@dataclass
class NetworkState:
    """Mutable simulation state at one timestep."""

    cap_voltages: np.ndarray   # 11 capacitor voltages, volts
    on: np.ndarray             # 11 uint8 flags, 1 while the switch conducts
    time_index: int = 0


@dataclass(frozen=True)
class PulseTrain:
    """Timestep indices of the OFF->ON (pulse leading edge) transitions."""

    edges: np.ndarray

    def __post_init__(self) -> None:
        e = np.asarray(self.edges, dtype=np.int64)
        if e.ndim != 1 or (e.size > 1 and np.any(np.diff(e) <= 0)):
            raise ValueError("edge indices must be a strictly increasing 1-d array")
        object.__setattr__(self, "edges", e)

    def __len__(self) -> int:
        return int(self.edges.size)


@dataclass
class SimulationResult:
    currents: np.ndarray | None        # (n_points, 11) switch currents, A
    pulse_trains: list[PulseTrain]     # one per oscillator
    final_state: NetworkState


def cold_start() -> NetworkState:
    """All capacitors discharged, all switches OFF."""
    return NetworkState(
        cap_voltages=np.zeros(N_OSC),
        on=np.zeros(N_OSC, dtype=np.uint8),
        time_index=0,
    )


def gen_noise(seed: "int | np.random.SeedSequence", n: int, u_n0: float) -> np.ndarray:
    """One oscillator's noise sequence: u_n0 * standard normal, length n.

    The SFC64 bit generator is pinned so that seeded runs stay
    reproducible across numpy versions that change the default generator.
    """
    if u_n0 < 0.0:
        raise ValueError("u_n0 must be >= 0")
    if u_n0 == 0.0:
        return np.zeros(n)
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    return u_n0 * np.random.Generator(np.random.SFC64(ss)).standard_normal(n)


def noise_matrix(seed: "int | np.random.SeedSequence", n: int, u_n0: float) -> np.ndarray:
    """(11, n) noise array, one independent substream per oscillator row."""
    if u_n0 == 0.0:
        return np.zeros((N_OSC, n))
    ss = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    out = np.empty((N_OSC, n))
    for i, child in enumerate(ss.spawn(N_OSC)):
        gen = np.random.Generator(np.random.SFC64(child))
        gen.standard_normal(n, out=out[i])
        out[i] *= u_n0
    return out


def _effective_thresholds(s: np.ndarray, on: np.ndarray, u_th: float) -> np.ndarray:
    u_eff = np.full(N_OSC, u_th)
    for j in range(N_OSC):
        if on[j]:
            for k in range(N_OSC):
                u_eff[k] -= s[j, k]
    return u_eff


def _branch_constants(cfg: NetworkConfig):
    p = cfg.switch
    decay_off = math.exp(-cfg.dt / (p.r_off * cfg.capacitance))
    decay_on = math.exp(-cfg.dt / (p.r_on * cfg.capacitance))
    base_off = cfg.feed_currents * p.r_off
    base_on = p.u_cf + cfg.feed_currents * p.r_on
    return decay_off, decay_on, base_off, base_on


def step(state: NetworkState, cfg: NetworkConfig, noise: np.ndarray) -> NetworkState:
    """Advance one timestep with the given 11 noise samples.

    Settles the switch-state cascade at the current voltages, then relaxes
    each capacitor one ``dt`` on its active branch. Reference semantics for
    the batch stepper; always runs on the pure-Python backend.
    """
    noise = np.ascontiguousarray(noise, dtype=np.float64).reshape(N_OSC, 1)
    u_c = state.cap_voltages.astype(np.float64).copy()
    on = state.on.astype(np.uint8).copy()
    u_eff = _effective_thresholds(cfg.coupling.s, on, cfg.switch.u_th)
    decay_off, decay_on, base_off, base_on = _branch_constants(cfg)
    simcore.run_network(
        u_c, on, u_eff, base_off, base_on, decay_off, decay_on,
        cfg.coupling.s, noise, cfg.switch.u_h, cfg.switch.u_cf,
        cfg.switch.r_off, cfg.switch.r_on, None, backend="python",
    )
    return NetworkState(u_c, on, state.time_index + 1)


def simulate(
    cfg: NetworkConfig,
    *,
    record_currents: bool = True,
    noise: np.ndarray | None = None,
    initial_state: NetworkState | None = None,
) -> SimulationResult:
    """Run ``cfg.n_points`` timesteps from a cold start.

    ``noise`` overrides the internally generated (11, n_points) array (one
    row per oscillator), for experiments that permute or reuse noise
    streams. Pulse-train edge indices are absolute (offset by the initial
    state's time_index).
    """
    state = initial_state if initial_state is not None else cold_start()
    n = cfg.n_points
    if noise is None:
        noise = noise_matrix(cfg.seed, n, cfg.noise_amplitude)
    else:
        noise = np.ascontiguousarray(noise, dtype=np.float64)
        if noise.shape != (N_OSC, n):
            raise ValueError(f"noise must have shape ({N_OSC}, {n}), got {noise.shape}")
    currents = np.empty((n, N_OSC)) if record_currents else None
    u_c = state.cap_voltages.astype(np.float64).copy()
    on = state.on.astype(np.uint8).copy()
    u_eff = _effective_thresholds(cfg.coupling.s, on, cfg.switch.u_th)
    decay_off, decay_on, base_off, base_on = _branch_constants(cfg)
    edges = simcore.run_network(
        u_c, on, u_eff, base_off, base_on, decay_off, decay_on,
        cfg.coupling.s, noise, cfg.switch.u_h, cfg.switch.u_cf,
        cfg.switch.r_off, cfg.switch.r_on, currents,
    )
    offset = state.time_index
    trains = [
        PulseTrain(np.asarray(e, dtype=np.int64) + offset) for e in edges
    ]
    final = NetworkState(u_c, on, offset + n)
    return SimulationResult(currents, trains, final)


def natural_period(
    i_p: float, p: SwitchParams | None = None, capacitance: float = 100e-9
) -> float:
    """Noiseless single-oscillator period from the RC relaxation formula.

    Charging: r_off*C * ln((I_p*r_off - u_h)/(I_p*r_off - u_th)) from the
    holder voltage up to threshold; discharging: r_on*C * ln((u_th - u_eq)
    /(u_h - u_eq)) with the ON-branch equilibrium u_eq = u_cf + I_p*r_on.
    Returns NaN when the oscillator latches (no self-oscillation).
    """
    p = p or SwitchParams()
    top = i_p * p.r_off
    u_eq = p.u_cf + i_p * p.r_on
    if top <= p.u_th or u_eq >= p.u_h:
        return math.nan
    t_off = p.r_off * capacitance * math.log((top - p.u_h) / (top - p.u_th))
    t_on = p.r_on * capacitance * math.log((p.u_th - u_eq) / (p.u_h - u_eq))
    return t_off + t_on


def natural_frequency(
    i_p: float, p: SwitchParams | None = None, capacitance: float = 100e-9
) -> float:
    """1 / natural_period; NaN when the oscillator does not oscillate."""
    return 1.0 / natural_period(i_p, p, capacitance)


def write_oscillograms_csv(path, currents: np.ndarray) -> None:
    """CSV export: header t_index,osc0_current,...,osc10_current (amperes)."""
    with open(path, "w") as f:
        cols = ",".join(f"osc{i}_current" for i in range(N_OSC))
        f.write(f"t_index,{cols}\n")
        for t in range(currents.shape[0]):
            row = ",".join(repr(float(v)) for v in currents[t])
            f.write(f"{t},{row}\n")


def write_pulse_trains_csv(path, trains: list[PulseTrain]) -> None:
    """CSV export: one row per edge, columns osc_index,edge_t_index."""
    with open(path, "w") as f:
        f.write("osc_index,edge_t_index\n")
        for i, train in enumerate(trains):
            for e in train.edges:
                f.write(f"{i},{int(e)}\n")
