"""Command-line driver for the network experiments.

Every command resolves its parameters from built-in defaults, an optional
JSON config file (--config), then command-line flags, writes a manifest
with the fully resolved configuration next to its outputs, and emits data
as CSV/JSON only. Progress goes to stderr. Re-running a command with the
same config and seed reproduces every output byte for byte, independent
of --threads.
"""
from __future__ import annotations

import argparse
import json
import math
import multiprocessing
import os
import sys

import numpy as np

from . import __version__, metrics, network, patterns, trainer

AXIS_NAMES = ("i_0", "i_10", "i_on", "i_off")


class ConfigError(Exception):
    pass


def _log(msg: str) -> None:
    print(msg, file=sys.stderr, flush=True)


def _fmt(v) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_manifest(out_dir: str, command: str, seed: int, config: dict) -> None:
    manifest = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
    }
    with open(os.path.join(out_dir, "manifest.json"), "w") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")


def _resolve(args, defaults: dict) -> dict:
    cfg = dict(defaults)
    if args.config:
        try:
            with open(args.config) as f:
                file_cfg = json.load(f)
        except (OSError, json.JSONDecodeError) as e:
            raise ConfigError(f"cannot read config {args.config}: {e}") from e
        if not isinstance(file_cfg, dict):
            raise ConfigError(f"config {args.config} must hold a JSON object")
        unknown = sorted(set(file_cfg) - set(defaults))
        if unknown:
            raise ConfigError(
                f"unknown config keys {unknown}; valid keys: {sorted(defaults)}"
            )
        cfg.update(file_cfg)
    for key in defaults:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    return cfg


def _add_config_flags(parser: argparse.ArgumentParser, defaults: dict) -> None:
    for key, default in defaults.items():
        flag = "--" + key.replace("_", "-")
        if isinstance(default, bool):
            parser.add_argument(flag, dest=key, default=None,
                                type=lambda s: s.lower() in ("1", "true", "yes"))
        elif isinstance(default, int):
            parser.add_argument(flag, dest=key, default=None, type=int)
        elif isinstance(default, float):
            parser.add_argument(flag, dest=key, default=None, type=float)
        elif isinstance(default, list):
            parser.add_argument(
                flag, dest=key, default=None,
                type=lambda s: [float(x) for x in s.split(",") if x.strip()],
            )
        else:
            parser.add_argument(flag, dest=key, default=None, type=type(default))


def _param_set(cfg: dict) -> trainer.ParamSet:
    return trainer.ParamSet(
        i_on=cfg["i_on"], i_off=cfg["i_off"], i_0=cfg["i_0"], i_10=cfg["i_10"],
        s_r=cfg["s_r"], s_m=cfg["s_m"], s_o=cfg["s_o"],
        u_n0=cfg["u_n0"], eta_th=cfg["eta_th"],
    )


def _network_config(ps: trainer.ParamSet, pattern: int, n_points: int, seed) -> network.NetworkConfig:
    return network.NetworkConfig(
        feed_currents=trainer.build_feed(ps, pattern),
        coupling=network.build_coupling_matrix(ps.s_r, ps.s_m, ps.s_o),
        noise_amplitude=ps.u_n0,
        n_points=n_points,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# simulate
# ---------------------------------------------------------------------------

SIMULATE_DEFAULTS = {
    "pattern": 489,
    "i_on": 722e-6, "i_off": 1034e-6, "i_0": 1020e-6, "i_10": 887e-6,
    "s_r": 0.10176, "s_m": 0.202, "s_o": 0.29202,
    "u_n0": 80e-6, "eta_th": 90.0,
    "n_points": 250_000, "tol": 2, "discard": 5,
    "pair_i": 0, "pair_j": 10,
    "fft_channel": -1,           # -1 disables the spectrum diagnostic
    "write_oscillograms": True,
}


def cmd_simulate(args) -> int:
    cfg = _resolve(args, SIMULATE_DEFAULTS)
    out = args.out_dir
    ps = _param_set(cfg)
    net_cfg = _network_config(ps, cfg["pattern"], cfg["n_points"], args.seed)
    _log(f"simulate: pattern {cfg['pattern']}, {cfg['n_points']} points")
    res = network.simulate(net_cfg, record_currents=True)
    if cfg["write_oscillograms"]:
        network.write_oscillograms_csv(os.path.join(out, "oscillograms.csv"), res.currents)
    network.write_pulse_trains_csv(os.path.join(out, "pulse_trains.csv"), res.pulse_trains)
    sync = metrics.compute_sync(
        res.pulse_trains[cfg["pair_i"]], res.pulse_trains[cfg["pair_j"]],
        tol=cfg["tol"], eta_th=cfg["eta_th"], discard=cfg["discard"],
    )
    report = sync.to_json_dict()
    report["pair"] = [cfg["pair_i"], cfg["pair_j"]]
    report["pulse_counts"] = [len(t) for t in res.pulse_trains]
    with open(os.path.join(out, "metrics.json"), "w") as f:
        json.dump(report, f, indent=2, sort_keys=True)
        f.write("\n")
    ch = cfg["fft_channel"]
    if ch >= 0:
        trace = res.currents[:, ch] - res.currents[:, ch].mean()
        amp = np.abs(np.fft.rfft(trace))
        freq = np.fft.rfftfreq(trace.size, d=net_cfg.dt)
        with open(os.path.join(out, "fft.csv"), "w") as f:
            f.write("freq_hz,amplitude\n")
            for fr, a in zip(freq, amp):
                f.write(f"{_fmt(float(fr))},{_fmt(float(a))}\n")
    _write_manifest(out, "simulate", args.seed, cfg)
    return 0


# ---------------------------------------------------------------------------
# sweep2d
# ---------------------------------------------------------------------------

SWEEP2D_DEFAULTS = {
    "axis1": "i_0", "axis2": "i_10",
    "axis1_min": 550e-6, "axis1_max": 1061e-6, "axis1_steps": 64,
    "axis2_min": 550e-6, "axis2_max": 1061e-6, "axis2_steps": 64,
    "pattern": 489,
    "i_on": 725e-6, "i_off": 1036e-6, "i_0": 1017e-6, "i_10": 891e-6,
    "s_r": 0.3, "s_m": 0.207, "s_o": 0.0,
    "u_n0": 80e-6, "eta_th": 90.0,
    "n_points": 250_000, "tol": 2, "discard": 5,
}


def _sweep_point(payload):
    cfg, a1, a2, v1, v2, seed_key, master_seed = payload
    point = dict(cfg)
    point[a1] = v1
    point[a2] = v2
    ps = _param_set(point)
    seed = np.random.SeedSequence(master_seed, spawn_key=seed_key)
    net_cfg = _network_config(ps, point["pattern"], point["n_points"], seed)
    res = network.simulate(net_cfg, record_currents=False)
    sync = metrics.compute_sync(
        res.pulse_trains[network.REF_OSC], res.pulse_trains[network.OUT_OSC],
        tol=point["tol"], eta_th=point["eta_th"], discard=point["discard"],
    )
    return sync.shr_real if sync.synchronized else None, sync.eta


def cmd_sweep2d(args) -> int:
    cfg = _resolve(args, SWEEP2D_DEFAULTS)
    a1, a2 = cfg["axis1"], cfg["axis2"]
    if a1 not in AXIS_NAMES or a2 not in AXIS_NAMES or a1 == a2:
        raise ConfigError(f"axes must be two distinct names from {AXIS_NAMES}")
    v1s = np.linspace(cfg["axis1_min"], cfg["axis1_max"], cfg["axis1_steps"])
    v2s = np.linspace(cfg["axis2_min"], cfg["axis2_max"], cfg["axis2_steps"])
    payloads = [
        (cfg, a1, a2, float(v1), float(v2), (i, j), args.seed)
        for i, v1 in enumerate(v1s)
        for j, v2 in enumerate(v2s)
    ]
    _log(f"sweep2d: {a1} x {a2}, {len(payloads)} points")
    results = _pool_map(_sweep_point, payloads, args.threads)
    with open(os.path.join(args.out_dir, "grid.csv"), "w") as f:
        f.write(f"{a1},{a2},shr_real,eta\n")
        for (_, _, _, v1, v2, _, _), (sr, eta) in zip(payloads, results):
            sr_txt = _fmt(sr) if sr is not None else ""
            f.write(f"{_fmt(v1)},{_fmt(v2)},{sr_txt},{_fmt(eta)}\n")
    _write_manifest(args.out_dir, "sweep2d", args.seed, cfg)
    return 0


def _pool_map(fn, payloads, threads):
    if threads > 1 and len(payloads) > 1:
        chunk = max(1, len(payloads) // (threads * 8))
        with multiprocessing.Pool(threads) as pool:
            return list(pool.imap(fn, payloads, chunk))
    return [fn(p) for p in payloads]


# ---------------------------------------------------------------------------
# noise-sweep / eta-sweep
# ---------------------------------------------------------------------------

NOISE_SWEEP_DEFAULTS = {
    "u_n_values": [round(20e-6 + k * 80e-6, 10) for k in range(12)],
    "attempts": 200,
    "eta_th": 90.0,
    "n_points": 250_000, "tol": 2, "discard": 5,
}


def cmd_noise_sweep(args) -> int:
    cfg = _resolve(args, NOISE_SWEEP_DEFAULTS)
    table = patterns.enumerate_classes()
    rows = []
    # Same seed hierarchy at every level: attempt k draws the same parameter
    # set and the same unit-variance noise streams everywhere, so the noise
    # amplitude is the only thing that varies across levels.
    for li, u_n in enumerate(cfg["u_n_values"]):
        settings = trainer.SearchSettings(
            u_n0=float(u_n), eta_th=cfg["eta_th"], attempts_per_step=cfg["attempts"],
            seed=args.seed, n_points=cfg["n_points"], tol=cfg["tol"],
            discard=cfg["discard"], workers=args.threads,
        )
        _log(f"noise-sweep: level {li + 1}/{len(cfg['u_n_values'])} (u_n={u_n*1e6:.0f} uV)")
        recs = trainer.run_search_step(
            trainer.ParamRanges.full(), settings, table,
            step_idx=0, seed_prefix=(),
            progress=lambda d, t: _log(f"  attempt {d}/{t}") if d % 50 == 0 else None,
        )
        counts = {}
        for rec in recs:
            counts[rec.p_value] = counts.get(rec.p_value, 0) + 1
        for p in sorted(counts):
            rows.append((float(u_n), p, counts[p]))
    with open(os.path.join(args.out_dir, "solutions.csv"), "w") as f:
        f.write("u_n,p,count\n")
        for u_n, p, c in rows:
            f.write(f"{_fmt(u_n)},{p},{c}\n")
    _write_manifest(args.out_dir, "noise-sweep", args.seed, cfg)
    return 0


ETA_SWEEP_DEFAULTS = {
    "eta_values": [round(10.0 + 3.6 * k, 10) for k in range(25)],
    "attempts": 200,
    "u_n0": 80e-6,
    "n_points": 250_000, "tol": 2, "discard": 5,
}


def _eta_sweep_attempt(payload):
    """One attempt shared across thresholds: per-class (eta, ratio) pairs."""
    master_seed, attempt_idx, settings_dict = payload
    table = _ETA_TABLE[0] if _ETA_TABLE else patterns.enumerate_classes()
    ss = np.random.SeedSequence(master_seed, spawn_key=(attempt_idx,))
    param_ss, sim_ss = ss.spawn(2)
    rng = np.random.Generator(np.random.SFC64(param_ss))
    ps = trainer.sample_params(
        trainer.ParamRanges.full(), rng,
        u_n0=settings_dict["u_n0"], eta_th=100.0,
    )
    class_seeds = sim_ss.spawn(len(table))
    coupling = network.build_coupling_matrix(ps.s_r, ps.s_m, ps.s_o)
    out = []
    for cls, cls_seed in zip(table.classes, class_seeds):
        net_cfg = network.NetworkConfig(
            feed_currents=trainer.build_feed(ps, cls.representative),
            coupling=coupling,
            noise_amplitude=ps.u_n0,
            n_points=settings_dict["n_points"],
            seed=cls_seed,
        )
        res = network.simulate(net_cfg, record_currents=False)
        sync = metrics.compute_sync(
            res.pulse_trains[network.REF_OSC], res.pulse_trains[network.OUT_OSC],
            tol=settings_dict["tol"], eta_th=100.0, discard=settings_dict["discard"],
        )
        if sync.shr is not None:
            out.append((cls.class_id, sync.eta, sync.shr))
    return out


_ETA_TABLE: list = []


def _init_eta_worker():
    _ETA_TABLE.clear()
    _ETA_TABLE.append(patterns.enumerate_classes())


def cmd_eta_sweep(args) -> int:
    cfg = _resolve(args, ETA_SWEEP_DEFAULTS)
    for eta in cfg["eta_values"]:
        if not (0.0 < eta < 100.0):
            raise ConfigError(f"eta_th values must lie in (0, 100), got {eta}")
    settings_dict = {
        "u_n0": cfg["u_n0"], "n_points": cfg["n_points"],
        "tol": cfg["tol"], "discard": cfg["discard"],
    }
    payloads = [(args.seed, k, settings_dict) for k in range(cfg["attempts"])]
    _log(f"eta-sweep: {cfg['attempts']} attempts shared across {len(cfg['eta_values'])} thresholds")
    if args.threads > 1:
        chunk = max(1, len(payloads) // (args.threads * 8))
        with multiprocessing.Pool(args.threads, initializer=_init_eta_worker) as pool:
            per_attempt = list(pool.imap(_eta_sweep_attempt, payloads, chunk))
    else:
        _init_eta_worker()
        per_attempt = []
        for k, p in enumerate(payloads, 1):
            per_attempt.append(_eta_sweep_attempt(p))
            if k % 25 == 0:
                _log(f"  attempt {k}/{len(payloads)}")
    rows = []
    for eta_th in cfg["eta_values"]:
        counts = {}
        for syncs in per_attempt:
            seen = set()
            dup = False
            for _cid, eta, shr in syncs:
                if eta >= eta_th:
                    if shr in seen:
                        dup = True
                        break
                    seen.add(shr)
            p = 0 if dup else len(seen)
            counts[p] = counts.get(p, 0) + 1
        for p in sorted(counts):
            rows.append((eta_th, p, counts[p]))
    with open(os.path.join(args.out_dir, "solutions.csv"), "w") as f:
        f.write("eta_th,p,count\n")
        for eta_th, p, c in rows:
            f.write(f"{_fmt(float(eta_th))},{p},{c}\n")
    _write_manifest(args.out_dir, "eta-sweep", args.seed, cfg)
    return 0


# ---------------------------------------------------------------------------
# base-sync
# ---------------------------------------------------------------------------

BASE_SYNC_DEFAULTS = {
    "s_r": 0.13, "i_0": 650e-6, "i_10": 950e-6,
    "pattern": 489,
    "samples": 200,
    "u_n0": 80e-6, "eta_th": 90.0,
    "n_points": 250_000, "tol": 2, "discard": 5,
    "baseline_i_on": 800e-6, "baseline_i_off": 800e-6,
}


def _base_sync_point(payload):
    cfg, s_o, s_m, i_on, i_off, seed_key, master_seed = payload
    ps = trainer.ParamSet(
        i_on=i_on, i_off=i_off, i_0=cfg["i_0"], i_10=cfg["i_10"],
        s_r=cfg["s_r"], s_m=s_m, s_o=s_o,
        u_n0=cfg["u_n0"], eta_th=cfg["eta_th"],
    )
    seed = np.random.SeedSequence(master_seed, spawn_key=seed_key)
    net_cfg = _network_config(ps, cfg["pattern"], cfg["n_points"], seed)
    res = network.simulate(net_cfg, record_currents=False)
    sync = metrics.compute_sync(
        res.pulse_trains[network.REF_OSC], res.pulse_trains[network.OUT_OSC],
        tol=cfg["tol"], eta_th=cfg["eta_th"], discard=cfg["discard"],
    )
    return s_o, s_m, i_on, i_off, sync


def cmd_base_sync(args) -> int:
    cfg = _resolve(args, BASE_SYNC_DEFAULTS)
    ranges = trainer.ParamRanges.full()
    rng = np.random.Generator(
        np.random.SFC64(np.random.SeedSequence(args.seed, spawn_key=(0,)))
    )
    payloads = [
        (cfg, 0.0, 0.0, cfg["baseline_i_on"], cfg["baseline_i_off"], (0, 0), args.seed)
    ]
    for k in range(cfg["samples"]):
        while True:
            s_o = trainer._draw_coupling(rng, *ranges.s_o)
            s_m = trainer._draw_coupling(rng, *ranges.s_m)
            if network.check_coupling_constraint(cfg["s_r"], s_m, s_o):
                break
        i_on = trainer._draw_current(rng, *ranges.i_on)
        i_off = trainer._draw_current(rng, *ranges.i_off)
        payloads.append((cfg, s_o, s_m, i_on, i_off, (1, k), args.seed))
    _log(f"base-sync: baseline + {cfg['samples']} randomized samples")
    results = _pool_map(_base_sync_point, payloads, args.threads)
    base = results[0][4]
    with open(os.path.join(args.out_dir, "samples.csv"), "w") as f:
        f.write("sample,s_o,s_m,i_on,i_off,shr_mj,shr_mi,shr_real,eta,synchronized\n")
        for idx, (s_o, s_m, i_on, i_off, sync) in enumerate(results):
            mj, mi = sync.shr if sync.shr else ("", "")
            sr = _fmt(sync.shr_real) if sync.shr else ""
            f.write(
                f"{idx - 1},{_fmt(s_o)},{_fmt(s_m)},{_fmt(i_on)},{_fmt(i_off)},"
                f"{mj},{mi},{sr},{_fmt(sync.eta)},{int(sync.synchronized)}\n"
            )
    varied = [r[4].shr_real for r in results[1:] if r[4].shr is not None]
    summary = {
        "baseline_shr": list(base.shr) if base.shr else None,
        "baseline_shr_real": base.shr_real if base.shr else None,
        "baseline_eta": base.eta,
        "n_samples": cfg["samples"],
        "n_with_ratio": len(varied),
        "min_shr_real": min(varied) if varied else None,
        "max_shr_real": max(varied) if varied else None,
        "dispersion_above_baseline": (
            max(varied) - base.shr_real if varied and base.shr else None
        ),
    }
    with open(os.path.join(args.out_dir, "summary.json"), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(args.out_dir, "base-sync", args.seed, cfg)
    return 0


# ---------------------------------------------------------------------------
# converge
# ---------------------------------------------------------------------------

CONVERGE_DEFAULTS = {
    "pattern": 3,
    "i_on": 725e-6, "i_off": 1035e-6, "i_0": 1017e-6, "i_10": 891e-6,
    "s_r": 0.1036, "s_m": 0.207, "s_o": 0.29298,
    "u_n0": 80e-6, "eta_th": 90.0,
    "n_points": 250_000, "tol": 2, "discard": 5,
    "prefix_step": 10_000,
}


def _span_sync(edges_i, edges_j, tol, eta_th, discard):
    """Sync over the locked span only: trims the partial head/tail intervals.

    The raw growing-prefix eta carries a sawtooth of amplitude
    eta * M_dominant / N_i from the open boundary intervals; evaluating
    between the first and last locked events removes that granularity, so
    this is the right curve for judging convergence of the estimate.
    """
    ei = np.asarray(edges_i, dtype=np.int64)[discard:]
    ej = np.asarray(edges_j, dtype=np.int64)[discard:]
    ev = metrics.match_locked_edges(ei, ej, tol).events
    if ev.shape[0] < 2:
        return None
    (a0, b0), (a1, b1) = ev[0], ev[-1]
    return metrics.compute_sync(
        ei[a0:a1 + 1], ej[b0:b1 + 1], tol=tol, eta_th=eta_th, discard=0
    )


def cmd_converge(args) -> int:
    cfg = _resolve(args, CONVERGE_DEFAULTS)
    ps = _param_set(cfg)
    net_cfg = _network_config(ps, cfg["pattern"], cfg["n_points"], args.seed)
    _log(f"converge: {cfg['n_points']} points, prefix step {cfg['prefix_step']}")
    res = network.simulate(net_cfg, record_currents=False)
    le_i = res.pulse_trains[network.REF_OSC].edges
    le_j = res.pulse_trains[network.OUT_OSC].edges
    first_sync_n = None
    rows = []
    for n in range(cfg["prefix_step"], cfg["n_points"] + 1, cfg["prefix_step"]):
        ei, ej = le_i[le_i < n], le_j[le_j < n]
        sync = metrics.compute_sync(ei, ej, tol=cfg["tol"],
                                    eta_th=cfg["eta_th"], discard=cfg["discard"])
        span = _span_sync(ei, ej, cfg["tol"], cfg["eta_th"], cfg["discard"])
        if sync.synchronized and first_sync_n is None:
            first_sync_n = n
        mj, mi = sync.shr if sync.shr else ("", "")
        rows.append((
            n, sync.eta, span.eta if span else "", mj, mi,
            _fmt(sync.shr_real) if sync.shr else "",
            int(sync.synchronized), int(ei.size), int(ej.size),
        ))
    with open(os.path.join(args.out_dir, "converge.csv"), "w") as f:
        f.write("n_points,eta,eta_span,shr_mj,shr_mi,shr_real,synchronized,pulses_ref,pulses_out\n")
        for row in rows:
            f.write(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row) + "\n")
    tail = [r for r in rows if r[0] >= cfg["n_points"] - 50_000]
    raw_etas = [r[1] for r in tail]
    span_etas = [r[2] for r in tail if r[2] != ""]
    ratios = {(r[3], r[4]) for r in tail}
    summary = {
        "first_sync_n": first_sync_n,
        "final_eta": rows[-1][1],
        "final_eta_span": rows[-1][2] if rows[-1][2] != "" else None,
        "final_shr": [rows[-1][3], rows[-1][4]] if rows[-1][3] != "" else None,
        "eta_fluctuation_raw": max(raw_etas) - min(raw_etas) if raw_etas else None,
        "eta_fluctuation_span": max(span_etas) - min(span_etas) if span_etas else None,
        "ratio_stable_final_50k": len(ratios) == 1,
        "pulses_ref": rows[-1][7],
        "pulses_out": rows[-1][8],
    }
    with open(os.path.join(args.out_dir, "summary.json"), "w") as f:
        json.dump(summary, f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(args.out_dir, "converge", args.seed, cfg)
    return 0


# ---------------------------------------------------------------------------
# classes / train
# ---------------------------------------------------------------------------

def cmd_classes(args) -> int:
    table = patterns.enumerate_classes()
    patterns.write_class_table(os.path.join(args.out_dir, "classes.txt"), table)
    _write_manifest(args.out_dir, "classes", args.seed, {})
    _log(f"classes: wrote {len(table)} classes")
    return 0


TRAIN_DEFAULTS = {
    "attempts": 1000,
    "u_n0": 80e-6, "eta_th": 90.0,
    "n_points": 250_000, "tol": 2, "discard": 5,
    "steps": 3,
}


def cmd_train(args) -> int:
    cfg = _resolve(args, TRAIN_DEFAULTS)
    factors = (1.0, 5.0, 25.0)[: cfg["steps"]]
    if not factors:
        raise ConfigError("steps must be between 1 and 3")
    settings = trainer.SearchSettings(
        u_n0=cfg["u_n0"], eta_th=cfg["eta_th"], attempts_per_step=cfg["attempts"],
        seed=args.seed, n_points=cfg["n_points"], tol=cfg["tol"],
        discard=cfg["discard"], workers=args.threads, narrow_factors=factors,
    )
    _log(f"train: {cfg['steps']} steps x {cfg['attempts']} attempts")
    result = trainer.anneal(
        settings,
        progress=lambda s, d, t: _log(f"  step {s + 1}: attempt {d}/{t}")
        if d % 50 == 0 else None,
    )
    trainer.write_attempt_log_csv(os.path.join(args.out_dir, "attempts.csv"), result.attempts)
    with open(os.path.join(args.out_dir, "histograms.csv"), "w") as f:
        f.write("step,p,count\n")
        for step_idx, hist in enumerate(result.histograms, start=1):
            for p in sorted(hist):
                f.write(f"{step_idx},{p},{hist[p]}\n")
    with open(os.path.join(args.out_dir, "best.json"), "w") as f:
        json.dump(trainer.solution_json_dict(result.best), f, indent=2, sort_keys=True)
        f.write("\n")
    _write_manifest(args.out_dir, "train", args.seed, cfg)
    best = result.best
    _log(f"train: best P={best.p_value if best else 0} valid={best.valid if best else False}")
    return 0


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

COMMANDS = {
    "simulate": (cmd_simulate, SIMULATE_DEFAULTS),
    "sweep2d": (cmd_sweep2d, SWEEP2D_DEFAULTS),
    "noise-sweep": (cmd_noise_sweep, NOISE_SWEEP_DEFAULTS),
    "eta-sweep": (cmd_eta_sweep, ETA_SWEEP_DEFAULTS),
    "base-sync": (cmd_base_sync, BASE_SYNC_DEFAULTS),
    "converge": (cmd_converge, CONVERGE_DEFAULTS),
    "classes": (cmd_classes, {}),
    "train": (cmd_train, TRAIN_DEFAULTS),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vo2onn",
        description="Coupled relaxation-oscillator network experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_fn, defaults) in COMMANDS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON config file")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out-dir", default=None)
        p.add_argument("--threads", type=int, default=1)
        _add_config_flags(p, defaults)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.out_dir is None:
        args.out_dir = f"{args.command}-out"
    try:
        os.makedirs(args.out_dir, exist_ok=True)
        fn, _defaults = COMMANDS[args.command]
        return fn(args)
    except (ConfigError, OSError, ValueError) as e:
        _log(f"error: {e}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
