"""Benchmark the compiled network stepper against the pure-Python fallback.

Runs the same noisy, fully coupled 11-oscillator configuration on both
backends and reports steps/second plus the speedup. The two backends are
bit-identical by construction, which the script also verifies on the run
it times.

Usage: python benchmarks/bench_backends.py [--n-points N] [--repeats R]
"""
import argparse
import time

import numpy as np

from vo2onn import network, simcore
from vo2onn.switch import SwitchParams


def make_inputs(n_points: int):
    feed = np.linspace(650e-6, 1050e-6, network.N_OSC)
    cfg = network.NetworkConfig(
        feed_currents=feed,
        coupling=network.build_coupling_matrix(0.1, 0.2, 0.25),
        noise_amplitude=80e-6,
        n_points=n_points,
        seed=7,
    )
    noise = network.noise_matrix(cfg.seed, n_points, cfg.noise_amplitude)
    return cfg, noise


def run_once(cfg, noise, backend: str):
    p = SwitchParams()
    u_c = np.zeros(network.N_OSC)
    on = np.zeros(network.N_OSC, dtype=np.uint8)
    u_eff = np.full(network.N_OSC, p.u_th)
    decay_off = np.exp(-cfg.dt / (p.r_off * cfg.capacitance))
    decay_on = np.exp(-cfg.dt / (p.r_on * cfg.capacitance))
    base_off = cfg.feed_currents * p.r_off
    base_on = p.u_cf + cfg.feed_currents * p.r_on
    t0 = time.perf_counter()
    edges = simcore.run_network(
        u_c, on, u_eff, base_off, base_on, float(decay_off), float(decay_on),
        cfg.coupling.s, noise, p.u_h, p.u_cf, p.r_off, p.r_on,
        None, backend=backend,
    )
    elapsed = time.perf_counter() - t0
    return elapsed, edges, u_c.copy()


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-points", type=int, default=250_000)
    ap.add_argument("--repeats", type=int, default=3)
    args = ap.parse_args()

    cfg, noise = make_inputs(args.n_points)
    backends = ["python"]
    if simcore._simcore_cy is not None:
        backends.insert(0, "cython")
    else:
        print("compiled extension not built; timing the fallback only")

    results = {}
    for backend in backends:
        best = float("inf")
        for _ in range(args.repeats):
            elapsed, edges, u_c = run_once(cfg, noise, backend)
            best = min(best, elapsed)
        results[backend] = (best, edges, u_c)
        rate = args.n_points / best
        print(f"{backend:7s}: {best * 1e3:9.1f} ms  ({rate / 1e6:6.2f} M steps/s)")

    if len(results) == 2:
        (t_cy, e_cy, u_cy), (t_py, e_py, u_py) = results["cython"], results["python"]
        same = all(a == b for a, b in zip(e_cy, e_py)) and np.array_equal(u_cy, u_py)
        print(f"speedup: {t_py / t_cy:.1f}x   outputs bit-identical: {same}")


if __name__ == "__main__":
    main()
