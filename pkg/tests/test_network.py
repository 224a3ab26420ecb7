import math
import warnings

import numpy as np
import pytest

from vo2onn import network
from vo2onn.switch import SwitchParams


def single_osc_cfg(ip, n=250_000, noise=0.0, seed=0, **kw):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return network.NetworkConfig(
            feed_currents=np.full(11, ip),
            coupling=network.build_coupling_matrix(0.0, 0.0, 0.0),
            noise_amplitude=noise,
            n_points=n,
            seed=seed,
            **kw,
        )


class TestCouplingMatrix:
    def test_zero_strengths(self):
        m = network.build_coupling_matrix(0.0, 0.0, 0.0)
        assert np.all(m.s == 0.0)

    def test_structure(self):
        m = network.build_coupling_matrix(0.1, 0.2, 0.3).s
        assert np.all(m[0, 1:] == 0.1)
        assert m[1, 2] == 0.2 and m[2, 1] == 0.2
        assert m[1, 10] == 0.3
        assert np.all(m[10, :] == 0.0)
        assert np.all(m[:, 0] == 0.0)
        assert np.all(np.diag(m) == 0.0)

    def test_grid_degree(self):
        m = network.build_coupling_matrix(0.0, 1.0, 0.0).s
        degree = {i: int(m[1:10, i].sum()) for i in range(1, 10)}
        assert degree[5] == 4                       # center
        assert all(degree[c] == 2 for c in (1, 3, 7, 9))   # corners
        assert all(degree[e] == 3 for e in (2, 4, 6, 8))   # edge centers

    def test_incoming_sums(self):
        s_r, s_m, s_o = 0.11, 0.21, 0.17
        m = network.build_coupling_matrix(s_r, s_m, s_o)
        assert m.incoming_sum(10) == pytest.approx(s_r + 9 * s_o)
        assert m.incoming_sum(5) == pytest.approx(s_r + 4 * s_m)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            network.build_coupling_matrix(-0.1, 0.0, 0.0)

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda s: s.__setitem__((3, 3), 0.1),   # self-coupling
            lambda s: s.__setitem__((4, 0), 0.1),   # drives the reference
            lambda s: s.__setitem__((10, 4), 0.1),  # output drives
        ],
    )
    def test_invariants_enforced(self, mutate):
        s = network.build_coupling_matrix(0.1, 0.1, 0.1).s.copy()
        mutate(s)
        with pytest.raises(ValueError):
            network.CouplingMatrix(s)


class TestCouplingConstraint:
    def test_paper_ranges_pass(self):
        assert network.check_coupling_constraint(0.2, 0.5, 0.3)

    def test_zero_passes(self):
        assert network.check_coupling_constraint(0.0, 0.0, 0.0)

    def test_overdriven_output_fails(self):
        # 0.5 + 9 * 0.34 = 3.56 >= 3.5
        assert not network.check_coupling_constraint(0.5, 0.5, 0.34)

    def test_boundary_strict(self):
        p = SwitchParams()
        assert not network.check_coupling_constraint(3.5, 0.0, 0.0, p)


class TestNoise:
    def test_zero_amplitude(self):
        assert np.all(network.gen_noise(0, 1000, 0.0) == 0.0)
        assert np.all(network.noise_matrix(0, 50, 0.0) == 0.0)

    def test_statistics(self):
        draws = network.gen_noise(123, 1_000_000, 80e-6)
        se = 80e-6 / math.sqrt(draws.size)
        assert abs(draws.mean()) < 3 * se
        assert abs(draws.std() - 80e-6) < 0.01 * 80e-6

    def test_deterministic(self):
        assert np.array_equal(
            network.noise_matrix(7, 100, 1e-4), network.noise_matrix(7, 100, 1e-4)
        )

    def test_substreams_independent(self):
        m = network.noise_matrix(7, 5000, 1e-4)
        corr = np.corrcoef(m)
        off_diag = corr[~np.eye(11, dtype=bool)]
        assert np.abs(off_diag).max() < 0.05

    def test_negative_amplitude_rejected(self):
        with pytest.raises(ValueError):
            network.gen_noise(0, 10, -1e-6)


class TestConfigValidation:
    def test_shape_checked(self):
        with pytest.raises(ValueError):
            network.NetworkConfig(np.full(10, 8e-4), network.build_coupling_matrix(0, 0, 0))

    def test_bad_dt_and_points(self):
        with pytest.raises(ValueError):
            single_osc_cfg(8e-4, dt=0.0)
        with pytest.raises(ValueError):
            single_osc_cfg(8e-4, n=1)

    def test_out_of_band_current_warns(self):
        feed = np.full(11, 8e-4)
        feed[3] = 1200e-6
        with pytest.warns(UserWarning, match=r"\[3\]"):
            network.NetworkConfig(feed, network.build_coupling_matrix(0, 0, 0))

    def test_in_band_current_silent(self):
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            network.NetworkConfig(
                np.full(11, 550 * 1e-6), network.build_coupling_matrix(0, 0, 0)
            )


class TestNaturalPeriod:
    def test_against_quadrature_free_formula(self):
        # independent check: count steps of the exact discrete relaxation at
        # a tiny dt, which converges to the continuous period
        p = SwitchParams()
        cap = 100e-9
        ip = 8e-4
        dt = 1e-8
        u, on = p.u_h, False
        t_half = {}
        start = None
        d_off = math.exp(-dt / (p.r_off * cap))
        d_on = math.exp(-dt / (p.r_on * cap))
        crossings = 0
        t = 0
        while crossings < 3:
            if on and u < p.u_h:
                on = False
            elif not on and u > p.u_th:
                if crossings:
                    t_half[crossings] = t
                crossings += 1
                if crossings == 1:
                    t_half[0] = t
                on = True
            tgt = (p.u_cf + ip * p.r_on) if on else ip * p.r_off
            u = tgt + (u - tgt) * (d_on if on else d_off)
            t += 1
        measured = (t_half[2] - t_half[1]) * dt
        assert network.natural_period(ip) == pytest.approx(measured, rel=1e-4)

    def test_latching_returns_nan(self):
        assert math.isnan(network.natural_period(1200e-6))   # never releases
        assert math.isnan(network.natural_period(500e-6))    # never fires

    def test_frequency_endpoints(self):
        assert network.natural_frequency(550e-6) == pytest.approx(165.0, rel=0.05)
        assert network.natural_frequency(1061e-6) == pytest.approx(1266.0, rel=0.05)


class TestSimulate:
    def test_noiseless_period_matches_formula(self):
        cfg = single_osc_cfg(800e-6, n=100_000)
        res = network.simulate(cfg, record_currents=False)
        edges = res.pulse_trains[0].edges
        periods = np.diff(edges[5:])
        assert periods.max() - periods.min() <= 1
        expected = network.natural_period(800e-6)
        assert abs(periods.mean() * cfg.dt - expected) <= 2 * cfg.dt

    def test_symmetric_network_identical_trains(self):
        cfg = single_osc_cfg(900e-6, n=30_000)
        res = network.simulate(cfg, record_currents=False)
        first = res.pulse_trains[0].edges
        for train in res.pulse_trains[1:]:
            assert np.array_equal(train.edges, first)

    def test_deterministic_given_seed(self):
        feed = np.linspace(600e-6, 1000e-6, 11)
        cpl = network.build_coupling_matrix(0.1, 0.2, 0.2)
        a = network.simulate(
            network.NetworkConfig(feed, cpl, noise_amplitude=5e-4, n_points=20_000, seed=9)
        )
        b = network.simulate(
            network.NetworkConfig(feed, cpl, noise_amplitude=5e-4, n_points=20_000, seed=9)
        )
        assert np.array_equal(a.currents, b.currents)
        for ta, tb in zip(a.pulse_trains, b.pulse_trains):
            assert np.array_equal(ta.edges, tb.edges)

    def test_mid_range_pulse_count_band(self):
        cfg = single_osc_cfg(800e-6)  # 250k points = 2.5 s
        res = network.simulate(cfg, record_currents=False)
        assert 1000 <= len(res.pulse_trains[0]) <= 3000

    def test_currents_recorded_piecewise(self):
        cfg = single_osc_cfg(900e-6, n=5_000)
        res = network.simulate(cfg)
        cur = res.currents[:, 0]
        # OFF-branch current stays below the ON-branch band and pulses peak
        # near (u_th - u_cf) / r_on just after each firing
        assert cur.max() == pytest.approx((5.0 - 0.82) / 615.0, rel=0.05)
        assert cur.min() >= 0.0

    def test_noise_override_shape_checked(self):
        cfg = single_osc_cfg(900e-6, n=100)
        with pytest.raises(ValueError):
            network.simulate(cfg, noise=np.zeros((100, 11)))

    def test_excitatory_coupling_never_reduces_pulses(self):
        rng = np.random.default_rng(3)
        for _ in range(3):
            feed = rng.uniform(650e-6, 1000e-6, 11)
            cfg = network.NetworkConfig(
                feed, network.build_coupling_matrix(0.05, 0.1, 0.1),
                noise_amplitude=80e-6, n_points=30_000, seed=11,
            )
            base = network.simulate(cfg, record_currents=False)
            s2 = cfg.coupling.s.copy()
            s2[4, 10] += 0.2
            cfg2 = network.NetworkConfig(
                feed, network.CouplingMatrix(s2),
                noise_amplitude=80e-6, n_points=30_000, seed=11,
            )
            more = network.simulate(cfg2, record_currents=False)
            assert len(more.pulse_trains[10]) >= len(base.pulse_trains[10])


class TestStep:
    def test_step_chain_matches_batch(self):
        feed = np.linspace(620e-6, 1040e-6, 11)
        cpl = network.build_coupling_matrix(0.08, 0.15, 0.2)
        cfg = network.NetworkConfig(feed, cpl, noise_amplitude=3e-4, n_points=400, seed=21)
        noise = network.noise_matrix(cfg.seed, cfg.n_points, cfg.noise_amplitude)
        batch = network.simulate(cfg, record_currents=False, noise=noise)
        state = network.cold_start()
        edges = [[] for _ in range(11)]
        for t in range(cfg.n_points):
            prev_on = state.on.copy()
            state = network.step(state, cfg, noise[:, t])
            for i in range(11):
                if state.on[i] and not prev_on[i]:
                    edges[i].append(t)
        assert state.time_index == batch.final_state.time_index
        assert np.array_equal(state.cap_voltages, batch.final_state.cap_voltages)
        assert np.array_equal(state.on, batch.final_state.on)
        for i in range(11):
            assert np.array_equal(np.array(edges[i], dtype=np.int64),
                                  batch.pulse_trains[i].edges)

    def test_bounded_trajectories(self):
        u_n0 = 5e-4
        cfg = single_osc_cfg(1000e-6, n=2, noise=u_n0)
        noise = network.noise_matrix(3, 3000, u_n0)
        state = network.cold_start()
        hi = 1000e-6 * 9100.0 + 5 * u_n0
        lo = min(0.0, -5 * u_n0)
        for t in range(3000):
            state = network.step(state, cfg, noise[:, t])
            assert np.all(state.cap_voltages <= hi)
            assert np.all(state.cap_voltages >= lo)

    def test_same_step_sympathetic_firing(self):
        # a strong source about to fire pulls its target over the lowered
        # threshold in the same timestep
        s = np.zeros((11, 11))
        s[1, 2] = 0.5
        cfg = network.NetworkConfig(
            np.full(11, 800e-6), network.CouplingMatrix(s),
            noise_amplitude=0.0, n_points=2, seed=0,
        )
        state = network.NetworkState(
            cap_voltages=np.array([0.0, 4.99, 4.7] + [0.0] * 8),
            on=np.zeros(11, dtype=np.uint8),
        )
        zero = np.zeros(11)
        for _ in range(10):
            prev = state.on.copy()
            state = network.step(state, cfg, zero)
            if state.on[1] and not prev[1]:
                assert state.on[2] == 1 and not prev[2]
                break
        else:
            pytest.fail("source oscillator never fired")


class TestExports:
    def test_oscillograms_csv(self, tmp_path):
        cfg = single_osc_cfg(900e-6, n=50)
        res = network.simulate(cfg)
        path = tmp_path / "osc.csv"
        network.write_oscillograms_csv(path, res.currents)
        lines = path.read_text().splitlines()
        assert lines[0] == "t_index," + ",".join(f"osc{i}_current" for i in range(11))
        assert len(lines) == 51
        row = lines[1].split(",")
        assert int(row[0]) == 0
        assert float(row[1]) == res.currents[0, 0]

    def test_pulse_trains_csv(self, tmp_path):
        cfg = single_osc_cfg(900e-6, n=2_000)
        res = network.simulate(cfg, record_currents=False)
        path = tmp_path / "trains.csv"
        network.write_pulse_trains_csv(path, res.pulse_trains)
        lines = path.read_text().splitlines()
        assert lines[0] == "osc_index,edge_t_index"
        n_edges = sum(len(t) for t in res.pulse_trains)
        assert len(lines) == 1 + n_edges
        osc0_rows = [l for l in lines[1:] if l.startswith("0,")]
        assert len(osc0_rows) == len(res.pulse_trains[0])
