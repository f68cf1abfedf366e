import numpy as np
import pytest
from conftest import eq10
from hypothesis import given, settings
from hypothesis import strategies as st

from qndsim import gaussian as g
from qndsim import protocol as pr
from qndsim.conventions import amplitude_for_power_db
from qndsim.entanglement import is_physical, log_negativity
from qndsim.protocol import ImperfectionConfig, LocalityViolation

H = 1 / np.sqrt(2)
# Heisenberg matrix of the parallel gate on (x_A, p_A, x_B, p_B)
M_PAR = np.array([[np.sqrt(2), 0, 0, 0], [0, H, 0, -H], [H, 0, H, 0], [0, 0, 0, np.sqrt(2)]])
M_SEQ = np.array([[1, 0, 0, 0], [0, 1, 0, -1], [1, 0, 1, 0], [0, 0, 0, 1]], dtype=float)


def parallel_oracle(V, r):
    """Output covariance: the gate acts on the inputs, the resource adds n/4 to p_alpha and x_beta."""
    n = np.exp(-2 * r)
    return M_PAR @ V @ M_PAR.T + np.diag([0, n / 4, n / 4, 0])


def sequential_oracle(V, r):
    # each unit-gain hop adds n/2 per quadrature; hop-1 x noise reaches both x_alpha and x_beta
    n = np.exp(-2 * r)
    noise = np.array([[n, 0, n / 2, 0], [0, n, 0, 0], [n / 2, 0, n / 2, 0], [0, 0, 0, 0]])
    return M_SEQ @ V @ M_SEQ.T + noise


def random_input(seed):
    rng = np.random.default_rng(seed)
    a = g.squeezed_vacuum(g.SqueezingSpec(rng.uniform(0, 1), "x"))
    b = g.squeezed_vacuum(g.SqueezingSpec(rng.uniform(0, 1), "p"))
    st_ = g.apply(g.beamsplitter(0, 1, reflectivity=rng.uniform(0.1, 0.9)), a.tensor(b))
    return g.GaussianState(rng.normal(size=4), st_.cov)


class TestEPR:
    def test_zero_squeezing_is_vacuum(self):
        np.testing.assert_allclose(pr.make_epr(0.0).cov, g.vacuum(2).cov, atol=1e-15)

    def test_minus_four_db_correlations(self, r4):
        cov = pr.make_epr(r4).cov
        # Var(x_E1 - x_E2) = Var(p_E1 + p_E2) = e^{-2r}/2
        assert cov[0, 0] + cov[2, 2] - 2 * cov[0, 2] == pytest.approx(10**-0.4 / 2)
        assert cov[1, 1] + cov[3, 3] + 2 * cov[1, 3] == pytest.approx(10**-0.4 / 2)
        assert cov[0, 0] - cov[0, 2] == pytest.approx(0.0995, abs=1e-4)

    def test_pure(self):
        assert np.linalg.det(pr.make_epr(2.0).cov) == pytest.approx(0.25**4, rel=1e-8)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            pr.make_epr(-0.1)


class TestParallelAnalytic:
    @pytest.mark.parametrize("r", [0.0, 0.2, 0.4605, 1.0, 3.0])
    def test_vacuum_inputs(self, r):
        res = pr.parallel_gate(g.vacuum(2), r)
        np.testing.assert_allclose(res.output.cov, eq10(r), atol=1e-12)
        np.testing.assert_allclose(res.output.mean, 0.0, atol=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_general_inputs(self, seed):
        st_ = random_input(seed)
        res = pr.parallel_gate(st_, 0.7)
        np.testing.assert_allclose(res.output.cov, parallel_oracle(st_.cov, 0.7), atol=1e-12)
        np.testing.assert_allclose(res.output.mean, M_PAR @ st_.mean, atol=1e-12)

    def test_no_resource(self):
        res = pr.parallel_gate(g.vacuum(2), 0.0)
        assert res.output.cov[1, 1] == pytest.approx(0.5)
        assert res.output.cov[2, 2] == pytest.approx(0.5)

    def test_strong_resource_is_stable(self):
        res = pr.parallel_gate(g.vacuum(2), 20.0)
        np.testing.assert_allclose(res.output.cov, eq10(20.0), atol=1e-12)
        assert log_negativity(res.output.cov).E_N == pytest.approx(0.881374, abs=1e-6)

    def test_feedforward_cancels_antisqueezing(self):
        # output variances stay bounded while the EPR anti-squeezed quadratures grow as e^{2r}
        for r in (1.0, 5.0, 10.0, 20.0):
            assert pr.parallel_gate(g.vacuum(2), r).output.cov.max() <= 0.5 + 1e-12

    def test_coherent_input_power(self, r4):
        st_ = g.coherent(1, [amplitude_for_power_db(11.0), 0.0]).tensor(g.vacuum(1))
        res = pr.parallel_gate(st_, r4)
        assert g.power_db(res.output, 0, "x") == pytest.approx(14.0, abs=0.1)
        assert g.power_db(res.output, 1, "x") == pytest.approx(8.6, abs=0.1)

    def test_coherent_inputs_do_not_change_entanglement(self):
        a = pr.parallel_gate(g.vacuum(2), 0.5).negativity().E_N
        b = pr.parallel_gate(g.coherent(1, [1.0, -2.0]).tensor(g.coherent(1, [0.3, 0.4])), 0.5).negativity().E_N
        assert a == pytest.approx(b, abs=1e-12)
        assert a > 0

    def test_bad_inputs(self):
        with pytest.raises(ValueError):
            pr.parallel_gate(g.vacuum(3), 0.5)
        with pytest.raises(ValueError):
            pr.parallel_gate(g.vacuum(2), -0.5)
        with pytest.raises(ValueError):
            pr.parallel_gate(g.vacuum(2), 0.5, mode="exact")


class TestStepByStep:
    """Re-run the protocol with GaussianState operations and average over outcomes by hand."""

    R = 0.6

    def _measured(self, inp):
        # order (A, B, E1, E2)
        full = inp.tensor(pr.make_epr(self.R))
        full = g.apply(g.beamsplitter(0, 2, num_modes=4), full)
        return g.apply(g.beamsplitter(1, 3, num_modes=4), full)

    def _conditional(self, full, s_a, s_b):
        # measuring x of mode 0 leaves (B, E1, E2); then p of B leaves (E1, E2)
        s_a, rest = g.homodyne(full, 0, "x", outcome=s_a)
        s_b, rest = g.homodyne(rest, 0, "p", outcome=s_b)
        for mode, quad, s in ((0, "x", s_a), (0, "p", -s_b), (1, "x", s_a), (1, "p", s_b)):
            rest = g.apply(g.displace(mode, quad, s, num_modes=2), rest)
        return rest

    @pytest.mark.parametrize("seed", [11, 12])
    def test_outcome_average_equals_analytic(self, seed):
        inp = random_input(seed)
        full = self._measured(inp)
        idx = [0, 3]  # x of mode 0, p of mode 1
        s_mean, s_cov = full.mean[idx], full.cov[np.ix_(idx, idx)]
        base = self._conditional(full, *s_mean)
        gain = np.column_stack(
            [self._conditional(full, *(s_mean + e)).mean - base.mean for e in np.eye(2)]
        )
        ref = pr.parallel_gate(inp, self.R).output
        np.testing.assert_allclose(base.cov + gain @ s_cov @ gain.T, ref.cov, atol=1e-10)
        np.testing.assert_allclose(base.mean, ref.mean, atol=1e-10)

    def test_conditional_cov_is_outcome_independent(self):
        full = self._measured(random_input(3))
        a = self._conditional(full, 0.0, 0.0).cov
        b = self._conditional(full, 1.3, -4.0).cov
        np.testing.assert_allclose(a, b, atol=1e-12)


class TestMonteCarlo:
    def test_matches_analytic(self, r4):
        res = pr.parallel_gate(g.vacuum(2), r4, "montecarlo", samples=100_000, seed=7)
        assert np.abs(res.output.cov - eq10(r4)).max() < 0.01
        assert np.abs(res.output.mean).max() < 0.01
        assert res.outcomes.shape == (100_000, 2)
        assert res.output_samples.shape == (100_000, 4)

    def test_against_noise_variable_oracle(self, r4):
        # sample the same output distribution directly from the input and resource noise
        rng = np.random.default_rng(3)
        n = 200_000
        inp = rng.normal(scale=0.5, size=(n, 4))
        noise = rng.normal(scale=0.5 * np.exp(-r4), size=(n, 2))
        direct = inp @ M_PAR.T
        direct[:, 1] += noise[:, 0]
        direct[:, 2] -= noise[:, 1]
        sim = pr.parallel_gate(g.vacuum(2), r4, "montecarlo", samples=n, seed=3).output.cov
        assert np.abs(sim - np.cov(direct, rowvar=False)).max() < 0.01

    def test_outcomes_are_raw_quadratures(self):
        # s_A = (x_A - x_E1)/sqrt2 for vacuum A: variance (1/4 + Var x_E1)/2
        r = 0.8
        res = pr.parallel_gate(g.vacuum(2), r, "montecarlo", samples=50_000, seed=1)
        var_e = pr.make_epr(r).cov[0, 0]
        assert np.var(res.outcomes[:, 0]) == pytest.approx((0.25 + var_e) / 2, rel=0.03)

    def test_deterministic(self):
        a = pr.parallel_gate(g.vacuum(2), 0.5, "montecarlo", samples=20_000, seed=5)
        b = pr.parallel_gate(g.vacuum(2), 0.5, "montecarlo", samples=20_000, seed=5)
        np.testing.assert_array_equal(a.output_samples, b.output_samples)
        c = pr.parallel_gate(g.vacuum(2), 0.5, "montecarlo", samples=20_000, seed=6)
        assert not np.array_equal(a.output_samples, c.output_samples)

    def test_chunks_are_prefix_stable(self):
        a = pr.standard_normals(4, pr.CHUNK + 10, 3)
        b = pr.standard_normals(4, 2 * pr.CHUNK, 3)
        np.testing.assert_array_equal(a[: pr.CHUNK], b[: pr.CHUNK])

    def test_requires_seed_and_samples(self):
        with pytest.raises(ValueError):
            pr.parallel_gate(g.vacuum(2), 0.5, "montecarlo", samples=100)
        with pytest.raises(ValueError):
            pr.parallel_gate(g.vacuum(2), 0.5, "montecarlo", seed=1)

    def test_sequential(self, r4):
        res = pr.sequential_gate(g.vacuum(2), r4, "montecarlo", samples=100_000, seed=2)
        assert np.abs(res.output.cov - sequential_oracle(g.vacuum(2).cov, r4)).max() < 0.01
        assert res.outcomes.shape == (100_000, 4)

    def test_strong_resource(self):
        res = pr.parallel_gate(g.vacuum(2), 20.0, "montecarlo", samples=50_000, seed=9)
        assert np.abs(res.output.cov - eq10(20.0)).max() < 0.01


class TestLocality:
    def test_alice_cannot_touch_bob(self):
        circ = pr.Circuit(2)
        circ.prepare(g.vacuum(2), [0, 1], [pr.ALICE, pr.BOB])
        with pytest.raises(LocalityViolation):
            circ.nodes[pr.ALICE].apply(g.beamsplitter(0, 1))
        with pytest.raises(LocalityViolation):
            circ.nodes[pr.ALICE].measure(1, "x", "bad")

    def test_displace_needs_received_record(self):
        circ = pr.Circuit(2)
        circ.prepare(g.vacuum(2), [0, 1], [pr.ALICE, pr.BOB])
        alice, bob = circ.nodes[pr.ALICE], circ.nodes[pr.BOB]
        rec = alice.measure(0, "x", "s")
        with pytest.raises(LocalityViolation):
            bob.displace(1, "x", 1.0, rec)
        ch = circ.channel(pr.ALICE, pr.BOB)
        alice.send(rec, ch)
        bob.displace(1, "x", 1.0, rec)
        assert circ.ledger(0).as_tuple() == (0, 1, 1)

    def test_cannot_send_foreign_record(self):
        circ = pr.Circuit(2)
        circ.prepare(g.vacuum(2), [0, 1], [pr.ALICE, pr.BOB])
        rec = circ.nodes[pr.ALICE].measure(0, "x", "s")
        with pytest.raises(LocalityViolation):
            circ.nodes[pr.BOB].send(rec, circ.channel(pr.BOB, pr.ALICE))
        with pytest.raises(LocalityViolation):
            circ.nodes[pr.ALICE].send(rec, circ.channel(pr.BOB, pr.ALICE))

    def test_measured_mode_is_consumed(self):
        circ = pr.Circuit(2)
        circ.prepare(g.vacuum(2), [0, 1], [pr.ALICE, pr.BOB])
        circ.nodes[pr.ALICE].measure(0, "x", "s")
        with pytest.raises(LocalityViolation):
            circ.nodes[pr.ALICE].measure(0, "p", "again")
        with pytest.raises(ValueError):
            circ.analytic([0])

    def test_audit_log_is_local(self):
        res = pr.parallel_gate(g.vacuum(2), 0.5)
        acting = [e for e in res.audit if e[1] in ("transform", "measure", "displace", "loss")]
        assert acting
        owner = {pr.ALICE: {0, 2}, pr.BOB: {1, 3}}
        for who, _, modes, *rest in acting:
            if who != pr.SOURCE:
                assert set(modes) <= owner[who]
        sends = [e for e in res.audit if e[1] == "send"]
        assert [(e[0], e[2], e[3]) for e in sends] == [(pr.ALICE, "s_A", pr.BOB), (pr.BOB, "s_B", pr.ALICE)]


class TestLedger:
    def test_parallel(self):
        assert pr.parallel_gate(g.vacuum(2), 0.5).ledger.as_tuple() == (1, 2, 1)

    def test_sequential(self):
        assert pr.sequential_gate(g.vacuum(2), 0.5).ledger.as_tuple() == (2, 4, 2)

    def test_latency(self):
        res = pr.sequential_gate(g.vacuum(2), 0.5, latency=3)
        arrivals = [e["arrival_tick"] for ch in res.channels for e in ch.log]
        assert sorted(arrivals) == [3, 3, 6, 6]

    def test_compare(self, r4):
        rep = pr.compare_schemes(g.vacuum(2), r4, latency=2)
        assert rep["parallel"]["gate_time_ticks"] == 2
        assert rep["sequential"]["gate_time_ticks"] == 4
        assert rep["parallel"]["E_N"] == pytest.approx(0.3972, abs=1e-4)
        assert rep["sequential"]["E_N"] < rep["parallel"]["E_N"]
        np.testing.assert_allclose(rep["parallel"]["added_noise"], [0, 0.1, 0.1, 0], atol=5e-4)


class TestSequential:
    @pytest.mark.parametrize("seed", range(4))
    def test_against_oracle(self, seed):
        st_ = random_input(seed)
        res = pr.sequential_gate(st_, 0.9)
        np.testing.assert_allclose(res.output.cov, sequential_oracle(st_.cov, 0.9), atol=1e-12)
        np.testing.assert_allclose(res.output.mean, M_SEQ @ st_.mean, atol=1e-12)

    def test_minus_four_db_value(self, r4):
        assert pr.sequential_gate(g.vacuum(2), r4).output.cov[0, 0] == pytest.approx(0.648, abs=1e-3)

    def test_ideal_limit_is_qnd(self):
        st_ = random_input(8)
        res = pr.sequential_gate(st_, 20.0)
        np.testing.assert_allclose(res.output.cov, pr.ideal_output(st_, "sequential").cov, atol=1e-12)


class TestUndoSqueezing:
    GRID = [(xa, pa, xb, pb) for xa in (-1.5, 2.0) for pa in (0.0, 1.0) for xb in (-0.5, 3.0) for pb in (0.25, -2.0)]

    @pytest.mark.parametrize("means", GRID)
    def test_first_moments(self, means):
        xa, pa, xb, pb = means
        st_ = g.coherent(1, [xa, pa]).tensor(g.coherent(1, [xb, pb]))
        out = pr.undo_local_squeezing(pr.parallel_gate(st_, 0.5))
        np.testing.assert_allclose(out.mean, [xa, pa - pb, xa + xb, pb], atol=1e-12)

    def test_noise_doubles(self):
        r = 0.5
        out = pr.undo_local_squeezing(pr.parallel_gate(g.vacuum(2), r))
        ideal = pr.ideal_output(g.vacuum(2), "sequential").cov
        np.testing.assert_allclose(np.diag(out.cov - ideal), pr.NoiseVector(r).qnd_variances, atol=1e-12)

    def test_entangling_matrix(self):
        np.testing.assert_allclose(pr.entangling_matrix(), M_PAR, atol=1e-15)


class TestImperfections:
    def test_output_loss_only(self):
        eta = (0.8, 0.6)
        imp = ImperfectionConfig((1.0, 1.0) + eta)
        res = pr.parallel_gate(g.vacuum(2), 0.5, imperfections=imp)
        L = np.diag(np.sqrt(np.repeat(eta, 2)))
        expect = L @ eq10(0.5) @ L + 0.25 * np.diag(1 - np.repeat(eta, 2))
        np.testing.assert_allclose(res.output.cov, expect, atol=1e-12)

    def test_ideal_config_is_identity(self):
        a = pr.parallel_gate(g.vacuum(2), 0.5, imperfections=ImperfectionConfig())
        np.testing.assert_allclose(a.output.cov, eq10(0.5), atol=1e-12)
        assert ImperfectionConfig().is_ideal

    def test_resource_loss_adds_noise(self):
        imp = ImperfectionConfig((0.9, 0.9, 1.0, 1.0))
        res = pr.parallel_gate(g.vacuum(2), 20.0, imperfections=imp)
        # the lossy pair leaves (1 - eta)/4 per correlated quadrature
        assert res.output.cov[1, 1] == pytest.approx(0.25 + 0.1 / 4, abs=1e-9)
        assert is_physical(res.output.cov)

    def test_detector_efficiency_keeps_unit_gain(self):
        st_ = g.coherent(1, [1.0, 2.0]).tensor(g.coherent(1, [-1.0, 0.5]))
        imp = ImperfectionConfig(detector_eff=0.9, visibility=0.95)
        res = pr.parallel_gate(st_, 0.5, imperfections=imp)
        eta = imp.homodyne_efficiency
        np.testing.assert_allclose(res.output.mean, np.sqrt(eta) * (M_PAR @ st_.mean), atol=1e-12)

    @pytest.mark.parametrize("bad", [dict(eta_paths=(1.0, 1.0, 1.0)), dict(detector_eff=0.0), dict(visibility=1.2)])
    def test_validation(self, bad):
        with pytest.raises(ValueError):
            ImperfectionConfig(**bad)

    def test_round_trip(self):
        imp = ImperfectionConfig((0.9, 0.8, 0.7, 0.6), 0.95, 0.9)
        assert ImperfectionConfig.from_dict(imp.to_dict()) == imp

    @settings(max_examples=30, deadline=None)
    @given(st.floats(0.0, 3.0), st.lists(st.floats(0.05, 1.0), min_size=4, max_size=4), st.floats(0.05, 1.0))
    def test_always_physical(self, r, etas, det):
        imp = ImperfectionConfig(tuple(etas), det)
        for gate in (pr.parallel_gate, pr.sequential_gate):
            assert is_physical(gate(g.vacuum(2), r, imperfections=imp).output.cov)


def test_result_serialises():
    res = pr.parallel_gate(g.vacuum(2), 0.5, "montecarlo", samples=1000, seed=1)
    d = res.to_dict()
    assert d["seed"] == 1 and d["samples"] == 1000
    assert d["ledger"] == {"epr_pairs_consumed": 1, "classical_reals_sent": 2, "communication_rounds": 1}
    assert g.GaussianState.from_dict(d["output"]).num_modes == 2
