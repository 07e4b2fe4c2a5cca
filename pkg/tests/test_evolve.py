import numpy as np
import pytest
import scipy.linalg

from schrodingerize import (
    BlockHamiltonians, ConfigError, DilationGrid, LinearSystem, ModeState,
    OracleRefusedError, StepperConfig, autonomize_continuous,
    autonomize_discrete, cn_step, cosine_bump, evolve_modes, expm_oracle,
)


def random_hermitian(rng, n):
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (m + m.conj().T)


class TestCnStep:
    def test_zero_hamiltonian(self):
        w = np.array([1.0 + 2j, -0.5])
        np.testing.assert_allclose(cn_step(np.zeros((2, 2)), w, 0.1), w)

    def test_scalar_phase_has_unit_modulus(self):
        omega, dt = 1.7, 0.3
        out = cn_step(np.array([[omega]]), np.array([1.0 + 0j]), dt)
        expected = (1 - 0.5j * omega * dt) / (1 + 0.5j * omega * dt)
        assert out[0] == pytest.approx(expected)
        assert abs(out[0]) == pytest.approx(1.0, abs=1e-15)

    def test_cayley_unitarity(self):
        rng = np.random.default_rng(30)
        for _ in range(10):
            n = int(rng.integers(1, 9))
            h = random_hermitian(rng, n)
            w = rng.standard_normal(n) + 1j * rng.standard_normal(n)
            out = cn_step(h, w, 0.05)
            drift = abs(np.linalg.norm(out) - np.linalg.norm(w))
            assert drift <= 1e-13 * np.linalg.norm(w)

    def test_second_order_accuracy(self):
        # halving dt quarters the error against the exact exponential
        rng = np.random.default_rng(31)
        h = random_hermitian(rng, 4)
        w0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        exact = scipy.linalg.expm(-1j * h) @ w0
        errs = []
        for steps in (100, 200, 400, 800):
            w = w0.copy()
            for _ in range(steps):
                w = cn_step(h, w, 1.0 / steps)
            errs.append(np.linalg.norm(w - exact))
        slopes = [np.log2(errs[i] / errs[i + 1]) for i in range(3)]
        assert all(1.8 <= s <= 2.2 for s in slopes)

    def test_batched_matches_loop(self):
        rng = np.random.default_rng(32)
        hs = np.stack([random_hermitian(rng, 3) for _ in range(5)])
        ws = rng.standard_normal((5, 3)) + 1j * rng.standard_normal((5, 3))
        batched = cn_step(hs, ws, 0.2)
        for k in range(5):
            np.testing.assert_allclose(batched[k], cn_step(hs[k], ws[k], 0.2))


class TestEvolveModes:
    def test_zero_blocks_identity(self):
        blocks = BlockHamiltonians(np.zeros(4), np.zeros((2, 2)), np.zeros((2, 2)))
        state = ModeState(values=np.ones((4, 2), dtype=complex))
        out, rep = evolve_modes(blocks, state, StepperConfig(dt=0.1), 1.0)
        np.testing.assert_allclose(out.values, state.values)
        assert rep.norm_drift <= 1e-14

    def test_constant_fast_path_equals_explicit_stepping(self):
        rng = np.random.default_rng(33)
        m1 = random_hermitian(rng, 3)
        m0 = random_hermitian(rng, 3)
        mus = np.linspace(-2, 2, 6)
        blocks = BlockHamiltonians(mus, m1, m0)
        vals = rng.standard_normal((6, 3)) + 1j * rng.standard_normal((6, 3))
        state = ModeState(values=vals.copy())
        out, _ = evolve_modes(blocks, state, StepperConfig(dt=0.01), 0.5)
        # reference: literal Cayley stepping per mode
        expected = vals.copy()
        for _ in range(50):
            expected = cn_step(blocks.at(0.0), expected, 0.01)
        np.testing.assert_allclose(out.values, expected, atol=1e-11)

    def test_short_final_step(self):
        rng = np.random.default_rng(34)
        h = random_hermitian(rng, 2)
        blocks = BlockHamiltonians(np.array([1.0]), h, np.zeros((2, 2)))
        vals = rng.standard_normal((1, 2)) + 1j * rng.standard_normal((1, 2))
        out, rep = evolve_modes(blocks, ModeState(values=vals.copy()),
                                StepperConfig(dt=0.4), 1.0)
        assert rep.steps == 3   # 0.4 + 0.4 + 0.2
        expected = cn_step(h, cn_step(h, cn_step(h, vals, 0.4), 0.4), 0.2)
        np.testing.assert_allclose(out.values, expected, atol=1e-12)

    def test_time_dependent_against_fine_reference(self):
        # H(t) = (1 + t/2) H0: midpoint CN converges at second order to a
        # much finer run of itself
        rng = np.random.default_rng(35)
        h0 = random_hermitian(rng, 3)
        blocks = BlockHamiltonians(np.array([1.0]),
                                   lambda t: (1.0 + 0.5 * t) * h0,
                                   lambda t: np.zeros((3, 3)))
        vals = rng.standard_normal((1, 3)) + 1j * rng.standard_normal((1, 3))
        fine, _ = evolve_modes(blocks, ModeState(values=vals.copy()),
                               StepperConfig(dt=1e-4, time_dependent=True), 1.0)
        errs = []
        for dt in (0.02, 0.01):
            out, _ = evolve_modes(blocks, ModeState(values=vals.copy()),
                                  StepperConfig(dt=dt, time_dependent=True), 1.0)
            errs.append(np.linalg.norm(out.values - fine.values))
        assert 3.0 <= errs[0] / errs[1] <= 5.0

    def test_threads_do_not_change_result(self):
        rng = np.random.default_rng(36)
        m1 = random_hermitian(rng, 2)
        blocks = BlockHamiltonians(np.linspace(-3, 3, 32), m1, np.zeros((2, 2)))
        vals = rng.standard_normal((32, 2)) + 1j * rng.standard_normal((32, 2))
        one, _ = evolve_modes(blocks, ModeState(values=vals.copy()),
                              StepperConfig(dt=0.1, threads=1, chunk=8), 1.0)
        four, _ = evolve_modes(blocks, ModeState(values=vals.copy()),
                               StepperConfig(dt=0.1, threads=4, chunk=8), 1.0)
        np.testing.assert_array_equal(one.values, four.values)

    def test_flag_consistency_enforced(self):
        blocks = BlockHamiltonians(np.array([1.0]),
                                   lambda t: np.eye(2) * (1 + t),
                                   lambda t: np.zeros((2, 2)))
        state = ModeState(values=np.ones((1, 2), dtype=complex))
        with pytest.raises(ConfigError):
            evolve_modes(blocks, state, StepperConfig(dt=0.1), 1.0)
        with pytest.raises(ConfigError):
            evolve_modes(blocks, state,
                         StepperConfig(dt=0.1, scheme="expm",
                                       time_dependent=True), 1.0)


class TestExpmOracle:
    def test_zero_matrix(self):
        sys = LinearSystem(np.zeros((3, 3)), np.arange(3.0), T=1.0)
        np.testing.assert_allclose(expm_oracle(sys, 2.0), np.arange(3.0))

    def test_decay(self):
        u0 = np.array([1.0, -2.0, 0.5])
        sys = LinearSystem(-np.eye(3), u0, T=1.0)
        np.testing.assert_allclose(expm_oracle(sys, 1.5),
                                   np.exp(-1.5) * u0, rtol=1e-12)

    def test_rk4_branch_matches_expm_branch(self):
        rng = np.random.default_rng(37)
        a = random_hermitian(rng, 4) * 1j - 0.3 * np.eye(4)
        u0 = rng.standard_normal(4) + 1j * rng.standard_normal(4)
        const = LinearSystem(a, u0, T=1.0)
        wobbly = LinearSystem(lambda t: a, u0, T=1.0)   # forces the RK4 branch
        np.testing.assert_allclose(expm_oracle(wobbly, 1.0),
                                   expm_oracle(const, 1.0), rtol=1e-9)

    def test_inhomogeneous_closed_form(self):
        # du/dt = -u + 1 from 0: u(t) = 1 - e^{-t}
        sys = LinearSystem(np.array([[-1.0]]), np.array([0.0]), T=1.0,
                           b=np.array([1.0]))
        out = expm_oracle(sys, 1.0)
        assert out[0] == pytest.approx(1.0 - np.exp(-1.0), rel=1e-10)

    def test_size_gate(self):
        sys = LinearSystem(np.zeros((600, 600)), np.zeros(600), T=1.0)
        with pytest.raises(OracleRefusedError):
            expm_oracle(sys, 1.0)


class TestDilation:
    def test_bump_normalization_exact_on_grid(self):
        grid = DilationGrid(S=1.5, n_s=128, m=4)
        total = grid.delta * cosine_bump(grid.points(), grid.omega).sum()
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_bump_shape(self):
        omega = 0.25
        assert cosine_bump(np.array([0.0]), omega)[0] == pytest.approx(1.0 / omega)
        assert cosine_bump(np.array([omega]), omega)[0] == pytest.approx(0.0)
        assert cosine_bump(np.array([2 * omega]), omega)[0] == 0.0

    def test_support_violation_rejected(self):
        with pytest.raises(ConfigError):
            autonomize_discrete(np.eye(2), DilationGrid(S=0.5, n_s=64, m=8),
                                horizon=1.0)

    def test_constant_hamiltonian_recovery(self):
        rng = np.random.default_rng(38)
        h = random_hermitian(rng, 3)
        w0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        dil = autonomize_discrete(h, DilationGrid(S=1.5, n_s=128, m=4),
                                  horizon=1.0)
        w, rep = dil.evolve_and_recover(w0, 1.0, dt=1.0 / 256)
        exact = scipy.linalg.expm(-1j * h) @ w0
        assert np.linalg.norm(w - exact) / np.linalg.norm(exact) <= 5e-2
        assert rep.norm_drift <= 1e-10

    def test_time_dependent_recovery(self):
        rng = np.random.default_rng(39)
        h0 = random_hermitian(rng, 2)
        h_of_t = lambda t: (1.0 + t) * h0
        w0 = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        w_direct = w0.copy()
        for k in range(2048):
            dt = 1.0 / 2048
            from schrodingerize import cn_step
            w_direct = cn_step(h_of_t((k + 0.5) * dt), w_direct, dt)
        dil = autonomize_discrete(h_of_t, DilationGrid(S=1.5, n_s=256, m=4),
                                  horizon=1.0)
        w, _ = dil.evolve_and_recover(w0, 1.0, dt=1.0 / 512)
        assert np.linalg.norm(w - w_direct) / np.linalg.norm(w_direct) <= 5e-2

    def test_continuous_weights(self):
        dil = autonomize_continuous(np.eye(2), hat_x=20.0, n_hat=64)
        np.testing.assert_allclose(dil.weights, dil.weights[::-1])
        assert dil.weights[32] == pytest.approx(1.0 / (2 * np.pi))

    def test_continuous_constant_recovery(self):
        rng = np.random.default_rng(40)
        h = random_hermitian(rng, 3)
        w0 = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        dil = autonomize_continuous(h, hat_x=30.0, n_hat=128)
        w, _ = dil.evolve_and_recover(w0, 1.0, StepperConfig(dt=1e-3))
        exact = scipy.linalg.expm(-1j * h) @ w0
        assert np.linalg.norm(w - exact) / np.linalg.norm(exact) <= 1e-5
