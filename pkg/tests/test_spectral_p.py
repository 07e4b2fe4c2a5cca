import numpy as np
import pytest
import scipy.linalg

from schrodingerize import (
    DomainError, PGrid, StepperConfig, WarpProfile, evolve_modes,
    from_mode_space, hermitian_decompose, make_initial_state, mode_hamiltonian,
    reconstruct_w, to_mode_space,
)
from schrodingerize.spectral_p import WarpedStateDiscrete


def random_state(rng, grid, n):
    vals = rng.standard_normal((grid.n_p, n)) + 1j * rng.standard_normal((grid.n_p, n))
    return WarpedStateDiscrete(grid=grid, values=vals, rep="grid")


class TestPGrid:
    def test_nodes_and_frequencies(self):
        grid = PGrid(L=2.0, n_p=8)
        assert grid.points[0] == pytest.approx(-grid.pi_l)
        np.testing.assert_allclose(np.diff(grid.points), grid.delta)
        np.testing.assert_allclose(grid.freqs,
                                   (np.arange(8) - 4) / 2.0)
        assert grid.delta == pytest.approx(2 * np.pi * 2.0 / 8)

    def test_rejects_odd(self):
        with pytest.raises(ValueError):
            PGrid(L=1.0, n_p=7)

    def test_from_spacing_rounds_up_to_power_of_two(self):
        grid = PGrid.from_spacing(14.8, 0.05)
        assert grid.n_p == 1024           # next power of two above 592
        assert grid.n_p & (grid.n_p - 1) == 0
        assert grid.delta == pytest.approx(0.05)
        assert grid.pi_l >= 14.8


class TestModeTransform:
    def test_constant_hits_zero_frequency(self):
        grid = PGrid(L=1.0, n_p=16)
        state = WarpedStateDiscrete(grid=grid,
                                    values=np.full((16, 1), 2.5 + 0j))
        tilde = to_mode_space(state).values[:, 0]
        assert tilde[8] == pytest.approx(2.5)      # mu = 0 lives at l = N_p/2
        others = np.delete(tilde, 8)
        np.testing.assert_allclose(others, 0.0, atol=1e-14)

    def test_pure_wave_hits_single_mode(self):
        grid = PGrid(L=1.5, n_p=16)
        u0 = np.array([1.0 - 0.5j, 0.25])
        wave = np.exp(1j * (grid.points + grid.pi_l) / grid.L)
        state = WarpedStateDiscrete(grid=grid, values=wave[:, None] * u0[None, :])
        tilde = to_mode_space(state).values
        np.testing.assert_allclose(tilde[8 + 1], u0, atol=1e-13)
        tilde[8 + 1] = 0.0
        np.testing.assert_allclose(tilde, 0.0, atol=1e-13)

    def test_round_trip(self):
        rng = np.random.default_rng(10)
        grid = PGrid(L=0.7, n_p=32)
        state = random_state(rng, grid, 3)
        back = from_mode_space(to_mode_space(state))
        err = np.linalg.norm(back.values - state.values)
        assert err <= 1e-12 * np.linalg.norm(state.values)

    def test_matches_dense_transform_matrix(self):
        # oracle: invert the explicitly assembled basis matrix
        rng = np.random.default_rng(11)
        grid = PGrid(L=1.1, n_p=16)
        phi = np.exp(1j * np.outer(grid.points + grid.pi_l, grid.freqs))
        state = random_state(rng, grid, 2)
        tilde = to_mode_space(state).values
        expected = np.linalg.solve(phi, state.values)
        np.testing.assert_allclose(tilde, expected, atol=1e-12)

    def test_norm_ratio_is_constant(self):
        rng = np.random.default_rng(12)
        grid = PGrid(L=2.0, n_p=64)
        ratios = []
        for _ in range(3):
            state = random_state(rng, grid, 2)
            tilde = to_mode_space(state)
            ratios.append(np.linalg.norm(tilde.values)
                          / np.linalg.norm(state.values))
        np.testing.assert_allclose(ratios, 1.0 / np.sqrt(grid.n_p), rtol=1e-12)


class TestModeHamiltonian:
    def test_zero_frequency_block_frozen(self):
        grid = PGrid(L=1.0, n_p=8)
        pair = hermitian_decompose(-np.eye(2))
        blocks = mode_hamiltonian(pair, grid).at(0.0)
        np.testing.assert_allclose(blocks[4], 0.0, atol=1e-15)  # mu_4 = 0, H2 = 0

    def test_scalar_blocks(self):
        grid = PGrid(L=1.0, n_p=8)
        pair = hermitian_decompose(np.array([[-1.0]]))
        blocks = mode_hamiltonian(pair, grid).at(0.0)
        np.testing.assert_allclose(blocks[:, 0, 0], -grid.freqs)

    def test_blocks_match_kronecker_oracle(self):
        rng = np.random.default_rng(13)
        grid = PGrid(L=0.9, n_p=8)
        a = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        pair = hermitian_decompose(a)
        blocks = mode_hamiltonian(pair, grid).at(0.0)
        dense = (np.kron(np.diag(grid.freqs), pair.h1)
                 - np.kron(np.eye(grid.n_p), pair.h2))
        for l in range(grid.n_p):
            np.testing.assert_allclose(blocks[l],
                                       dense[2 * l:2 * l + 2, 2 * l:2 * l + 2],
                                       atol=1e-14)

    def test_mode_decoupling_vs_dense_evolution(self):
        # evolving the assembled Kronecker system equals per-mode evolution
        rng = np.random.default_rng(14)
        grid = PGrid(L=1.3, n_p=8)
        n = 3
        a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        pair = hermitian_decompose(a)
        state = random_state(rng, grid, n)
        tilde0 = to_mode_space(state)

        dense = (np.kron(np.diag(grid.freqs), pair.h1)
                 - np.kron(np.eye(grid.n_p), pair.h2))
        expected = (scipy.linalg.expm(-1j * 0.7 * dense)
                    @ tilde0.values.ravel()).reshape(grid.n_p, n)

        blocks = mode_hamiltonian(pair, grid)
        out, _ = evolve_modes(blocks, tilde0,
                              StepperConfig(dt=0.1, scheme="expm"), 0.7)
        np.testing.assert_allclose(out.values, expected, atol=1e-12)


class TestReconstruct:
    def test_reproduces_nodes(self):
        rng = np.random.default_rng(15)
        grid = PGrid(L=1.0, n_p=32)
        state = random_state(rng, grid, 2)
        recon = reconstruct_w(to_mode_space(state), grid.points)
        np.testing.assert_allclose(recon, state.values, atol=1e-12)

    def test_single_mode_exact_everywhere(self):
        grid = PGrid(L=1.0, n_p=16)
        tilde = np.zeros((16, 1), dtype=complex)
        tilde[11, 0] = 1.0    # frequency mu = 3
        state = WarpedStateDiscrete(grid=grid, values=tilde, rep="mode")
        for p in (-0.3, 0.123, 2.5):
            expected = np.exp(1j * grid.freqs[11] * (p + grid.pi_l))
            assert reconstruct_w(state, p)[0] == pytest.approx(expected)

    def test_off_node_value_converges_with_refinement(self):
        # p = 0.37 stays off every grid in the ladder
        u0 = np.array([1.0 + 0j])
        target = np.exp(-0.37)
        errs = []
        for n_p in (64, 128, 256):
            grid = PGrid.from_half_width(8.0, n_p)
            state = make_initial_state(u0, grid, WarpProfile.exponential())
            val = reconstruct_w(to_mode_space(state), 0.37)[0]
            errs.append(abs(val - target))
        assert errs[2] < errs[1] < errs[0]
        assert errs[2] < 0.1 * errs[0]

    def test_domain_check(self):
        grid = PGrid(L=1.0, n_p=8)
        state = WarpedStateDiscrete(grid=grid, values=np.zeros((8, 1)),
                                    rep="mode")
        with pytest.raises(DomainError):
            reconstruct_w(state, 4.0)
