"""Spectral discretization of the extra dimension on a periodic p-grid.

Grid and basis
--------------
The domain (-pi*L, pi*L) carries N_p equispaced nodes p_k = -pi*L + k*dp,
dp = 2*pi*L/N_p (the right endpoint is identified with the left).  The basis
functions are

    phi_l(p) = exp(i*mu_l*(p + pi*L)),   mu_l = (l - N_p/2)/L,  l = 0..N_p-1,

a centered spectrum with the Nyquist frequency -N_p/(2L) kept once at l = 0.

FFT index mapping
-----------------
At the nodes, phi_l(p_j) = (-1)^j * exp(2i*pi*j*l/N_p), so with
S = diag((-1)^j) and F the unnormalized DFT matrix (numpy's fft convention),
the change of basis Phi and its inverse are

    Phi = S @ conj(F),   Phi^{-1} = (F/N_p) @ S.

Hence grid -> mode is ``fft(signs * w) / N_p`` and mode -> grid is
``signs * N_p * ifft(w_tilde)``.  Equivalently, the coefficient of the wave
exp(i*k*(p/L + pi)) (integer k, |k| <= N_p/2) is stored at index
l = k + N_p/2, with k = -N_p/2 and k = +N_p/2 sharing the single stored
Nyquist entry l = 0.  Trigonometric interpolation off the nodes uses this
same basis, so it reproduces the stored grid values exactly at the nodes.

Mode decoupling
---------------
In mode space the warped system becomes N_p independent n-by-n blocks

    d/dt w_l = -i * (mu_l * H1 - H2) w_l,

which is what the evolution module consumes; the Kronecker form is never
materialized.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import DimensionError, DomainError
from .evolve import BlockHamiltonians
from .systems import HermitianPair
from .warping import WarpProfile

GRID = "grid"
MODE = "mode"

PairLike = Union[HermitianPair, Callable[[float], HermitianPair]]


@dataclass(frozen=True)
class PGrid:
    """Periodic grid on (-pi*L, pi*L) with N_p nodes and centered frequencies."""

    L: float
    n_p: int

    def __post_init__(self):
        if self.L <= 0:
            raise ValueError("L must be positive")
        if self.n_p <= 0 or self.n_p % 2 != 0:
            raise ValueError("N_p must be a positive even integer")

    @property
    def pi_l(self) -> float:
        return np.pi * self.L

    @property
    def delta(self) -> float:
        return 2.0 * np.pi * self.L / self.n_p

    @cached_property
    def points(self) -> np.ndarray:
        return -self.pi_l + self.delta * np.arange(self.n_p)

    @cached_property
    def freqs(self) -> np.ndarray:
        return (np.arange(self.n_p) - self.n_p // 2) / self.L

    @classmethod
    def from_half_width(cls, pi_l: float, n_p: int) -> "PGrid":
        return cls(L=pi_l / np.pi, n_p=n_p)

    @classmethod
    def from_spacing(cls, pi_l_min: float, delta_p: float) -> "PGrid":
        """Round the half-width up so N_p is a power of two at exactly delta_p."""
        if pi_l_min <= 0 or delta_p <= 0:
            raise ValueError("need positive half-width and spacing")
        n_p = 1 << max(1, int(np.ceil(np.log2(2.0 * pi_l_min / delta_p))))
        return cls.from_half_width(0.5 * n_p * delta_p, n_p)


@dataclass
class WarpedStateDiscrete:
    """Warped solution snapshot on a PGrid, in grid or mode representation.

    ``values`` has shape (N_p, n): row k holds the n components at node p_k
    (grid rep) or of mode mu_k (mode rep).
    """

    grid: PGrid
    values: np.ndarray
    rep: str = GRID
    t: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[0] != self.grid.n_p:
            raise DimensionError(
                f"values must have shape (N_p, n) = ({self.grid.n_p}, n), "
                f"got {self.values.shape}")
        if self.rep not in (GRID, MODE):
            raise ValueError(f"rep must be {GRID!r} or {MODE!r}")

    @property
    def n(self) -> int:
        return self.values.shape[1]


def make_initial_state(u0: np.ndarray, grid: PGrid,
                       profile: WarpProfile) -> WarpedStateDiscrete:
    """Grid-representation state psi(p_k) * u0 at t = 0."""
    u0 = np.asarray(u0, dtype=complex)
    vals = np.asarray(profile(grid.points))[:, None] * u0[None, :]
    return WarpedStateDiscrete(grid=grid, values=vals, rep=GRID, t=0.0)


def _signs(n_p: int) -> np.ndarray:
    s = np.ones(n_p)
    s[1::2] = -1.0
    return s


def to_mode_space(state: WarpedStateDiscrete) -> WarpedStateDiscrete:
    """Change of variables grid -> mode (see module docstring for indexing)."""
    if state.rep != GRID:
        raise ValueError("state is not in grid representation")
    s = _signs(state.grid.n_p)
    tilde = np.fft.fft(s[:, None] * state.values, axis=0) / state.grid.n_p
    return WarpedStateDiscrete(grid=state.grid, values=tilde, rep=MODE, t=state.t)


def from_mode_space(state: WarpedStateDiscrete) -> WarpedStateDiscrete:
    """Inverse change of variables mode -> grid."""
    if state.rep != MODE:
        raise ValueError("state is not in mode representation")
    s = _signs(state.grid.n_p)
    vals = s[:, None] * (state.grid.n_p * np.fft.ifft(state.values, axis=0))
    return WarpedStateDiscrete(grid=state.grid, values=vals, rep=GRID, t=state.t)


def mode_hamiltonian(pair: PairLike, grid: PGrid) -> BlockHamiltonians:
    """Per-mode Hermitian blocks H_l(t) = mu_l * H1(t) - H2(t).

    Mode l then evolves by d/dt w_l = -i * H_l w_l.
    """
    if callable(pair):
        return BlockHamiltonians(mus=grid.freqs,
                                 m1=lambda t: pair(t).h1,
                                 m0=lambda t: -pair(t).h2)
    return BlockHamiltonians(mus=grid.freqs, m1=pair.h1, m0=-pair.h2)


def reconstruct_w(state: WarpedStateDiscrete,
                  p: Union[float, np.ndarray]) -> np.ndarray:
    """Trigonometric interpolation of w(t, p) anywhere in [-pi*L, pi*L].

    Returns shape (n,) for scalar p and (len(p), n) for an array; at grid
    nodes this reproduces the stored grid values.
    """
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    lim = state.grid.pi_l * (1.0 + 1e-12) + 1e-12
    if np.any(np.abs(ps) > lim):
        raise DomainError(f"p outside [-pi*L, pi*L] = [+-{state.grid.pi_l:g}]")
    if state.rep == GRID:
        state = to_mode_space(state)
    phases = np.exp(1j * np.outer(ps + state.grid.pi_l, state.grid.freqs))
    out = phases @ state.values
    if np.isscalar(p) or np.asarray(p).ndim == 0:
        return out[0]
    return out
