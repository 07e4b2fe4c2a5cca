"""Continuous-Fourier discretization of the extra dimension.

The transform pair used is

    w_hat(xi) = (1/2pi) integral e^{+i xi p} w(p) dp,
    w(p)      =         integral e^{-i xi p} w_hat(xi) dxi,

under which the warped system decouples into xi-parameterized blocks

    d/dt w_hat(xi) = +i (xi*H1 + H2) w_hat(xi),
    w_hat(0, xi)   = u0 / (pi*(1 + xi^2)),

the algebraic weight being the transform of e^{-|p|}.  The xi-axis is
truncated to [-X, X] with N+1 equispaced nodes including both endpoints,
and w is reconstructed by trapezoid quadrature

    w(t, p) ~= sum_j weight_j * w_hat_j * e^{-i xi_j p}.

Sampling in xi periodizes p with period 2*pi/dxi, so dxi also limits how far
out in p the reconstruction is meaningful.  Reconstruction at a single p
oscillates in p; integral recovery is the smoother choice here.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Union

import numpy as np

from .errors import DimensionError
from .evolve import BlockHamiltonians
from .systems import HermitianPair

PairLike = Union[HermitianPair, Callable[[float], HermitianPair]]


@dataclass(frozen=True)
class XiGrid:
    """Nodes xi_j = -X + 2jX/N, j = 0..N, with trapezoid weights."""

    X: float
    n_intervals: int

    def __post_init__(self):
        if self.X <= 0:
            raise ValueError("X must be positive")
        if self.n_intervals < 1:
            raise ValueError("need at least one interval")

    @property
    def delta(self) -> float:
        return 2.0 * self.X / self.n_intervals

    @property
    def n_nodes(self) -> int:
        return self.n_intervals + 1

    @cached_property
    def points(self) -> np.ndarray:
        return -self.X + self.delta * np.arange(self.n_nodes)

    @cached_property
    def weights(self) -> np.ndarray:
        w = np.full(self.n_nodes, self.delta)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    @classmethod
    def from_spacing(cls, X: float, delta_xi: float) -> "XiGrid":
        n = int(round(2.0 * X / delta_xi))
        return cls(X=X, n_intervals=max(1, n))


@dataclass
class WarpedStateXi:
    """Transformed warped solution sampled on a XiGrid; shape (N+1, n)."""

    grid: XiGrid
    values: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.ndim != 2 or self.values.shape[0] != self.grid.n_nodes:
            raise DimensionError(
                f"values must have shape (N+1, n) = ({self.grid.n_nodes}, n), "
                f"got {self.values.shape}")

    @property
    def n(self) -> int:
        return self.values.shape[1]


def init_xi_state(u0: np.ndarray, grid: XiGrid) -> WarpedStateXi:
    """Initial data u0 / (pi*(1 + xi_j^2)) at every node."""
    u0 = np.asarray(u0, dtype=complex)
    weights = 1.0 / (np.pi * (1.0 + grid.points ** 2))
    return WarpedStateXi(grid=grid, values=weights[:, None] * u0[None, :], t=0.0)


def xi_mode_hamiltonian(pair: HermitianPair, xi: float) -> np.ndarray:
    """Generator block xi*H1 + H2 of d/dt w_hat = +i(xi*H1 + H2) w_hat."""
    return xi * pair.h1 + pair.h2


def xi_blocks(pair: PairLike, grid: XiGrid) -> BlockHamiltonians:
    """All node blocks in the stepper's d/dt x = -i H x convention.

    The +i in the generator is absorbed into the block sign:
    H_j(t) = -(xi_j*H1(t) + H2(t)) = (-xi_j)*H1(t) - H2(t).
    """
    if callable(pair):
        return BlockHamiltonians(mus=-grid.points,
                                 m1=lambda t: pair(t).h1,
                                 m0=lambda t: -pair(t).h2)
    return BlockHamiltonians(mus=-grid.points, m1=pair.h1, m0=-pair.h2)


def reconstruct_whc(state: WarpedStateXi,
                    p: Union[float, np.ndarray]) -> np.ndarray:
    """Trapezoid reconstruction of w(t, p) from the xi samples."""
    ps = np.atleast_1d(np.asarray(p, dtype=float))
    phases = np.exp(-1j * np.outer(ps, state.grid.points))
    out = (phases * state.grid.weights[None, :]) @ state.values
    if np.isscalar(p) or np.asarray(p).ndim == 0:
        return out[0]
    return out
