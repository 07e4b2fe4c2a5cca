"""Builders for the benchmark experiments, with exact solutions and defaults.

Three desk-scale problems exercise the pipeline end to end:

* ``scattering``: a 1-D reaction-diffusion operator whose zero-boundary
  discretization has a handful of positive eigenvalues, so recovery only
  works past a genuine threshold.  The initial data sits on a single
  eigenvector, which is what sets the observed threshold (~6 for k = 4).
* ``backward-heat``: the backward heat equation over a long horizon, the
  ill-posed showcase.  All eigenvalues are positive and huge, but only the
  lowest mode is populated; states carry a log-prefactor so stored vectors
  stay O(1) despite the e^{-25 pi^2} initial amplitude.
* ``maxwell-small`` / ``maxwell-big``: a staggered-grid 1-D Maxwell system
  with a time-proportional current source, exercising the inhomogeneous lift
  and the stretch coefficient (the big source differs only by a factor 1000
  in the current, which the stretch absorbs).

Exact solutions are returned on the experiment's own grid and in the same
scaling as ``system.u0``.  The Maxwell difference matrix is the textbook
forward-difference block with no wrap entry; the field ordering it implies
pairs the electric nodes x_i = i*h (interior, the exact E vanishes at both
ends) with magnetic values -B_z sampled at the staggered nodes (j - 1/2)*h,
which is what the exact-solution vector uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .systems import LinearSystem
from .warping import EXPONENTIAL, SMOOTH_R2


@dataclass(frozen=True)
class RunDefaults:
    """Recommended discretization and recovery parameters for an experiment."""

    discretization: str                 # "discrete" | "continuous"
    p_diamond: float
    R: float = 1.0
    pi_l: Optional[float] = None        # discrete route
    n_p: Optional[int] = None
    X: Optional[float] = None           # continuous route
    delta_xi: Optional[float] = None
    delta_t: float = 1.0 / 32.0
    gamma: Optional[float] = None       # stretch override (lifted systems)
    c_t: Optional[float] = None
    profile: str = EXPONENTIAL
    reference: str = "analytic"         # "analytic" | "semi-discrete"


@dataclass
class Experiment:
    """A named system bundled with its exact solution and defaults."""

    name: str
    system: LinearSystem
    exact: Callable[[float], np.ndarray]
    recommended: RunDefaults
    log_prefactor: float = 0.0          # stored vectors are e^{-log_prefactor}-scaled
    eigenvalues: Optional[np.ndarray] = None


def scattering_system(h: float = 1.0 / 32.0, k: float = 4.0,
                      T: float = 1.0) -> Experiment:
    """Reaction-diffusion model du/dt = Lap(u) + k^2 u on [0, 2], zero BC.

    Second-order differences on interior nodes x_i = i*h give a tridiagonal
    matrix with diagonal -2/h^2 + k^2 and off-diagonal 1/h^2, whose spectrum
    is known in closed form.  The initial data sin(pi*x) is exactly the
    second eigenvector, so the solution grows like exp((k^2 - pi^2) t) and
    the practical recovery threshold is that mode's rate, not the much
    larger top of the spectrum.
    """
    n = int(round(2.0 / h)) - 1
    if n < 2:
        raise ValueError("grid too coarse")
    x = h * np.arange(1, n + 1)
    alpha = -2.0 / h ** 2 + k ** 2
    beta = 1.0 / h ** 2
    a = (np.diag(np.full(n, alpha)) + np.diag(np.full(n - 1, beta), 1)
         + np.diag(np.full(n - 1, beta), -1))
    u0 = np.sin(np.pi * x)
    rate = k ** 2 - np.pi ** 2

    def exact(t: float) -> np.ndarray:
        return np.exp(rate * t) * u0.astype(complex)

    j = np.arange(1, n + 1)
    eigs = (-2.0 + 2.0 * np.cos(j * np.pi / (n + 1))) / h ** 2 + k ** 2
    # Threshold of the populated mode (j = 2), the discrete analogue of rate.
    p_dia = float(eigs[1]) * T
    sys = LinearSystem(a, u0, T)
    rec = RunDefaults(discretization="continuous", p_diamond=p_dia, R=1.0,
                      X=80.0, delta_xi=5.0 / 2 ** 4, delta_t=1.0 / 2 ** 5,
                      profile=EXPONENTIAL)
    return Experiment(name="scattering", system=sys, exact=exact,
                      recommended=rec, eigenvalues=eigs)


def backward_heat_system(dx: float = 1.0 / 32.0, T: float = 100.0) -> Experiment:
    """Backward heat equation du/dt = -Lap(u) on [0, 2], zero BC.

    The physical initial data exp(-25 pi^2) sin(pi x / 2) is scaled up by
    exp(25 pi^2) (``log_prefactor``), so the stored initial vector is O(1)
    and at T = 100 the stored exact solution is exp(pi^2 T / 4) times it.
    The initial data populates only the lowest discrete mode, which allows a
    p-domain vastly smaller than the full-spectrum sizing rule would demand.
    """
    n = int(round(2.0 / dx)) - 1
    x = dx * np.arange(1, n + 1)
    a = -(np.diag(np.full(n, -2.0 / dx ** 2))
          + np.diag(np.full(n - 1, 1.0 / dx ** 2), 1)
          + np.diag(np.full(n - 1, 1.0 / dx ** 2), -1))
    u0 = np.sin(0.5 * np.pi * x)
    rate = np.pi ** 2 / 4.0

    def exact(t: float) -> np.ndarray:
        return np.exp(rate * t) * u0.astype(complex)

    j = np.arange(1, n + 1)
    eigs = (2.0 - 2.0 * np.cos(j * np.pi / (n + 1))) / dx ** 2
    sys = LinearSystem(a, u0, T)
    rec = RunDefaults(discretization="discrete", p_diamond=rate * T, R=1.0,
                      pi_l=257.0, n_p=1024, delta_t=25.0 / 2 ** 10,
                      profile=EXPONENTIAL)
    return Experiment(name="backward-heat", system=sys, exact=exact,
                      recommended=rec, log_prefactor=-25.0 * np.pi ** 2,
                      eigenvalues=eigs)


def maxwell_yee_system(n: int = 16, source: str = "small",
                       T: float = 1.0) -> Experiment:
    """Staggered 1-D Maxwell system on [0, 1] with current J_y = -a*t*cos(2 pi x).

    State ordering: E at x_i = i*h (i = 1..n-1), then the staggered magnetic
    values at (j - 1/2)*h (j = 1..n); the forward-difference block D_x is
    (n-1) x n with rows (1, -1)/h.  The exact fields are steady
    E_y = (cos(2 pi x) - 1)/(2 pi) and B_z = t sin(2 pi x); the magnetic
    entries of the state carry -B_z (see module docstring).  ``source`` is
    "small" (a = 2 pi) or "big" (a = 2000 pi); the big case differs only in
    the stretch needed to tame the lifted spectrum.
    """
    if n < 4:
        raise ValueError("need n >= 4")
    if source not in ("small", "big"):
        raise ValueError("source must be 'small' or 'big'")
    amp = 2.0 * np.pi if source == "small" else 2000.0 * np.pi
    h = 1.0 / n
    xe = h * np.arange(1, n)                     # electric nodes, length n-1
    xb = h * (np.arange(1, n + 1) - 0.5)         # staggered nodes, length n
    dx = np.zeros((n - 1, n))
    for i in range(n - 1):
        dx[i, i] = 1.0 / h
        dx[i, i + 1] = -1.0 / h
    dim = 2 * n - 1
    a = np.zeros((dim, dim))
    a[:n - 1, n - 1:] = -dx
    a[n - 1:, :n - 1] = dx.T

    def b(t: float) -> np.ndarray:
        out = np.zeros(dim, dtype=complex)
        out[:n - 1] = amp * t * np.cos(2.0 * np.pi * xe)   # -J_y at the E nodes
        return out

    u0 = np.zeros(dim, dtype=complex)
    u0[:n - 1] = (np.cos(2.0 * np.pi * xe) - 1.0) / (2.0 * np.pi)

    def exact(t: float) -> np.ndarray:
        out = np.zeros(dim, dtype=complex)
        out[:n - 1] = (np.cos(2.0 * np.pi * xe) - 1.0) / (2.0 * np.pi)
        out[n - 1:] = -t * np.sin(2.0 * np.pi * xb)
        return out

    sys = LinearSystem(a, u0, T, b=b)
    gamma = 0.1 if source == "small" else 1e-4
    rec = RunDefaults(discretization="discrete", p_diamond=0.5, R=1.0,
                      pi_l=np.pi, n_p=256, delta_t=1.0 / 2 ** 8,
                      X=80.0, delta_xi=5.0 / 2 ** 3,
                      gamma=gamma, c_t=1.0, profile=SMOOTH_R2,
                      reference="semi-discrete")
    return Experiment(name=f"maxwell-{source}", system=sys, exact=exact,
                      recommended=rec)


_BUILDERS = {
    "scattering": scattering_system,
    "backward-heat": backward_heat_system,
    "maxwell-small": lambda **kw: maxwell_yee_system(source="small", **kw),
    "maxwell-big": lambda **kw: maxwell_yee_system(source="big", **kw),
}

EXPERIMENT_NAMES = tuple(sorted(_BUILDERS))


def by_name(name: str, **kwargs) -> Experiment:
    """Build a registered experiment; kwargs go to its builder."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise KeyError(f"unknown experiment {name!r}; "
                       f"choose from {', '.join(EXPERIMENT_NAMES)}") from None
    return builder(**kwargs)
