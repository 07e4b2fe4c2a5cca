"""Recovery of the original variable from the warped representation.

For p beyond the threshold p_diamond = lambda_plus * T (plus an O(1) margin
for lifted inhomogeneous systems) the warped solution satisfies
w(t, p) = e^{-p} u(t), so u is read off either pointwise,

    u(T) = e^{p} w(T, p),

or through the tail integral  u(T) = e^{p} * integral_p^inf w(T, q) dq.
Below the threshold the right-moving fronts launched by positive eigenvalues
of H1 contaminate w and the same formulas fail by O(1); error scans over p
make that cliff visible.

The measurement-cost arithmetic mirrors what a quantum readout of the grid
register would face: the recovery window captures a fraction
C_e0^2/C_e^2 ~ e^{-2 p_diamond} (1 - e^{-2R})/2 of the squared profile mass,
and amplitude amplification would repeat the experiment about
g = (C_e/C_e0) * ||u(0)|| / ||u(T)|| times.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import DomainError, WindowError
from .fourier_xi import WarpedStateXi, reconstruct_whc
from .spectral_p import (MODE, PGrid, WarpedStateDiscrete, from_mode_space,
                         reconstruct_w)
from .systems import SpectralBounds

State = Union[WarpedStateDiscrete, WarpedStateXi]


def p_diamond(bounds: SpectralBounds, T: float,
              inhomogeneous: bool = False) -> float:
    """Recovery threshold lambda_plus * T, plus 1 for lifted systems."""
    return bounds.lambda_plus * T + (1.0 if inhomogeneous else 0.0)


@dataclass(frozen=True)
class RecoveryWindow:
    """Grid indices k with p_diamond <= p_k <= p_diamond + R."""

    p_diamond: float
    R: float
    indices: tuple


def recovery_window(grid: PGrid, p_diamond: float, R: float = 1.0) -> RecoveryWindow:
    ps = grid.points
    mask = (ps >= p_diamond) & (ps <= p_diamond + R)
    return RecoveryWindow(p_diamond=float(p_diamond), R=float(R),
                          indices=tuple(int(k) for k in np.nonzero(mask)[0]))


def pick_recovery_p(grid: PGrid, p_diamond: float, R: float = 1.0) -> float:
    """Default sampling point: first grid node strictly above p_diamond + R/4.

    Staying a little above the threshold avoids front contamination while
    keeping the e^p amplification small.
    """
    target = p_diamond + 0.25 * R
    above = grid.points[grid.points > target]
    if above.size == 0:
        raise DomainError(f"no grid point above {target:g}; enlarge the p-domain")
    return float(above[0])


def _reconstruct(state: State, p) -> np.ndarray:
    if isinstance(state, WarpedStateXi):
        return reconstruct_whc(state, p)
    return reconstruct_w(state, p)


def recover_point(state: State, p: float, n_out: Optional[int] = None,
                  threshold: Optional[float] = None) -> np.ndarray:
    """u(T) ~= e^p w(T, p); for lifted systems pass n_out to keep the u block.

    Sampling below the threshold is allowed (error scans need it) but warns.
    """
    if threshold is not None and p < threshold:
        warnings.warn(f"recovering at p = {p:g} below the threshold "
                      f"{threshold:g}; expect O(1) contamination", stacklevel=2)
    u = np.exp(p) * _reconstruct(state, p)
    return u[:n_out] if n_out is not None else u


def recover_integral(state: State, p: float, n_out: Optional[int] = None,
                     p_max: Optional[float] = None) -> np.ndarray:
    """u(T) ~= e^p * integral_p^{p_max} w(T, q) dq by trapezoid quadrature.

    Discrete states integrate over their own nodes p_k >= p up to the domain
    edge.  Transform states integrate the reconstruction on an auxiliary grid
    of spacing <= delta_xi * pi/4; the default reach past p is capped at half
    the reconstruction's periodization length pi/delta_xi (sampling in xi
    makes p periodic with period 2*pi/delta_xi, so integrating further would
    pick up the ghost image of the profile).
    """
    if isinstance(state, WarpedStateDiscrete):
        grid = state.grid
        gs = from_mode_space(state) if state.rep == MODE else state
        mask = grid.points >= p
        if not np.any(mask):
            raise DomainError(f"no grid points at or above p = {p:g}")
        vals = gs.values[mask]
        weights = np.full(vals.shape[0], grid.delta)
        weights[0] *= 0.5
        weights[-1] *= 0.5
        integral = weights @ vals
    else:
        if p_max is None:
            p_max = p + min(40.0, np.pi / state.grid.delta)
        spacing = state.grid.delta * np.pi / 4.0
        n_q = max(8, int(np.ceil((p_max - p) / spacing)))
        qs = np.linspace(p, p_max, n_q + 1)
        w_qs = _reconstruct(state, qs)
        integral = np.trapezoid(w_qs, qs, axis=0)
    u = np.exp(p) * integral
    return u[:n_out] if n_out is not None else u


def error_scan(state: State, exact: np.ndarray, p_list: Sequence[float],
               n_out: Optional[int] = None) -> list:
    """Relative pointwise-recovery error against ``exact`` for each p."""
    exact = np.asarray(exact, dtype=complex)
    ref = np.linalg.norm(exact)
    if ref == 0:
        raise ValueError("exact reference must be nonzero")
    out = []
    for p in p_list:
        u = recover_point(state, float(p), n_out=n_out)
        out.append((float(p), float(np.linalg.norm(u - exact) / ref)))
    return out


def window_error(state: State, exact: np.ndarray, p_lo: float, p_hi: float,
                 n_out: Optional[int] = None, samples: int = 65) -> float:
    """Relative L2-in-p error of e^p w(T, p) over (p_lo, p_hi).

    The reference is constant in p, so this is the window norm of the
    recovery residual divided by the window norm of the reference.
    """
    exact = np.asarray(exact, dtype=complex)
    ps = np.linspace(p_lo, p_hi, samples)
    w = _reconstruct(state, ps)
    if n_out is not None:
        w = w[:, :n_out]
    u = np.exp(ps)[:, None] * w
    err2 = np.trapezoid(np.sum(np.abs(u - exact[None, :]) ** 2, axis=1), ps)
    ref2 = np.trapezoid(np.full(ps.shape, np.sum(np.abs(exact) ** 2)), ps)
    return float(np.sqrt(err2 / ref2))


@dataclass(frozen=True)
class MeasurementEstimate:
    """Deterministic emulation of the quantum readout cost (no sampling)."""

    c_e0: float
    c_e: float
    success_prob_ratio: float    # C_e0^2 / C_e^2
    g: float                     # estimated measurement repetitions, >= 1


def measurement_estimate(grid: PGrid, window: RecoveryWindow,
                         u0_norm: float, uT_norm: float) -> MeasurementEstimate:
    """Window capture ratio and repetition estimate from the profile masses.

    C_e0 and C_e are root sums of e^{-2|p_k|} over the window and the whole
    grid; g = (C_e/C_e0) * u0_norm/uT_norm, clamped below at 1 (a repetition
    count cannot drop below one shot).
    """
    if u0_norm <= 0 or uT_norm <= 0:
        raise ValueError("norms must be positive")
    if not window.indices:
        raise WindowError("recovery window contains no grid points")
    mass = np.exp(-2.0 * np.abs(grid.points))
    c_e = float(np.sqrt(np.sum(mass)))
    c_e0 = float(np.sqrt(np.sum(mass[list(window.indices)])))
    ratio = (c_e0 / c_e) ** 2
    g = max(1.0, (c_e / c_e0) * (u0_norm / uT_norm))
    return MeasurementEstimate(c_e0=c_e0, c_e=c_e, success_prob_ratio=ratio, g=g)
