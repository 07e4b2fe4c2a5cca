"""Warped-phase initial profiles and truncation sizing for the extra dimension.

The warped transform w(t, p) = e^{-p} u(t) needs initial data on all of p.
Two extensions of e^{-p} to p < 0 are provided: the plain even extension
e^{-|p|} (continuous, kink at 0, first-order accurate under the spectral
discretization) and a C^1 cubic patch on (-1, 0) that matches value and
slope at both ends (second-order accurate).  Both agree with e^{-p} exactly
for p >= 0, which is what recovery relies on.

Truncation sizing: the p-domain (-pi*L, pi*L) must absorb the fronts created
by the spectrum of H1 over the horizon, and the xi-domain half-width X of the
continuous transform scales like 1/epsilon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import AccuracyError
from .systems import SpectralBounds

# Cubic coefficients matching e^{-p} at p=0 and e^{-|p|} at p=-1, in value
# and first derivative.
_C3 = -3.0 + 3.0 * math.exp(-1.0)
_C2 = -5.0 + 4.0 * math.exp(-1.0)

EXPONENTIAL = "exponential"
SMOOTH_R2 = "smooth-r2"


def smooth_profile_r2(p: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """C^1 initial profile: a cubic on (-1, 0), e^{-|p|} elsewhere."""
    arr = np.asarray(p, dtype=float)
    cubic = ((_C3 * arr + _C2) * arr - 1.0) * arr + 1.0
    out = np.where((arr > -1.0) & (arr < 0.0), cubic, np.exp(-np.abs(arr)))
    if np.isscalar(p) or arr.ndim == 0:
        return float(out)
    return out


def exponential_profile(p: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    arr = np.asarray(p, dtype=float)
    out = np.exp(-np.abs(arr))
    if np.isscalar(p) or arr.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class WarpProfile:
    """Evaluator for the initial profile psi(p), psi(p) = e^{-p} for p >= 0."""

    kind: str

    def __call__(self, p):
        if self.kind == SMOOTH_R2:
            return smooth_profile_r2(p)
        return exponential_profile(p)

    @classmethod
    def exponential(cls) -> "WarpProfile":
        return cls(kind=EXPONENTIAL)

    @classmethod
    def smooth_r2(cls) -> "WarpProfile":
        return cls(kind=SMOOTH_R2)

    @classmethod
    def from_name(cls, name: str) -> "WarpProfile":
        name = name.lower()
        if name in (EXPONENTIAL, "exp"):
            return cls.exponential()
        if name in (SMOOTH_R2, "smooth", "smooth_r2"):
            return cls.smooth_r2()
        raise ValueError(f"unknown profile {name!r}")


@dataclass(frozen=True)
class DomainSizing:
    """Truncation parameters for both discretizations of the extra dimension."""

    pi_l: float      # half-width of the p-domain (-pi*L, pi*L)
    X: float         # xi-domain half-width for the continuous transform
    R: float         # recovery-window length
    epsilon: float   # accuracy target the sizes were derived from


def size_domains(bounds: SpectralBounds, T: float, R: float = 1.0,
                 epsilon: float = 1e-6, inhomogeneous: bool = False) -> DomainSizing:
    """Smallest truncations meeting the accuracy target.

    pi_l is the least value satisfying both

        exp(-pi_l + 2*lambda_plus*T + R) <= epsilon,
        exp(-pi_l + (lambda_minus + lambda_plus)*T + R) <= epsilon,

    with one extra unit in the exponent for lifted inhomogeneous systems
    (their threshold carries an O(1) margin).  X = ceil(1/epsilon).

    These sizes are sufficient for worst-case initial data and can be very
    conservative when only a few eigenmodes are populated; experiment
    builders may override pi_l.
    """
    if not (0.0 < epsilon < 1.0):
        raise AccuracyError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not (1.0 <= R <= 2.0):
        raise ValueError(f"R must lie in [1, 2] so that e^R = O(1), got {R}")
    lp, lm = bounds.lambda_plus, bounds.lambda_minus
    margin = 1.0 if inhomogeneous else 0.0
    growth = max(2.0 * lp * T, (lm + lp) * T)
    pi_l = math.log(1.0 / epsilon) + growth + R + margin
    return DomainSizing(pi_l=pi_l, X=float(math.ceil(1.0 / epsilon)),
                        R=float(R), epsilon=float(epsilon))
