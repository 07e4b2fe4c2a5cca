"""Input dynamical systems, Hermitian splitting, and the homogenizing lift.

A general linear system du/dt = A(t) u + b(t) is held by :class:`LinearSystem`.
Every square matrix splits as A = H1 + i*H2 with both parts Hermitian:
H1 = (A + A^dag)/2 carries growth and dissipation, H2 = (A - A^dag)/(2i) the
oscillatory part.  Positive eigenvalues of H1 are what make the warped-phase
recovery nontrivial, so their extremes over the horizon are tracked by
:class:`SpectralBounds`.

An inhomogeneous system is rewritten as a homogeneous one of twice the size
by appending a constant auxiliary vector r:

    d/dt [u; r] = [[A, gamma*B], [0, 0]] [u; r],   B = diag(b(t)),

with r(0) = r0/gamma and the stretch coefficient gamma = 1/(C_T*|b|),
|b| = sup_t ||b(t)||_inf.  The stretch keeps the source-induced eigenvalues
of the enlarged Hermitian part at O(1/C_T): they are perturbed from
{eig(H1), 0} by at most gamma*|b|/2 (Weyl), and for b != 0 both signs occur.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .errors import DecompositionError, DegenerateSourceError, DimensionError

MatrixLike = Union[np.ndarray, Callable[[float], np.ndarray]]
VectorLike = Union[np.ndarray, Callable[[float], np.ndarray]]

# Relative tolerance certifying Hermiticity and reconstruction.
HERMITIAN_RTOL = 1e-13

# Default number of uniformly spaced sample times (endpoints included) used
# wherever a sup over t in [0, T] is approximated.
DEFAULT_TIME_SAMPLES = 33


@dataclass(frozen=True)
class HermitianPair:
    """The split A = H1 + i*H2 with H1, H2 Hermitian."""

    h1: np.ndarray
    h2: np.ndarray

    @property
    def n(self) -> int:
        return self.h1.shape[0]


def hermitian_decompose(a: np.ndarray) -> HermitianPair:
    """Split a square matrix into Hermitian and anti-Hermitian parts.

    Returns H1 = (A + A^dag)/2 and H2 = (A - A^dag)/(2i); the identity
    H1 + i*H2 = A holds to round-off by construction.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {a.shape}")
    adag = a.conj().T
    h1 = 0.5 * (a + adag)
    h2 = (a - adag) / 2j
    return HermitianPair(h1=h1, h2=h2)


def _check_hermitian(h: np.ndarray, what: str = "matrix") -> None:
    gap = np.linalg.norm(h - h.conj().T)
    if gap > HERMITIAN_RTOL * (1.0 + np.linalg.norm(h)):
        raise DecompositionError(f"{what} is not Hermitian (deviation {gap:.3e})")


class LinearSystem:
    """du/dt = A(t) u + b(t), u(0) = u0, on the horizon [0, T].

    ``A`` may be a constant (n, n) array or a callable t -> (n, n) array;
    ``b`` may be None (homogeneous), a constant n-vector, or a callable.
    Instances are immutable after construction and safe to share.
    """

    def __init__(self, A: MatrixLike, u0: np.ndarray, T: float,
                 b: Optional[VectorLike] = None, n: Optional[int] = None):
        self.u0 = np.asarray(u0, dtype=complex)
        if self.u0.ndim != 1:
            raise DimensionError("u0 must be a vector")
        self.n = int(n) if n is not None else self.u0.shape[0]
        if self.u0.shape[0] != self.n:
            raise DimensionError(f"u0 has length {self.u0.shape[0]}, expected {self.n}")
        self.T = float(T)
        if self.T <= 0:
            raise ValueError("horizon T must be positive")

        self._a_const: Optional[np.ndarray] = None
        self._a_fn: Optional[Callable[[float], np.ndarray]] = None
        if callable(A):
            self._a_fn = A
        else:
            self._a_const = np.asarray(A, dtype=complex)
        a0 = self.A_at(0.0)
        if a0.shape != (self.n, self.n):
            raise DimensionError(f"A(t) has shape {a0.shape}, expected {(self.n, self.n)}")

        self._b_const: Optional[np.ndarray] = None
        self._b_fn: Optional[Callable[[float], np.ndarray]] = None
        self._has_b = b is not None
        if callable(b):
            self._b_fn = b
        elif b is not None:
            self._b_const = np.asarray(b, dtype=complex)
        if self._has_b and self.b_at(0.0).shape != (self.n,):
            raise DimensionError("b(t) must return an n-vector")

    @property
    def a_constant(self) -> bool:
        return self._a_fn is None

    @property
    def b_constant(self) -> bool:
        return self._b_fn is None

    @property
    def constant(self) -> bool:
        """True when neither A nor b depends on time."""
        return self.a_constant and self.b_constant

    @property
    def homogeneous(self) -> bool:
        return not self._has_b

    def A_at(self, t: float) -> np.ndarray:
        if self._a_const is not None:
            return self._a_const
        return np.asarray(self._a_fn(t), dtype=complex)

    def b_at(self, t: float) -> np.ndarray:
        if not self._has_b:
            return np.zeros(self.n, dtype=complex)
        if self._b_const is not None:
            return self._b_const
        return np.asarray(self._b_fn(t), dtype=complex)

    def hermitian_at(self, t: float) -> HermitianPair:
        return hermitian_decompose(self.A_at(t))


@dataclass(frozen=True)
class SpectralBounds:
    """Extremes of eig(H1(t)) over sampled times, both stored >= 0."""

    lambda_plus: float
    lambda_minus: float
    sample_times: tuple


def spectral_bounds(h1_at: MatrixLike, T: float,
                    n_samples: int = DEFAULT_TIME_SAMPLES) -> SpectralBounds:
    """Sampled bounds on the spectrum of the Hermitian part.

    lambda_plus bounds the positive eigenvalues from above, lambda_minus the
    negative ones in magnitude; either is 0 when that side of the spectrum is
    empty.  The sup over t in (0, T) is approximated by ``n_samples``
    uniformly spaced times including both endpoints, so enlarging the sample
    set can only grow the bounds.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if callable(h1_at):
        times = np.linspace(0.0, T, n_samples) if n_samples > 1 else np.array([0.0])
    else:
        times = np.array([0.0])
    hi = -np.inf
    lo = np.inf
    for t in times:
        h = np.asarray(h1_at(t) if callable(h1_at) else h1_at, dtype=complex)
        _check_hermitian(h, what=f"H1({t:g})")
        ev = np.linalg.eigvalsh(h)
        hi = max(hi, ev[-1])
        lo = min(lo, ev[0])
    return SpectralBounds(lambda_plus=max(0.0, float(hi)),
                          lambda_minus=max(0.0, float(-lo)),
                          sample_times=tuple(float(t) for t in times))


@dataclass
class LiftedSystem:
    """Homogeneous enlargement of an inhomogeneous system, with the stretch.

    ``base`` is the homogeneous system actually evolved: the original one
    when no source is present (``augmented`` False), otherwise the 2n-dim
    block system with initial state [u0; r0/gamma].
    """

    base: LinearSystem
    source: LinearSystem
    gamma: float
    c_t: float
    b_sup: float
    r0_norm: float
    n_original: int
    augmented: bool

    def hermitian_at(self, t: float) -> HermitianPair:
        return self.base.hermitian_at(t)

    def tilde_h1_at(self, t: float) -> np.ndarray:
        return self.hermitian_at(t).h1

    def tilde_h2_at(self, t: float) -> np.ndarray:
        return self.hermitian_at(t).h2


def lift_inhomogeneous(sys: LinearSystem, c_t: Optional[float] = None,
                       gamma: Optional[float] = None,
                       n_samples: int = DEFAULT_TIME_SAMPLES) -> LiftedSystem:
    """Rewrite du/dt = A u + b as a homogeneous system of dimension 2n.

    The auxiliary constant vector r0 (all ones) is stretched by 1/gamma with
    gamma = 1/(c_t * |b|) by default; pass ``gamma`` to override.  ``c_t``
    defaults to the horizon T.  A homogeneous input is returned unchanged
    with gamma = 1 and no augmentation.
    """
    c_t = float(c_t) if c_t is not None else sys.T
    if c_t <= 0:
        raise ValueError("c_t must be positive")
    if sys.homogeneous:
        return LiftedSystem(base=sys, source=sys, gamma=1.0, c_t=c_t, b_sup=0.0,
                            r0_norm=0.0, n_original=sys.n, augmented=False)

    times = np.linspace(0.0, sys.T, n_samples)
    b_sup = max(float(np.max(np.abs(sys.b_at(t)))) for t in times)
    if b_sup == 0.0:
        raise DegenerateSourceError("source term b is present but samples to zero")
    if gamma is None:
        gamma = 1.0 / (c_t * b_sup)
    gamma = float(gamma)
    if gamma <= 0:
        raise ValueError("gamma must be positive")

    n = sys.n

    def a_big(t: float, _g: float = gamma) -> np.ndarray:
        big = np.zeros((2 * n, 2 * n), dtype=complex)
        big[:n, :n] = sys.A_at(t)
        big[:n, n:] = _g * np.diag(sys.b_at(t))
        return big

    u0f = np.concatenate([sys.u0, np.ones(n, dtype=complex) / gamma])
    if sys.constant:
        base = LinearSystem(a_big(0.0), u0f, sys.T)
    else:
        base = LinearSystem(a_big, u0f, sys.T)
    return LiftedSystem(base=base, source=sys, gamma=gamma, c_t=c_t, b_sup=b_sup,
                        r0_norm=float(np.sqrt(n)), n_original=n, augmented=True)


def weyl_shift_check(lifted: LiftedSystem, t: float) -> float:
    """Largest displacement of the lifted H1 spectrum from {eig(H1_A), 0}.

    Both spectra are sorted and compared entrywise; the return value is
    bounded by gamma*|b(t)|/2 <= gamma*|b|/2 since the off-diagonal coupling
    block has extreme eigenvalues +-gamma*||b(t)||_inf/2.
    """
    if not lifted.augmented:
        return 0.0
    n = lifted.n_original
    ev_big = np.linalg.eigvalsh(lifted.tilde_h1_at(t))
    h1a = lifted.source.hermitian_at(t).h1
    ref = np.sort(np.concatenate([np.linalg.eigvalsh(h1a), np.zeros(n)]))
    return float(np.max(np.abs(ev_big - ref)))
