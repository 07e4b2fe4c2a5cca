"""Classical emulation of Schrodingerization for linear dynamical systems.

The warped phase transform w(t, p) = e^{-p} u(t) turns any linear system
du/dt = A(t)u + b(t) into unitary (Schrodinger-type) dynamics in one higher
dimension; u is recovered from w at points p beyond a threshold set by the
positive spectrum of the Hermitian part of A.  This package implements the
whole classical pipeline at desk scale: Hermitian splitting, the
inhomogeneous-to-homogeneous lift with its stretch coefficient, two Fourier
discretizations of the extra dimension, norm-preserving time stepping, the
clock dilation for time-dependent generators, recovery and its error/cost
diagnostics, plus benchmark experiments and a CLI.
"""

from .errors import (AccuracyError, ConfigError, DecompositionError,
                     DegenerateSourceError, DimensionError, DomainError,
                     NumericalError, OracleRefusedError, SchroError,
                     WindowError)
from .evolve import (BlockHamiltonians, DilationGrid, EvolveReport, ModeState,
                     StepperConfig, autonomize_continuous, autonomize_discrete,
                     cn_step, cosine_bump, evolve_modes, expm_oracle)
from .fourier_xi import (WarpedStateXi, XiGrid, init_xi_state, reconstruct_whc,
                         xi_blocks, xi_mode_hamiltonian)
from .harness import (ConvergenceReport, RunConfig, RunResult, convergence,
                      emit_csv, main, parse_csv, run, scan)
from .problems import (EXPERIMENT_NAMES, Experiment, backward_heat_system,
                       by_name, maxwell_yee_system, scattering_system)
from .recover import (MeasurementEstimate, RecoveryWindow, error_scan,
                      measurement_estimate, p_diamond, pick_recovery_p,
                      recover_integral, recover_point, recovery_window,
                      window_error)
from .spectral_p import (PGrid, WarpedStateDiscrete, from_mode_space,
                         make_initial_state, mode_hamiltonian, reconstruct_w,
                         to_mode_space)
from .systems import (HermitianPair, LiftedSystem, LinearSystem, SpectralBounds,
                      hermitian_decompose, lift_inhomogeneous, spectral_bounds,
                      weyl_shift_check)
from .warping import (DomainSizing, WarpProfile, exponential_profile,
                      size_domains, smooth_profile_r2)

__version__ = "0.1.0"
