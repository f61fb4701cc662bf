"""Pseudo-spectral Oldroyd-B simulator on the periodic box.

Fourier collocation with 3/2-rule dealiasing, integrating-factor RK4
time stepping, per-mode linear analysis, time-weighted energy
diagnostics, the Hookean-elasticity reduction, and a round-off-exact
verifier for the cancellation identities behind the energy estimates.
"""

from .config import (ConfigError, OutOfRange, ParseError, RunConfig,
                     UnknownKey, parse, parse_file)
from .energetics import (EnergyAccumulator, EnergyRecord, assemble_energies,
                         compute_norms, decay_fit, energy_record,
                         exponential_rate, interpolation_check,
                         closure_ratio_monitors)
from .hookean import (HookeanState, hookean_rhs, reduced_params,
                      to_conformation, verify_g_closure)
from .identities import (run_suite, verify_commutator, verify_eqq, verify_m1,
                         verify_n1, verify_projection_fact)
from .integrate import (CflViolation, HookeanProblem, IntegratorConfig,
                        NonFinite, OldroydProblem, convergence_order,
                        run_integration, step)
from .linear import (ModeState, decay_prediction, mode_eigenvalues,
                     mode_matrix, propagate_field, propagate_mode)
from .model import (ModelParams, OldroydState, bilinear_q, oldroyd_rhs,
                    projected_stress_div)
from .presets import BadPreset, make_initial
from .runner import hookean_consistency, read_snapshot, run, sweep, write_snapshot
from .spectral import (Grid, SpectralScalar, SpectralSymTensor, SpectralTensor,
                       SpectralVector, forward, inverse, leray_project,
                       sobolev_norm)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
