"""Homogeneous quantum walks on Z^d: symbols, lattice evolution, spectral
velocity fields and the ballistic limit distribution of ``x / t``."""
from .exceptions import (AliasingError, ConfigError, MonodromyError, NonUnitaryError,
                         ShapeMismatchError, WalkError)
from .symbol import (BUILTIN_WALKS, SINGULAR_POINTS, LaurentMatrixSymbol, TorusGrid,
                     build_named_walk, commutator_norm, derive, evaluate, symbol_pow_at,
                     unitarity_deviation, validate_unitary, walk_from_spec, walk_to_spec)
from .lattice import (LatticeState, ScaledDistribution, concentration_series, delta_state,
                      evolve, gaussian_state, moment, position_mean, scaled_distribution, step)
from .spectral import (CocycleField, ConvergenceRecord, MonodromyResult, SpectralGrid,
                       VelocityField, closed_form_exotic_H, cocycle_average, convergence_report,
                       eigendecompose, exotic_paths, group_velocity_field, h_operator_field,
                       line_path, monodromy_probe, torus_distance)
from .limit import (CompareReport, FourierState, VelocityMeasure, char_function, compare,
                    fourier_state, h_expectation, kolmogorov_distance, limit_measure)
from .config import RunConfig, build_initial, parse_config

__version__ = "0.1.0"
