"""Simulation and analysis of local detection of polarization-frequency correlations.

The package models a photon whose polarization is correlated with its frequency
by a birefringent crystal, builds the locally dephased reference state and
computes the local trace-norm witness together with its closed-form and
quadrature counterparts.
"""
__version__ = "0.1.0"

from .errors import (DegenerateBasisWarning, FitFailure, FitFallbackWarning,
                     GridResolutionError, IncompatibleStatesError, InvalidParameterError,
                     NumericFailure)
from .spectrum import (FrequencyGrid, Quantile, SpectralDensity, UniformTruncated, coherence,
                       discretize, make_lorentzian, make_tabulated, quad_correlation_integral,
                       uniform_for_delay)
from .states import (EigenDecomposition, JointBlockState, product_state, qubit_eigenbasis,
                     reduce_environment, reduce_system, trace_distance_joint,
                     trace_distance_qubit)
from .channels import (BasisSpec, PreparationParams, RotationRecord, apply_controlled_phase,
                       dephase_exact, dephase_fiber, prepare_pre_initial, random_rotation)
from .tomography import CountRecord, reconstruct, simulate_counts
from .witness import (DelaySweep, WitnessCurve, analytic_Delta_general,
                      analytic_Delta_lorentzian, analytic_max_lorentzian, build_reference,
                      delta_total, dense_sweep, local_distance_curve, experiment_sweep,
                      prepare_alice_state, simulate_protocol, witness_max)
from .estimation import (VisibilityTrace, estimate_birefringence, fit_linewidth,
                         synthesize_visibility)
