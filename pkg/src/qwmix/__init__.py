"""Spectral simulation of continuous-time quantum-walk mixing on G(n, p)."""

from .config import RunConfig
from .errors import (DegenerateSpectrum, GridTooCoarse, InsufficientData, InsufficientTrials,
                     QwmixError, SpectralConvergenceError)
from .experiment import (EnsembleReport, ScalingFit, TrialResult, bound_fractions, fit_scaling,
                         run_desk, run_ensemble, run_trial)
from .gaps import (ClassicalLocations, GapProfile, RigidityReport, c_star, classical_locations,
                   gap_profile, gap_tail_histogram, rigidity_report)
from .graphs import GraphSample, NormalizedAdjacency, centered_matrix, normalize, sample_gnp
from .spectral import (SpectralDecomposition, eigendecompose, eigenvector_stats,
                       second_eigenvalue_check)
from .walk import (MixingResult, WalkSpec, empirical_mixing_time, limiting_distribution,
                   mixing_result, mixing_time_bound, time_averaged_distribution, tv_distance,
                   tv_upper_bound)

__version__ = "0.1.0"
