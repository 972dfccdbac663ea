"""Exact Ollivier-Ricci curvature, lazy-walk spectra and local profiles of finite graphs."""

__version__ = "0.1.0"

from .errors import (
    CapabilityError,
    GenerationError,
    InputError,
    InvariantError,
    MetricInfiniteError,
    PreconditionError,
    RicciGapError,
)
from .graph_core import Graph, ball, canonical_code, graph_distance, load_graph, sparsity_functional
from .generators import FamilySpec, generate
from .transport import VertexDistribution, good_optimal_coupling, optimal_coupling, wasserstein1
from .curvature import curvature_profile, edge_curvatures, kappa_edge, kappa_graph, negative_fraction
from .spectral import count_above, eigen_basis, local_spectral_measure, spectrum
from .walks import coupled_meeting_experiment, entropy_series, return_probability, spectral_radius_estimate
from .local_profile import ball_census, profile_distance, verify_mtp, verify_stationarity
from .trichotomy import TrichotomyReport, evaluate, sweep
