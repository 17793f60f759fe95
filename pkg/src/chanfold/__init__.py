"""Quantum channels as geometric objects: representations, extremality,
manifold dimensions, convex decompositions and circuit-topology audits."""

__version__ = "0.1.0"

from .channels import (
    ChoiState,
    Isometry,
    KrausChannel,
    adjoint_channel,
    channels_equal,
    choi_to_kraus,
    extreme_example,
    kraus_to_choi,
    random_channel,
    recover_mixing_unitary,
    stinespring_to_choi,
)
from .circuits import audit_topology, evaluate_topology, generated_dim_estimate, parse_topology
from .decomposition import caratheodory_reduce, decompose_extreme, find_dependence, split_once
from .errors import ChanfoldError, InputError, NumericalError
from .extremality import extremality_margin_sweep, is_extreme, is_minimal
from .geometry import (
    manifold_dim,
    numeric_choi_manifold_dim,
    psd_tangent_dim,
    pushforward_T,
    stiefel_tangent_basis,
)
from .linalg import haar_isometry, herm_eig, numerical_rank, partial_trace, unvec, vec
