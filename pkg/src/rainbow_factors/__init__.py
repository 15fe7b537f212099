"""Rainbow H-factors in bounded edge-coloured hypergraphs, at desk scale."""

from .colouring import Colouring, colour_clash, gen_prefix_colouring, gen_random_bounded, is_mu_bounded, is_rainbow, min_mu
from .errors import InputError, ResourceLimitError
from .factors import (
    Copy,
    PartialFactor,
    delta_threshold,
    enumerate_copies,
    enumerate_factors,
    find_factor,
    find_rainbow_factor_bruteforce,
)
from .hypergraph import Hypergraph, degree, induced, min_ell_degree
from .switching import (
    SwitchContext,
    TransversePartition,
    apply_switching,
    construct_switching,
    count_feasible_switchings,
    is_feasible_switching,
    is_suitable,
    is_transverse,
    x_ef,
)

__version__ = "0.1.0"
