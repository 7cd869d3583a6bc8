"""Unit distance graphs of layers ``R^n x [0, eps]^m`` under l_p norms.

Submodules:

``layer_core``  points, norms, support normals, equidistant points
``hopmetric``   hop distance with certified bounds and witness paths
``gadgets``     combs, sandwiches, Δ-regions and odd cycles in strips
``analysis``    width signatures, the two-width distinguisher, separation checks
``svg``         drawings of planar objects
``cli``         JSON command-line interface
"""

from .layer_core import (
    DEFAULT_TOL,
    LayerPoint,
    LayerSpec,
    Tolerance,
    chain_points,
    hull_interior_contains,
    in_layer,
    lp_dist,
    lp_norm,
    support_normal,
    unit_equidistant_pair,
)
from .hopmetric import HopConfig, HopInterval, WitnessPath, hop_distance, two_hop_decision
from .gadgets import (
    build_extreme_comb,
    build_modified_comb,
    build_sandwich,
    comb_exists,
    comb_min_width,
    cycle_embeds,
    modified_comb_exists,
    odd_cycle_min_width,
    validate_comb,
)
from .analysis import distinguish, gamma_check, gamma_hat_check, omega_check, width_witness

__version__ = "0.1.0"
