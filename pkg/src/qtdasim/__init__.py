"""Simulated quantum topological data analysis with an exact homology oracle."""

from .complex import (
    DistanceMatrix,
    Simplex,
    SimplexSet,
    critical_scales,
    enumerate_k_simplices,
    pairwise_distances,
    simplex_proportion,
    validate_distance_matrix,
)
from .homology import Barcode, BettiCurve, barcode, betti_at_scale, betti_curve, betti_numbers, boundary_matrix, rank_exact

__version__ = "0.1.0"
