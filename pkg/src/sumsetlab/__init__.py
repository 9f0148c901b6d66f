"""Exact sumset computations in Z^k and verifiers for Brunn-Minkowski type inequalities."""

from .errors import (
    ArgumentError,
    CapacityError,
    DimensionError,
    EmptyInputError,
    GenerationError,
    HypothesisError,
    InfeasibleError,
    NoCoverError,
    SumsetLabError,
    UnsupportedDimensionError,
)
from .exact import Interval, compare_root_sum
from .gap import Gap, GapHullResult, enumerate_gap, gap_hull, is_n_full, is_separated, is_t_proper, scale
from .geometry import CoverCertificate, cone, cover_number, general_position_points, simplex
from .lattice import (
    Box,
    PointSet,
    convex_hull_volume,
    difference_set,
    dilate,
    iterated_sumset,
    minus,
    read_pointset,
    sumset,
    write_pointset,
)
from .report import InequalityReport
from .transforms import compress, compress_fully, cube_summand_identity_check, normalize_corner, ruzsa_cover

__version__ = "0.1.0"
