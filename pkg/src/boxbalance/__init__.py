"""Load-balancing laboratory for block-structured box decompositions."""

__version__ = "0.1.0"

from .balancers import (  # noqa: E402
    ALGORITHMS,
    DistributionMap,
    PartitionProblem,
    Topology,
    combined_partition,
    is_partition_possible,
    knapsack_partition,
    painters_partition,
    painters_search,
    run_algorithm,
    sfc_percentage_partition,
)
from .geometry import BoxArray, IndexBox, MortonKey, make_box_array, morton_key, sfc_order  # noqa: E402
from .metrics import EfficiencyReport, LoadProfile, compute_loads, efficiency  # noqa: E402
from .oracle import BruteForceResult, brute_force_solve  # noqa: E402
from .weights import PRESETS, WeightDistribution, generate_weights  # noqa: E402
