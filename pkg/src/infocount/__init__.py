"""Combinatorial information theory: counting, entropy, capacity and random coding."""
from .channel import (
    CapacityResult,
    DiscreteChannel,
    capacity_grid_oracle,
    capacity_iterative,
    errorless_capacity,
)
from .combinatorics import (
    TypeVector,
    binomial_central_limit_table,
    entropy_rate,
    log2_count,
    multinomial_count,
    rank_sequence,
    stirling_binomial_log2,
    stirling_factorial,
    unrank_sequence,
)
from .entropy import (
    EntropyValue,
    conditional_entropy,
    differential_entropy_numeric,
    entropy,
    gaussian_entropy,
    information,
    joint_entropy,
    mutual_information,
)
from .experiments import (
    AdmissibleSet,
    ExperimentReport,
    RandomCodingConfig,
    classify_by_type,
    is_compatible,
    no_gain_limit,
    random_coding_sweep,
)
from .probability import (
    Alphabet,
    ConditionalKernel,
    Distribution,
    JointDistribution,
    conditional_from_joint,
    joint_from_input_and_kernel,
    output_distribution,
    validate_distribution,
)

__version__ = "0.1.0"
