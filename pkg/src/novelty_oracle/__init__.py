"""Subjective prediction rules for sampling with novelty."""

from .checkers import CheckReport, Property, run_check
from .elicitation import (
    ElicitationObservation,
    UtilitySpec,
    certainty_equivalents,
    elicit_ewens,
    elicit_two_parameter,
    fit_mle,
    risk_neutral_bets,
)
from .lattice import DrawSequence, build_lattice
from .measures import (
    PartitionMeasure,
    eppf_ewens,
    eppf_two_parameter,
    expected_novelties,
    gen_stirling,
    induced_measure,
    prob_k_novelties,
    rising_factorial,
    stirling_first_kind,
)
from .partitions import (
    Partition,
    enumerate_partitions,
    extensions,
    is_prefix,
    parse_partition,
    partition_vector,
    restrict,
)
from .rules import (
    DeMorgan,
    Ewens,
    Kuipers,
    MixtureRule,
    PredictiveDistribution,
    TabulatedRule,
    TwoParameter,
    parse_rule,
    predictive,
    validate,
)
from .urn import SimulationConfig, sample_partition, sample_partitions, simulate

__version__ = "0.1.0"
