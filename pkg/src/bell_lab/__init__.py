"""Bell correlation toolkit for bipartite systems with d outcomes per side.

The package evaluates a four-setting Bell expression built from modular
outcome weights, enumerates deterministic local strategies to certify the
classical bound, constructs the quantum probability table for the maximally
entangled state, and provides noise, scan, and optimization analyses plus a
command line front end.
"""

from .analysis import (
    OptimizationResult,
    ScanResult,
    ScanRow,
    cglmp_crosscheck,
    noise_threshold,
    noise_threshold_bisect,
    noisy_table,
    optimize_phases,
    random_settings,
    scan_dimensions,
    scan_to_csv,
    scan_to_json,
)
from .core import (
    BellValue,
    CorrelationKernel,
    JointProbabilityTable,
    OutcomeMapping,
    bell_expression,
    bell_from_spin_correlations,
    cglmp_correlation,
    cglmp_expression,
    check_dimension,
    correlation,
    correlation_kernel,
    difference_probability,
    load_table,
    mapped_spin_distribution,
    modular_residue,
    qutrit_complex_correlation,
    sign,
    spin,
    spin_correlation,
    weight_direct,
    weight_reversed,
)
from .errors import (
    BellLabError,
    DimensionError,
    EnumerationSizeError,
    MappingError,
    NormalizationError,
    SingularAngleError,
    TableFormatError,
)
from .lhv import (
    DeterministicStrategy,
    EnumerationSummary,
    StrategyReport,
    case_value_set,
    classify_strategy,
    enumerate_strategies,
    lhv_value_set,
    outcome_sums,
    sample_strategies,
    strategy_bell_value,
    strategy_to_table,
)
from .quantum import (
    CANONICAL_PHASES,
    MeasurementSettings,
    born_table,
    canonical_correlation,
    closed_form_table,
    correlation_matrix,
    max_entangled_state,
    measurement_basis,
    outcome_sum_distribution,
    quantum_bell_value,
    shift_symmetry_deviation,
    spin_projection_distribution,
)

__version__ = "0.1.0"

__all__ = [
    "BellLabError",
    "BellValue",
    "CANONICAL_PHASES",
    "CorrelationKernel",
    "DeterministicStrategy",
    "DimensionError",
    "EnumerationSizeError",
    "EnumerationSummary",
    "JointProbabilityTable",
    "MappingError",
    "MeasurementSettings",
    "NormalizationError",
    "OptimizationResult",
    "OutcomeMapping",
    "ScanResult",
    "ScanRow",
    "SingularAngleError",
    "StrategyReport",
    "TableFormatError",
    "bell_expression",
    "bell_from_spin_correlations",
    "born_table",
    "canonical_correlation",
    "case_value_set",
    "cglmp_correlation",
    "cglmp_crosscheck",
    "cglmp_expression",
    "check_dimension",
    "classify_strategy",
    "closed_form_table",
    "correlation",
    "correlation_kernel",
    "correlation_matrix",
    "difference_probability",
    "enumerate_strategies",
    "lhv_value_set",
    "load_table",
    "mapped_spin_distribution",
    "max_entangled_state",
    "measurement_basis",
    "modular_residue",
    "noise_threshold",
    "noise_threshold_bisect",
    "noisy_table",
    "optimize_phases",
    "outcome_sum_distribution",
    "outcome_sums",
    "quantum_bell_value",
    "qutrit_complex_correlation",
    "random_settings",
    "sample_strategies",
    "scan_dimensions",
    "scan_to_csv",
    "scan_to_json",
    "shift_symmetry_deviation",
    "sign",
    "spin",
    "spin_correlation",
    "spin_projection_distribution",
    "strategy_bell_value",
    "strategy_to_table",
    "weight_direct",
    "weight_reversed",
]
