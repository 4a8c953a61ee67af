"""Randomized-response differential privacy for binary face-attribute databases."""

from .accounting import BudgetLedger, compose_sequential, ledger_of
from .attribute_db import (
    AlignmentError,
    AttributeDatabase,
    AttributeRecord,
    AttributeSchema,
    ParseError,
    frequency,
    parse_celeba_attributes,
    parse_csv,
    select_attributes,
    write_csv,
)
from .audit import AuditReport, audit, empirical_design_matrix, empirical_epsilon
from .estimation import FrequencyEstimate, debias_frequency, flip_rate, keep_rate, utility_report
from .manifest import SynthesisManifest, emit_manifest, load_manifest, mock_synthesize
from .mechanism import (
    DesignMatrix,
    PerturbationConfig,
    epsilon_of_matrix,
    epsilon_of_warner,
    optimal_matrix,
    perturb_database,
    perturb_value,
    prf_uniform,
    satisfies_dp,
    warner_matrix,
)

__version__ = "0.1.0"

__all__ = [
    "BudgetLedger",
    "compose_sequential",
    "ledger_of",
    "AlignmentError",
    "AttributeDatabase",
    "AttributeRecord",
    "AttributeSchema",
    "ParseError",
    "frequency",
    "parse_celeba_attributes",
    "parse_csv",
    "select_attributes",
    "write_csv",
    "AuditReport",
    "audit",
    "empirical_design_matrix",
    "empirical_epsilon",
    "FrequencyEstimate",
    "debias_frequency",
    "flip_rate",
    "keep_rate",
    "utility_report",
    "SynthesisManifest",
    "emit_manifest",
    "load_manifest",
    "mock_synthesize",
    "DesignMatrix",
    "PerturbationConfig",
    "epsilon_of_matrix",
    "epsilon_of_warner",
    "optimal_matrix",
    "perturb_database",
    "perturb_value",
    "prf_uniform",
    "satisfies_dp",
    "warner_matrix",
]
