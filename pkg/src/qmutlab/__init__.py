"""Gate-level mutation analysis for quantum circuits."""
from .analytics import SurvivalTable, complexity_correlations, pearson, rank_interactions, survival_rate
from .circuit import Circuit, GateApplication, OutputDominance, ProgramMeta, relative_position_bucket
from .gates import CATALOG, MUTATABLE_GATES, GateType, SizeClass, lookup, taxonomy_of
from .metrics import CircuitMetrics, compute_metrics
from .mutation import (EnumerationConfig, MutantSpec, Operator, OperandStrategy, apply_mutation,
                       enumerate_add, enumerate_mutants, enumerate_remove, enumerate_replace)
from .oracles import (OracleConfig, Verdict, VerdictKind, chi_square_pvalue, dominant_output, judge,
                      opo_verdict, woo_verdict)
from .qasm import QasmError, parse_qasm, serialize_qasm
from .recommender import Query, recommend
from .records import MutantRecord, read_store, write_store
from .simulator import OutcomeDistribution, StateVector, apply_gate, run_statevector, sample_shots

__version__ = "0.1.0"
