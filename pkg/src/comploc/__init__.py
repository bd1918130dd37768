"""Compositions of k-local boolean functions at desk scale.

Explicit constructions, branching-program and depth-3 reductions, exhaustive
verification, exact information-theoretic analysis, and an exact minimal-m
search oracle for tiny instances.
"""

from ._kernels import backend_name
from .boolfn import (
    BitVector,
    Domain,
    SizingError,
    TruthTable,
    complement,
    flip_bit,
    hamming_weight,
    named_function,
    restrict,
    set_bit,
)
from .branching import (
    BranchingProgram,
    Layer,
    bp_evaluate,
    bp_to_composition,
    bp_truth_table,
    mod_counter_program,
    parity_program,
)
from .composition import (
    Composition,
    ConflictWitness,
    Counterexample,
    LocalFunction,
    OuterFunction,
    QueryProfile,
    RestrictionError,
    UnmappedPatternError,
    induce_outer,
    low_query_restriction,
    query_profile,
    restrict_composition,
    verify_against,
)
from .constructions import GroupSplit, build_hw, build_maj, build_parity
from .depth3 import (
    Depth3Circuit,
    MiddleGate,
    composition_to_depth3,
    depth3_cube,
    depth3_evaluate,
    depth3_size,
    negate_composition,
)
from .infoflow import (
    BiasWitness,
    DiscreteDistribution,
    InfoReport,
    KeyLemmaReport,
    binary_entropy,
    check_counting_bound,
    check_key_lemma,
    conditional_entropy,
    entropy,
    extract_bias_witness,
    info_report,
    mutual_information,
    validate_information_facts,
)
from .majreduce import (
    InfeasibleReductionError,
    PartialHW,
    PipelineReport,
    VariableSplit,
    derive_partial_hw,
    end_to_end_pipeline,
    split_variables,
)
from .search import (
    Candidate,
    ExactCCResult,
    SearchBudget,
    exact_cc,
    lower_bound_refinement,
)

__version__ = "0.1.0"
