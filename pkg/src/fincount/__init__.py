"""fincount: count finite relational models, rewrite sentences to eliminate
hard-wired constants while preserving counts, and analyze residue sequences."""

from .logic import (
    And, Atom, Bottom, ClassSpec, Const, Count, Eq, Exists, ExistsRel,
    ExistsRelSub, Forall, ForallRel, ForallRelSub, Formula, Iff, Implies,
    Not, Or, Top, Var, Vocabulary, conj, disj, fold_constants,
    free_variables, normalize_hygiene, validate_class_spec, validate_formula,
    validate_vocabulary,
)
from .sexpr import (
    ParseError, SpecValidationError, parse_class_spec, parse_formula,
    print_class_spec, print_formula,
)
from .engine import (
    BudgetExceededError, CountResult, EvalError, Structure, count_models,
    count_models_mod, enumerate_models, evaluate,
)
from .builtins import builtin_class, oracle_value
from .eliminate import (
    CorrespondenceContext, EliminationResult, UnsupportedNodeError,
    eliminate_higher_arity, eliminate_many_one, eliminate_one_sum,
    embed_structure, project_structure, simulate_nullary, transform_formula,
)
from .witness import (
    IteratedMatchingSequence, TrimStage, build_phi_m, build_phi_mp,
    encode_canonical, enumerate_full_sequences, oracle_iterated_matchings,
    trim_pipeline,
)
from .sequences import (
    PeriodicityVerdict, ResidueSequence, decompose_modulus,
    detect_ultimate_periodicity, find_linear_recurrence_mod_prime,
    residue_series,
)

__version__ = "0.1.0"
