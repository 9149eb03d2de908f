"""Horn clause solving by explicit least fixed points.

The package turns a constrained Horn clause set into a simultaneous
fixpoint definition whose least fixed point over a finite structure is
the canonical minimal solution; dualization yields maximal solutions.
On top of that sit a verification-condition generator for a mini
imperative language (with strongest-postcondition and weakest-liberal-
precondition tables computed both by fixpoints and by brute-force
oracles) and an affine-equality abstract domain over exact rationals
with terminating abstract fixpoint iteration.
"""

from .errors import (
    ArityError,
    EvalError,
    HornfixError,
    NonAffine,
    NotDualizable,
    NotHorn,
    NotLinear,
    ParseError,
    SignatureError,
)
from .logic import (
    BOT,
    TOP,
    And,
    Atom,
    Bot,
    Eq,
    Exists,
    FixpointSystem,
    Fn,
    Forall,
    Formula,
    Implies,
    LfpAtom,
    Not,
    Or,
    Polarity,
    PredicateVariable,
    Signature,
    Term,
    Top,
    Var,
    VarAtom,
    alpha_equal,
    conj,
    disj,
    dual_substitution,
    free_individual_variables,
    polarity,
    predicate_variables,
    substitute,
    substitute_terms,
)
from .structures import (
    FiniteStructure,
    LfpResult,
    RelationTable,
    apply_F,
    evaluate,
    lfp_solve,
    load_structure,
    structure_from_dict,
    structure_to_dict,
)
from .horn import (
    Clause,
    HornSystem,
    InterpolantVerdict,
    SolutionReport,
    build_phi,
    check_interpolant,
    classify,
    dualize,
    is_linear,
    normalize_clause,
    solve_max,
    solve_min,
)
from .imp import (
    ArithStructure,
    Assign,
    HoareTriple,
    If,
    Program,
    Seq,
    Skip,
    While,
    arith_structure,
    check_hoare,
    parse_program,
    run,
    sp_lfp,
    sp_oracle,
    vcgen,
    verification_conditions,
    wp_dual,
    wp_oracle,
)
from .affine import (
    AffineDomain,
    AffineSubspace,
    GaloisDomain,
    ModelAbstraction,
    abstract_apply_F,
    abstract_lfp,
    check_end_clauses_abstract,
    compile_affine_system,
    galois_law_check,
)
from .sexpr import formula_to_sexpr, parse_formula, parse_term, term_to_sexpr
from .problem import ProblemFile, parse_problem, print_problem

__version__ = "0.1.0"
