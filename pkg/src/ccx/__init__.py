"""Non-ground congruence closure over a bounded ground term space."""

from .classes import (
    CongruenceClass,
    collapse_constraint_vars,
    condense,
    gnd,
    gnd_subsumes,
    make_class,
    normalize,
    render_class,
    separating_free_vars,
)
from .constraints import (
    Bound,
    EnumerationBudgetExceeded,
    enumerate_ground_terms,
    implies,
    lic,
    reduce_atoms,
    satisfiable,
)
from .engine import (
    Budget,
    SaturationResult,
    State,
    deduction_step,
    ground_partition,
    init_state,
    merge_step,
    query_equal,
    saturate,
    select_next,
)
from .frontend import (
    ParseError,
    Problem,
    RunConfig,
    build_beta,
    format_problem,
    parse_equation_list,
    parse_tptp_ueq,
    run,
)
from .ground import GroundPartition, cc_saturate, eq_closure, ground_equations
from .subsumption import find_subsumer, prefilter, subsumes_by_matching
from .terms import (
    App,
    Signature,
    Symbol,
    Term,
    Var,
    apply,
    match,
    mgu,
    occ_count,
    rename_apart,
    simultaneous_mgu,
    size,
    vars_of,
)

__all__ = [
    "App",
    "Bound",
    "Budget",
    "CongruenceClass",
    "EnumerationBudgetExceeded",
    "GroundPartition",
    "ParseError",
    "Problem",
    "RunConfig",
    "SaturationResult",
    "Signature",
    "State",
    "Symbol",
    "Term",
    "Var",
    "apply",
    "build_beta",
    "cc_saturate",
    "collapse_constraint_vars",
    "condense",
    "deduction_step",
    "enumerate_ground_terms",
    "eq_closure",
    "find_subsumer",
    "format_problem",
    "gnd",
    "gnd_subsumes",
    "ground_equations",
    "ground_partition",
    "implies",
    "init_state",
    "lic",
    "make_class",
    "match",
    "merge_step",
    "mgu",
    "normalize",
    "occ_count",
    "parse_equation_list",
    "parse_tptp_ueq",
    "prefilter",
    "query_equal",
    "reduce_atoms",
    "rename_apart",
    "render_class",
    "run",
    "satisfiable",
    "saturate",
    "select_next",
    "separating_free_vars",
    "simultaneous_mgu",
    "size",
    "subsumes_by_matching",
    "vars_of",
]
