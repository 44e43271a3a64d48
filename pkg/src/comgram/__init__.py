"""comgram: commutative grammars, semilinear sets and the Pi_2 lower-bound reduction.

The top-level namespace re-exports the most used names; the submodules
``core``, ``semilinear``, ``engine``, ``reduction`` and ``cli`` hold the rest.
"""

__version__ = "0.1.0"

from .core import (  # noqa: E402
    CommutativeWord,
    Grammar,
    GrammarKind,
    Production,
    classify,
    dump_grammar,
    load_grammar,
    parse_grammar,
    size,
    to_petri_net,
)
from .engine import (  # noqa: E402
    EnumerationBudget,
    decide_equivalence,
    decide_inclusion_bruteforce,
    decide_inclusion_semilinear,
    language_bounded,
    parikh_regular,
    reach_bounded,
    replay,
    step,
    word_problem,
)
from .errors import (  # noqa: E402
    BudgetExceeded,
    ComgramError,
    ConsistencyError,
    DimensionError,
    FormulaError,
    GrammarError,
    ParseError,
    VerificationError,
)
from .semilinear import (  # noqa: E402
    DiophantineSystem,
    LinearSet,
    SemiLinearSet,
    huynh_decompose,
    huynh_form,
    member_linear,
    member_semilinear,
    minimal_solutions,
    semilinear_inclusion,
    solve_diophantine,
)

__all__ = [
    "BudgetExceeded",
    "ComgramError",
    "CommutativeWord",
    "ConsistencyError",
    "DimensionError",
    "DiophantineSystem",
    "EnumerationBudget",
    "FormulaError",
    "Grammar",
    "GrammarError",
    "GrammarKind",
    "LinearSet",
    "ParseError",
    "Production",
    "SemiLinearSet",
    "VerificationError",
    "__version__",
    "classify",
    "decide_equivalence",
    "decide_inclusion_bruteforce",
    "decide_inclusion_semilinear",
    "dump_grammar",
    "huynh_decompose",
    "huynh_form",
    "language_bounded",
    "load_grammar",
    "member_linear",
    "member_semilinear",
    "minimal_solutions",
    "parikh_regular",
    "parse_grammar",
    "reach_bounded",
    "replay",
    "semilinear_inclusion",
    "size",
    "solve_diophantine",
    "step",
    "to_petri_net",
    "word_problem",
]
