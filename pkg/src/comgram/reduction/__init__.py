"""Pi_2 Presburger sentences and their compilation to grammar inclusion instances."""

from .compiler import (
    ReductionArtifacts,
    build_equiv_pair,
    build_G,
    build_H,
    compile_sentence,
    compute_c,
    u_vector,
    universal_values,
    v_vector,
    w_vector,
)
from .formula import (
    And,
    Atom,
    FormulaLength,
    Leaf,
    Or,
    Pi2Sentence,
    ValidityResult,
    dnf,
    eval_matrix,
    format_formula,
    formula_length,
    parse_formula,
    subst_bool,
    validity_bounded,
)
from .regular import (
    CGadgets,
    RegularPair,
    build_C_gadgets,
    build_C_l,
    build_C_r,
    build_H_regular,
    build_regular_pair,
    gamma_alphabet,
    regular_F_grammar,
    regularize_F,
)

__all__ = [
    "And",
    "Atom",
    "CGadgets",
    "FormulaLength",
    "Leaf",
    "Or",
    "Pi2Sentence",
    "ReductionArtifacts",
    "RegularPair",
    "ValidityResult",
    "build_C_gadgets",
    "build_C_l",
    "build_C_r",
    "build_G",
    "build_H",
    "build_H_regular",
    "build_equiv_pair",
    "build_regular_pair",
    "compile_sentence",
    "compute_c",
    "dnf",
    "eval_matrix",
    "format_formula",
    "formula_length",
    "gamma_alphabet",
    "parse_formula",
    "regular_F_grammar",
    "regularize_F",
    "subst_bool",
    "u_vector",
    "universal_values",
    "v_vector",
    "validity_bounded",
    "w_vector",
]
