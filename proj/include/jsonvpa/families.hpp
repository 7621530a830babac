#pragma once

#include <cstddef>

#include "jsonvpa/grammar.hpp"

namespace jsonvpa {

/// The adversarial conjunction family: S ::= S_1 and ... and S_ell,
/// S_i ::= R_i or ... or R_ell, R_i ::= { k_i: s, ..., k_ell: s }.
/// Equivalent to R_ell alone, but the tree-walking validator explores every
/// S_i and R_j.
Grammar worstcase_grammar(std::size_t ell);

/// The permutation family S_n: objects holding all of k_1..k_n with string
/// values, in any order. Ordered automata stay linear in n while the
/// unordered language distinguishes every key subset.
Grammar permutation_family(std::size_t n);

/// Constructive witness of the exponential lower bound for the unordered
/// language of S_n: for any two distinct key subsets, the sorted completion
/// of one's complement separates their object prefixes. Verified with the
/// tree-walking validator; true when all pairs separate.
bool verify_subset_distinguishability(const Grammar& family, std::size_t n);

} // namespace jsonvpa
