#pragma once

#include "ldimc/automaton.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace ldimc
{

struct duration_term
{
    double coefficient = 1.0;
    std::string proposition;

    friend bool operator==( const duration_term&, const duration_term& ) = default;
};

// lower <= ell <= upper  ->  sum coefficient * int(proposition) <= bound
struct linear_duration_invariant
{
    double lower = 0.0;
    double upper = infinity;
    std::vector< duration_term > terms;
    double bound = 0.0;

    [[nodiscard]] bool length_in_premise( double length ) const { return lower <= length && length <= upper; }

    friend bool operator==( const linear_duration_invariant&, const linear_duration_invariant& ) = default;
};

// [ldi] >= lambda: in the worst case, runs satisfy the invariant with probability at least lambda.
struct probabilistic_ldi
{
    linear_duration_invariant ldi;
    double lambda = 0.0;

    friend bool operator==( const probabilistic_ldi&, const probabilistic_ldi& ) = default;
};

// Grammar:
//   ldi   := bound "->" term (("+"|"-") term)* "<=" real
//   bound := real "<=" "ell" "<=" (real|"inf") | "ell" ">=" real | "ell" "<=" (real|"inf")
//   term  := real "*" "int(" ident ")" | "int(" ident ")"
// A leading "-" is allowed on the first term; '#' starts a comment.
[[nodiscard]] linear_duration_invariant parse_ldi( std::string_view text );

// "[ <ldi> ] >= <lambda>"
[[nodiscard]] probabilistic_ldi parse_pldi( std::string_view text );

[[nodiscard]] std::string render_ldi( const linear_duration_invariant& d );
[[nodiscard]] std::string render_pldi( const probabilistic_ldi& p );

// Summed coefficient of the propositions labeling each state: LF contributes
// weight(s) * t for every second spent in s. Throws model_error when a term
// names a proposition outside the model's label set.
[[nodiscard]] std::vector< double > state_weights( const linear_duration_invariant& d,
                                                   std::span< const state > states );

} // namespace ldimc
