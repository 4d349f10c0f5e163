#pragma once

#include "ldimc/automaton.hpp"
#include "ldimc/spec.hpp"

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldimc
{

inline constexpr double default_tolerance = 1e-9;

struct gene
{
    transition_index transition = 0;
    double dwell = 0.0;

    friend auto operator<=>( const gene&, const gene& ) = default;
};

// (rho_1, t_1) ... (rho_m, t_m); nonempty, adjacent, each dwell within its interval.
struct time_stamped_behavior
{
    std::vector< gene > genes;

    [[nodiscard]] std::vector< transition_index > sequence() const;

    friend auto operator<=>( const time_stamped_behavior&, const time_stamped_behavior& ) = default;
};

// Throws model_error describing the first violated condition.
void validate_behavior( const real_time_automaton& m, const time_stamped_behavior& b );
[[nodiscard]] bool is_valid_behavior( const real_time_automaton& m, const time_stamped_behavior& b );

// Visited states: every source in order, then the final target.
[[nodiscard]] std::vector< state_index > visited_states( const real_time_automaton& m,
                                                          std::span< const transition_index > seq );

[[nodiscard]] double behavior_length( const time_stamped_behavior& b );
[[nodiscard]] double duration( const real_time_automaton& m, const time_stamped_behavior& b, std::string_view prop );
[[nodiscard]] double lf_value( const real_time_automaton& m, const linear_duration_invariant& d,
                               const time_stamped_behavior& b );

// Premise false, or LF <= C + tol.
[[nodiscard]] bool satisfies_ldi( const real_time_automaton& m, const linear_duration_invariant& d,
                                  const time_stamped_behavior& b, double tol = default_tolerance );

// Every contiguous window [i..j] satisfies the invariant.
[[nodiscard]] bool satisfies_all_windows( const real_time_automaton& m, const linear_duration_invariant& d,
                                          const time_stamped_behavior& b, double tol = default_tolerance );

// Maximum of sum w_j t_j over t_j in [a_j, b_j] with lower <= sum t_j <= upper.
struct sequence_optimum
{
    double value = 0.0;                           // +infinity when unbounded
    std::vector< double > dwells;                 // argmax, or a feasible base point when unbounded
    std::optional< std::size_t > unbounded_gene;  // improving direction with infinite headroom
};

// Box-and-one-coupling-constraint LP over per-gene weights. Returns nullopt when
// no assignment meets the length bounds.
[[nodiscard]] std::optional< sequence_optimum > maximize_weighted_dwell( std::span< const double > weights,
                                                                         std::span< const interval > boxes,
                                                                         double lower, double upper );

// The same LP for a transition sequence of `m`; throws model_error when `seq`
// is not a behavior.
[[nodiscard]] std::optional< sequence_optimum > max_lf_for_sequence( const real_time_automaton& m,
                                                                     const linear_duration_invariant& d,
                                                                     std::span< const transition_index > seq );

enum class oracle_verdict
{
    satisfied,
    violated,
    unbounded,
    no_feasible_behavior
};

[[nodiscard]] std::string to_string( oracle_verdict v );

struct oracle_options
{
    std::size_t max_len = 8;
    double tolerance = default_tolerance;
    std::uint64_t sequence_cap = 50'000'000;
};

struct oracle_result
{
    oracle_verdict verdict = oracle_verdict::no_feasible_behavior;
    double worst_value = -infinity;
    // Achieves worst_value; for an unbounded verdict, a concrete behavior with LF > C.
    std::optional< time_stamped_behavior > witness;
    std::optional< std::vector< transition_index > > unbounded_sequence;
    std::optional< std::size_t > unbounded_gene;
    std::uint64_t sequences_examined = 0;
    std::size_t max_len = 0;
};

// Exhaustive over every behavior with at most max_len transitions. Ties on the
// optimum keep the lexicographically least (sequence, dwells). Throws
// resource_error once sequence_cap sequences have been visited.
[[nodiscard]] oracle_result bounded_exact_check( const real_time_automaton& m, const linear_duration_invariant& d,
                                                 const oracle_options& opts );

} // namespace ldimc
