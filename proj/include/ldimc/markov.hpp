#pragma once

#include "ldimc/automaton.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ldimc
{

// Discrete-time chain underlying a probabilistic automaton; dwell times do not
// influence path probabilities.
struct markov_chain
{
    std::vector< std::string > states;
    std::vector< std::vector< probabilistic_edge > > rows;

    [[nodiscard]] std::size_t size() const { return states.size(); }
    [[nodiscard]] double probability( state_index from, state_index to ) const;

    // Rows sum to one within 1e-9 and entries lie in [0,1].
    void validate() const;
};

[[nodiscard]] markov_chain build_chain( const probabilistic_automaton& m );

// A timestamp-free run fragment: consecutive visited states.
using path_pattern = std::vector< state_index >;

// Multi-pattern matcher over the state alphabet (trie + failure links, with the
// transition function completed so every node has a successor per symbol).
class pattern_automaton
{
public:
    static constexpr std::size_t root = 0;

    pattern_automaton( std::size_t alphabet, std::span< const path_pattern > patterns );

    [[nodiscard]] std::size_t size() const { return _accepting.size(); }
    [[nodiscard]] std::size_t step( std::size_t node, state_index symbol ) const
    {
        return _delta[ node * _alphabet + symbol ];
    }
    [[nodiscard]] bool accepting( std::size_t node ) const { return _accepting[ node ]; }
    // Symbols spelled from the root to `node`.
    [[nodiscard]] const path_pattern& spelling( std::size_t node ) const { return _spelling[ node ]; }

private:
    std::size_t _alphabet;
    std::vector< std::size_t > _delta;
    std::vector< char > _accepting;
    std::vector< path_pattern > _spelling;
};

struct product_state
{
    state_index state = 0;
    std::size_t node = 0;
};

// Reachable part of chain x pattern automaton. Matched states are absorbing.
struct product_chain
{
    std::vector< product_state > states;
    std::vector< std::vector< std::pair< std::size_t, double > > > rows;
    std::vector< char > matched;
    std::vector< std::size_t > start;    // per chain state: (s, step(root, s))
};

[[nodiscard]] product_chain build_product( const markov_chain& chain, const pattern_automaton& patterns );

// x_lhs = sum coefficient * x_unknown + constant
struct linear_equation
{
    std::size_t lhs = 0;
    std::vector< std::pair< std::size_t, double > > terms;
    double constant = 0.0;
};

struct equation_system
{
    std::vector< std::string > unknowns;
    std::vector< linear_equation > equations;
};

// One line per equation, e.g. "P(s2) = 0.8*P(s1) + 0.2*P(s2 s2)".
[[nodiscard]] std::string render_system( const equation_system& sys );

enum class solve_method
{
    linear_solve,
    value_iteration
};

[[nodiscard]] std::string to_string( solve_method m );

struct avoidance_options
{
    double pivot_threshold = 1e-12;
    double vi_tolerance = 1e-12;
    std::uint64_t vi_max_iterations = 1'000'000;
    double agreement_tolerance = 1e-10;
    // Also build the homogeneous per-vertex system and its reduction to one
    // unknown per chain state (for reports).
    bool build_systems = false;
};

struct avoidance_result
{
    std::vector< double > per_state;    // P_W(s) for every chain state
    std::size_t system_size = 0;        // unknowns in the solved transient system
    solve_method method = solve_method::linear_solve;
    std::size_t product_size = 0;
    std::vector< path_pattern > dropped_patterns;    // contain a zero-probability step
    std::vector< double > value_iteration;           // cross-check values per chain state
    std::uint64_t value_iteration_steps = 0;
    bool value_iteration_converged = false;
    std::optional< equation_system > full_system;
    std::optional< equation_system > aggregated_system;
};

// Probability that an infinite run from each state never contains any pattern
// of `patterns` as a contiguous run of states. Patterns shorter than two states
// are rejected with model_error.
[[nodiscard]] avoidance_result avoidance_probability( const markov_chain& chain,
                                                      std::span< const path_pattern > patterns,
                                                      const avoidance_options& opts = {} );

// The homogeneous system x_v = sum p(v,v') x_v' over unmatched product states.
[[nodiscard]] equation_system vertex_system( const markov_chain& chain, const pattern_automaton& patterns,
                                             const product_chain& product );

// Eliminates every unknown except the start states (s, step(root, s)).
// nullopt when the eliminated block is singular.
[[nodiscard]] std::optional< equation_system > aggregate_to_start_states( const equation_system& full,
                                                                          const product_chain& product );

struct monte_carlo_estimate
{
    double estimate = 0.0;
    double half_width = 0.0;    // 3 * sqrt(p(1-p)/n)
};

// Fraction of `samples` simulated runs of `horizon` steps avoiding every
// pattern; an upper estimate of the exact value because of the finite horizon.
[[nodiscard]] std::vector< monte_carlo_estimate > monte_carlo_avoidance( const markov_chain& chain,
                                                                         std::span< const path_pattern > patterns,
                                                                         std::size_t samples, std::size_t horizon,
                                                                         std::uint64_t seed );

} // namespace ldimc
