#pragma once

#include "ldimc/automaton.hpp"
#include "ldimc/semantics.hpp"
#include "ldimc/spec.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ldimc
{

using rng_type = std::mt19937_64;

struct ga_config
{
    std::size_t population_size = 90;
    double p_mutation = 0.2;
    double p_cut_splice = 0.5;
    std::size_t max_generations = 50;
    std::size_t settle_window = 10;
    std::uint64_t seed = 1;
    std::size_t max_genes = 8;
    // Width added to the lower end of unbounded dwell intervals; nullopt
    // selects the default derived from the invariant (see effective_time_cap).
    std::optional< double > time_cap;
    std::size_t runs = 10;
    // Probability that a mutated dwell snaps to an interval endpoint instead of
    // being drawn uniformly. 0 gives purely uniform mutation.
    double endpoint_bias = 0.5;
    double elite_fraction = 0.1;
    double tolerance = default_tolerance;
    // Keep evolving after a counterexample and collect every violating
    // individual of every generation.
    bool harvest = false;
    std::size_t sample_attempts = 1000;

    // Throws model_error on out-of-range parameters.
    void validate() const;
};

// max(upper finite ? upper : lower, lo) + 2 * max(lower, 1) unless overridden.
[[nodiscard]] double effective_time_cap( const ga_config& cfg, const linear_duration_invariant& d, double lo = 0.0 );

enum class ga_verdict
{
    violated,
    no_violation_found
};

[[nodiscard]] std::string to_string( ga_verdict v );

struct ga_report
{
    ga_verdict verdict = ga_verdict::no_violation_found;
    double best_value = -infinity;
    time_stamped_behavior best_individual;
    std::vector< time_stamped_behavior > counterexamples;
    std::size_t generations_run = 0;
    std::vector< double > fitness_trace;    // best LF per generation, nondecreasing
    std::vector< double > run_best_values;  // one entry per run
    std::uint64_t seed = 0;
};

// Draws behaviors with lower <= L <= upper, cycling start states round-robin
// over the states that have outgoing transitions.
class behavior_sampler
{
    const real_time_automaton& _m;
    const linear_duration_invariant& _d;
    const ga_config& _cfg;
    std::vector< state_index > _starts;
    std::size_t _cursor = 0;

public:
    behavior_sampler( const real_time_automaton& m, const linear_duration_invariant& d, const ga_config& cfg );

    // Throws infeasible_error after cfg.sample_attempts failed walks.
    time_stamped_behavior next( rng_type& rng );

    // One sample rooted at `start`.
    time_stamped_behavior sample_from( state_index start, rng_type& rng );
};

// Single draw with a fresh sampler (starts at the first eligible state).
[[nodiscard]] time_stamped_behavior sample_behavior( const real_time_automaton& m, const linear_duration_invariant& d,
                                                     const ga_config& cfg, rng_type& rng );

// Fresh uniform dwells for a geometric(1/2) number of distinct genes; the
// transition sequence is unchanged.
[[nodiscard]] time_stamped_behavior mutate( const time_stamped_behavior& b, const real_time_automaton& m,
                                            const linear_duration_invariant& d, const ga_config& cfg, rng_type& rng );

// Suffix swap after a uniformly chosen pair of positions carrying the same
// transition. nullopt when the parents share no transition.
[[nodiscard]] std::optional< std::pair< time_stamped_behavior, time_stamped_behavior > >
cut_and_splice( const time_stamped_behavior& x, const time_stamped_behavior& y, rng_type& rng );

[[nodiscard]] ga_report run_ga( const real_time_automaton& m, const linear_duration_invariant& d,
                                const ga_config& cfg );

// cfg.runs independent runs seeded seed, seed+1, ...; union of counterexamples,
// maximum best value.
[[nodiscard]] ga_report check_ldi( const real_time_automaton& m, const linear_duration_invariant& d,
                                   const ga_config& cfg );

} // namespace ldimc
