#pragma once

#include "ldimc/automaton.hpp"
#include "ldimc/ga.hpp"
#include "ldimc/markov.hpp"
#include "ldimc/semantics.hpp"
#include "ldimc/spec.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace ldimc
{

using pattern_set = std::set< path_pattern >;

// Harvests violating behaviors of the probability-free automaton with at most
// `max_len` transitions; deduplicated and sorted. When `report` is non-null it
// receives the aggregate GA report.
[[nodiscard]] std::vector< time_stamped_behavior > collect_counterexamples( const probabilistic_automaton& m,
                                                                            const linear_duration_invariant& d,
                                                                            const ga_config& cfg, std::size_t max_len,
                                                                            ga_report* report = nullptr );

[[nodiscard]] pattern_set strip_and_dedupe( const real_time_automaton& m,
                                            std::span< const time_stamped_behavior > ces );

// True when `inner` occurs in `outer` as a contiguous run.
[[nodiscard]] bool contains_contiguous( const path_pattern& outer, const path_pattern& inner );

// Drops every pattern containing another member.
[[nodiscard]] pattern_set minimize_patterns( const pattern_set& w );

// Contiguous runs of at least two states common to every pattern, shortest
// first, then lexicographic.
[[nodiscard]] std::vector< path_pattern > common_cores( const pattern_set& w );

struct core_check
{
    bool sound = false;
    std::size_t extensions_checked = 0;
    bool cap_reached = false;
};

// Every forward extension of `core` to `max_len` transitions (or until a state
// without successors) has a contiguous window whose worst timing violates `d`.
[[nodiscard]] core_check core_always_violates( const real_time_automaton& m, const linear_duration_invariant& d,
                                               const path_pattern& core, std::size_t max_len,
                                               std::size_t extension_cap, double tol = default_tolerance );

enum class pldi_verdict
{
    satisfied_approximately,
    violated
};

[[nodiscard]] std::string to_string( pldi_verdict v );

struct pldi_options
{
    ga_config ga;
    std::size_t max_len = 8;
    double tolerance = default_tolerance;
    bool generalize = true;
    std::size_t extension_cap = 200'000;
    bool build_systems = true;
};

struct pldi_report
{
    pldi_verdict verdict = pldi_verdict::satisfied_approximately;
    std::vector< double > per_state_probability;
    double min_probability = 1.0;
    double lambda = 0.0;
    pattern_set patterns;                            // minimized W
    std::vector< path_pattern > evaluated_patterns;  // W, or the adopted core
    std::optional< path_pattern > adopted_core;
    std::vector< path_pattern > rejected_cores;
    std::size_t counterexample_count = 0;
    std::size_t raw_pattern_count = 0;
    std::vector< time_stamped_behavior > counterexamples;
    ga_report ga;
    std::optional< avoidance_result > avoidance;
};

[[nodiscard]] pldi_report check_pldi( const probabilistic_automaton& m, const probabilistic_ldi& p,
                                      const pldi_options& opts );

} // namespace ldimc
