#pragma once

#include "ldimc/automaton.hpp"
#include "ldimc/ga.hpp"
#include "ldimc/pldi.hpp"
#include "ldimc/semantics.hpp"
#include "ldimc/spec.hpp"

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace ldimc
{

inline constexpr std::string_view tool_version = "0.3.0";
inline constexpr int report_schema = 1;

// 64-bit FNV-1a, as 16 lowercase hex digits.
[[nodiscard]] std::string fnv1a_hex( std::string_view data );

// "(s2->s1, 1) (s1->s2, 30)"
[[nodiscard]] std::string render_behavior( const real_time_automaton& m, const time_stamped_behavior& b );
// "s2 s2 s2"
[[nodiscard]] std::string render_pattern( std::span< const state > states, const path_pattern& p );

// Header shared by all machine-readable reports.
struct report_context
{
    std::string command;
    std::string model_text;
    std::string spec_text;    // canonical rendering of the formula
};

[[nodiscard]] nlohmann::json behavior_json( const real_time_automaton& m, const linear_duration_invariant& d,
                                            const time_stamped_behavior& b );

// Counterexamples are re-checked against `d` before emission; a failure throws
// internal_error.
[[nodiscard]] nlohmann::json ga_json( const report_context& ctx, const real_time_automaton& m,
                                      const linear_duration_invariant& d, const ga_config& cfg,
                                      const ga_report& r );
[[nodiscard]] std::string ga_text( const real_time_automaton& m, const linear_duration_invariant& d,
                                   const ga_report& r );

[[nodiscard]] nlohmann::json oracle_json( const report_context& ctx, const real_time_automaton& m,
                                          const linear_duration_invariant& d, const oracle_result& r );
[[nodiscard]] std::string oracle_text( const real_time_automaton& m, const linear_duration_invariant& d,
                                       const oracle_result& r );

[[nodiscard]] nlohmann::json pldi_json( const report_context& ctx, const probabilistic_automaton& m,
                                        const probabilistic_ldi& p, const pldi_options& opts,
                                        const pldi_report& r );
[[nodiscard]] std::string pldi_text( const probabilistic_automaton& m, const probabilistic_ldi& p,
                                     const pldi_report& r );

} // namespace ldimc
