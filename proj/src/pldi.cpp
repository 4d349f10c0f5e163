#include "ldimc/pldi.hpp"

#include <algorithm>
#include <functional>

namespace ldimc
{

std::vector< time_stamped_behavior > collect_counterexamples( const probabilistic_automaton& m,
                                                              const linear_duration_invariant& d,
                                                              const ga_config& cfg, std::size_t max_len,
                                                              ga_report* report )
{
    auto stripped = strip_probabilities( m );
    auto harvest_cfg = cfg;
    harvest_cfg.harvest = true;
    harvest_cfg.max_genes = max_len;
    auto result = check_ldi( stripped, d, harvest_cfg );

    std::set< time_stamped_behavior > unique;
    for ( auto& b : result.counterexamples )
        if ( !satisfies_ldi( stripped, d, b, cfg.tolerance ) )
            unique.insert( b );
    std::vector< time_stamped_behavior > out( unique.begin(), unique.end() );
    if ( report )
        *report = std::move( result );
    return out;
}

pattern_set strip_and_dedupe( const real_time_automaton& m, std::span< const time_stamped_behavior > ces )
{
    pattern_set out;
    for ( const auto& b : ces )
    {
        auto seq = b.sequence();
        out.insert( visited_states( m, seq ) );
    }
    return out;
}

bool contains_contiguous( const path_pattern& outer, const path_pattern& inner )
{
    return std::search( outer.begin(), outer.end(), inner.begin(), inner.end() ) != outer.end();
}

pattern_set minimize_patterns( const pattern_set& w )
{
    pattern_set out;
    for ( const auto& p : w )
    {
        bool redundant = false;
        for ( const auto& q : w )
            if ( q != p && contains_contiguous( p, q ) )
            {
                redundant = true;
                break;
            }
        if ( !redundant )
            out.insert( p );
    }
    return out;
}

std::vector< path_pattern > common_cores( const pattern_set& w )
{
    if ( w.empty() )
        return {};
    const auto& shortest = *std::min_element( w.begin(), w.end(), []( const auto& a, const auto& b ) {
        return a.size() < b.size();
    } );
    std::set< path_pattern > found;
    for ( std::size_t len = 2; len <= shortest.size(); ++len )
        for ( std::size_t i = 0; i + len <= shortest.size(); ++i )
        {
            path_pattern core( shortest.begin() + static_cast< std::ptrdiff_t >( i ),
                               shortest.begin() + static_cast< std::ptrdiff_t >( i + len ) );
            if ( std::all_of( w.begin(), w.end(), [ & ]( const auto& p ) { return contains_contiguous( p, core ); } ) )
                found.insert( core );
        }
    std::vector< path_pattern > out( found.begin(), found.end() );
    std::stable_sort( out.begin(), out.end(), []( const auto& a, const auto& b ) { return a.size() < b.size(); } );
    return out;
}

namespace
{

// Some contiguous window of `seq` admits a timing with LF > C + tol.
bool has_violating_window( const real_time_automaton& m, const linear_duration_invariant& d,
                           std::span< const transition_index > seq, double tol )
{
    for ( std::size_t i = 0; i < seq.size(); ++i )
        for ( std::size_t j = i + 1; j <= seq.size(); ++j )
        {
            auto best = max_lf_for_sequence( m, d, seq.subspan( i, j - i ) );
            if ( best && best->value > d.bound + tol )
                return true;
        }
    return false;
}

} // namespace

core_check core_always_violates( const real_time_automaton& m, const linear_duration_invariant& d,
                                 const path_pattern& core, std::size_t max_len, std::size_t extension_cap,
                                 double tol )
{
    core_check result;
    if ( core.size() < 2 || core.size() - 1 > max_len )
        return result;

    std::vector< transition_index > seq;
    bool all_violate = true;

    // Extends with arbitrary transitions once the core has been laid down.
    std::function< void() > extend = [ & ]() {
        if ( !all_violate || result.cap_reached )
            return;
        auto here = m.transition_at( seq.back() ).target;
        auto next = m.successors( here );
        if ( seq.size() == max_len || next.empty() )
        {
            if ( ++result.extensions_checked > extension_cap )
            {
                result.cap_reached = true;
                return;
            }
            if ( !has_violating_window( m, d, seq, tol ) )
                all_violate = false;
            return;
        }
        for ( auto t : next )
        {
            seq.push_back( t );
            extend();
            seq.pop_back();
        }
    };
    // Every transition sequence spelling the core.
    std::function< void( std::size_t ) > spell = [ & ]( std::size_t k ) {
        if ( !all_violate || result.cap_reached )
            return;
        if ( k + 1 == core.size() )
        {
            extend();
            return;
        }
        for ( auto t : m.successors( core[ k ] ) )
            if ( m.transition_at( t ).target == core[ k + 1 ] )
            {
                seq.push_back( t );
                spell( k + 1 );
                seq.pop_back();
            }
    };
    spell( 0 );
    result.sound = all_violate && !result.cap_reached && result.extensions_checked > 0;
    return result;
}

std::string to_string( pldi_verdict v )
{
    return v == pldi_verdict::violated ? "violated" : "satisfied-approximately";
}

pldi_report check_pldi( const probabilistic_automaton& m, const probabilistic_ldi& p, const pldi_options& opts )
{
    opts.ga.validate();
    auto stripped = strip_probabilities( m );
    (void)state_weights( p.ldi, m.states() );

    pldi_report report;
    report.lambda = p.lambda;
    report.counterexamples = collect_counterexamples( m, p.ldi, opts.ga, opts.max_len, &report.ga );
    report.counterexample_count = report.counterexamples.size();

    auto chain = build_chain( m );
    if ( report.counterexamples.empty() )
    {
        report.per_state_probability.assign( chain.size(), 1.0 );
        report.min_probability = 1.0;
    }
    else
    {
        auto raw = strip_and_dedupe( stripped, report.counterexamples );
        report.raw_pattern_count = raw.size();
        report.patterns = minimize_patterns( raw );
        report.evaluated_patterns.assign( report.patterns.begin(), report.patterns.end() );

        if ( opts.generalize && report.patterns.size() > 1 )
            for ( const auto& core : common_cores( report.patterns ) )
            {
                if ( core_always_violates( stripped, p.ldi, core, opts.max_len, opts.extension_cap, opts.tolerance )
                         .sound )
                {
                    report.adopted_core = core;
                    report.evaluated_patterns = { core };
                    break;
                }
                report.rejected_cores.push_back( core );
            }

        avoidance_options aopts;
        aopts.build_systems = opts.build_systems;
        auto result = avoidance_probability( chain, report.evaluated_patterns, aopts );
        report.per_state_probability = result.per_state;
        report.min_probability = *std::min_element( result.per_state.begin(), result.per_state.end() );
        report.avoidance = std::move( result );
    }
    report.verdict = report.min_probability < p.lambda - opts.tolerance ? pldi_verdict::violated
                                                                        : pldi_verdict::satisfied_approximately;
    return report;
}

} // namespace ldimc
