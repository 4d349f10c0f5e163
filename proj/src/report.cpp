#include "ldimc/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ldimc
{

using nlohmann::json;

std::string fnv1a_hex( std::string_view data )
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for ( unsigned char c : data )
    {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[ 17 ];
    std::snprintf( buf, sizeof buf, "%016llx", static_cast< unsigned long long >( h ) );
    return buf;
}

std::string render_behavior( const real_time_automaton& m, const time_stamped_behavior& b )
{
    std::string out;
    for ( const auto& g : b.genes )
    {
        const auto& t = m.transition_at( g.transition );
        if ( !out.empty() )
            out += ' ';
        out += "(" + m.state_at( t.source ).id + "->" + m.state_at( t.target ).id + ", " + format_real( g.dwell )
               + ")";
    }
    return out;
}

std::string render_pattern( std::span< const state > states, const path_pattern& p )
{
    std::string out;
    for ( auto s : p )
        out += ( out.empty() ? "" : " " ) + states[ s ].id;
    return out;
}

namespace
{

// Infinite values have no JSON number form.
json number( double v )
{
    if ( std::isfinite( v ) )
        return v;
    return v > 0 ? "inf" : "-inf";
}

json header( const report_context& ctx, std::string_view kind )
{
    return { { "tool", "ldimc" },
             { "version", tool_version },
             { "schema", report_schema },
             { "kind", kind },
             { "command", ctx.command },
             { "model_digest", fnv1a_hex( ctx.model_text ) },
             { "spec", ctx.spec_text } };
}

json config_json( const ga_config& cfg )
{
    json j = { { "population_size", cfg.population_size },
               { "p_mutation", cfg.p_mutation },
               { "p_cut_splice", cfg.p_cut_splice },
               { "max_generations", cfg.max_generations },
               { "settle_window", cfg.settle_window },
               { "max_genes", cfg.max_genes },
               { "runs", cfg.runs },
               { "endpoint_bias", cfg.endpoint_bias },
               { "elite_fraction", cfg.elite_fraction },
               { "tolerance", cfg.tolerance } };
    j[ "time_cap" ] = cfg.time_cap ? json( *cfg.time_cap ) : json( nullptr );
    return j;
}

void reverify( const real_time_automaton& m, const linear_duration_invariant& d, const time_stamped_behavior& b,
               double tol )
{
    if ( !is_valid_behavior( m, b ) || satisfies_ldi( m, d, b, tol ) )
        throw internal_error( "counterexample failed re-verification: " + render_behavior( m, b ) );
}

std::string patterns_line( std::span< const state > states, const std::vector< path_pattern >& ps )
{
    std::string out;
    for ( const auto& p : ps )
        out += ( out.empty() ? "{" : ", " ) + render_pattern( states, p );
    return out.empty() ? "{}" : out + "}";
}

constexpr std::size_t text_counterexample_limit = 10;

void counterexample_lines( std::ostringstream& os, const real_time_automaton& m, const linear_duration_invariant& d,
                           const std::vector< time_stamped_behavior >& ces )
{
    os << "counterexamples: " << ces.size() << '\n';
    for ( std::size_t i = 0; i < ces.size() && i < text_counterexample_limit; ++i )
        os << "  " << render_behavior( m, ces[ i ] ) << "  L=" << format_real( behavior_length( ces[ i ] ) )
           << " LF=" << format_real( lf_value( m, d, ces[ i ] ) ) << '\n';
    if ( ces.size() > text_counterexample_limit )
        os << "  ... " << ces.size() - text_counterexample_limit << " more\n";
}

} // namespace

json behavior_json( const real_time_automaton& m, const linear_duration_invariant& d, const time_stamped_behavior& b )
{
    json genes = json::array();
    for ( const auto& g : b.genes )
    {
        const auto& t = m.transition_at( g.transition );
        genes.push_back( { { "transition", g.transition },
                           { "from", m.state_at( t.source ).id },
                           { "to", m.state_at( t.target ).id },
                           { "dwell", g.dwell } } );
    }
    return { { "genes", genes },
             { "text", render_behavior( m, b ) },
             { "length", behavior_length( b ) },
             { "lf", lf_value( m, d, b ) } };
}

json ga_json( const report_context& ctx, const real_time_automaton& m, const linear_duration_invariant& d,
              const ga_config& cfg, const ga_report& r )
{
    auto j = header( ctx, "check-ldi" );
    j[ "seed" ] = r.seed;
    j[ "config" ] = config_json( cfg );
    j[ "verdict" ] = to_string( r.verdict );
    j[ "best_value" ] = number( r.best_value );
    j[ "best_individual" ] = r.best_individual.genes.empty() ? json( nullptr ) : behavior_json( m, d, r.best_individual );
    j[ "generations_run" ] = r.generations_run;
    json trace = json::array();
    for ( auto v : r.fitness_trace )
        trace.push_back( number( v ) );
    j[ "fitness_trace" ] = trace;
    json runs = json::array();
    for ( auto v : r.run_best_values )
        runs.push_back( number( v ) );
    j[ "run_best_values" ] = runs;
    json ces = json::array();
    for ( const auto& b : r.counterexamples )
    {
        reverify( m, d, b, cfg.tolerance );
        ces.push_back( behavior_json( m, d, b ) );
    }
    j[ "counterexamples" ] = ces;
    return j;
}

std::string ga_text( const real_time_automaton& m, const linear_duration_invariant& d, const ga_report& r )
{
    std::ostringstream os;
    os << "verdict: " << to_string( r.verdict ) << '\n';
    os << "best value: " << format_real( r.best_value ) << '\n';
    if ( !r.best_individual.genes.empty() )
        os << "best behavior: " << render_behavior( m, r.best_individual ) << '\n';
    os << "run best values:";
    for ( auto v : r.run_best_values )
        os << ' ' << format_real( v );
    os << '\n';
    os << "generations: " << r.generations_run << '\n';
    counterexample_lines( os, m, d, r.counterexamples );
    os << "seed: " << r.seed << '\n';
    return os.str();
}

json oracle_json( const report_context& ctx, const real_time_automaton& m, const linear_duration_invariant& d,
                  const oracle_result& r )
{
    auto j = header( ctx, "oracle" );
    j[ "verdict" ] = to_string( r.verdict );
    j[ "max_len" ] = r.max_len;
    j[ "worst_value" ] = number( r.worst_value );
    j[ "sequences_examined" ] = r.sequences_examined;
    j[ "witness" ] = r.witness ? behavior_json( m, d, *r.witness ) : json( nullptr );
    if ( r.unbounded_sequence )
    {
        json seq = json::array();
        for ( auto t : *r.unbounded_sequence )
            seq.push_back( t );
        j[ "unbounded_sequence" ] = seq;
        j[ "unbounded_gene" ] = r.unbounded_gene ? json( *r.unbounded_gene ) : json( nullptr );
    }
    return j;
}

std::string oracle_text( const real_time_automaton& m, const linear_duration_invariant& d, const oracle_result& r )
{
    std::ostringstream os;
    os << "verdict: " << to_string( r.verdict ) << '\n';
    os << "max length: " << r.max_len << '\n';
    os << "worst value: " << format_real( r.worst_value ) << '\n';
    if ( r.witness )
        os << "witness: " << render_behavior( m, *r.witness ) << "  L=" << format_real( behavior_length( *r.witness ) )
           << " LF=" << format_real( lf_value( m, d, *r.witness ) ) << '\n';
    if ( r.unbounded_gene )
        os << "unbounded in gene: " << *r.unbounded_gene << '\n';
    os << "sequences examined: " << r.sequences_examined << '\n';
    return os.str();
}

json pldi_json( const report_context& ctx, const probabilistic_automaton& m, const probabilistic_ldi& p,
                const pldi_options& opts, const pldi_report& r )
{
    auto stripped = strip_probabilities( m );
    auto j = header( ctx, "check-pldi" );
    j[ "seed" ] = opts.ga.seed;
    j[ "config" ] = config_json( opts.ga );
    j[ "max_len" ] = opts.max_len;
    j[ "verdict" ] = to_string( r.verdict );
    j[ "lambda" ] = r.lambda;
    j[ "min_probability" ] = r.min_probability;
    json per_state = json::object();
    for ( state_index s = 0; s < r.per_state_probability.size(); ++s )
        per_state[ m.state_at( s ).id ] = r.per_state_probability[ s ];
    j[ "per_state_probability" ] = per_state;
    j[ "counterexample_count" ] = r.counterexample_count;
    j[ "raw_pattern_count" ] = r.raw_pattern_count;

    auto pattern_list = [ & ]( auto const& ps ) {
        json out = json::array();
        for ( const auto& pat : ps )
            out.push_back( render_pattern( m.states(), pat ) );
        return out;
    };
    j[ "patterns" ] = pattern_list( r.patterns );
    j[ "evaluated_patterns" ] = pattern_list( r.evaluated_patterns );
    j[ "adopted_core" ] = r.adopted_core ? json( render_pattern( m.states(), *r.adopted_core ) ) : json( nullptr );
    j[ "rejected_cores" ] = pattern_list( r.rejected_cores );
    if ( r.avoidance )
    {
        const auto& a = *r.avoidance;
        json sys = { { "product_size", a.product_size },
                     { "system_size", a.system_size },
                     { "method", to_string( a.method ) },
                     { "value_iteration_steps", a.value_iteration_steps },
                     { "value_iteration_converged", a.value_iteration_converged },
                     { "dropped_patterns", pattern_list( a.dropped_patterns ) } };
        sys[ "full_system" ] = a.full_system ? json( render_system( *a.full_system ) ) : json( nullptr );
        sys[ "aggregated_system" ]
                = a.aggregated_system ? json( render_system( *a.aggregated_system ) ) : json( nullptr );
        j[ "avoidance" ] = sys;
    }
    json ces = json::array();
    for ( const auto& b : r.counterexamples )
    {
        reverify( stripped, p.ldi, b, opts.tolerance );
        ces.push_back( behavior_json( stripped, p.ldi, b ) );
    }
    j[ "counterexamples" ] = ces;
    return j;
}

std::string pldi_text( const probabilistic_automaton& m, const probabilistic_ldi& p, const pldi_report& r )
{
    auto stripped = strip_probabilities( m );
    std::ostringstream os;
    os << "verdict: " << to_string( r.verdict ) << '\n';
    os << "lambda: " << format_real( r.lambda ) << '\n';
    os << "min probability: " << format_real( r.min_probability ) << '\n';
    for ( state_index s = 0; s < r.per_state_probability.size(); ++s )
        os << "  P(" << m.state_at( s ).id << ") = " << format_real( r.per_state_probability[ s ] ) << '\n';
    os << "distinct paths: " << r.raw_pattern_count << '\n';
    os << "minimized W (" << r.patterns.size() << "): "
       << patterns_line( m.states(), { r.patterns.begin(), r.patterns.end() } ) << '\n';
    if ( r.adopted_core )
        os << "adopted core: " << render_pattern( m.states(), *r.adopted_core ) << '\n';
    if ( !r.rejected_cores.empty() )
        os << "rejected cores: " << patterns_line( m.states(), r.rejected_cores ) << '\n';
    if ( r.avoidance )
    {
        const auto& a = *r.avoidance;
        os << "product states: " << a.product_size << ", solved unknowns: " << a.system_size << '\n';
        if ( !a.dropped_patterns.empty() )
            os << "dropped (impossible) patterns: " << patterns_line( m.states(), a.dropped_patterns ) << '\n';
        if ( a.aggregated_system )
            os << "system over start states:\n" << render_system( *a.aggregated_system );
        if ( a.full_system )
            os << "full system:\n" << render_system( *a.full_system );
    }
    counterexample_lines( os, stripped, p.ldi, r.counterexamples );
    return os.str();
}

} // namespace ldimc
