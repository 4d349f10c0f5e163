// ldimc: approximate checker for linear duration invariants over real-time
// automata, and their probabilistic variant.

#include "ldimc/automaton.hpp"
#include "ldimc/ga.hpp"
#include "ldimc/pldi.hpp"
#include "ldimc/report.hpp"
#include "ldimc/semantics.hpp"
#include "ldimc/spec.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace ldimc;

namespace
{

enum exit_code
{
    exit_ok = 0,
    exit_violated = 1,
    exit_indeterminate = 2,
    exit_usage = 64,
    exit_data = 65,
    exit_no_input = 66,
    exit_internal = 70
};

struct missing_file : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

std::string read_file( const std::string& path )
{
    std::ifstream in( path, std::ios::binary );
    if ( !in )
        throw missing_file( "cannot open '" + path + "'" );
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Formula files may hold either form; a PLDI contributes its inner invariant.
bool looks_probabilistic( std::string_view text )
{
    std::istringstream in{ std::string( text ) };
    std::string line;
    while ( std::getline( in, line ) )
    {
        auto pos = line.find_first_not_of( " \t\r" );
        if ( pos == std::string::npos || line[ pos ] == '#' )
            continue;
        return line[ pos ] == '[';
    }
    return false;
}

struct options
{
    std::string model_path;
    std::string spec_path;
    ga_config ga;
    std::size_t max_len = 8;
    std::optional< double > time_cap;
    std::optional< double > override_c;
    std::string json_path;
    std::size_t count = 5;
    bool no_generalize = false;
};

void add_ga_flags( CLI::App* cmd, options& o )
{
    cmd->add_option( "--pop", o.ga.population_size, "population size" )->check( CLI::PositiveNumber );
    cmd->add_option( "--pm", o.ga.p_mutation, "mutation probability" )->check( CLI::Range( 0.0, 1.0 ) );
    cmd->add_option( "--pd", o.ga.p_cut_splice, "cut-and-splice probability" )->check( CLI::Range( 0.0, 1.0 ) );
    cmd->add_option( "--gens", o.ga.max_generations, "generation limit" )->check( CLI::PositiveNumber );
    cmd->add_option( "--settle", o.ga.settle_window, "stop after this many generations without improvement" )
            ->check( CLI::PositiveNumber );
    cmd->add_option( "--elite", o.ga.elite_fraction, "fraction of survivors carried over" )
            ->check( CLI::Range( 0.0, 1.0 ) );
    cmd->add_option( "--seed", o.ga.seed, "random seed" );
    cmd->add_option( "--runs", o.ga.runs, "independent runs" )->check( CLI::PositiveNumber );
    cmd->add_option( "--endpoint-bias", o.ga.endpoint_bias, "chance a mutated dwell snaps to an endpoint" )
            ->check( CLI::Range( 0.0, 1.0 ) );
    cmd->add_option( "--time-cap", o.time_cap, "width used for unbounded dwell intervals" )
            ->check( CLI::PositiveNumber );
}

void add_common( CLI::App* cmd, options& o, bool spec_required )
{
    cmd->add_option( "model", o.model_path, "automaton file" )->required();
    auto* spec = cmd->add_option( "spec", o.spec_path, "formula file" );
    if ( spec_required )
        spec->required();
    cmd->add_option( "--json", o.json_path, "write a JSON report to this path ('-' for stdout)" );
    cmd->add_option( "--tol", o.ga.tolerance, "comparison tolerance" )->check( CLI::NonNegativeNumber );
}

std::string command_echo( int argc, char** argv )
{
    std::string out;
    for ( int i = 1; i < argc; ++i )
        out += ( i > 1 ? " " : "" ) + std::string( argv[ i ] );
    return out;
}

void emit( const options& o, const std::string& text, const nlohmann::json& j, double ms )
{
    auto dumped = j.dump( 2 ) + "\n";
    if ( o.json_path == "-" )
    {
        std::cout << dumped;
        return;
    }
    std::cout << text;
    std::printf( "time: %.1f ms\n", ms );
    if ( !o.json_path.empty() )
    {
        std::ofstream out( o.json_path, std::ios::binary );
        if ( !out )
            throw missing_file( "cannot write '" + o.json_path + "'" );
        out << dumped;
    }
}

double elapsed_ms( std::chrono::steady_clock::time_point since )
{
    return std::chrono::duration< double, std::milli >( std::chrono::steady_clock::now() - since ).count();
}

real_time_automaton as_real_time( const model& m )
{
    if ( const auto* rt = std::get_if< real_time_automaton >( &m ) )
        return *rt;
    return strip_probabilities( std::get< probabilistic_automaton >( m ) );
}

linear_duration_invariant load_ldi( const options& o, std::string& text )
{
    text = read_file( o.spec_path );
    auto d = looks_probabilistic( text ) ? parse_pldi( text ).ldi : parse_ldi( text );
    if ( o.override_c )
        d.bound = *o.override_c;
    return d;
}

int run_check_ldi( const options& o, const std::string& echo )
{
    auto model_text = read_file( o.model_path );
    auto m = as_real_time( parse_model( model_text ) );
    std::string spec_text;
    auto d = load_ldi( o, spec_text );
    auto cfg = o.ga;
    cfg.time_cap = o.time_cap;
    cfg.max_genes = o.max_len;

    auto t0 = std::chrono::steady_clock::now();
    auto r = check_ldi( m, d, cfg );
    double ms = elapsed_ms( t0 );
    report_context ctx{ echo, model_text, render_ldi( d ) };
    emit( o, ga_text( m, d, r ), ga_json( ctx, m, d, cfg, r ), ms );
    return r.verdict == ga_verdict::violated ? exit_violated : exit_ok;
}

int run_oracle( const options& o, const std::string& echo )
{
    auto model_text = read_file( o.model_path );
    auto m = as_real_time( parse_model( model_text ) );
    std::string spec_text;
    auto d = load_ldi( o, spec_text );
    oracle_options opts;
    opts.max_len = o.max_len;
    opts.tolerance = o.ga.tolerance;

    auto t0 = std::chrono::steady_clock::now();
    auto r = bounded_exact_check( m, d, opts );
    double ms = elapsed_ms( t0 );
    report_context ctx{ echo, model_text, render_ldi( d ) };
    emit( o, oracle_text( m, d, r ), oracle_json( ctx, m, d, r ), ms );
    switch ( r.verdict )
    {
    case oracle_verdict::satisfied:
        return exit_ok;
    case oracle_verdict::violated:
    case oracle_verdict::unbounded:
        return exit_violated;
    case oracle_verdict::no_feasible_behavior:
        break;
    }
    return exit_indeterminate;
}

int run_check_pldi( const options& o, const std::string& echo )
{
    auto model_text = read_file( o.model_path );
    auto parsed = parse_model( model_text );
    const auto* m = std::get_if< probabilistic_automaton >( &parsed );
    if ( !m )
        throw model_error( "check-pldi needs a probabilistic automaton (transitions with 'prob')" );
    auto spec_text = read_file( o.spec_path );
    auto p = parse_pldi( spec_text );
    if ( o.override_c )
        p.ldi.bound = *o.override_c;

    pldi_options opts;
    opts.ga = o.ga;
    opts.ga.time_cap = o.time_cap;
    opts.max_len = o.max_len;
    opts.tolerance = o.ga.tolerance;
    opts.generalize = !o.no_generalize;

    auto t0 = std::chrono::steady_clock::now();
    auto r = check_pldi( *m, p, opts );
    double ms = elapsed_ms( t0 );
    report_context ctx{ echo, model_text, render_pldi( p ) };
    emit( o, pldi_text( *m, p, r ), pldi_json( ctx, *m, p, opts, r ), ms );
    return r.verdict == pldi_verdict::violated ? exit_violated : exit_ok;
}

int run_sample( const options& o, const std::string& echo )
{
    auto model_text = read_file( o.model_path );
    auto m = as_real_time( parse_model( model_text ) );
    linear_duration_invariant d;
    std::string spec_text;
    if ( !o.spec_path.empty() )
        d = load_ldi( o, spec_text );
    auto cfg = o.ga;
    cfg.time_cap = o.time_cap;
    cfg.max_genes = o.max_len;
    cfg.validate();

    rng_type rng( cfg.seed );
    behavior_sampler sampler( m, d, cfg );
    nlohmann::json j = { { "tool", "ldimc" },
                         { "version", tool_version },
                         { "schema", report_schema },
                         { "kind", "sample" },
                         { "command", echo },
                         { "model_digest", fnv1a_hex( model_text ) },
                         { "spec", render_ldi( d ) },
                         { "seed", cfg.seed } };
    nlohmann::json list = nlohmann::json::array();
    std::string text;
    auto t0 = std::chrono::steady_clock::now();
    for ( std::size_t i = 0; i < o.count; ++i )
    {
        auto b = sampler.next( rng );
        list.push_back( behavior_json( m, d, b ) );
        text += render_behavior( m, b ) + "  L=" + format_real( behavior_length( b ) ) + "\n";
    }
    j[ "behaviors" ] = list;
    emit( o, text, j, elapsed_ms( t0 ) );
    return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
    CLI::App app{ "Approximate model checking of linear duration invariants" };
    app.set_version_flag( "--version", std::string( tool_version ) );
    app.require_subcommand( 1 );
    options o;

    auto* ldi = app.add_subcommand( "check-ldi", "search for violating behaviors with a genetic algorithm" );
    add_common( ldi, o, true );
    add_ga_flags( ldi, o );
    ldi->add_option( "--max-len", o.max_len, "maximum transitions per behavior" )->check( CLI::PositiveNumber );
    ldi->add_option( "--override-C", o.override_c, "replace the bound of the invariant" );

    auto* oracle = app.add_subcommand( "oracle", "exhaustive worst case over bounded-length behaviors" );
    add_common( oracle, o, true );
    oracle->add_option( "--max-len", o.max_len, "maximum transitions per behavior" )->check( CLI::PositiveNumber );
    oracle->add_option( "--override-C", o.override_c, "replace the bound of the invariant" );

    auto* pldi = app.add_subcommand( "check-pldi", "check a probabilistic invariant" );
    add_common( pldi, o, true );
    add_ga_flags( pldi, o );
    pldi->add_option( "--max-len", o.max_len, "maximum transitions per harvested behavior" )
            ->check( CLI::PositiveNumber );
    pldi->add_option( "--override-C", o.override_c, "replace the bound of the invariant" );
    pldi->add_flag( "--no-generalize", o.no_generalize, "skip the common-core generalization pass" );

    auto* sample = app.add_subcommand( "sample", "draw random behaviors" );
    add_common( sample, o, false );
    add_ga_flags( sample, o );
    sample->add_option( "--count", o.count, "number of behaviors" )->check( CLI::PositiveNumber );
    sample->add_option( "--max-len", o.max_len, "maximum transitions per behavior" )->check( CLI::PositiveNumber );

    try
    {
        app.parse( argc, argv );
    }
    catch ( const CLI::ParseError& e )
    {
        int rc = app.exit( e );
        return rc == 0 ? exit_ok : exit_usage;
    }

    auto echo = command_echo( argc, argv );
    try
    {
        if ( *ldi )
            return run_check_ldi( o, echo );
        if ( *oracle )
            return run_oracle( o, echo );
        if ( *pldi )
            return run_check_pldi( o, echo );
        return run_sample( o, echo );
    }
    catch ( const missing_file& e )
    {
        std::cerr << "ldimc: " << e.what() << '\n';
        return exit_no_input;
    }
    catch ( const parse_error& e )
    {
        std::cerr << "ldimc: parse error: " << e.what() << '\n';
        return exit_data;
    }
    catch ( const model_error& e )
    {
        std::cerr << "ldimc: " << e.what() << '\n';
        return exit_data;
    }
    catch ( const infeasible_error& e )
    {
        std::cerr << "ldimc: " << e.what() << '\n';
        return exit_indeterminate;
    }
    catch ( const resource_error& e )
    {
        std::cerr << "ldimc: " << e.what() << '\n';
        return exit_indeterminate;
    }
    catch ( const internal_error& e )
    {
        std::cerr << "ldimc: internal error: " << e.what() << '\n';
        return exit_internal;
    }
}
