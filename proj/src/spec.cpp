#include "ldimc/spec.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace ldimc
{

namespace
{

using detail::token_stream;

void parse_bound( token_stream& ts, linear_duration_invariant& d )
{
    const auto& start = ts.peek();
    if ( ts.accept_word( "ell" ) )
    {
        if ( ts.accept_punct( ">=" ) )
        {
            d.lower = ts.expect_real( "length lower bound", true );
            d.upper = infinity;
        }
        else if ( ts.accept_punct( "<=" ) )
        {
            d.lower = 0.0;
            d.upper = ts.expect_real( "length upper bound", true, true );
        }
        else
            ts.fail( "expected '>=' or '<=' after 'ell'" );
    }
    else
    {
        d.lower = ts.expect_real( "length lower bound or 'ell'", true );
        ts.expect_punct( "<=" );
        ts.expect_word( "ell" );
        ts.expect_punct( "<=" );
        d.upper = ts.expect_real( "length upper bound", true, true );
    }
    if ( d.lower < 0.0 )
        ts.fail_at( start, "length lower bound must be nonnegative" );
    if ( d.lower == infinity )
        ts.fail_at( start, "length lower bound must be finite" );
    if ( d.lower > d.upper )
        ts.fail_at( start, "length lower bound exceeds upper bound" );
}

duration_term parse_term( token_stream& ts, double sign )
{
    duration_term term;
    term.coefficient = sign;
    if ( ts.peek().kind == detail::token_kind::number )
    {
        term.coefficient = sign * ts.expect_real( "coefficient" );
        ts.expect_punct( "*" );
    }
    ts.expect_word( "int" );
    ts.expect_punct( "(" );
    term.proposition = ts.expect_identifier( "proposition" );
    ts.expect_punct( ")" );
    return term;
}

linear_duration_invariant parse_ldi_tokens( token_stream& ts )
{
    linear_duration_invariant d;
    parse_bound( ts, d );
    ts.expect_punct( "->" );

    std::set< std::string > seen;
    auto add = [ & ]( const detail::token& at, duration_term term ) {
        if ( !seen.insert( term.proposition ).second )
            ts.fail_at( at, "proposition '" + term.proposition + "' appears twice" );
        d.terms.push_back( std::move( term ) );
    };

    double sign = 1.0;
    if ( ts.accept_punct( "-" ) )
        sign = -1.0;
    else
        ts.accept_punct( "+" );
    auto at = ts.peek();
    add( at, parse_term( ts, sign ) );
    for ( ;; )
    {
        if ( ts.accept_punct( "+" ) )
            sign = 1.0;
        else if ( ts.accept_punct( "-" ) )
            sign = -1.0;
        else
            break;
        at = ts.peek();
        add( at, parse_term( ts, sign ) );
    }
    ts.expect_punct( "<=" );
    d.bound = ts.expect_real( "bound", true );
    if ( !std::isfinite( d.bound ) )
        ts.fail( "bound must be finite" );
    return d;
}

std::string render_coefficient( double c )
{
    return format_real( c ) + "*int(";
}

} // namespace

linear_duration_invariant parse_ldi( std::string_view text )
{
    token_stream ts( detail::tokenize_text( text ), 1 );
    auto d = parse_ldi_tokens( ts );
    ts.expect_end();
    return d;
}

probabilistic_ldi parse_pldi( std::string_view text )
{
    token_stream ts( detail::tokenize_text( text ), 1 );
    probabilistic_ldi p;
    ts.expect_punct( "[" );
    p.ldi = parse_ldi_tokens( ts );
    ts.expect_punct( "]" );
    ts.expect_punct( ">=" );
    const auto at = ts.peek();
    p.lambda = ts.expect_real( "probability threshold", true );
    if ( !( p.lambda >= 0.0 && p.lambda <= 1.0 ) )
        ts.fail_at( at, "probability threshold must lie in [0,1]" );
    ts.expect_end();
    return p;
}

std::string render_ldi( const linear_duration_invariant& d )
{
    std::string out = format_real( d.lower ) + " <= ell <= " + format_real( d.upper ) + " ->";
    for ( std::size_t i = 0; i < d.terms.size(); ++i )
    {
        const auto& t = d.terms[ i ];
        bool negative = std::signbit( t.coefficient );
        if ( i == 0 )
            out += " " + render_coefficient( t.coefficient );
        else
            out += std::string( negative ? " - " : " + " ) + render_coefficient( std::abs( t.coefficient ) );
        out += t.proposition + ")";
    }
    out += " <= " + format_real( d.bound );
    return out;
}

std::string render_pldi( const probabilistic_ldi& p )
{
    return "[ " + render_ldi( p.ldi ) + " ] >= " + format_real( p.lambda );
}

std::vector< double > state_weights( const linear_duration_invariant& d, std::span< const state > states )
{
    std::vector< double > w( states.size(), 0.0 );
    for ( const auto& term : d.terms )
    {
        bool bound = false;
        for ( std::size_t s = 0; s < states.size(); ++s )
            if ( states[ s ].has_label( term.proposition ) )
            {
                w[ s ] += term.coefficient;
                bound = true;
            }
        if ( !bound )
            throw model_error( "proposition '" + term.proposition + "' does not label any state of the model" );
    }
    return w;
}

} // namespace ldimc
