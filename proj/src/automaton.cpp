#include "ldimc/automaton.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace ldimc
{

bool state::has_label( std::string_view prop ) const
{
    return std::binary_search( labels.begin(), labels.end(), prop );
}

namespace
{

template < typename States >
std::optional< state_index > find_state_in( const States& states, std::string_view id )
{
    for ( state_index i = 0; i < states.size(); ++i )
        if ( states[ i ].id == id )
            return i;
    return std::nullopt;
}

template < typename States >
std::vector< std::string > union_of_labels( const States& states )
{
    std::set< std::string > all;
    for ( const auto& s : states )
        all.insert( s.labels.begin(), s.labels.end() );
    return { all.begin(), all.end() };
}

void check_states( const std::vector< state >& states )
{
    if ( states.empty() )
        throw model_error( "a model needs at least one state" );
    std::set< std::string_view > ids;
    for ( const auto& s : states )
    {
        if ( s.id.empty() )
            throw model_error( "empty state id" );
        if ( !ids.insert( s.id ).second )
            throw model_error( "duplicate state id '" + s.id + "'" );
        if ( !std::is_sorted( s.labels.begin(), s.labels.end() )
             || std::adjacent_find( s.labels.begin(), s.labels.end() ) != s.labels.end() )
            throw model_error( "labels of state '" + s.id + "' must be sorted and unique" );
    }
}

void check_interval( const interval& i )
{
    if ( std::isnan( i.lo ) || std::isnan( i.hi ) || i.lo < 0.0 || i.lo == infinity || i.lo > i.hi )
        throw model_error( "invalid interval [" + format_real( i.lo ) + ", " + format_real( i.hi ) + "]" );
}

} // namespace

std::string format_real( double v )
{
    if ( v == infinity )
        return "inf";
    if ( v == -infinity )
        return "-inf";
    char buf[ 64 ];
    auto [ ptr, ec ] = std::to_chars( buf, buf + sizeof buf, v );
    return std::string( buf, ptr );
}

// --- real_time_automaton ---------------------------------------------------

real_time_automaton::real_time_automaton( std::vector< state > states, std::vector< transition > transitions )
        : _states{ std::move( states ) }, _transitions{ std::move( transitions ) }
{
    check_states( _states );
    std::set< std::tuple< state_index, state_index, double, double > > seen;
    _outgoing.resize( _states.size() );
    for ( transition_index t = 0; t < _transitions.size(); ++t )
    {
        const auto& tr = _transitions[ t ];
        if ( tr.source >= _states.size() || tr.target >= _states.size() )
            throw model_error( "transition references an undeclared state" );
        check_interval( tr.dwell );
        if ( !seen.emplace( tr.source, tr.target, tr.dwell.lo, tr.dwell.hi ).second )
            throw model_error( "duplicate transition " + _states[ tr.source ].id + " -> " + _states[ tr.target ].id );
        _outgoing[ tr.source ].push_back( t );
    }
}

std::optional< state_index > real_time_automaton::find_state( std::string_view id ) const
{
    return find_state_in( _states, id );
}

state_index real_time_automaton::state_of( std::string_view id ) const
{
    if ( auto s = find_state( id ) )
        return *s;
    throw model_error( "unknown state '" + std::string( id ) + "'" );
}

std::span< const transition_index > real_time_automaton::successors( state_index s ) const
{
    if ( s >= _states.size() )
        throw model_error( "unknown state index " + std::to_string( s ) );
    return _outgoing[ s ];
}

std::span< const transition_index > real_time_automaton::successors( std::string_view id ) const
{
    return successors( state_of( id ) );
}

std::vector< std::string > real_time_automaton::propositions() const
{
    return union_of_labels( _states );
}

// --- probabilistic_automaton -----------------------------------------------

probabilistic_automaton::probabilistic_automaton( std::vector< state > states, std::vector< interval > dwell,
                                                  std::vector< std::vector< probabilistic_edge > > distribution )
        : _states{ std::move( states ) }, _dwell{ std::move( dwell ) }, _distribution{ std::move( distribution ) }
{
    check_states( _states );
    if ( _dwell.size() != _states.size() || _distribution.size() != _states.size() )
        throw model_error( "every state needs exactly one dwell interval and one distribution" );
    for ( state_index s = 0; s < _states.size(); ++s )
    {
        check_interval( _dwell[ s ] );
        std::set< state_index > targets;
        double sum = 0.0;
        for ( const auto& e : _distribution[ s ] )
        {
            if ( e.target >= _states.size() )
                throw model_error( "distribution of '" + _states[ s ].id + "' references an undeclared state" );
            if ( !( e.probability > 0.0 && e.probability <= 1.0 ) )
                throw model_error( "probability outside (0,1] in distribution of '" + _states[ s ].id + "'" );
            if ( !targets.insert( e.target ).second )
                throw model_error( "duplicate transition " + _states[ s ].id + " -> " + _states[ e.target ].id );
            sum += e.probability;
        }
        if ( std::abs( sum - 1.0 ) > sum_tolerance )
            throw model_error( "probabilities leaving '" + _states[ s ].id + "' sum to " + format_real( sum )
                               + ", expected 1" );
    }
}

double probabilistic_automaton::probability( state_index s, state_index target ) const
{
    for ( const auto& e : distribution( s ) )
        if ( e.target == target )
            return e.probability;
    return 0.0;
}

std::optional< state_index > probabilistic_automaton::find_state( std::string_view id ) const
{
    return find_state_in( _states, id );
}

state_index probabilistic_automaton::state_of( std::string_view id ) const
{
    if ( auto s = find_state( id ) )
        return *s;
    throw model_error( "unknown state '" + std::string( id ) + "'" );
}

std::vector< std::string > probabilistic_automaton::propositions() const
{
    return union_of_labels( _states );
}

// --- parsing ---------------------------------------------------------------

namespace
{

struct state_ref
{
    std::string id;
    std::size_t line;
    std::size_t column;
};

struct trans_line
{
    state_ref source;
    state_ref target;
    std::optional< interval > dwell;
    std::optional< double > probability;
    std::size_t line;
};

struct dwell_line
{
    state_ref id;
    interval dwell;
};

interval parse_interval( detail::token_stream& ts )
{
    const auto& open = ts.peek();
    ts.expect_punct( "[" );
    interval i;
    i.lo = ts.expect_real( "interval lower bound" );
    ts.expect_punct( "," );
    i.hi = ts.expect_real( "interval upper bound", false, true );
    ts.expect_punct( "]" );
    if ( i.lo > i.hi )
        ts.fail_at( open, "interval lower bound exceeds upper bound" );
    if ( i.lo == infinity )
        ts.fail_at( open, "interval lower bound must be finite" );
    return i;
}

state_ref parse_state_ref( detail::token_stream& ts, std::size_t line, std::string_view what )
{
    auto column = ts.peek().column;
    return { ts.expect_identifier( what ), line, column };
}

} // namespace

model parse_model( std::string_view text )
{
    std::vector< state > states;
    std::map< std::string, std::size_t, std::less<> > state_lines;
    std::vector< trans_line > transitions;
    std::vector< dwell_line > dwells;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while ( pos <= text.size() )
    {
        auto nl = text.find( '\n', pos );
        auto raw = text.substr( pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos );
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        detail::token_stream ts( detail::tokenize( detail::strip_comment( raw ), line_no ), line_no );
        if ( ts.at_end() )
            continue;

        if ( ts.accept_word( "state" ) )
        {
            auto ref = parse_state_ref( ts, line_no, "state id" );
            if ( state_lines.contains( ref.id ) )
                throw parse_error( "duplicate state id '" + ref.id + "'", line_no, ref.column );
            state s{ ref.id, {} };
            if ( ts.accept_word( "labels" ) )
            {
                do
                    s.labels.push_back( ts.expect_identifier( "proposition" ) );
                while ( ts.accept_punct( "," ) );
            }
            ts.expect_end();
            std::sort( s.labels.begin(), s.labels.end() );
            s.labels.erase( std::unique( s.labels.begin(), s.labels.end() ), s.labels.end() );
            state_lines.emplace( s.id, line_no );
            states.push_back( std::move( s ) );
        }
        else if ( ts.accept_word( "trans" ) )
        {
            trans_line tl{ parse_state_ref( ts, line_no, "source state" ), {}, {}, {}, line_no };
            ts.expect_punct( "->" );
            tl.target = parse_state_ref( ts, line_no, "target state" );
            if ( ts.peek().kind == detail::token_kind::punct && ts.peek().text == "[" )
                tl.dwell = parse_interval( ts );
            if ( ts.accept_word( "prob" ) )
            {
                const auto& at = ts.peek();
                double p = ts.expect_real( "probability" );
                if ( !( p > 0.0 && p <= 1.0 ) )
                    ts.fail_at( at, "probability must lie in (0,1]" );
                tl.probability = p;
            }
            ts.expect_end();
            if ( tl.dwell && tl.probability )
                throw parse_error( "probabilistic transitions take their interval from 'dwell', not the edge", line_no,
                                   tl.source.column );
            if ( !tl.dwell && !tl.probability )
                throw parse_error( "transition needs an interval or a probability", line_no, tl.source.column );
            transitions.push_back( std::move( tl ) );
        }
        else if ( ts.accept_word( "dwell" ) )
        {
            auto ref = parse_state_ref( ts, line_no, "state id" );
            auto i = parse_interval( ts );
            ts.expect_end();
            dwells.push_back( { std::move( ref ), i } );
        }
        else
        {
            ts.fail( "expected 'state', 'trans' or 'dwell'" );
        }
    }

    if ( states.empty() )
        throw parse_error( "model declares no states", line_no, 1 );

    std::map< std::string, state_index, std::less<> > index;
    for ( state_index i = 0; i < states.size(); ++i )
        index.emplace( states[ i ].id, i );
    auto resolve = [ & ]( const state_ref& r ) {
        auto it = index.find( r.id );
        if ( it == index.end() )
            throw parse_error( "undeclared state '" + r.id + "'", r.line, r.column );
        return it->second;
    };

    bool any_prob = !dwells.empty();
    bool any_plain = false;
    for ( const auto& tl : transitions )
        ( tl.probability ? any_prob : any_plain ) = true;
    if ( any_prob && any_plain )
    {
        auto first_plain = std::find_if( transitions.begin(), transitions.end(),
                                         []( const trans_line& t ) { return !t.probability; } );
        throw parse_error( "model mixes probabilistic and plain transitions", first_plain->line, 1 );
    }

    if ( !any_prob )
    {
        std::vector< transition > out;
        std::set< std::tuple< state_index, state_index, double, double > > seen;
        for ( const auto& tl : transitions )
        {
            transition t{ resolve( tl.source ), resolve( tl.target ), *tl.dwell };
            if ( !seen.emplace( t.source, t.target, t.dwell.lo, t.dwell.hi ).second )
                throw parse_error( "duplicate transition", tl.line, tl.source.column );
            out.push_back( t );
        }
        return real_time_automaton( std::move( states ), std::move( out ) );
    }

    std::vector< std::optional< interval > > dwell( states.size() );
    for ( const auto& d : dwells )
    {
        auto s = resolve( d.id );
        if ( dwell[ s ] )
            throw parse_error( "duplicate dwell for state '" + d.id.id + "'", d.id.line, d.id.column );
        dwell[ s ] = d.dwell;
    }
    std::vector< std::vector< probabilistic_edge > > dist( states.size() );
    for ( const auto& tl : transitions )
    {
        auto s = resolve( tl.source );
        auto t = resolve( tl.target );
        for ( const auto& e : dist[ s ] )
            if ( e.target == t )
                throw parse_error( "duplicate transition", tl.line, tl.source.column );
        dist[ s ].push_back( { t, *tl.probability } );
    }
    std::vector< interval > dwell_values;
    for ( state_index s = 0; s < states.size(); ++s )
    {
        auto decl_line = state_lines.find( states[ s ].id )->second;
        if ( !dwell[ s ] )
            throw parse_error( "state '" + states[ s ].id + "' has no dwell interval", decl_line, 1 );
        double sum = 0.0;
        for ( const auto& e : dist[ s ] )
            sum += e.probability;
        if ( std::abs( sum - 1.0 ) > probabilistic_automaton::sum_tolerance )
            throw parse_error( "probabilities leaving '" + states[ s ].id + "' sum to " + format_real( sum )
                                   + ", expected 1",
                               decl_line, 1 );
        dwell_values.push_back( *dwell[ s ] );
    }
    return probabilistic_automaton( std::move( states ), std::move( dwell_values ), std::move( dist ) );
}

// --- rendering -------------------------------------------------------------

namespace
{

void render_states( std::ostream& os, std::span< const state > states )
{
    for ( const auto& s : states )
    {
        os << "state " << s.id;
        if ( !s.labels.empty() )
        {
            os << " labels ";
            for ( std::size_t i = 0; i < s.labels.size(); ++i )
                os << ( i ? "," : "" ) << s.labels[ i ];
        }
        os << '\n';
    }
}

std::string render_interval( const interval& i )
{
    return "[" + format_real( i.lo ) + ", " + format_real( i.hi ) + "]";
}

} // namespace

std::string render_model( const real_time_automaton& m )
{
    std::ostringstream os;
    render_states( os, m.states() );
    for ( const auto& t : m.transitions() )
        os << "trans " << m.state_at( t.source ).id << " -> " << m.state_at( t.target ).id << ' '
           << render_interval( t.dwell ) << '\n';
    return os.str();
}

std::string render_model( const probabilistic_automaton& m )
{
    std::ostringstream os;
    render_states( os, m.states() );
    for ( state_index s = 0; s < m.states().size(); ++s )
        os << "dwell " << m.state_at( s ).id << ' ' << render_interval( m.dwell( s ) ) << '\n';
    for ( state_index s = 0; s < m.states().size(); ++s )
        for ( const auto& e : m.distribution( s ) )
            os << "trans " << m.state_at( s ).id << " -> " << m.state_at( e.target ).id << " prob "
               << format_real( e.probability ) << '\n';
    return os.str();
}

std::string render_model( const model& m )
{
    return std::visit( []( const auto& x ) { return render_model( x ); }, m );
}

real_time_automaton strip_probabilities( const probabilistic_automaton& m )
{
    std::vector< transition > out;
    for ( state_index s = 0; s < m.states().size(); ++s )
        for ( const auto& e : m.distribution( s ) )
            if ( e.probability > 0.0 )
                out.push_back( { s, e.target, m.dwell( s ) } );
    return real_time_automaton( { m.states().begin(), m.states().end() }, std::move( out ) );
}

bool is_behavior( const real_time_automaton& m, std::span< const transition_index > seq )
{
    for ( auto t : seq )
        if ( t >= m.transitions().size() )
            throw model_error( "transition reference " + std::to_string( t ) + " out of range" );
    if ( seq.empty() )
        return false;
    for ( std::size_t i = 0; i + 1 < seq.size(); ++i )
        if ( m.transition_at( seq[ i ] ).target != m.transition_at( seq[ i + 1 ] ).source )
            return false;
    return true;
}

} // namespace ldimc
