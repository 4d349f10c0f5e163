#include "ldimc/markov.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <random>
#include <sstream>

namespace ldimc
{

double markov_chain::probability( state_index from, state_index to ) const
{
    for ( const auto& e : rows.at( from ) )
        if ( e.target == to )
            return e.probability;
    return 0.0;
}

void markov_chain::validate() const
{
    if ( rows.size() != states.size() )
        throw model_error( "chain needs one row per state" );
    for ( std::size_t s = 0; s < rows.size(); ++s )
    {
        double sum = 0.0;
        for ( const auto& e : rows[ s ] )
        {
            if ( e.target >= states.size() || !( e.probability >= 0.0 && e.probability <= 1.0 ) )
                throw model_error( "invalid entry in row of '" + states[ s ] + "'" );
            sum += e.probability;
        }
        if ( std::abs( sum - 1.0 ) > probabilistic_automaton::sum_tolerance )
            throw model_error( "row of '" + states[ s ] + "' sums to " + format_real( sum ) );
    }
}

markov_chain build_chain( const probabilistic_automaton& m )
{
    markov_chain c;
    for ( state_index s = 0; s < m.states().size(); ++s )
    {
        c.states.push_back( m.state_at( s ).id );
        auto dist = m.distribution( s );
        c.rows.emplace_back( dist.begin(), dist.end() );
    }
    return c;
}

// --- pattern automaton -----------------------------------------------------

pattern_automaton::pattern_automaton( std::size_t alphabet, std::span< const path_pattern > patterns )
        : _alphabet{ alphabet }
{
    constexpr auto none = static_cast< std::size_t >( -1 );
    std::vector< std::size_t > child( alphabet, none );
    _delta = child;
    _accepting.push_back( 0 );
    _spelling.emplace_back();

    for ( const auto& p : patterns )
    {
        std::size_t node = root;
        for ( auto sym : p )
        {
            if ( sym >= alphabet )
                throw model_error( "pattern symbol outside the state alphabet" );
            auto& next = _delta[ node * alphabet + sym ];
            if ( next == none )
            {
                next = _accepting.size();
                _delta.insert( _delta.end(), child.begin(), child.end() );
                _accepting.push_back( 0 );
                auto spelled = _spelling[ node ];
                spelled.push_back( sym );
                _spelling.push_back( std::move( spelled ) );
            }
            node = _delta[ node * alphabet + sym ];
        }
        _accepting[ node ] = 1;
    }

    // Breadth-first completion: missing edges follow the failure link, and a
    // node accepts when its longest proper suffix in the trie does.
    std::vector< std::size_t > fail( size(), root );
    std::deque< std::size_t > queue;
    for ( std::size_t a = 0; a < alphabet; ++a )
    {
        auto& next = _delta[ root * alphabet + a ];
        if ( next == none )
            next = root;
        else
        {
            fail[ next ] = root;
            queue.push_back( next );
        }
    }
    while ( !queue.empty() )
    {
        auto node = queue.front();
        queue.pop_front();
        if ( _accepting[ fail[ node ] ] )
            _accepting[ node ] = 1;
        for ( std::size_t a = 0; a < alphabet; ++a )
        {
            auto& next = _delta[ node * alphabet + a ];
            auto via_fail = _delta[ fail[ node ] * alphabet + a ];
            if ( next == none )
                next = via_fail;
            else
            {
                fail[ next ] = via_fail;
                queue.push_back( next );
            }
        }
    }
}

// --- product ---------------------------------------------------------------

product_chain build_product( const markov_chain& chain, const pattern_automaton& patterns )
{
    product_chain p;
    std::map< std::pair< state_index, std::size_t >, std::size_t > index;
    std::deque< std::size_t > queue;
    auto intern = [ & ]( state_index s, std::size_t node ) {
        auto [ it, fresh ] = index.try_emplace( { s, node }, p.states.size() );
        if ( fresh )
        {
            p.states.push_back( { s, node } );
            p.rows.emplace_back();
            p.matched.push_back( patterns.accepting( node ) );
            queue.push_back( it->second );
        }
        return it->second;
    };

    for ( state_index s = 0; s < chain.size(); ++s )
        p.start.push_back( intern( s, patterns.step( pattern_automaton::root, s ) ) );

    while ( !queue.empty() )
    {
        auto i = queue.front();
        queue.pop_front();
        if ( p.matched[ i ] )
        {
            p.rows[ i ] = { { i, 1.0 } };
            continue;
        }
        auto [ s, node ] = p.states[ i ];
        std::vector< std::pair< std::size_t, double > > row;
        for ( const auto& e : chain.rows[ s ] )
            if ( e.probability > 0.0 )
                row.emplace_back( intern( e.target, patterns.step( node, e.target ) ), e.probability );
        p.rows[ i ] = std::move( row );
    }
    return p;
}

// --- systems ---------------------------------------------------------------

namespace
{

std::string coefficient_text( double c )
{
    char buf[ 32 ];
    std::snprintf( buf, sizeof buf, "%.12g", c );
    return buf;
}

std::string unknown_name( const markov_chain& chain, const product_chain& product, std::size_t i )
{
    const auto& ps = product.states[ i ];
    if ( product.start[ ps.state ] == i )
        return "P(" + chain.states[ ps.state ] + ")";
    return "";    // filled by caller from the pattern spelling
}

// Dense Gaussian elimination with partial pivoting on A X = B (B has `k`
// columns). Returns false when a pivot falls below `threshold`.
bool solve_dense( std::vector< double >& a, std::vector< double >& b, std::size_t n, std::size_t k,
                  double threshold )
{
    for ( std::size_t col = 0; col < n; ++col )
    {
        std::size_t pivot = col;
        for ( std::size_t r = col + 1; r < n; ++r )
            if ( std::abs( a[ r * n + col ] ) > std::abs( a[ pivot * n + col ] ) )
                pivot = r;
        if ( std::abs( a[ pivot * n + col ] ) < threshold )
            return false;
        if ( pivot != col )
        {
            for ( std::size_t c = 0; c < n; ++c )
                std::swap( a[ pivot * n + c ], a[ col * n + c ] );
            for ( std::size_t c = 0; c < k; ++c )
                std::swap( b[ pivot * k + c ], b[ col * k + c ] );
        }
        for ( std::size_t r = col + 1; r < n; ++r )
        {
            double f = a[ r * n + col ] / a[ col * n + col ];
            if ( f == 0.0 )
                continue;
            for ( std::size_t c = col; c < n; ++c )
                a[ r * n + c ] -= f * a[ col * n + c ];
            for ( std::size_t c = 0; c < k; ++c )
                b[ r * k + c ] -= f * b[ col * k + c ];
        }
    }
    for ( std::size_t col = n; col-- > 0; )
        for ( std::size_t c = 0; c < k; ++c )
        {
            double v = b[ col * k + c ];
            for ( std::size_t j = col + 1; j < n; ++j )
                v -= a[ col * n + j ] * b[ j * k + c ];
            b[ col * k + c ] = v / a[ col * n + col ];
        }
    return true;
}

} // namespace

std::string render_system( const equation_system& sys )
{
    std::ostringstream os;
    for ( const auto& eq : sys.equations )
    {
        os << sys.unknowns[ eq.lhs ] << " =";
        bool first = true;
        for ( const auto& [ u, c ] : eq.terms )
        {
            os << ( first ? " " : " + " ) << coefficient_text( c ) << '*' << sys.unknowns[ u ];
            first = false;
        }
        if ( eq.constant != 0.0 || first )
            os << ( first ? " " : " + " ) << coefficient_text( eq.constant );
        os << '\n';
    }
    return os.str();
}

std::string to_string( solve_method m )
{
    return m == solve_method::linear_solve ? "linear-solve" : "value-iteration";
}

equation_system vertex_system( const markov_chain& chain, const pattern_automaton& patterns,
                               const product_chain& product )
{
    // Unknowns: unmatched product states, start states first in chain order.
    std::vector< std::size_t > order( product.start.begin(), product.start.end() );
    for ( std::size_t i = 0; i < product.states.size(); ++i )
        if ( !product.matched[ i ] && std::find( order.begin(), order.end(), i ) == order.end() )
            order.push_back( i );
    std::vector< std::size_t > unknown_of( product.states.size(), static_cast< std::size_t >( -1 ) );
    for ( std::size_t u = 0; u < order.size(); ++u )
        unknown_of[ order[ u ] ] = u;

    equation_system sys;
    for ( auto i : order )
    {
        auto name = unknown_name( chain, product, i );
        if ( name.empty() )
        {
            std::string spelled;
            for ( auto s : patterns.spelling( product.states[ i ].node ) )
                spelled += ( spelled.empty() ? "" : " " ) + chain.states[ s ];
            name = "P(" + spelled + ")";
        }
        sys.unknowns.push_back( std::move( name ) );
    }
    for ( std::size_t u = 0; u < order.size(); ++u )
    {
        linear_equation eq{ u, {}, 0.0 };
        std::map< std::size_t, double > terms;
        for ( const auto& [ j, p ] : product.rows[ order[ u ] ] )
            if ( !product.matched[ j ] )
                terms[ unknown_of[ j ] ] += p;
        eq.terms.assign( terms.begin(), terms.end() );
        sys.equations.push_back( std::move( eq ) );
    }
    return sys;
}

std::optional< equation_system > aggregate_to_start_states( const equation_system& full,
                                                            const product_chain& product )
{
    // vertex_system lists the start states first.
    std::size_t nb = 0;
    for ( std::size_t i = 0; i < product.start.size(); ++i )
        if ( !product.matched[ product.start[ i ] ] )
            ++nb;
    const std::size_t total = full.unknowns.size();
    const std::size_t ne = total - nb;

    auto coefficient = [ & ]( std::size_t row, std::size_t col ) {
        for ( const auto& [ u, c ] : full.equations[ row ].terms )
            if ( u == col )
                return c;
        return 0.0;
    };

    // x_E = (I - M_EE)^-1 M_EB x_B
    std::vector< double > a( ne * ne, 0.0 );
    std::vector< double > rhs( ne * nb, 0.0 );
    for ( std::size_t r = 0; r < ne; ++r )
    {
        for ( std::size_t c = 0; c < ne; ++c )
            a[ r * ne + c ] = ( r == c ? 1.0 : 0.0 ) - coefficient( nb + r, nb + c );
        for ( std::size_t c = 0; c < nb; ++c )
            rhs[ r * nb + c ] = coefficient( nb + r, c );
    }
    if ( ne > 0 && !solve_dense( a, rhs, ne, nb, 1e-12 ) )
        return std::nullopt;

    equation_system out;
    out.unknowns.assign( full.unknowns.begin(), full.unknowns.begin() + static_cast< std::ptrdiff_t >( nb ) );
    for ( std::size_t r = 0; r < nb; ++r )
    {
        linear_equation eq{ r, {}, 0.0 };
        for ( std::size_t c = 0; c < nb; ++c )
        {
            double v = coefficient( r, c );
            for ( std::size_t e = 0; e < ne; ++e )
                v += coefficient( r, nb + e ) * rhs[ e * nb + c ];
            if ( v != 0.0 )
                eq.terms.emplace_back( c, v );
        }
        out.equations.push_back( std::move( eq ) );
    }
    return out;
}

// --- avoidance -------------------------------------------------------------

avoidance_result avoidance_probability( const markov_chain& chain, std::span< const path_pattern > patterns,
                                        const avoidance_options& opts )
{
    chain.validate();
    avoidance_result result;

    std::vector< path_pattern > usable;
    for ( const auto& p : patterns )
    {
        if ( p.size() < 2 )
            throw model_error( "patterns need at least two states" );
        for ( auto s : p )
            if ( s >= chain.size() )
                throw model_error( "pattern references an unknown state" );
        bool possible = true;
        for ( std::size_t i = 0; i + 1 < p.size(); ++i )
            if ( chain.probability( p[ i ], p[ i + 1 ] ) <= 0.0 )
                possible = false;
        ( possible ? usable : result.dropped_patterns ).push_back( p );
    }

    pattern_automaton automaton( chain.size(), usable );
    auto product = build_product( chain, automaton );
    const auto n = product.states.size();
    result.product_size = n;

    // Classification: matched -> 0, cannot reach matched -> 1, rest solved.
    std::vector< std::vector< std::size_t > > preds( n );
    for ( std::size_t i = 0; i < n; ++i )
        for ( const auto& [ j, p ] : product.rows[ i ] )
            if ( p > 0.0 && j != i )
                preds[ j ].push_back( i );
    std::vector< char > reaches( n, 0 );
    std::deque< std::size_t > queue;
    for ( std::size_t i = 0; i < n; ++i )
        if ( product.matched[ i ] )
        {
            reaches[ i ] = 1;
            queue.push_back( i );
        }
    while ( !queue.empty() )
    {
        auto j = queue.front();
        queue.pop_front();
        for ( auto i : preds[ j ] )
            if ( !reaches[ i ] )
            {
                reaches[ i ] = 1;
                queue.push_back( i );
            }
    }

    std::vector< double > value( n, 1.0 );
    std::vector< std::size_t > transient;
    std::vector< std::size_t > slot( n, static_cast< std::size_t >( -1 ) );
    for ( std::size_t i = 0; i < n; ++i )
    {
        if ( product.matched[ i ] )
            value[ i ] = 0.0;
        else if ( reaches[ i ] )
        {
            slot[ i ] = transient.size();
            transient.push_back( i );
        }
    }

    const auto m = transient.size();
    result.system_size = m;
    std::vector< double > a( m * m, 0.0 );
    std::vector< double > b( m, 0.0 );
    for ( std::size_t r = 0; r < m; ++r )
    {
        auto i = transient[ r ];
        a[ r * m + r ] += 1.0;
        for ( const auto& [ j, p ] : product.rows[ i ] )
        {
            if ( slot[ j ] != static_cast< std::size_t >( -1 ) )
                a[ r * m + slot[ j ] ] -= p;
            else if ( !product.matched[ j ] )
                b[ r ] += p;
        }
    }
    auto dump = [ & ]() {
        std::ostringstream os;
        os << "transient system (" << m << " unknowns), rows: coefficients | rhs\n";
        for ( std::size_t r = 0; r < m; ++r )
        {
            for ( std::size_t c = 0; c < m; ++c )
                os << coefficient_text( a[ r * m + c ] ) << ' ';
            os << "| " << coefficient_text( b[ r ] ) << '\n';
        }
        return os.str();
    };
    const std::string before = m <= 200 ? dump() : std::string( "(system too large to dump)\n" );
    if ( m > 0 && !solve_dense( a, b, m, 1, opts.pivot_threshold ) )
        throw internal_error( "singular avoidance system after classification\n" + before );
    for ( std::size_t r = 0; r < m; ++r )
        value[ transient[ r ] ] = std::clamp( b[ r ], 0.0, 1.0 ) + 0.0;

    for ( state_index s = 0; s < chain.size(); ++s )
        result.per_state.push_back( value[ product.start[ s ] ] );
    result.method = solve_method::linear_solve;

    // Independent cross-check: iterate x <- P x from x = 1 on the unclassified product.
    std::vector< double > x( n ), next( n );
    for ( std::size_t i = 0; i < n; ++i )
        x[ i ] = product.matched[ i ] ? 0.0 : 1.0;
    double previous_change = infinity;
    for ( result.value_iteration_steps = 0; result.value_iteration_steps < opts.vi_max_iterations; )
    {
        double change = 0.0;
        for ( std::size_t i = 0; i < n; ++i )
        {
            double v = 0.0;
            if ( !product.matched[ i ] )
                for ( const auto& [ j, p ] : product.rows[ i ] )
                    v += p * x[ j ];
            change = std::max( change, std::abs( v - x[ i ] ) );
            next[ i ] = v;
        }
        x.swap( next );
        ++result.value_iteration_steps;
        // Geometric tail estimate from consecutive changes.
        double ratio = previous_change > 0.0 ? change / previous_change : 0.0;
        double tail = ratio < 1.0 ? change * ratio / ( 1.0 - ratio ) : infinity;
        previous_change = change;
        if ( change == 0.0 || ( change < opts.vi_tolerance && tail < opts.vi_tolerance ) )
        {
            result.value_iteration_converged = true;
            break;
        }
    }
    for ( state_index s = 0; s < chain.size(); ++s )
        result.value_iteration.push_back( x[ product.start[ s ] ] );
    if ( result.value_iteration_converged )
        for ( std::size_t i = 0; i < n; ++i )
            if ( std::abs( x[ i ] - value[ i ] ) > opts.agreement_tolerance )
                throw internal_error( "linear solve and value iteration disagree at product state "
                                      + std::to_string( i ) + ": " + coefficient_text( value[ i ] ) + " vs "
                                      + coefficient_text( x[ i ] ) + "\n" + before );

    if ( opts.build_systems )
    {
        result.full_system = vertex_system( chain, automaton, product );
        result.aggregated_system = aggregate_to_start_states( *result.full_system, product );
    }
    return result;
}

// --- simulation ------------------------------------------------------------

std::vector< monte_carlo_estimate > monte_carlo_avoidance( const markov_chain& chain,
                                                           std::span< const path_pattern > patterns,
                                                           std::size_t samples, std::size_t horizon,
                                                           std::uint64_t seed )
{
    chain.validate();
    if ( samples < 1 )
        throw model_error( "at least one sample is required" );
    std::size_t longest = 0;
    for ( const auto& p : patterns )
    {
        if ( p.size() < 2 )
            throw model_error( "patterns need at least two states" );
        longest = std::max( longest, p.size() );
    }
    if ( horizon + 1 < longest )
        throw model_error( "horizon is shorter than the longest pattern" );

    pattern_automaton automaton( chain.size(), patterns );
    const auto nodes = automaton.size();

    // Pairs (state, node) from which no pattern can complete any more; a run
    // reaching one avoids for the rest of the horizon.
    std::vector< char > can_match( chain.size() * nodes, 0 );
    for ( state_index s = 0; s < chain.size(); ++s )
        for ( std::size_t q = 0; q < nodes; ++q )
            can_match[ s * nodes + q ] = automaton.accepting( q );
    for ( bool changed = true; changed; )
    {
        changed = false;
        for ( state_index s = 0; s < chain.size(); ++s )
            for ( std::size_t q = 0; q < nodes; ++q )
            {
                if ( can_match[ s * nodes + q ] )
                    continue;
                for ( const auto& e : chain.rows[ s ] )
                    if ( e.probability > 0.0 && can_match[ e.target * nodes + automaton.step( q, e.target ) ] )
                    {
                        can_match[ s * nodes + q ] = 1;
                        changed = true;
                        break;
                    }
            }
    }

    std::vector< std::discrete_distribution< std::size_t > > pick;
    for ( const auto& row : chain.rows )
    {
        std::vector< double > w;
        for ( const auto& e : row )
            w.push_back( e.probability );
        pick.emplace_back( w.begin(), w.end() );
    }

    std::vector< monte_carlo_estimate > out;
    for ( state_index start = 0; start < chain.size(); ++start )
    {
        std::seed_seq seq{ static_cast< std::uint32_t >( seed ), static_cast< std::uint32_t >( seed >> 32 ),
                           static_cast< std::uint32_t >( start ) };
        std::mt19937_64 rng( seq );
        std::size_t avoided = 0;
        for ( std::size_t k = 0; k < samples; ++k )
        {
            state_index s = start;
            std::size_t q = automaton.step( pattern_automaton::root, s );
            bool hit = automaton.accepting( q );
            for ( std::size_t step = 0; step < horizon && !hit; ++step )
            {
                if ( !can_match[ s * nodes + q ] )
                    break;
                s = chain.rows[ s ][ pick[ s ]( rng ) ].target;
                q = automaton.step( q, s );
                hit = automaton.accepting( q );
            }
            if ( !hit )
                ++avoided;
        }
        double p = static_cast< double >( avoided ) / static_cast< double >( samples );
        out.push_back( { p, 3.0 * std::sqrt( p * ( 1.0 - p ) / static_cast< double >( samples ) ) } );
    }
    return out;
}

} // namespace ldimc
