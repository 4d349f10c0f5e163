#pragma once

// Shared fixtures and independent reference computations for the test suites.
// Nothing here calls the library's optimizer or solver.

#include "ldimc/automaton.hpp"
#include "ldimc/markov.hpp"
#include "ldimc/semantics.hpp"
#include "ldimc/spec.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace testing
{

using namespace ldimc;

inline const char* gas_text = "state s1 labels NLeak\n"
                              "state s2 labels Leak\n"
                              "trans s1 -> s2 [30, inf]\n"
                              "trans s2 -> s1 [0, 1]\n";

inline const char* gas_prob_text = "state s1 labels NLeak\n"
                                   "state s2 labels Leak\n"
                                   "dwell s1 [30, inf]\n"
                                   "dwell s2 [0, 1]\n"
                                   "trans s1 -> s1 prob 0.9\n"
                                   "trans s1 -> s2 prob 0.1\n"
                                   "trans s2 -> s1 prob 0.8\n"
                                   "trans s2 -> s2 prob 0.2\n";

inline const char* gas_ldi_text = "ell >= 60 -> 19*int(Leak) - 1*int(NLeak) <= 0";

inline real_time_automaton gas() { return std::get< real_time_automaton >( parse_model( gas_text ) ); }
inline probabilistic_automaton gas_prob() { return std::get< probabilistic_automaton >( parse_model( gas_prob_text ) ); }
inline linear_duration_invariant gas_ldi() { return parse_ldi( gas_ldi_text ); }

// rho1 = s1 -> s2, rho2 = s2 -> s1 in the plain gas burner.
inline constexpr transition_index rho1 = 0;
inline constexpr transition_index rho2 = 1;

// --- random instances --------------------------------------------------------

// States x0..x{n-1} labeled by random subsets of {P, Q}; each state gets 1..3
// outgoing transitions with small integer intervals, some unbounded.
inline real_time_automaton random_rta( std::mt19937_64& rng, std::size_t n = 3, bool partition = false )
{
    std::uniform_int_distribution< int > coin( 0, 1 ), small( 0, 4 ), width( 0, 5 ), fanout( 1, 3 ), any( 0, 9 );
    std::uniform_int_distribution< std::size_t > pick( 0, n - 1 );
    std::vector< state > states;
    for ( std::size_t i = 0; i < n; ++i )
    {
        state s{ "x" + std::to_string( i ), {} };
        if ( partition )
            s.labels = { coin( rng ) ? "P" : "Q" };
        else
        {
            if ( coin( rng ) )
                s.labels.push_back( "P" );
            if ( coin( rng ) )
                s.labels.push_back( "Q" );
        }
        states.push_back( s );
    }
    // Both propositions must label some state.
    auto ensure = [ & ]( std::size_t i, const std::string& p ) {
        if ( std::none_of( states.begin(), states.end(), [ & ]( const state& s ) { return s.has_label( p ); } ) )
        {
            auto& labels = partition ? ( states[ i ].labels = {} ) : states[ i ].labels;
            labels.push_back( p );
            std::sort( labels.begin(), labels.end() );
        }
    };
    ensure( 0, "P" );
    ensure( n - 1, "Q" );
    std::vector< transition > ts;
    for ( std::size_t i = 0; i < n; ++i )
    {
        int k = fanout( rng );
        for ( int j = 0; j < k; ++j )
        {
            double lo = small( rng );
            double hi = any( rng ) < 2 ? infinity : lo + width( rng );
            transition t{ i, pick( rng ), { lo, hi } };
            if ( std::find( ts.begin(), ts.end(), t ) == ts.end() )
                ts.push_back( t );
        }
    }
    return real_time_automaton( std::move( states ), std::move( ts ) );
}

inline linear_duration_invariant random_ldi( std::mt19937_64& rng )
{
    std::uniform_int_distribution< int > coef( -3, 3 ), lower( 0, 12 ), span( 0, 15 ), coin( 0, 2 ), bound( -10, 10 );
    linear_duration_invariant d;
    d.lower = lower( rng );
    d.upper = coin( rng ) == 0 ? infinity : d.lower + span( rng );
    d.terms = { { static_cast< double >( coef( rng ) ), "P" }, { static_cast< double >( coef( rng ) ), "Q" } };
    d.bound = bound( rng );
    return d;
}

// Every transition sequence of 1..max_len transitions, depth first.
inline std::vector< std::vector< transition_index > > all_sequences( const real_time_automaton& m,
                                                                     std::size_t max_len )
{
    std::vector< std::vector< transition_index > > out;
    std::vector< transition_index > cur;
    auto rec = [ & ]( auto& self ) -> void {
        out.push_back( cur );
        if ( cur.size() == max_len )
            return;
        for ( auto t : m.successors( m.transition_at( cur.back() ).target ) )
        {
            cur.push_back( t );
            self( self );
            cur.pop_back();
        }
    };
    for ( transition_index t = 0; t < m.transitions().size(); ++t )
    {
        cur = { t };
        rec( rec );
    }
    return out;
}

// --- LP reference: enumerate basic solutions ---------------------------------

// max sum w_j t_j over a_j <= t_j <= b_j, lower <= sum t_j <= upper. Every
// vertex has all coordinates at a finite box endpoint except at most one, which
// then sits where the coupling constraint is tight. +inf when unbounded,
// nullopt when infeasible.
inline std::optional< double > vertex_lp( const std::vector< double >& w, const std::vector< interval >& box,
                                          double lower, double upper )
{
    const auto n = w.size();
    double lo_sum = 0.0, hi_sum = 0.0;
    for ( const auto& b : box )
    {
        lo_sum += b.lo;
        hi_sum += b.hi;
    }
    if ( lo_sum > upper || hi_sum < lower )
        return std::nullopt;
    if ( upper == infinity )
        for ( std::size_t j = 0; j < n; ++j )
            if ( w[ j ] > 0 && box[ j ].hi == infinity )
                return infinity;

    std::optional< double > best;
    auto consider = [ & ]( double v ) {
        if ( !best || v > *best )
            best = v;
    };
    // free = n means no free coordinate.
    for ( std::size_t free = 0; free <= n; ++free )
    {
        const std::size_t fixed_count = free == n ? n : n - 1;
        for ( std::size_t mask = 0; mask < ( std::size_t{ 1 } << fixed_count ); ++mask )
        {
            std::vector< double > t( n, 0.0 );
            bool ok = true;
            std::size_t bit = 0;
            for ( std::size_t j = 0; j < n && ok; ++j )
            {
                if ( j == free )
                    continue;
                bool high = ( mask >> bit++ ) & 1;
                if ( high && box[ j ].hi == infinity )
                    ok = false;
                t[ j ] = high ? box[ j ].hi : box[ j ].lo;
            }
            if ( !ok )
                continue;
            double others = 0.0;
            for ( std::size_t j = 0; j < n; ++j )
                if ( j != free )
                    others += t[ j ];
            auto value = [ & ] {
                double v = 0.0;
                for ( std::size_t j = 0; j < n; ++j )
                    v += w[ j ] * t[ j ];
                return v;
            };
            if ( free == n )
            {
                if ( lower - 1e-9 <= others && others <= upper + 1e-9 )
                    consider( value() );
                continue;
            }
            for ( double target : { lower, upper } )
            {
                if ( target == infinity )
                    continue;
                double x = target - others;
                if ( x >= box[ free ].lo - 1e-9 && x <= box[ free ].hi + 1e-9 )
                {
                    t[ free ] = std::clamp( x, box[ free ].lo, box[ free ].hi );
                    consider( value() );
                }
            }
        }
    }
    return best;
}

inline std::vector< double > sequence_weights( const real_time_automaton& m, const linear_duration_invariant& d,
                                               const std::vector< transition_index >& seq )
{
    std::vector< double > w;
    for ( auto t : seq )
    {
        double v = 0.0;
        for ( const auto& term : d.terms )
            if ( m.state_at( m.transition_at( t ).source ).has_label( term.proposition ) )
                v += term.coefficient;
        w.push_back( v );
    }
    return w;
}

inline std::vector< interval > sequence_boxes( const real_time_automaton& m,
                                               const std::vector< transition_index >& seq )
{
    std::vector< interval > b;
    for ( auto t : seq )
        b.push_back( m.transition_at( t ).dwell );
    return b;
}

// Worst LF over all behaviors with at most max_len transitions, by enumerating
// sequences and LP vertices. nullopt when nothing is feasible.
inline std::optional< double > brute_force_worst( const real_time_automaton& m, const linear_duration_invariant& d,
                                                  std::size_t max_len )
{
    std::optional< double > best;
    for ( const auto& seq : all_sequences( m, max_len ) )
    {
        auto v = vertex_lp( sequence_weights( m, d, seq ), sequence_boxes( m, seq ), d.lower, d.upper );
        if ( v && ( !best || *v > *best ) )
            best = v;
    }
    return best;
}

// --- avoidance reference: sliding window chain + dense LU --------------------

// Tracks the last (k-1) visited states, k the longest pattern, instead of a
// pattern automaton, and solves the absorption equations with Eigen.
inline std::vector< double > window_avoidance( const markov_chain& chain, const std::vector< path_pattern >& ws )
{
    std::size_t k = 2;
    for ( const auto& p : ws )
        k = std::max( k, p.size() );
    auto hits = [ & ]( const path_pattern& window ) {
        for ( const auto& p : ws )
            if ( p.size() <= window.size() && std::equal( p.rbegin(), p.rend(), window.rbegin() ) )
                return true;
        return false;
    };

    std::map< path_pattern, std::size_t > index;
    std::vector< path_pattern > windows;
    std::vector< std::vector< std::pair< long, double > > > edges;    // -1 = hit
    std::deque< std::size_t > queue;
    auto intern = [ & ]( const path_pattern& w ) {
        auto [ it, fresh ] = index.try_emplace( w, windows.size() );
        if ( fresh )
        {
            windows.push_back( w );
            edges.emplace_back();
            queue.push_back( it->second );
        }
        return it->second;
    };
    for ( state_index s = 0; s < chain.size(); ++s )
        intern( { s } );
    while ( !queue.empty() )
    {
        auto i = queue.front();
        queue.pop_front();
        auto w = windows[ i ];
        for ( const auto& e : chain.rows[ w.back() ] )
        {
            if ( e.probability <= 0.0 )
                continue;
            auto next = w;
            next.push_back( e.target );
            if ( hits( next ) )
            {
                edges[ i ].emplace_back( -1, e.probability );
                continue;
            }
            if ( next.size() > k - 1 )
                next.erase( next.begin() );
            auto j = intern( next );
            edges[ i ].emplace_back( static_cast< long >( j ), e.probability );
        }
    }

    const auto n = windows.size();
    std::vector< char > reaches( n, 0 );
    for ( bool changed = true; changed; )
    {
        changed = false;
        for ( std::size_t i = 0; i < n; ++i )
            if ( !reaches[ i ] )
                for ( const auto& [ j, p ] : edges[ i ] )
                    if ( j < 0 || reaches[ static_cast< std::size_t >( j ) ] )
                    {
                        reaches[ i ] = 1;
                        changed = true;
                        break;
                    }
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity( static_cast< long >( n ), static_cast< long >( n ) );
    Eigen::VectorXd b = Eigen::VectorXd::Zero( static_cast< long >( n ) );
    for ( std::size_t i = 0; i < n; ++i )
    {
        if ( !reaches[ i ] )
        {
            b[ static_cast< long >( i ) ] = 1.0;
            continue;
        }
        for ( const auto& [ j, p ] : edges[ i ] )
            if ( j >= 0 )
                a( static_cast< long >( i ), j ) -= p;
    }
    Eigen::VectorXd x = a.fullPivLu().solve( b );
    std::vector< double > out;
    for ( state_index s = 0; s < chain.size(); ++s )
        out.push_back( x[ static_cast< long >( index.at( { s } ) ) ] );
    return out;
}

// Rows with 1..n targets and weights in [0.1, 1].
inline markov_chain random_chain( std::mt19937_64& rng, std::size_t n )
{
    std::uniform_real_distribution< double > weight( 0.1, 1.0 );
    std::uniform_int_distribution< std::size_t > fan( 1, n ), pick( 0, n - 1 );
    markov_chain c;
    for ( std::size_t s = 0; s < n; ++s )
        c.states.push_back( "c" + std::to_string( s ) );
    for ( std::size_t s = 0; s < n; ++s )
    {
        std::map< state_index, double > row;
        auto k = fan( rng );
        while ( row.size() < k )
            row[ pick( rng ) ] = weight( rng );
        double total = 0.0;
        for ( auto& [ t, w ] : row )
            total += w;
        std::vector< probabilistic_edge > edges;
        for ( auto& [ t, w ] : row )
            edges.push_back( { t, w / total } );
        c.rows.push_back( edges );
    }
    return c;
}

// A random walk of 2..max_states states along positive transitions.
inline path_pattern random_walk_pattern( std::mt19937_64& rng, const markov_chain& c, std::size_t max_states )
{
    std::uniform_int_distribution< std::size_t > len( 2, max_states ), start( 0, c.size() - 1 );
    path_pattern p{ start( rng ) };
    auto n = len( rng );
    while ( p.size() < n )
    {
        const auto& row = c.rows[ p.back() ];
        std::uniform_int_distribution< std::size_t > pick( 0, row.size() - 1 );
        p.push_back( row[ pick( rng ) ].target );
    }
    return p;
}

} // namespace testing
