#include "ldimc/semantics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ldimc
{

std::vector< transition_index > time_stamped_behavior::sequence() const
{
    std::vector< transition_index > seq;
    seq.reserve( genes.size() );
    for ( const auto& g : genes )
        seq.push_back( g.transition );
    return seq;
}

void validate_behavior( const real_time_automaton& m, const time_stamped_behavior& b )
{
    if ( b.genes.empty() )
        throw model_error( "behaviors are nonempty" );
    auto seq = b.sequence();
    if ( !is_behavior( m, seq ) )
        throw model_error( "consecutive transitions do not share a state" );
    for ( std::size_t i = 0; i < b.genes.size(); ++i )
    {
        const auto& g = b.genes[ i ];
        if ( !m.transition_at( g.transition ).dwell.contains( g.dwell ) )
            throw model_error( "dwell " + format_real( g.dwell ) + " of gene " + std::to_string( i )
                               + " lies outside its interval" );
    }
}

bool is_valid_behavior( const real_time_automaton& m, const time_stamped_behavior& b )
{
    try
    {
        validate_behavior( m, b );
        return true;
    }
    catch ( const model_error& )
    {
        return false;
    }
}

std::vector< state_index > visited_states( const real_time_automaton& m, std::span< const transition_index > seq )
{
    std::vector< state_index > out;
    if ( seq.empty() )
        return out;
    for ( auto t : seq )
        out.push_back( m.transition_at( t ).source );
    out.push_back( m.transition_at( seq.back() ).target );
    return out;
}

double behavior_length( const time_stamped_behavior& b )
{
    double sum = 0.0;
    for ( const auto& g : b.genes )
        sum += g.dwell;
    return sum;
}

double duration( const real_time_automaton& m, const time_stamped_behavior& b, std::string_view prop )
{
    double sum = 0.0;
    for ( const auto& g : b.genes )
        if ( m.state_at( m.transition_at( g.transition ).source ).has_label( prop ) )
            sum += g.dwell;
    return sum;
}

double lf_value( const real_time_automaton& m, const linear_duration_invariant& d, const time_stamped_behavior& b )
{
    auto w = state_weights( d, m.states() );
    double sum = 0.0;
    for ( const auto& g : b.genes )
        sum += w[ m.transition_at( g.transition ).source ] * g.dwell;
    return sum;
}

bool satisfies_ldi( const real_time_automaton& m, const linear_duration_invariant& d, const time_stamped_behavior& b,
                    double tol )
{
    if ( !d.length_in_premise( behavior_length( b ) ) )
        return true;
    return lf_value( m, d, b ) <= d.bound + tol;
}

bool satisfies_all_windows( const real_time_automaton& m, const linear_duration_invariant& d,
                            const time_stamped_behavior& b, double tol )
{
    auto w = state_weights( d, m.states() );
    const auto n = b.genes.size();
    std::vector< double > len( n + 1, 0.0 );
    std::vector< double > lf( n + 1, 0.0 );
    for ( std::size_t i = 0; i < n; ++i )
    {
        const auto& g = b.genes[ i ];
        len[ i + 1 ] = len[ i ] + g.dwell;
        lf[ i + 1 ] = lf[ i ] + w[ m.transition_at( g.transition ).source ] * g.dwell;
    }
    for ( std::size_t i = 0; i < n; ++i )
        for ( std::size_t j = i + 1; j <= n; ++j )
            if ( d.length_in_premise( len[ j ] - len[ i ] ) && lf[ j ] - lf[ i ] > d.bound + tol )
                return false;
    return true;
}

std::optional< sequence_optimum > maximize_weighted_dwell( std::span< const double > weights,
                                                           std::span< const interval > boxes, double lower,
                                                           double upper )
{
    const auto n = weights.size();
    if ( n == 0 || boxes.size() != n )
        return std::nullopt;

    double sum_lo = 0.0;
    double sum_hi = 0.0;
    for ( const auto& b : boxes )
    {
        sum_lo += b.lo;
        sum_hi += b.hi;
    }
    if ( sum_lo > upper || sum_hi < lower )
        return std::nullopt;

    std::vector< std::size_t > order( n );
    std::iota( order.begin(), order.end(), 0 );
    std::stable_sort( order.begin(), order.end(),
                      [ & ]( std::size_t a, std::size_t b ) { return weights[ a ] > weights[ b ]; } );

    sequence_optimum out;
    out.dwells.resize( n );
    for ( std::size_t j = 0; j < n; ++j )
        out.dwells[ j ] = boxes[ j ].lo;
    double total = sum_lo;

    // Reach the premise's lower bound as cheaply as possible.
    for ( auto j : order )
    {
        if ( total >= lower )
            break;
        double inc = std::min( boxes[ j ].hi - out.dwells[ j ], lower - total );
        out.dwells[ j ] += inc;
        total = inc == lower - total ? lower : total + inc;
    }

    if ( upper == infinity )
        for ( auto j : order )
            if ( weights[ j ] > 0.0 && boxes[ j ].hi == infinity )
            {
                out.value = infinity;
                out.unbounded_gene = j;
                return out;
            }

    // Spend the remaining headroom on improving coordinates only.
    for ( auto j : order )
    {
        if ( weights[ j ] <= 0.0 || total >= upper )
            break;
        double inc = std::min( boxes[ j ].hi - out.dwells[ j ], upper - total );
        out.dwells[ j ] += inc;
        total = inc == upper - total ? upper : total + inc;
    }

    out.value = 0.0;
    for ( std::size_t j = 0; j < n; ++j )
        out.value += weights[ j ] * out.dwells[ j ];
    return out;
}

std::optional< sequence_optimum > max_lf_for_sequence( const real_time_automaton& m,
                                                       const linear_duration_invariant& d,
                                                       std::span< const transition_index > seq )
{
    if ( !is_behavior( m, seq ) )
        throw model_error( "transition sequence is not a behavior" );
    auto w = state_weights( d, m.states() );
    std::vector< double > weights;
    std::vector< interval > boxes;
    for ( auto t : seq )
    {
        const auto& tr = m.transition_at( t );
        weights.push_back( w[ tr.source ] );
        boxes.push_back( tr.dwell );
    }
    return maximize_weighted_dwell( weights, boxes, d.lower, d.upper );
}

std::string to_string( oracle_verdict v )
{
    switch ( v )
    {
    case oracle_verdict::satisfied:
        return "satisfied";
    case oracle_verdict::violated:
        return "violated";
    case oracle_verdict::unbounded:
        return "unbounded";
    case oracle_verdict::no_feasible_behavior:
        return "no-feasible-behavior";
    }
    return "?";
}

namespace
{

time_stamped_behavior assemble( std::span< const transition_index > seq, std::span< const double > dwells )
{
    time_stamped_behavior b;
    for ( std::size_t i = 0; i < seq.size(); ++i )
        b.genes.push_back( { seq[ i ], dwells[ i ] } );
    return b;
}

class exhaustive_search
{
    const real_time_automaton& _m;
    const linear_duration_invariant& _d;
    const oracle_options& _opts;
    std::vector< double > _weights;    // per state

    std::vector< transition_index > _seq;
    std::vector< double > _gene_weights;
    std::vector< interval > _boxes;

public:
    oracle_result result;
    bool done = false;

    exhaustive_search( const real_time_automaton& m, const linear_duration_invariant& d, const oracle_options& opts )
            : _m{ m }, _d{ d }, _opts{ opts }, _weights{ state_weights( d, m.states() ) }
    {
        result.max_len = opts.max_len;
    }

    void extend( transition_index t )
    {
        if ( done )
            return;
        if ( ++result.sequences_examined > _opts.sequence_cap )
            throw resource_error( "bounded check exceeded the cap of " + std::to_string( _opts.sequence_cap )
                                  + " sequences" );
        const auto& tr = _m.transition_at( t );
        _seq.push_back( t );
        _gene_weights.push_back( _weights[ tr.source ] );
        _boxes.push_back( tr.dwell );

        if ( auto opt = maximize_weighted_dwell( _gene_weights, _boxes, _d.lower, _d.upper ) )
            consider( *opt );
        if ( !done && _seq.size() < _opts.max_len )
            for ( auto next : _m.successors( tr.target ) )
                extend( next );

        _seq.pop_back();
        _gene_weights.pop_back();
        _boxes.pop_back();
    }

private:
    void consider( const sequence_optimum& opt )
    {
        if ( opt.value == infinity )
        {
            auto dwells = opt.dwells;
            auto k = *opt.unbounded_gene;
            double base = 0.0;
            for ( std::size_t j = 0; j < dwells.size(); ++j )
                base += _gene_weights[ j ] * dwells[ j ];
            dwells[ k ] += std::max( 0.0, ( _d.bound - base ) / _gene_weights[ k ] ) + 1.0;
            result.worst_value = infinity;
            result.witness = assemble( _seq, dwells );
            result.unbounded_sequence = _seq;
            result.unbounded_gene = k;
            done = true;
            return;
        }
        // Strictly greater: DFS visits sequences in lexicographic order, so the
        // first optimum found is the least one.
        if ( !result.witness || opt.value > result.worst_value )
        {
            result.worst_value = opt.value;
            result.witness = assemble( _seq, opt.dwells );
        }
    }
};

} // namespace

oracle_result bounded_exact_check( const real_time_automaton& m, const linear_duration_invariant& d,
                                   const oracle_options& opts )
{
    if ( opts.max_len < 1 )
        throw model_error( "max_len must be at least 1" );
    exhaustive_search search( m, d, opts );
    for ( transition_index t = 0; t < m.transitions().size() && !search.done; ++t )
        search.extend( t );

    auto& r = search.result;
    if ( search.done )
        r.verdict = oracle_verdict::unbounded;
    else if ( !r.witness )
        r.verdict = oracle_verdict::no_feasible_behavior;
    else if ( r.worst_value > d.bound + opts.tolerance )
        r.verdict = oracle_verdict::violated;
    else
        r.verdict = oracle_verdict::satisfied;
    return r;
}

} // namespace ldimc
