#include "ldimc/ga.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ldimc
{

void ga_config::validate() const
{
    auto probability = []( double p ) { return p >= 0.0 && p <= 1.0; };
    if ( population_size < 2 )
        throw model_error( "population size must be at least 2" );
    if ( !probability( p_mutation ) || !probability( p_cut_splice ) )
        throw model_error( "operator probabilities must lie in [0,1]" );
    if ( max_genes < 1 )
        throw model_error( "max_genes must be at least 1" );
    if ( time_cap && !( *time_cap > 0.0 && std::isfinite( *time_cap ) ) )
        throw model_error( "time cap must be a positive finite number" );
    if ( settle_window < 1 )
        throw model_error( "settle window must be at least 1" );
    if ( !( elite_fraction > 0.0 && elite_fraction < 1.0 ) )
        throw model_error( "elite fraction must lie in (0,1)" );
    if ( runs < 1 )
        throw model_error( "at least one run is required" );
    if ( sample_attempts < 1 )
        throw model_error( "sample_attempts must be at least 1" );
    if ( !( tolerance >= 0.0 ) )
        throw model_error( "tolerance must be nonnegative" );
}

double effective_time_cap( const ga_config& cfg, const linear_duration_invariant& d, double lo )
{
    if ( cfg.time_cap )
        return *cfg.time_cap;
    double anchor = d.upper != infinity ? d.upper : d.lower;
    return std::max( anchor, lo ) + 2.0 * std::max( d.lower, 1.0 );
}

std::string to_string( ga_verdict v )
{
    return v == ga_verdict::violated ? "violated" : "no-violation-found";
}

namespace
{

double uniform( rng_type& rng, double lo, double hi )
{
    if ( !( hi > lo ) )
        return lo;
    return std::uniform_real_distribution< double >( lo, hi )( rng );
}

std::size_t uniform_index( rng_type& rng, std::size_t n )
{
    return std::uniform_int_distribution< std::size_t >( 0, n - 1 )( rng );
}

bool coin( rng_type& rng, double p )
{
    return std::uniform_real_distribution< double >( 0.0, 1.0 )( rng ) < p;
}

double capped_hi( const interval& i, double cap )
{
    return i.bounded() ? i.hi : i.lo + cap;
}

// With probability endpoint_bias the draw snaps to an endpoint of the
// interval (the lower one when the upper is unbounded); otherwise uniform.
double fresh_dwell( const interval& i, const ga_config& cfg, const linear_duration_invariant& d, rng_type& rng )
{
    double hi = capped_hi( i, effective_time_cap( cfg, d, i.lo ) );
    if ( cfg.endpoint_bias > 0.0 && coin( rng, cfg.endpoint_bias ) )
        return i.bounded() && coin( rng, 0.5 ) ? i.hi : i.lo;
    return uniform( rng, i.lo, hi );
}

} // namespace

// --- sampling --------------------------------------------------------------

behavior_sampler::behavior_sampler( const real_time_automaton& m, const linear_duration_invariant& d,
                                    const ga_config& cfg )
        : _m{ m }, _d{ d }, _cfg{ cfg }
{
    for ( state_index s = 0; s < m.states().size(); ++s )
        if ( !m.successors( s ).empty() )
            _starts.push_back( s );
    if ( _starts.empty() )
        throw infeasible_error( "the model has no transitions, so it has no behaviors" );
}

time_stamped_behavior behavior_sampler::next( rng_type& rng )
{
    while ( !_starts.empty() )
    {
        _cursor %= _starts.size();
        try
        {
            auto b = sample_from( _starts[ _cursor ], rng );
            ++_cursor;
            return b;
        }
        catch ( const infeasible_error& )
        {
            // This start state never yields a behavior within the length premise.
            _starts.erase( _starts.begin() + static_cast< std::ptrdiff_t >( _cursor ) );
        }
    }
    throw infeasible_error( "no behavior with " + format_real( _d.lower ) + " <= L <= " + format_real( _d.upper )
                            + " and at most " + std::to_string( _cfg.max_genes ) + " transitions was found" );
}

time_stamped_behavior behavior_sampler::sample_from( state_index start, rng_type& rng )
{
    for ( std::size_t attempt = 0; attempt < _cfg.sample_attempts; ++attempt )
    {
        std::size_t length = 1 + uniform_index( rng, _cfg.max_genes );
        time_stamped_behavior b;
        std::vector< double > hi;
        state_index at = start;
        while ( b.genes.size() < length )
        {
            auto out = _m.successors( at );
            if ( out.empty() )
                break;
            auto t = out[ uniform_index( rng, out.size() ) ];
            const auto& dwell = _m.transition_at( t ).dwell;
            double h = capped_hi( dwell, effective_time_cap( _cfg, _d, dwell.lo ) );
            b.genes.push_back( { t, uniform( rng, dwell.lo, h ) } );
            hi.push_back( h );
            at = _m.transition_at( t ).target;
        }

        double sum_lo = 0.0;
        double sum_hi = 0.0;
        for ( std::size_t i = 0; i < b.genes.size(); ++i )
        {
            sum_lo += _m.transition_at( b.genes[ i ].transition ).dwell.lo;
            sum_hi += hi[ i ];
        }
        if ( sum_lo > _d.upper || sum_hi < _d.lower )
            continue;

        // Repair the total into the premise, visiting genes in random order.
        double total = behavior_length( b );
        std::vector< std::size_t > order( b.genes.size() );
        std::iota( order.begin(), order.end(), 0 );
        std::shuffle( order.begin(), order.end(), rng );
        if ( total < _d.lower )
        {
            for ( auto i : order )
            {
                double need = _d.lower - total;
                if ( need <= 0.0 )
                    break;
                double inc = std::min( hi[ i ] - b.genes[ i ].dwell, need );
                b.genes[ i ].dwell += inc;
                total += inc;
            }
        }
        else if ( total > _d.upper )
        {
            for ( auto i : order )
            {
                double excess = total - _d.upper;
                if ( excess <= 0.0 )
                    break;
                double lo = _m.transition_at( b.genes[ i ].transition ).dwell.lo;
                double dec = std::min( b.genes[ i ].dwell - lo, excess );
                b.genes[ i ].dwell -= dec;
                total -= dec;
            }
        }
        // Running sums can land an ulp outside the premise; nudge one gene with room.
        for ( int nudge = 0; nudge < 8 && !_d.length_in_premise( behavior_length( b ) ); ++nudge )
        {
            double length = behavior_length( b );
            bool below = length < _d.lower;
            double gap = std::abs( ( below ? _d.lower : _d.upper ) - length );
            double step = std::max( gap, 2.0 * ( std::nextafter( length, infinity ) - length ) );
            for ( auto i : order )
            {
                auto& dwell = b.genes[ i ].dwell;
                double lo = _m.transition_at( b.genes[ i ].transition ).dwell.lo;
                double moved = below ? dwell + step : dwell - step;
                if ( below ? moved <= hi[ i ] : moved >= lo )
                {
                    dwell = moved;
                    break;
                }
            }
        }
        if ( _d.length_in_premise( behavior_length( b ) ) )
            return b;
    }
    throw infeasible_error( "no feasible behavior from state '" + _m.state_at( start ).id + "'" );
}

time_stamped_behavior sample_behavior( const real_time_automaton& m, const linear_duration_invariant& d,
                                       const ga_config& cfg, rng_type& rng )
{
    behavior_sampler sampler( m, d, cfg );
    return sampler.next( rng );
}

// --- operators -------------------------------------------------------------

time_stamped_behavior mutate( const time_stamped_behavior& b, const real_time_automaton& m,
                              const linear_duration_invariant& d, const ga_config& cfg, rng_type& rng )
{
    auto out = b;
    const auto n = out.genes.size();
    if ( n == 0 )
        return out;
    std::size_t count = 1;
    while ( count < n && coin( rng, 0.5 ) )
        ++count;
    std::vector< std::size_t > positions( n );
    std::iota( positions.begin(), positions.end(), 0 );
    std::shuffle( positions.begin(), positions.end(), rng );
    for ( std::size_t k = 0; k < count; ++k )
    {
        auto& g = out.genes[ positions[ k ] ];
        g.dwell = fresh_dwell( m.transition_at( g.transition ).dwell, cfg, d, rng );
    }
    return out;
}

std::optional< std::pair< time_stamped_behavior, time_stamped_behavior > >
cut_and_splice( const time_stamped_behavior& x, const time_stamped_behavior& y, rng_type& rng )
{
    std::vector< std::pair< std::size_t, std::size_t > > shared;
    for ( std::size_t i = 0; i < x.genes.size(); ++i )
        for ( std::size_t j = 0; j < y.genes.size(); ++j )
            if ( x.genes[ i ].transition == y.genes[ j ].transition )
                shared.emplace_back( i, j );
    if ( shared.empty() )
        return std::nullopt;

    auto [ i, j ] = shared[ uniform_index( rng, shared.size() ) ];
    auto splice = []( const time_stamped_behavior& head, std::size_t cut, const time_stamped_behavior& tail,
                      std::size_t from ) {
        time_stamped_behavior child;
        child.genes.assign( head.genes.begin(), head.genes.begin() + static_cast< std::ptrdiff_t >( cut + 1 ) );
        child.genes.insert( child.genes.end(), tail.genes.begin() + static_cast< std::ptrdiff_t >( from + 1 ),
                            tail.genes.end() );
        return child;
    };
    return std::pair{ splice( x, i, y, j ), splice( y, j, x, i ) };
}

// --- the evolutionary loop -------------------------------------------------

namespace
{

struct scored
{
    double fitness;
    double length;
};

class evolution
{
    const real_time_automaton& _m;
    const linear_duration_invariant& _d;
    const ga_config& _cfg;
    std::vector< double > _weights;

public:
    evolution( const real_time_automaton& m, const linear_duration_invariant& d, const ga_config& cfg )
            : _m{ m }, _d{ d }, _cfg{ cfg }, _weights{ state_weights( d, m.states() ) }
    {}

    scored score( const time_stamped_behavior& b ) const
    {
        scored s{ 0.0, 0.0 };
        for ( const auto& g : b.genes )
        {
            s.fitness += _weights[ _m.transition_at( g.transition ).source ] * g.dwell;
            s.length += g.dwell;
        }
        return s;
    }

    bool admissible( const time_stamped_behavior& b, const scored& s ) const
    {
        return b.genes.size() <= _cfg.max_genes && _d.length_in_premise( s.length );
    }

    bool violates( const scored& s ) const
    {
        return _d.length_in_premise( s.length ) && s.fitness > _d.bound + _cfg.tolerance;
    }

    // Indices ordered best first; equal fitness keeps the lexicographically
    // smaller individual ahead.
    static std::vector< std::size_t > rank( const std::vector< time_stamped_behavior >& pop,
                                            const std::vector< scored >& scores )
    {
        std::vector< std::size_t > idx( pop.size() );
        std::iota( idx.begin(), idx.end(), 0 );
        std::sort( idx.begin(), idx.end(), [ & ]( std::size_t a, std::size_t b ) {
            if ( scores[ a ].fitness != scores[ b ].fitness )
                return scores[ a ].fitness > scores[ b ].fitness;
            if ( pop[ a ] != pop[ b ] )
                return pop[ a ] < pop[ b ];
            return a < b;
        } );
        return idx;
    }

    ga_report run()
    {
        _cfg.validate();
        rng_type rng( _cfg.seed );
        behavior_sampler sampler( _m, _d, _cfg );

        ga_report report;
        report.seed = _cfg.seed;
        std::set< time_stamped_behavior > seen_counterexamples;

        std::vector< time_stamped_behavior > pop;
        pop.reserve( _cfg.population_size );
        for ( std::size_t i = 0; i < _cfg.population_size; ++i )
            pop.push_back( sampler.next( rng ) );

        const std::size_t elites = static_cast< std::size_t >(
            std::ceil( _cfg.elite_fraction * static_cast< double >( _cfg.population_size ) ) );

        for ( std::size_t gen = 0; gen < _cfg.max_generations; ++gen )
        {
            std::vector< scored > scores;
            scores.reserve( pop.size() );
            for ( const auto& b : pop )
                scores.push_back( score( b ) );

            auto ranking = rank( pop, scores );
            report.generations_run = gen + 1;
            report.fitness_trace.push_back( scores[ ranking.front() ].fitness );
            report.best_value = scores[ ranking.front() ].fitness;
            report.best_individual = pop[ ranking.front() ];

            bool found = false;
            for ( auto i : ranking )
                if ( violates( scores[ i ] ) && seen_counterexamples.insert( pop[ i ] ).second )
                {
                    report.counterexamples.push_back( pop[ i ] );
                    found = true;
                }
            if ( found && !_cfg.harvest )
                break;

            const auto& trace = report.fitness_trace;
            if ( trace.size() > _cfg.settle_window
                 && std::abs( trace.back() - trace[ trace.size() - 1 - _cfg.settle_window ] ) < 1e-12 )
                break;
            if ( gen + 1 == _cfg.max_generations )
                break;

            // Step 3: offspring, then replace members outside the premise.
            auto offspring = pop;
            std::vector< std::size_t > mates( offspring.size() );
            std::iota( mates.begin(), mates.end(), 0 );
            std::shuffle( mates.begin(), mates.end(), rng );
            for ( std::size_t k = 0; k + 1 < mates.size(); k += 2 )
            {
                if ( !coin( rng, _cfg.p_cut_splice ) )
                    continue;
                auto& x = offspring[ mates[ k ] ];
                auto& y = offspring[ mates[ k + 1 ] ];
                if ( auto children = cut_and_splice( x, y, rng ) )
                {
                    x = std::move( children->first );
                    y = std::move( children->second );
                }
                else
                {
                    x = mutate( x, _m, _d, _cfg, rng );
                    y = mutate( y, _m, _d, _cfg, rng );
                }
            }
            for ( auto& b : offspring )
                if ( coin( rng, _cfg.p_mutation ) )
                    b = mutate( b, _m, _d, _cfg, rng );

            std::vector< scored > offspring_scores;
            offspring_scores.reserve( offspring.size() );
            for ( auto& b : offspring )
            {
                auto s = score( b );
                if ( !admissible( b, s ) )
                {
                    b = sampler.next( rng );
                    s = score( b );
                }
                offspring_scores.push_back( s );
            }

            // Step 4: the least fit of Q make room for the best of P(n).
            auto offspring_ranking = rank( offspring, offspring_scores );
            for ( std::size_t k = 0; k < elites && k < ranking.size(); ++k )
                offspring[ offspring_ranking[ offspring_ranking.size() - 1 - k ] ] = pop[ ranking[ k ] ];
            pop = std::move( offspring );
        }

        report.verdict = report.counterexamples.empty() ? ga_verdict::no_violation_found : ga_verdict::violated;
        report.run_best_values = { report.best_value };
        return report;
    }
};

} // namespace

ga_report run_ga( const real_time_automaton& m, const linear_duration_invariant& d, const ga_config& cfg )
{
    return evolution( m, d, cfg ).run();
}

ga_report check_ldi( const real_time_automaton& m, const linear_duration_invariant& d, const ga_config& cfg )
{
    cfg.validate();
    ga_report total;
    total.seed = cfg.seed;
    std::set< time_stamped_behavior > seen;
    bool first = true;
    for ( std::size_t r = 0; r < cfg.runs; ++r )
    {
        auto run_cfg = cfg;
        run_cfg.seed = cfg.seed + r;
        auto rep = run_ga( m, d, run_cfg );
        total.run_best_values.push_back( rep.best_value );
        for ( auto& ce : rep.counterexamples )
            if ( seen.insert( ce ).second )
                total.counterexamples.push_back( ce );
        if ( first || rep.best_value > total.best_value )
        {
            total.best_value = rep.best_value;
            total.best_individual = std::move( rep.best_individual );
            total.fitness_trace = std::move( rep.fitness_trace );
            total.generations_run = rep.generations_run;
            first = false;
        }
    }
    total.verdict = total.counterexamples.empty() ? ga_verdict::no_violation_found : ga_verdict::violated;
    return total;
}

} // namespace ldimc
