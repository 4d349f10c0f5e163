#include "support.hpp"

#include <set>

#include <doctest.h>

using namespace ldimc;
using namespace testing;

TEST_CASE( "gas burner parses as a plain automaton" )
{
    auto m = gas();
    CHECK( m.states().size() == 2 );
    CHECK( m.transitions().size() == 2 );
    CHECK( m.state_at( 0 ).labels == std::vector< std::string >{ "NLeak" } );
    CHECK( m.transition_at( rho1 ).source == 0 );
    CHECK( m.transition_at( rho1 ).target == 1 );
    CHECK( m.transition_at( rho1 ).dwell == interval{ 30, infinity } );
    CHECK( m.transition_at( rho2 ).dwell == interval{ 0, 1 } );
    CHECK( m.propositions() == std::vector< std::string >{ "Leak", "NLeak" } );
}

TEST_CASE( "probabilistic gas burner" )
{
    auto m = gas_prob();
    CHECK( m.dwell( 0 ) == interval{ 30, infinity } );
    CHECK( m.dwell( 1 ) == interval{ 0, 1 } );
    CHECK( m.probability( 0, 0 ) == 0.9 );
    CHECK( m.probability( 0, 1 ) == 0.1 );
    CHECK( m.probability( 1, 0 ) == 0.8 );
    CHECK( m.probability( 1, 1 ) == 0.2 );
}

TEST_CASE( "minimal model" )
{
    auto parsed = parse_model( "state only labels P\n" );
    auto& m = std::get< real_time_automaton >( parsed );
    CHECK( m.states().size() == 1 );
    CHECK( m.transitions().empty() );
    CHECK( m.successors( "only" ).empty() );
}

TEST_CASE( "comments, blank lines and forward references" )
{
    auto parsed = parse_model( "# header\n\ntrans a -> b [1, 2]  # edge\nstate a labels P\nstate b\n" );
    auto& m = std::get< real_time_automaton >( parsed );
    CHECK( m.transitions().size() == 1 );
    CHECK( m.state_at( 1 ).labels.empty() );
}

namespace
{

parse_error parse_failure( const char* text )
{
    try
    {
        (void)parse_model( text );
    }
    catch ( const parse_error& e )
    {
        return e;
    }
    FAIL( "expected a parse error for: " << text );
    return parse_error( "unreachable" );
}

} // namespace

TEST_CASE( "model errors carry positions" )
{
    SUBCASE( "syntax" )
    {
        auto e = parse_failure( "state a\ntrans a => a [1, 2]\n" );
        CHECK( e.line() == 2 );
        CHECK( e.column() > 0 );
    }
    SUBCASE( "undeclared state" )
    {
        auto e = parse_failure( "state a\ntrans a -> ghost [1, 2]\n" );
        CHECK( e.line() == 2 );
    }
    SUBCASE( "duplicate id" ) { CHECK( parse_failure( "state a\nstate a\n" ).line() == 2 ); }
    SUBCASE( "reversed interval" ) { CHECK( parse_failure( "state a\ntrans a -> a [3, 2]\n" ).line() == 2 ); }
    SUBCASE( "probability mass" )
    {
        auto e = parse_failure( "state a\nstate b\ndwell a [0, 1]\ndwell b [0, 1]\n"
                                "trans a -> b prob 0.5\ntrans a -> a prob 0.4\ntrans b -> a prob 1\n" );
        CHECK( e.line() == 1 );
    }
    SUBCASE( "mixed kinds" )
    {
        parse_failure( "state a\ndwell a [0, 1]\ntrans a -> a prob 1\ntrans a -> a [0, 1]\n" );
    }
    SUBCASE( "missing dwell" ) { parse_failure( "state a\ntrans a -> a prob 1\n" ); }
    SUBCASE( "duplicate transition" ) { parse_failure( "state a\ntrans a -> a [0, 1]\ntrans a -> a [0, 1]\n" ); }
    SUBCASE( "negative bound" ) { parse_failure( "state a\ntrans a -> a [-1, 1]\n" ); }
    SUBCASE( "probability out of range" )
    {
        parse_failure( "state a\ndwell a [0, 1]\ntrans a -> a prob 1.5\n" );
    }
}

TEST_CASE( "parallel transitions with distinct intervals are allowed" )
{
    auto parsed = parse_model( "state a\ntrans a -> a [0, 1]\ntrans a -> a [2, 3]\n" );
    CHECK( std::get< real_time_automaton >( parsed ).transitions().size() == 2 );
}

TEST_CASE( "probability sums within tolerance" )
{
    CHECK_NOTHROW( (void)parse_model( "state a\nstate b\ndwell a [0, 1]\ndwell b [0, 1]\n"
                                      "trans a -> b prob 0.3333333333\ntrans a -> a prob 0.6666666667\n"
                                      "trans b -> a prob 1\n" ) );
}

TEST_CASE( "strip_probabilities" )
{
    auto m = strip_probabilities( gas_prob() );
    REQUIRE( m.transitions().size() == 4 );
    CHECK( m.transition_at( 0 ) == transition{ 0, 0, { 30, infinity } } );
    CHECK( m.transition_at( 1 ) == transition{ 0, 1, { 30, infinity } } );
    CHECK( m.transition_at( 2 ) == transition{ 1, 0, { 0, 1 } } );
    CHECK( m.transition_at( 3 ) == transition{ 1, 1, { 0, 1 } } );
    CHECK( m.successors( "s2" ).size() == 2 );

    SUBCASE( "identity distribution" )
    {
        auto one = std::get< probabilistic_automaton >( parse_model( "state a\ndwell a [1, 2]\ntrans a -> a prob 1\n" ) );
        auto s = strip_probabilities( one );
        REQUIRE( s.transitions().size() == 1 );
        CHECK( s.transition_at( 0 ) == transition{ 0, 0, { 1, 2 } } );
    }
}

TEST_CASE( "strip preserves states, labels and positive edges" )
{
    std::mt19937_64 rng( 11 );
    for ( int trial = 0; trial < 100; ++trial )
    {
        auto chain = random_chain( rng, 4 );
        std::vector< state > states;
        std::vector< interval > dwell;
        for ( std::size_t s = 0; s < chain.size(); ++s )
        {
            states.push_back( { chain.states[ s ], { "P" } } );
            dwell.push_back( { static_cast< double >( s ), static_cast< double >( s ) + 1 } );
        }
        probabilistic_automaton pm( states, dwell, chain.rows );
        auto m = strip_probabilities( pm );
        CHECK( std::equal( m.states().begin(), m.states().end(), pm.states().begin(), pm.states().end() ) );
        std::set< std::pair< state_index, state_index > > expected, got;
        for ( std::size_t s = 0; s < chain.size(); ++s )
            for ( const auto& e : chain.rows[ s ] )
                expected.insert( { s, e.target } );
        for ( const auto& t : m.transitions() )
        {
            got.insert( { t.source, t.target } );
            CHECK( t.dwell == pm.dwell( t.source ) );
        }
        CHECK( got == expected );
        CHECK( got.size() == m.transitions().size() );
    }
}

TEST_CASE( "successors and is_behavior" )
{
    auto m = gas();
    auto s1 = m.successors( "s1" );
    REQUIRE( s1.size() == 1 );
    CHECK( s1[ 0 ] == rho1 );
    CHECK_THROWS_AS( (void)m.successors( "s9" ), model_error );

    std::vector< transition_index > good{ rho1, rho2, rho1 }, bad{ rho1, rho1 }, single{ rho2 }, empty;
    CHECK( is_behavior( m, good ) );
    CHECK_FALSE( is_behavior( m, bad ) );
    CHECK( is_behavior( m, single ) );
    CHECK_FALSE( is_behavior( m, empty ) );
    std::vector< transition_index > out_of_range{ 7 };
    CHECK_THROWS_AS( (void)is_behavior( m, out_of_range ), model_error );
}

TEST_CASE( "render and parse round trip" )
{
    CHECK( std::get< real_time_automaton >( parse_model( render_model( gas() ) ) ) == gas() );
    CHECK( std::get< probabilistic_automaton >( parse_model( render_model( gas_prob() ) ) ) == gas_prob() );

    std::mt19937_64 rng( 5 );
    for ( int trial = 0; trial < 200; ++trial )
    {
        auto m = random_rta( rng, 1 + trial % 5 );
        auto back = parse_model( render_model( m ) );
        CHECK( std::get< real_time_automaton >( back ) == m );
    }
    for ( int trial = 0; trial < 100; ++trial )
    {
        auto chain = random_chain( rng, 1 + trial % 4 );
        std::vector< state > states;
        std::vector< interval > dwell;
        for ( std::size_t s = 0; s < chain.size(); ++s )
        {
            states.push_back( { chain.states[ s ], {} } );
            dwell.push_back( { 0.125 * static_cast< double >( s ), s % 2 ? infinity : 7.3 } );
        }
        probabilistic_automaton pm( states, dwell, chain.rows );
        CHECK( std::get< probabilistic_automaton >( parse_model( render_model( pm ) ) ) == pm );
    }
}

TEST_CASE( "format_real" )
{
    CHECK( format_real( infinity ) == "inf" );
    CHECK( format_real( 30 ) == "30" );
    CHECK( format_real( 0.1 ) == "0.1" );
    CHECK( std::stod( format_real( 1.0 / 3.0 ) ) == 1.0 / 3.0 );
}
