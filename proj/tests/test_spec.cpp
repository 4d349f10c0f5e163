#include "support.hpp"

#include <doctest.h>

using namespace ldimc;
using namespace testing;

TEST_CASE( "gas burner invariant" )
{
    auto d = gas_ldi();
    CHECK( d.lower == 60 );
    CHECK( d.upper == infinity );
    REQUIRE( d.terms.size() == 2 );
    CHECK( d.terms[ 0 ] == duration_term{ 19, "Leak" } );
    CHECK( d.terms[ 1 ] == duration_term{ -1, "NLeak" } );
    CHECK( d.bound == 0 );
}

TEST_CASE( "bound forms and coefficients" )
{
    auto zero = parse_ldi( "0 <= ell <= inf -> 0*int(P) <= 0" );
    CHECK( zero.lower == 0 );
    CHECK( zero.upper == infinity );
    CHECK( zero.terms[ 0 ].coefficient == 0 );

    auto both = parse_ldi( "30 <= ell <= 60 -> 2*int(P) + 3*int(Q) <= 10" );
    CHECK( both.lower == 30 );
    CHECK( both.upper == 60 );
    CHECK( both.bound == 10 );
    CHECK( both.terms[ 1 ] == duration_term{ 3, "Q" } );

    auto upper_only = parse_ldi( "ell <= 5 -> int(P) - int(Q) <= -2.5" );
    CHECK( upper_only.lower == 0 );
    CHECK( upper_only.upper == 5 );
    CHECK( upper_only.terms[ 0 ].coefficient == 1 );
    CHECK( upper_only.terms[ 1 ].coefficient == -1 );
    CHECK( upper_only.bound == -2.5 );

    auto leading = parse_ldi( "ell >= 1 -> -int(P) <= 0" );
    CHECK( leading.terms[ 0 ].coefficient == -1 );
}

TEST_CASE( "invalid invariants" )
{
    CHECK_THROWS_AS( (void)parse_ldi( "ell >= -1 -> int(P) <= 0" ), parse_error );
    CHECK_THROWS_AS( (void)parse_ldi( "5 <= ell <= 4 -> int(P) <= 0" ), parse_error );
    CHECK_THROWS_AS( (void)parse_ldi( "ell >= 1 -> int(P) + 2*int(P) <= 0" ), parse_error );
    CHECK_THROWS_AS( (void)parse_ldi( "ell >= 1 -> int(P) <= inf" ), parse_error );
    CHECK_THROWS_AS( (void)parse_ldi( "ell >= 1 -> int(P)" ), parse_error );
    CHECK_THROWS_AS( (void)parse_ldi( "ell >= 1 int(P) <= 0" ), parse_error );
    CHECK_THROWS_AS( (void)parse_ldi( "ell >= 1 -> int(P) <= 0 extra" ), parse_error );
}

TEST_CASE( "probabilistic invariants" )
{
    auto p = parse_pldi( "[ ell >= 60 -> 19*int(Leak) - 1*int(NLeak) <= 0 ] >= 0.95" );
    CHECK( p.lambda == 0.95 );
    CHECK( p.ldi == gas_ldi() );
    CHECK( parse_pldi( "[ ell >= 1 -> int(P) <= 0 ] >= 0" ).lambda == 0 );
    CHECK( parse_pldi( "[ ell >= 1 -> int(P) <= 0 ] >= 1" ).lambda == 1 );
    CHECK_THROWS_AS( (void)parse_pldi( "[ ell >= 1 -> int(P) <= 0 ] >= 1.5" ), parse_error );
    CHECK_THROWS_AS( (void)parse_pldi( "[ ell >= 1 -> int(P) <= 0 ] >= -0.1" ), parse_error );
    CHECK_THROWS_AS( (void)parse_pldi( "[ 5 <= ell <= 4 -> int(P) <= 0 ] >= 0.5" ), parse_error );
}

TEST_CASE( "render and parse round trip" )
{
    CHECK( parse_ldi( render_ldi( gas_ldi() ) ) == gas_ldi() );
    std::mt19937_64 rng( 3 );
    std::uniform_real_distribution< double > u( 0, 1 );
    for ( int trial = 0; trial < 300; ++trial )
    {
        auto d = random_ldi( rng );
        d.terms[ 0 ].coefficient += u( rng );
        d.bound -= u( rng ) / 3;
        CHECK( parse_ldi( render_ldi( d ) ) == d );
        probabilistic_ldi p{ d, u( rng ) };
        CHECK( parse_pldi( render_pldi( p ) ) == p );
    }
}

TEST_CASE( "state weights bind propositions at check time" )
{
    auto m = gas();
    auto w = state_weights( gas_ldi(), m.states() );
    CHECK( w == std::vector< double >{ -1, 19 } );
    auto unknown = parse_ldi( "ell >= 1 -> int(Smoke) <= 0" );
    CHECK_THROWS_AS( (void)state_weights( unknown, m.states() ), model_error );
}
