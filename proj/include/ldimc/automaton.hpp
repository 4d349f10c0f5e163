#pragma once

#include "ldimc/error.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ldimc
{

using state_index = std::size_t;
using transition_index = std::size_t;

inline constexpr double infinity = std::numeric_limits< double >::infinity();

// Closed interval [lo, hi] on the nonnegative reals; hi may be infinity.
struct interval
{
    double lo = 0.0;
    double hi = infinity;

    [[nodiscard]] bool bounded() const { return hi != infinity; }
    [[nodiscard]] bool contains( double t ) const { return lo <= t && t <= hi; }

    friend bool operator==( const interval&, const interval& ) = default;
};

struct state
{
    std::string id;
    std::vector< std::string > labels;    // sorted, unique

    [[nodiscard]] bool has_label( std::string_view prop ) const;

    friend bool operator==( const state&, const state& ) = default;
};

struct transition
{
    state_index source = 0;
    state_index target = 0;
    interval dwell;

    friend bool operator==( const transition&, const transition& ) = default;
};

// Single-clock automaton: every state is initial and accepting, and the clock
// is reset by each transition, so a dwell is simply the time spent before
// taking the transition.
class real_time_automaton
{
    std::vector< state > _states;
    std::vector< transition > _transitions;
    std::vector< std::vector< transition_index > > _outgoing;

public:
    real_time_automaton() = default;
    real_time_automaton( std::vector< state > states, std::vector< transition > transitions );

    [[nodiscard]] std::span< const state > states() const { return _states; }
    [[nodiscard]] std::span< const transition > transitions() const { return _transitions; }
    [[nodiscard]] const state& state_at( state_index s ) const { return _states.at( s ); }
    [[nodiscard]] const transition& transition_at( transition_index t ) const { return _transitions.at( t ); }

    [[nodiscard]] std::optional< state_index > find_state( std::string_view id ) const;
    [[nodiscard]] state_index state_of( std::string_view id ) const;    // throws model_error

    // Outgoing transitions of `s`, in declaration order.
    [[nodiscard]] std::span< const transition_index > successors( state_index s ) const;
    [[nodiscard]] std::span< const transition_index > successors( std::string_view id ) const;

    // Sorted union of all state labels.
    [[nodiscard]] std::vector< std::string > propositions() const;

    friend bool operator==( const real_time_automaton& a, const real_time_automaton& b )
    {
        return a._states == b._states && a._transitions == b._transitions;
    }
};

struct probabilistic_edge
{
    state_index target = 0;
    double probability = 0.0;

    friend bool operator==( const probabilistic_edge&, const probabilistic_edge& ) = default;
};

// Dwell intervals are attached to states here, not to edges.
class probabilistic_automaton
{
    std::vector< state > _states;
    std::vector< interval > _dwell;
    std::vector< std::vector< probabilistic_edge > > _distribution;

public:
    static constexpr double sum_tolerance = 1e-9;

    probabilistic_automaton() = default;
    probabilistic_automaton( std::vector< state > states, std::vector< interval > dwell,
                             std::vector< std::vector< probabilistic_edge > > distribution );

    [[nodiscard]] std::span< const state > states() const { return _states; }
    [[nodiscard]] const state& state_at( state_index s ) const { return _states.at( s ); }
    [[nodiscard]] const interval& dwell( state_index s ) const { return _dwell.at( s ); }
    [[nodiscard]] std::span< const probabilistic_edge > distribution( state_index s ) const
    {
        return _distribution.at( s );
    }
    // p_s(s'), zero when s' is not in the support.
    [[nodiscard]] double probability( state_index s, state_index target ) const;

    [[nodiscard]] std::optional< state_index > find_state( std::string_view id ) const;
    [[nodiscard]] state_index state_of( std::string_view id ) const;
    [[nodiscard]] std::vector< std::string > propositions() const;

    friend bool operator==( const probabilistic_automaton&, const probabilistic_automaton& ) = default;
};

using model = std::variant< real_time_automaton, probabilistic_automaton >;

// Parses the line-oriented model format. The kind is inferred from `prob`
// annotations and `dwell` lines; mixing the two styles is rejected.
[[nodiscard]] model parse_model( std::string_view text );

[[nodiscard]] std::string render_model( const real_time_automaton& m );
[[nodiscard]] std::string render_model( const probabilistic_automaton& m );
[[nodiscard]] std::string render_model( const model& m );

// One plain transition per positive-probability edge, inheriting the source dwell.
// Transition order follows state order, then distribution declaration order.
[[nodiscard]] real_time_automaton strip_probabilities( const probabilistic_automaton& m );

// Adjacency of consecutive transitions. Empty sequences are not behaviors.
[[nodiscard]] bool is_behavior( const real_time_automaton& m, std::span< const transition_index > seq );

// Formats a real with the shortest representation that parses back exactly;
// infinity renders as "inf".
[[nodiscard]] std::string format_real( double v );

} // namespace ldimc
