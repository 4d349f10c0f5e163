#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ldimc
{

// Malformed model or formula text. Line and column are 1-based; 0 means unknown.
class parse_error : public std::runtime_error
{
    std::size_t _line;
    std::size_t _column;

public:
    parse_error( const std::string& what, std::size_t line = 0, std::size_t column = 0 );

    [[nodiscard]] std::size_t line() const { return _line; }
    [[nodiscard]] std::size_t column() const { return _column; }
};

// Well-formed input that violates a structural invariant (undeclared state,
// probability mass, unknown proposition, ...).
class model_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A search gave up because a configured budget was exhausted.
class resource_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// No behavior satisfying the length premise could be constructed.
class infeasible_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// A numerical invariant failed (singular system after classification, solver
// disagreement). The message carries a dump of the offending system.
class internal_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace ldimc
