#pragma once

// Tokenizer shared by the model and formula parsers. Not installed.

#include "ldimc/error.hpp"

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ldimc::detail
{

enum class token_kind
{
    identifier,
    number,
    punct,
    end
};

struct token
{
    token_kind kind = token_kind::end;
    std::string text;
    double value = 0.0;    // numbers only
    std::size_t column = 0;
    std::size_t line = 0;
};

// Splits one line (comments already removed) into tokens. Multi-character
// punctuation: "->", "<=", ">=".
std::vector< token > tokenize( std::string_view line, std::size_t line_no );

// Tokenizes every line of `text`, dropping comments; a single end token closes the result.
std::vector< token > tokenize_text( std::string_view text );

// Strips a trailing '#' comment.
std::string_view strip_comment( std::string_view line );

// Cursor over a token vector with the usual expect/accept helpers.
class token_stream
{
    std::vector< token > _tokens;
    std::size_t _pos = 0;
    std::size_t _line;

public:
    token_stream( std::vector< token > tokens, std::size_t line );

    [[nodiscard]] const token& peek() const { return _tokens[ _pos ]; }
    [[nodiscard]] bool at_end() const { return peek().kind == token_kind::end; }
    const token& next();

    bool accept_punct( std::string_view p );
    bool accept_word( std::string_view w );
    void expect_punct( std::string_view p );
    void expect_word( std::string_view w );
    std::string expect_identifier( std::string_view what );
    // Nonnegative unless `allow_sign`; accepts the word "inf" when `allow_inf`.
    double expect_real( std::string_view what, bool allow_sign = false, bool allow_inf = false );
    void expect_end();

    [[noreturn]] void fail( const std::string& msg ) const;
    [[noreturn]] void fail_at( const token& t, const std::string& msg ) const;
};

} // namespace ldimc::detail
