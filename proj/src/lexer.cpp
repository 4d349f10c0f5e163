#include "lexer.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace ldimc
{

namespace
{

std::string located( const std::string& what, std::size_t line, std::size_t column )
{
    if ( line == 0 )
        return what;
    return std::to_string( line ) + ":" + std::to_string( column ) + ": " + what;
}

} // namespace

parse_error::parse_error( const std::string& what, std::size_t line, std::size_t column )
        : std::runtime_error( located( what, line, column ) ), _line{ line }, _column{ column }
{}

} // namespace ldimc

namespace ldimc::detail
{

namespace
{

bool is_word_char( char c )
{
    return std::isalnum( static_cast< unsigned char >( c ) ) || c == '_';
}

} // namespace

std::string_view strip_comment( std::string_view line )
{
    auto hash = line.find( '#' );
    if ( hash != std::string_view::npos )
        line = line.substr( 0, hash );
    return line;
}

std::vector< token > tokenize( std::string_view line, std::size_t line_no )
{
    std::vector< token > out;
    std::size_t i = 0;
    while ( i < line.size() )
    {
        char c = line[ i ];
        std::size_t column = i + 1;
        if ( std::isspace( static_cast< unsigned char >( c ) ) )
        {
            ++i;
            continue;
        }

        if ( std::isdigit( static_cast< unsigned char >( c ) ) || c == '.' )
        {
            double value = 0.0;
            auto [ ptr, ec ] = std::from_chars( line.data() + i, line.data() + line.size(), value );
            std::size_t end = ptr - line.data();
            if ( ec == std::errc{} && ( end == line.size() || !is_word_char( line[ end ] ) ) )
            {
                out.push_back( { token_kind::number, std::string( line.substr( i, end - i ) ), value, column, line_no } );
                i = end;
                continue;
            }
            if ( c == '.' )
                throw parse_error( "malformed number", line_no, column );
            // digits followed by letters: an identifier such as "2a"
        }

        if ( is_word_char( c ) )
        {
            std::size_t end = i;
            while ( end < line.size() && is_word_char( line[ end ] ) )
                ++end;
            out.push_back( { token_kind::identifier, std::string( line.substr( i, end - i ) ), 0.0, column, line_no } );
            i = end;
            continue;
        }

        if ( i + 1 < line.size() )
        {
            auto two = line.substr( i, 2 );
            if ( two == "->" || two == "<=" || two == ">=" )
            {
                out.push_back( { token_kind::punct, std::string( two ), 0.0, column, line_no } );
                i += 2;
                continue;
            }
        }

        static constexpr std::string_view single = "[](),*+-=";
        if ( single.find( c ) != std::string_view::npos )
        {
            out.push_back( { token_kind::punct, std::string( 1, c ), 0.0, column, line_no } );
            ++i;
            continue;
        }

        throw parse_error( std::string( "unexpected character '" ) + c + "'", line_no, column );
    }
    out.push_back( { token_kind::end, "", 0.0, line.size() + 1, line_no } );
    return out;
}

std::vector< token > tokenize_text( std::string_view text )
{
    std::vector< token > all;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    token last_end{ token_kind::end, "", 0.0, 1, 1 };
    while ( pos <= text.size() )
    {
        auto nl = text.find( '\n', pos );
        auto raw = text.substr( pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos );
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        auto toks = tokenize( strip_comment( raw ), ++line_no );
        last_end = toks.back();
        toks.pop_back();
        all.insert( all.end(), toks.begin(), toks.end() );
    }
    if ( !all.empty() )
        last_end = { token_kind::end, "", 0.0, all.back().column + all.back().text.size(), all.back().line };
    all.push_back( last_end );
    return all;
}

token_stream::token_stream( std::vector< token > tokens, std::size_t line )
        : _tokens{ std::move( tokens ) }, _line{ line }
{
    if ( _tokens.empty() || _tokens.back().kind != token_kind::end )
        _tokens.push_back( { token_kind::end, "", 0.0, 0 } );
}

const token& token_stream::next()
{
    const token& t = _tokens[ _pos ];
    if ( t.kind != token_kind::end )
        ++_pos;
    return t;
}

bool token_stream::accept_punct( std::string_view p )
{
    if ( peek().kind == token_kind::punct && peek().text == p )
    {
        next();
        return true;
    }
    return false;
}

bool token_stream::accept_word( std::string_view w )
{
    if ( peek().kind == token_kind::identifier && peek().text == w )
    {
        next();
        return true;
    }
    return false;
}

void token_stream::expect_punct( std::string_view p )
{
    if ( !accept_punct( p ) )
        fail( "expected '" + std::string( p ) + "'" );
}

void token_stream::expect_word( std::string_view w )
{
    if ( !accept_word( w ) )
        fail( "expected '" + std::string( w ) + "'" );
}

std::string token_stream::expect_identifier( std::string_view what )
{
    const token& t = peek();
    bool digits_only = t.kind == token_kind::number
                       && t.text.find_first_not_of( "0123456789" ) == std::string::npos;
    if ( t.kind != token_kind::identifier && !digits_only )
        fail( "expected " + std::string( what ) );
    return next().text;
}

double token_stream::expect_real( std::string_view what, bool allow_sign, bool allow_inf )
{
    bool negative = false;
    if ( allow_sign )
    {
        if ( accept_punct( "-" ) )
            negative = true;
        else
            accept_punct( "+" );
    }
    const token& t = peek();
    double v = 0.0;
    if ( t.kind == token_kind::number )
        v = t.value;
    else if ( allow_inf && t.kind == token_kind::identifier && t.text == "inf" )
        v = std::numeric_limits< double >::infinity();
    else
        fail( "expected " + std::string( what ) );
    next();
    return negative ? -v : v;
}

void token_stream::expect_end()
{
    if ( !at_end() )
        fail( "unexpected trailing input '" + peek().text + "'" );
}

void token_stream::fail( const std::string& msg ) const
{
    fail_at( peek(), msg );
}

void token_stream::fail_at( const token& t, const std::string& msg ) const
{
    throw parse_error( msg, t.line ? t.line : _line, t.column );
}

} // namespace ldimc::detail
