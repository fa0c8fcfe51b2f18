/*!
  \file io.hpp
  \brief Text and JSON forms of comparator networks

  Text form: `#` starts a comment, the first non-comment line is `n <count>`,
  every following non-blank line is one layer of comma separated `low:high`
  pairs, 0-indexed.
*/

#pragma once

#include "core.hpp"

#include <nlohmann/json.hpp>

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sortnet
{

/*! \brief Raised on malformed network files. */
class parse_error : public std::runtime_error
{
public:
  parse_error( std::size_t line, std::string const& what )
      : std::runtime_error( "line " + std::to_string( line ) + ": " + what ), line_( line )
  {
  }

  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

namespace detail
{

inline std::string_view trim( std::string_view s )
{
  auto const first = s.find_first_not_of( " \t\r" );
  if ( first == std::string_view::npos )
  {
    return {};
  }
  auto const last = s.find_last_not_of( " \t\r" );
  return s.substr( first, last - first + 1 );
}

inline channel_t parse_channel( std::string_view s, std::size_t line )
{
  s = trim( s );
  channel_t value{};
  auto const [ptr, ec] = std::from_chars( s.data(), s.data() + s.size(), value );
  if ( ec != std::errc{} || ptr != s.data() + s.size() || s.empty() )
  {
    throw parse_error( line, "expected a channel index, got '" + std::string( s ) + "'" );
  }
  return value;
}

} // namespace detail

/*! \brief Reads the text form; the result is validated. */
inline network read_network_text( std::istream& in )
{
  std::string raw;
  std::size_t line_no = 0;
  std::optional<std::size_t> channels;
  std::vector<layer> layers;

  while ( std::getline( in, raw ) )
  {
    ++line_no;
    std::string_view line = raw;
    if ( auto hash = line.find( '#' ); hash != std::string_view::npos )
    {
      line = line.substr( 0, hash );
    }
    line = detail::trim( line );
    if ( line.empty() )
    {
      continue;
    }

    if ( !channels )
    {
      if ( line.size() < 2 || line[0] != 'n' || ( line[1] != ' ' && line[1] != '\t' ) )
      {
        throw parse_error( line_no, "expected header 'n <count>'" );
      }
      channels = detail::parse_channel( line.substr( 1 ), line_no );
      continue;
    }

    std::vector<comparator> cs;
    while ( !line.empty() )
    {
      auto const comma = line.find( ',' );
      auto const item = detail::trim( line.substr( 0, comma ) );
      line = comma == std::string_view::npos ? std::string_view{} : line.substr( comma + 1 );
      auto const colon = item.find( ':' );
      if ( colon == std::string_view::npos )
      {
        throw parse_error( line_no, "expected 'low:high', got '" + std::string( item ) + "'" );
      }
      auto const lo = detail::parse_channel( item.substr( 0, colon ), line_no );
      auto const hi = detail::parse_channel( item.substr( colon + 1 ), line_no );
      if ( lo >= hi )
      {
        throw parse_error( line_no, "comparator " + std::string( item ) + " must satisfy low < high" );
      }
      cs.push_back( { lo, hi } );
    }
    layers.emplace_back( std::move( cs ) );
  }

  if ( !channels )
  {
    throw parse_error( line_no, "missing header 'n <count>'" );
  }
  network net( *channels, std::move( layers ) );
  if ( auto err = validate( net ) )
  {
    throw parse_error( line_no, *err );
  }
  return net;
}

inline network parse_network_text( std::string_view text )
{
  std::istringstream in{ std::string( text ) };
  return read_network_text( in );
}

inline void write_network_text( std::ostream& out, network const& net )
{
  out << "n " << net.channels() << '\n';
  for ( auto const& l : net.layers() )
  {
    bool first = true;
    for ( auto const& c : l )
    {
      out << ( first ? "" : "," ) << c.low << ':' << c.high;
      first = false;
    }
    out << '\n';
  }
}

inline std::string to_text( network const& net )
{
  std::ostringstream out;
  write_network_text( out, net );
  return out.str();
}

/*! \brief JSON mirror: `{"n": 4, "layers": [[[0,1],[2,3]], ...]}`. */
inline nlohmann::json to_json( network const& net )
{
  auto layers = nlohmann::json::array();
  for ( auto const& l : net.layers() )
  {
    auto js = nlohmann::json::array();
    for ( auto const& c : l )
    {
      js.push_back( { c.low, c.high } );
    }
    layers.push_back( std::move( js ) );
  }
  return { { "n", net.channels() }, { "layers", std::move( layers ) } };
}

inline network network_from_json( nlohmann::json const& js )
{
  try
  {
    std::vector<layer> layers;
    for ( auto const& l : js.at( "layers" ) )
    {
      std::vector<comparator> cs;
      for ( auto const& c : l )
      {
        if ( c.size() != 2u )
        {
          throw parse_error( 0, "comparator must be a [low, high] pair" );
        }
        cs.push_back( { c[0].get<channel_t>(), c[1].get<channel_t>() } );
      }
      layers.emplace_back( std::move( cs ) );
    }
    network net( js.at( "n" ).get<std::size_t>(), std::move( layers ) );
    if ( auto err = validate( net ) )
    {
      throw parse_error( 0, *err );
    }
    return net;
  }
  catch ( nlohmann::json::exception const& e )
  {
    throw parse_error( 0, e.what() );
  }
}

/*! \brief Reads either form, deciding by the first non-blank character. */
inline network read_network( std::istream& in )
{
  std::string const content{ std::istreambuf_iterator<char>( in ), std::istreambuf_iterator<char>() };
  auto const body = detail::trim( content );
  if ( !body.empty() && body.front() == '{' )
  {
    try
    {
      return network_from_json( nlohmann::json::parse( body ) );
    }
    catch ( nlohmann::json::parse_error const& e )
    {
      throw parse_error( 0, e.what() );
    }
  }
  return parse_network_text( content );
}

} // namespace sortnet
