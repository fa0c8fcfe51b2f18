/*!
  \file generators.hpp
  \brief Baseline constructions and transcriptions of published networks
*/

#pragma once

#include "core.hpp"

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sortnet
{

/*! \brief Batcher's odd-even mergesort on n channels.
 *
 * The network for the next power of two is built step by step; every
 * comparator reaching a channel >= n is dropped, which is exact because those
 * channels can be taken to carry +inf.  Each (merge size, distance) step is one
 * layer, so n = 2^k gives depth k(k+1)/2.
 */
inline network batcher_oddeven_sort( std::size_t n )
{
  if ( n == 0u )
  {
    throw std::invalid_argument( "batcher_oddeven_sort: n must be at least 1" );
  }
  network net( n );
  for ( std::size_t p = 1; p < n; p *= 2u )
  {
    for ( std::size_t k = p; k >= 1u; k /= 2u )
    {
      std::vector<comparator> cs;
      for ( std::size_t j = k % p; j + k < n; j += 2u * k )
      {
        for ( std::size_t i = 0; i < k && i + j + k < n; ++i )
        {
          if ( ( i + j ) / ( 2u * p ) == ( i + j + k ) / ( 2u * p ) )
          {
            cs.push_back( { static_cast<channel_t>( i + j ), static_cast<channel_t>( i + j + k ) } );
          }
        }
      }
      if ( !cs.empty() )
      {
        net.add_layer( layer( std::move( cs ) ) );
      }
    }
  }
  return net;
}

namespace detail
{

using one_based_layer = std::vector<std::pair<int, int>>;

inline network from_one_based( std::size_t n, std::vector<one_based_layer> const& rows )
{
  network net( n );
  for ( auto const& row : rows )
  {
    std::vector<comparator> cs;
    for ( auto [a, b] : row )
    {
      cs.push_back( { static_cast<channel_t>( a - 1 ), static_cast<channel_t>( b - 1 ) } );
    }
    net.add_layer( layer( std::move( cs ) ) );
  }
  return net;
}

// 17 channels, 10 layers; wires numbered from 1 as drawn
inline std::vector<one_based_layer> const& rows_17_10()
{
  static std::vector<one_based_layer> const rows = {
      { { 1, 2 }, { 3, 4 }, { 5, 6 }, { 7, 8 }, { 9, 10 }, { 11, 12 }, { 13, 14 }, { 15, 16 } },
      { { 1, 3 }, { 2, 4 }, { 5, 7 }, { 6, 8 }, { 9, 11 }, { 10, 12 }, { 13, 15 }, { 14, 16 } },
      { { 1, 5 }, { 2, 6 }, { 3, 7 }, { 4, 8 }, { 9, 13 }, { 10, 14 }, { 11, 15 }, { 12, 16 } },
      { { 1, 9 }, { 2, 3 }, { 4, 16 }, { 5, 11 }, { 6, 12 }, { 7, 15 }, { 10, 13 }, { 14, 17 } },
      { { 1, 16 }, { 2, 10 }, { 3, 13 }, { 4, 17 }, { 6, 7 }, { 8, 9 }, { 11, 14 }, { 12, 15 } },
      { { 2, 8 }, { 3, 5 }, { 4, 11 }, { 6, 10 }, { 7, 12 }, { 9, 15 }, { 13, 14 }, { 16, 17 } },
      { { 2, 15 }, { 4, 6 }, { 5, 8 }, { 7, 13 }, { 9, 14 }, { 10, 11 }, { 12, 16 } },
      { { 2, 4 }, { 3, 5 }, { 6, 7 }, { 8, 10 }, { 9, 12 }, { 11, 13 }, { 14, 16 }, { 15, 17 } },
      { { 2, 3 }, { 4, 5 }, { 6, 8 }, { 7, 10 }, { 9, 11 }, { 12, 13 }, { 14, 15 }, { 16, 17 } },
      { { 1, 2 }, { 3, 4 }, { 5, 6 }, { 7, 8 }, { 9, 10 }, { 11, 12 }, { 13, 14 }, { 15, 16 } } };
  return rows;
}

// 20 channels, 11 layers; wires numbered from 1 as drawn
inline std::vector<one_based_layer> const& rows_20_11()
{
  static std::vector<one_based_layer> const rows = {
      { { 1, 2 }, { 3, 4 }, { 5, 6 }, { 7, 8 }, { 9, 10 }, { 11, 12 }, { 13, 14 }, { 15, 16 }, { 17, 18 }, { 19, 20 } },
      { { 1, 3 }, { 2, 4 }, { 5, 7 }, { 6, 8 }, { 9, 11 }, { 10, 12 }, { 13, 15 }, { 14, 16 }, { 17, 19 }, { 18, 20 } },
      { { 1, 5 }, { 2, 6 }, { 3, 7 }, { 4, 8 }, { 10, 11 }, { 13, 17 }, { 14, 18 }, { 15, 19 }, { 16, 20 } },
      { { 1, 13 }, { 2, 14 }, { 3, 15 }, { 4, 16 }, { 5, 17 }, { 6, 18 }, { 7, 19 }, { 8, 20 } },
      { { 1, 18 }, { 2, 3 }, { 4, 9 }, { 5, 15 }, { 6, 11 }, { 7, 10 }, { 8, 14 }, { 12, 17 }, { 16, 19 } },
      { { 1, 20 }, { 2, 19 }, { 3, 4 }, { 5, 13 }, { 6, 12 }, { 7, 8 }, { 9, 10 }, { 11, 15 }, { 14, 18 }, { 16, 17 } },
      { { 2, 3 }, { 4, 7 }, { 5, 20 }, { 6, 13 }, { 8, 11 }, { 9, 12 }, { 10, 14 }, { 15, 16 }, { 17, 19 } },
      { { 1, 2 }, { 3, 6 }, { 4, 5 }, { 7, 13 }, { 8, 9 }, { 10, 15 }, { 11, 12 }, { 14, 17 }, { 16, 18 }, { 19, 20 } },
      { { 2, 4 }, { 3, 19 }, { 5, 8 }, { 6, 7 }, { 9, 11 }, { 10, 13 }, { 12, 16 }, { 14, 15 }, { 17, 18 } },
      { { 1, 2 }, { 3, 4 }, { 5, 6 }, { 7, 8 }, { 9, 10 }, { 11, 13 }, { 12, 14 }, { 15, 16 }, { 17, 19 }, { 18, 20 } },
      { { 4, 5 }, { 6, 7 }, { 8, 9 }, { 10, 11 }, { 12, 13 }, { 14, 15 }, { 16, 17 }, { 18, 19 } } };
  return rows;
}

} // namespace detail

/*! \brief Channel whose removal leaves the fewest comparators, lowest index on ties. */
inline channel_t cheapest_channel_to_remove( network const& net )
{
  std::optional<std::pair<std::size_t, channel_t>> best;
  for ( channel_t c = 0; c < net.channels(); ++c )
  {
    auto const size = remove_channel( net, c ).size();
    if ( !best || size < best->first )
    {
      best = { size, c };
    }
  }
  if ( !best )
  {
    throw std::invalid_argument( "cheapest_channel_to_remove: network has no channels" );
  }
  return best->second;
}

inline constexpr std::array<std::string_view, 3> known_network_names = { "paper17d10", "paper20d11", "paper19d11" };

/*! \brief Published networks by name.
 *
 * - `paper17d10`: 17 channels, depth 10
 * - `paper20d11`: 20 channels, depth 11
 * - `paper19d11`: `paper20d11` with one channel removed (see `cheapest_channel_to_remove`)
 */
inline network known_network( std::string_view name )
{
  if ( name == "paper17d10" )
  {
    return detail::from_one_based( 17u, detail::rows_17_10() );
  }
  if ( name == "paper20d11" )
  {
    return detail::from_one_based( 20u, detail::rows_20_11() );
  }
  if ( name == "paper19d11" )
  {
    auto const base = known_network( "paper20d11" );
    return remove_channel( base, cheapest_channel_to_remove( base ) );
  }
  throw std::invalid_argument( "unknown network '" + std::string( name ) + "'" );
}

} // namespace sortnet
