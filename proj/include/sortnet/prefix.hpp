/*!
  \file prefix.hpp
  \brief Hand-crafted first layers handed to the synthesizer

  A prefix is an ordinary `network`; the encoder fixes its layers and lets the
  solver fill in the rest.
*/

#pragma once

#include "core.hpp"
#include "generators.hpp"

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace sortnet
{

/*! \brief Partial-order gadgets on blocks of 2, 4 or 8 channels.
 *
 * Block of 2: one comparator.  Block of 4: pairs, then (0,2),(1,3).
 * Block of 8: pairs, then the 4-block pattern on both halves, then
 * (0,4),(1,5),(2,6),(3,7).  All blocks start in layer 0 and run in parallel;
 * the prefix is as deep as the deepest block.
 */
inline network poset_prefix( std::size_t block_size, std::size_t n, std::span<channel_t const> placement )
{
  std::size_t depth = 0;
  switch ( block_size )
  {
  case 2u: depth = 1u; break;
  case 4u: depth = 2u; break;
  case 8u: depth = 3u; break;
  default:
    throw std::invalid_argument( "poset_prefix: block size must be 2, 4 or 8" );
  }

  std::vector<std::vector<comparator>> rows( depth );
  std::uint64_t used = 0;
  for ( auto start : placement )
  {
    if ( start + block_size > n )
    {
      throw std::invalid_argument( "poset_prefix: block at channel " + std::to_string( start ) + " does not fit in " + std::to_string( n ) + " channels" );
    }
    for ( std::size_t k = 0; k < block_size; ++k )
    {
      auto const bit = std::uint64_t{ 1 } << ( start + k );
      if ( used & bit )
      {
        throw std::invalid_argument( "poset_prefix: blocks overlap at channel " + std::to_string( start + k ) );
      }
      used |= bit;
    }

    auto add = [&rows, start]( std::size_t t, channel_t a, channel_t b ) {
      rows[t].push_back( { start + a, start + b } );
    };
    for ( channel_t k = 0; k < block_size; k += 2u )
    {
      add( 0, k, k + 1u );
    }
    if ( block_size >= 4u )
    {
      for ( channel_t k = 0; k < block_size; k += 4u )
      {
        add( 1, k, k + 2u );
        add( 1, k + 1u, k + 3u );
      }
    }
    if ( block_size == 8u )
    {
      for ( channel_t k = 0; k < 4u; ++k )
      {
        add( 2, k, k + 4u );
      }
    }
  }

  if ( n > max_width )
  {
    throw std::invalid_argument( "poset_prefix: too many channels" );
  }
  network net( n );
  if ( placement.empty() )
  {
    return net;
  }
  for ( auto& r : rows )
  {
    net.add_layer( layer( std::move( r ) ) );
  }
  return net;
}

inline network poset_prefix( std::size_t block_size, std::size_t n, std::initializer_list<channel_t> placement )
{
  return poset_prefix( block_size, n, std::span<channel_t const>( placement.begin(), placement.size() ) );
}

/*! \brief The maximal first layer (0,1),(2,3),... with floor(n/2) comparators. */
inline layer canonical_first_layer( std::size_t n )
{
  if ( n < 2u )
  {
    throw std::invalid_argument( "canonical_first_layer: need at least 2 channels" );
  }
  std::vector<comparator> cs;
  for ( channel_t k = 0; k + 1u < n; k += 2u )
  {
    cs.push_back( { k, k + 1u } );
  }
  return layer( std::move( cs ) );
}

/*! \brief One-layer prefix holding `canonical_first_layer(n)`; empty for n < 2. */
inline network canonical_prefix( std::size_t n )
{
  network net( n );
  if ( n >= 2u )
  {
    net.add_layer( canonical_first_layer( n ) );
  }
  return net;
}

inline constexpr std::array<std::string_view, 2> figure_prefix_names = { "fig2-3layer", "fig3-4layer" };

/*! \brief Leading layers of the published networks.
 *
 * `fig2-3layer` is layers 1-3 of the 17-channel network, `fig3-4layer` layers
 * 1-4 of the 20-channel one.
 */
inline network figure_prefix( std::string_view name )
{
  if ( name == "fig2-3layer" )
  {
    return known_network( "paper17d10" ).prefix( 3u );
  }
  if ( name == "fig3-4layer" )
  {
    return known_network( "paper20d11" ).prefix( 4u );
  }
  throw std::invalid_argument( "unknown prefix '" + std::string( name ) + "'" );
}

} // namespace sortnet
