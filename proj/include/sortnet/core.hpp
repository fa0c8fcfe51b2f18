/*!
  \file core.hpp
  \brief Comparator networks, binary words and their evaluation semantics
*/

#pragma once

#include <algorithm>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sortnet
{

using channel_t = std::uint32_t;

/*! \brief Widest word a `bit_vector` can hold. */
inline constexpr std::size_t max_width = 64u;

/*! \brief A two-input gate routing the minimum to `low` and the maximum to `high`. */
struct comparator
{
  channel_t low{};
  channel_t high{};

  friend constexpr auto operator<=>( comparator const&, comparator const& ) = default;
};

/*! \brief One parallel step: comparators on pairwise disjoint channels.
 *
 * The constructor sorts comparators by their low channel so that two layers
 * holding the same gates compare equal.  Disjointness is not enforced here;
 * that is the job of `validate`.
 */
class layer
{
public:
  layer() = default;

  layer( std::vector<comparator> comparators ) : comparators_( std::move( comparators ) )
  {
    canonicalize();
  }

  layer( std::initializer_list<comparator> comparators ) : comparators_( comparators )
  {
    canonicalize();
  }

  std::vector<comparator> const& comparators() const noexcept { return comparators_; }
  std::size_t size() const noexcept { return comparators_.size(); }
  bool empty() const noexcept { return comparators_.empty(); }

  auto begin() const noexcept { return comparators_.begin(); }
  auto end() const noexcept { return comparators_.end(); }

  friend bool operator==( layer const&, layer const& ) = default;

private:
  void canonicalize()
  {
    std::sort( comparators_.begin(), comparators_.end() );
  }

  std::vector<comparator> comparators_;
};

/*! \brief A depth-ordered comparator circuit on `channels()` wires. */
class network
{
public:
  network() = default;

  explicit network( std::size_t channels, std::vector<layer> layers = {} )
      : channels_( channels ), layers_( std::move( layers ) )
  {
  }

  std::size_t channels() const noexcept { return channels_; }
  std::size_t depth() const noexcept { return layers_.size(); }

  std::size_t size() const noexcept
  {
    std::size_t total = 0;
    for ( auto const& l : layers_ )
    {
      total += l.size();
    }
    return total;
  }

  std::vector<layer> const& layers() const noexcept { return layers_; }
  layer const& operator[]( std::size_t t ) const { return layers_.at( t ); }

  void add_layer( layer l ) { layers_.push_back( std::move( l ) ); }

  /*! \brief First `count` layers as a network on the same channels. */
  network prefix( std::size_t count ) const
  {
    count = std::min( count, layers_.size() );
    return network( channels_, std::vector<layer>( layers_.begin(), layers_.begin() + count ) );
  }

  friend bool operator==( network const&, network const& ) = default;

private:
  std::size_t channels_{ 0 };
  std::vector<layer> layers_;
};

/*! \brief A word of `width()` bits; channel 0 is the topmost wire.
 *
 * Channel `i` is stored in bit `i` of the backing word.  Ordering is
 * lexicographic with channel 0 most significant, which is also the order of
 * the text form (`"0101"` reads channel 0 first).
 */
class bit_vector
{
public:
  bit_vector() = default;

  explicit bit_vector( std::size_t width, std::uint64_t bits = 0u ) : width_( width ), bits_( bits )
  {
    if ( width > max_width )
    {
      throw std::invalid_argument( "bit_vector: width " + std::to_string( width ) + " exceeds " + std::to_string( max_width ) );
    }
    bits_ &= mask();
  }

  /*! \brief Parses a string of '0'/'1' characters, channel 0 first. */
  static bit_vector from_string( std::string_view text )
  {
    bit_vector v( text.size() );
    for ( std::size_t i = 0; i < text.size(); ++i )
    {
      if ( text[i] == '1' )
      {
        v.set( i, true );
      }
      else if ( text[i] != '0' )
      {
        throw std::invalid_argument( "bit_vector: unexpected character '" + std::string( 1, text[i] ) + "'" );
      }
    }
    return v;
  }

  /*! \brief Builds the word whose lexicographic rank among all `width`-bit words is `key`. */
  static bit_vector from_lex_key( std::size_t width, std::uint64_t key )
  {
    bit_vector v( width );
    for ( std::size_t i = 0; i < width; ++i )
    {
      v.set( i, ( key >> ( width - 1 - i ) ) & 1u );
    }
    return v;
  }

  std::size_t width() const noexcept { return width_; }
  std::uint64_t word() const noexcept { return bits_; }

  bool operator[]( std::size_t i ) const { return ( bits_ >> i ) & 1u; }

  void set( std::size_t i, bool value )
  {
    if ( i >= width_ )
    {
      throw std::out_of_range( "bit_vector: channel out of range" );
    }
    bits_ = value ? ( bits_ | ( std::uint64_t{ 1 } << i ) ) : ( bits_ & ~( std::uint64_t{ 1 } << i ) );
  }

  std::size_t count_ones() const noexcept { return static_cast<std::size_t>( std::popcount( bits_ ) ); }

  /*! \brief Rank in lexicographic order, channel 0 most significant. */
  std::uint64_t lex_key() const noexcept
  {
    std::uint64_t key = 0;
    for ( std::size_t i = 0; i < width_; ++i )
    {
      key = ( key << 1 ) | ( ( bits_ >> i ) & 1u );
    }
    return key;
  }

  /*! \brief Length of the unsorted window y when the word is written 0^a y 1^b with a, b maximal. */
  std::size_t window() const noexcept
  {
    std::size_t a = 0;
    while ( a < width_ && !( *this )[a] )
    {
      ++a;
    }
    std::size_t b = 0;
    while ( b < width_ - a && ( *this )[width_ - 1 - b] )
    {
      ++b;
    }
    return width_ - a - b;
  }

  std::string to_string() const
  {
    std::string s( width_, '0' );
    for ( std::size_t i = 0; i < width_; ++i )
    {
      if ( ( *this )[i] )
      {
        s[i] = '1';
      }
    }
    return s;
  }

  friend bool operator==( bit_vector const& a, bit_vector const& b ) noexcept
  {
    return a.width_ == b.width_ && a.bits_ == b.bits_;
  }

  friend std::strong_ordering operator<=>( bit_vector const& a, bit_vector const& b ) noexcept
  {
    if ( auto c = a.width_ <=> b.width_; c != 0 )
    {
      return c;
    }
    return a.lex_key() <=> b.lex_key();
  }

private:
  std::uint64_t mask() const noexcept
  {
    return width_ == 64u ? ~std::uint64_t{ 0 } : ( ( std::uint64_t{ 1 } << width_ ) - 1u );
  }

  std::size_t width_{ 0 };
  std::uint64_t bits_{ 0 };
};

/*! \brief Checks the layer and comparator invariants.
 *
 * Returns `std::nullopt` if the network is well formed, otherwise a message
 * naming the first violation (layer index and channel).  Empty layers are
 * rejected: a depth claim must not be padded.
 */
inline std::optional<std::string> validate( network const& net )
{
  auto const n = net.channels();
  if ( n > max_width )
  {
    return "network has " + std::to_string( n ) + " channels, at most " + std::to_string( max_width ) + " are supported";
  }
  for ( std::size_t t = 0; t < net.depth(); ++t )
  {
    auto const& l = net.layers()[t];
    if ( l.empty() )
    {
      return "layer " + std::to_string( t ) + " is empty";
    }
    std::uint64_t used = 0;
    for ( auto const& c : l )
    {
      if ( c.low >= c.high )
      {
        return "comparator " + std::to_string( c.low ) + ":" + std::to_string( c.high ) + " in layer " + std::to_string( t ) + " is not normalized (low < high)";
      }
      if ( c.high >= n )
      {
        return "channel " + std::to_string( c.high ) + " out of range in layer " + std::to_string( t );
      }
      for ( auto ch : { c.low, c.high } )
      {
        auto const bit = std::uint64_t{ 1 } << ch;
        if ( used & bit )
        {
          return "channel " + std::to_string( ch ) + " used twice in layer " + std::to_string( t );
        }
        used |= bit;
      }
    }
  }
  return std::nullopt;
}

namespace detail
{

inline void require_width( network const& net, std::size_t width )
{
  if ( width != net.channels() )
  {
    throw std::invalid_argument( "input width " + std::to_string( width ) + " does not match network with " + std::to_string( net.channels() ) + " channels" );
  }
}

/*! \brief Applies one comparator to bit-sliced words (one lane per input). */
inline void apply_sliced( comparator c, std::span<std::uint64_t> slices ) noexcept
{
  auto const a = slices[c.low];
  auto const b = slices[c.high];
  slices[c.low] = a & b;
  slices[c.high] = a | b;
}

} // namespace detail

/*! \brief Evaluates the network on a single binary input. */
inline bit_vector evaluate( network const& net, bit_vector const& input )
{
  detail::require_width( net, input.width() );
  auto w = input.word();
  for ( auto const& l : net.layers() )
  {
    for ( auto const& c : l )
    {
      auto const lo = ( w >> c.low ) & 1u;
      auto const hi = ( w >> c.high ) & 1u;
      if ( lo > hi )
      {
        w ^= ( std::uint64_t{ 1 } << c.low ) | ( std::uint64_t{ 1 } << c.high );
      }
    }
  }
  return bit_vector( input.width(), w );
}

/*! \brief Evaluates many inputs at once, 64 per machine word.
 *
 * Each group of up to 64 inputs is transposed into one word per channel, so a
 * comparator becomes an AND and an OR on whole words.
 */
inline std::vector<bit_vector> evaluate_batch( network const& net, std::span<bit_vector const> inputs )
{
  auto const n = net.channels();
  for ( auto const& x : inputs )
  {
    detail::require_width( net, x.width() );
  }

  std::vector<bit_vector> outputs;
  outputs.reserve( inputs.size() );
  std::vector<std::uint64_t> slices( n );

  for ( std::size_t base = 0; base < inputs.size(); base += 64u )
  {
    auto const lanes = std::min<std::size_t>( 64u, inputs.size() - base );
    std::fill( slices.begin(), slices.end(), 0u );
    for ( std::size_t lane = 0; lane < lanes; ++lane )
    {
      auto const w = inputs[base + lane].word();
      for ( std::size_t ch = 0; ch < n; ++ch )
      {
        slices[ch] |= ( ( w >> ch ) & 1u ) << lane;
      }
    }
    for ( auto const& l : net.layers() )
    {
      for ( auto const& c : l )
      {
        detail::apply_sliced( c, slices );
      }
    }
    for ( std::size_t lane = 0; lane < lanes; ++lane )
    {
      std::uint64_t w = 0;
      for ( std::size_t ch = 0; ch < n; ++ch )
      {
        w |= ( ( slices[ch] >> lane ) & 1u ) << ch;
      }
      outputs.emplace_back( n, w );
    }
  }
  return outputs;
}

/*! \brief Removes one channel from a sorting network.
 *
 * The input on `channel` is fixed to the maximum value.  Comparators on which
 * that value does not move are dropped; comparators that would carry it to a
 * lower channel act as a wire swap and are dropped by renaming the two wires
 * in the rest of the network.  Renaming may produce reversed comparators,
 * which are straightened afterwards by the same renaming trick.  The result
 * has `channels() - 1` wires, never more layers than the input, and sorts if
 * the input network sorts.
 */
inline network remove_channel( network const& net, channel_t channel )
{
  auto const n = net.channels();
  if ( channel >= n )
  {
    throw std::out_of_range( "remove_channel: channel " + std::to_string( channel ) + " out of range for " + std::to_string( n ) + " channels" );
  }

  // generalized comparators: `first` receives the minimum, `second` the maximum
  using gate = std::pair<channel_t, channel_t>;
  std::vector<std::vector<gate>> gates;
  gates.reserve( net.depth() );
  for ( auto const& l : net.layers() )
  {
    auto& g = gates.emplace_back();
    for ( auto const& c : l )
    {
      g.emplace_back( c.low, c.high );
    }
  }

  auto rename_after = [&gates]( std::size_t t, std::size_t k, channel_t a, channel_t b ) {
    auto swap_wire = [a, b]( channel_t& w ) {
      if ( w == a )
        w = b;
      else if ( w == b )
        w = a;
    };
    for ( std::size_t i = k + 1; i < gates[t].size(); ++i )
    {
      swap_wire( gates[t][i].first );
      swap_wire( gates[t][i].second );
    }
    for ( auto s = t + 1; s < gates.size(); ++s )
    {
      for ( auto& g : gates[s] )
      {
        swap_wire( g.first );
        swap_wire( g.second );
      }
    }
  };

  // pass 1: track the maximum and drop every gate touching it
  for ( std::size_t t = 0; t < gates.size(); ++t )
  {
    std::vector<gate> kept;
    for ( std::size_t k = 0; k < gates[t].size(); ++k )
    {
      auto const [mn, mx] = gates[t][k];
      if ( mn == channel )
      {
        rename_after( t, k, mn, mx );
      }
      else if ( mx != channel )
      {
        kept.push_back( gates[t][k] );
      }
    }
    gates[t] = std::move( kept );
  }

  // pass 2: close the gap left by the removed wire
  for ( auto& g : gates )
  {
    for ( auto& [a, b] : g )
    {
      a -= a > channel ? 1u : 0u;
      b -= b > channel ? 1u : 0u;
    }
  }

  // pass 3: straighten reversed gates
  for ( std::size_t t = 0; t < gates.size(); ++t )
  {
    for ( std::size_t k = 0; k < gates[t].size(); ++k )
    {
      auto const [mn, mx] = gates[t][k];
      if ( mn > mx )
      {
        gates[t][k] = { mx, mn };
        rename_after( t, k, mn, mx );
      }
    }
  }

  std::vector<layer> layers;
  for ( auto const& g : gates )
  {
    if ( g.empty() )
    {
      continue;
    }
    std::vector<comparator> cs;
    for ( auto [a, b] : g )
    {
      cs.push_back( { a, b } );
    }
    layers.emplace_back( std::move( cs ) );
  }
  return network( n - 1, std::move( layers ) );
}

} // namespace sortnet
