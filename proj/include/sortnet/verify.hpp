/*!
  \file verify.hpp
  \brief Exhaustive and targeted checking of comparator networks

  Exhaustive checks rely on the 0-1 principle: a comparator network sorts
  every input iff it sorts every binary input.  Inputs are evaluated 64 at a
  time in bit-sliced form.
*/

#pragma once

#include "core.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <set>
#include <stdexcept>
#include <thread>
#include <vector>

namespace sortnet
{

/*! \brief True iff the bits are non-decreasing from channel 0 to the last channel. */
inline bool is_sorted( bit_vector const& v ) noexcept
{
  // sorted words look like 0...01...1 read from channel 0, i.e. the set bits
  // form a suffix of the channel range
  auto const w = v.word();
  auto const ones = v.count_ones();
  if ( ones == 0u )
  {
    return true;
  }
  auto const expected = ( ones == 64u ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << ones ) - 1u ) << ( v.width() - ones );
  return w == expected;
}

/*! \brief Raised when an exhaustive check is requested above the configured width. */
class exhaustive_limit_error : public std::domain_error
{
public:
  exhaustive_limit_error( std::size_t n, std::size_t limit )
      : std::domain_error( "exhaustive check refused: " + std::to_string( n ) + " channels exceeds the limit of " + std::to_string( limit ) + "; use a windowed or explicit input family" )
  {
  }
};

struct verify_options
{
  /*! Largest channel count for which all 2^n inputs are enumerated. */
  std::size_t exhaustive_limit = 26u;
  /*! Worker threads; 0 picks the hardware concurrency. */
  unsigned threads = 0u;
};

struct verdict
{
  enum class status_t
  {
    sorts_all,
    counterexample
  };

  status_t status = status_t::sorts_all;
  std::optional<bit_vector> witness;
  std::uint64_t inputs_checked = 0u;

  bool sorts() const noexcept { return status == status_t::sorts_all; }
};

inline nlohmann::json to_json( verdict const& v )
{
  nlohmann::json js;
  js["status"] = v.sorts() ? "sorts-all" : "counterexample";
  js["witness"] = v.witness ? nlohmann::json( v.witness->to_string() ) : nlohmann::json( nullptr );
  js["inputs_checked"] = v.inputs_checked;
  return js;
}

/*! \brief A set of binary inputs to search for counterexamples. */
struct input_family
{
  enum class kind_t
  {
    all_binary,
    windowed,
    explicit_set
  };

  kind_t kind = kind_t::all_binary;
  std::size_t window_bound = 0u;
  std::vector<bit_vector> vectors;

  static input_family all_binary() { return {}; }

  /*! \brief All words 0^a y 1^b (a, b maximal) with 0 < |y| <= bound. */
  static input_family windowed( std::size_t bound ) { return { kind_t::windowed, bound, {} }; }

  static input_family explicit_set( std::vector<bit_vector> vectors ) { return { kind_t::explicit_set, 0u, std::move( vectors ) }; }
};

namespace detail
{

inline unsigned resolve_threads( unsigned requested )
{
  if ( requested != 0u )
  {
    return requested;
  }
  return std::max( 1u, std::thread::hardware_concurrency() );
}

/*! \brief Bit-sliced channel words for inputs `chunk * 64 + lane`, channel 0 most significant. */
inline void load_chunk( std::size_t n, std::uint64_t chunk, std::span<std::uint64_t> slices ) noexcept
{
  static constexpr std::array<std::uint64_t, 6> lane_patterns = {
      0xAAAAAAAAAAAAAAAAull, 0xCCCCCCCCCCCCCCCCull, 0xF0F0F0F0F0F0F0F0ull,
      0xFF00FF00FF00FF00ull, 0xFFFF0000FFFF0000ull, 0xFFFFFFFF00000000ull };
  for ( std::size_t i = 0; i < n; ++i )
  {
    auto const bit = n - 1 - i;
    if ( bit < 6u )
    {
      slices[i] = lane_patterns[bit];
    }
    else
    {
      slices[i] = ( ( chunk >> ( bit - 6u ) ) & 1u ) ? ~std::uint64_t{ 0 } : 0u;
    }
  }
}

inline std::uint64_t unsorted_lanes( std::span<std::uint64_t const> slices ) noexcept
{
  std::uint64_t bad = 0;
  for ( std::size_t i = 0; i + 1 < slices.size(); ++i )
  {
    bad |= slices[i] & ~slices[i + 1];
  }
  return bad;
}

inline std::uint64_t valid_lanes( std::size_t n ) noexcept
{
  return n >= 6u ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << ( std::uint64_t{ 1 } << n ) ) - 1u;
}

inline void run_sliced( network const& net, std::span<std::uint64_t> slices ) noexcept
{
  for ( auto const& l : net.layers() )
  {
    for ( auto const& c : l )
    {
      apply_sliced( c, slices );
    }
  }
}

inline std::uint64_t chunk_count( std::size_t n ) noexcept
{
  return n <= 6u ? 1u : ( std::uint64_t{ 1 } << ( n - 6u ) );
}

/*! \brief Splits `[0, chunks)` into contiguous ranges and runs `work(begin, end)` on each in parallel. */
template<class Fn>
void parallel_chunks( std::uint64_t chunks, unsigned threads, Fn&& work )
{
  threads = static_cast<unsigned>( std::min<std::uint64_t>( threads, chunks ) );
  if ( threads <= 1u )
  {
    work( 0u, chunks, 0u );
    return;
  }
  std::vector<std::jthread> pool;
  auto const per = ( chunks + threads - 1u ) / threads;
  for ( unsigned w = 0; w < threads; ++w )
  {
    auto const begin = std::min<std::uint64_t>( chunks, w * per );
    auto const end = std::min<std::uint64_t>( chunks, begin + per );
    pool.emplace_back( [&work, begin, end, w] { work( begin, end, w ); } );
  }
}

} // namespace detail

/*! \brief Exhaustive 0-1 check over all 2^n inputs.
 *
 * On failure the witness is the lexicographically smallest unsorted input,
 * independent of the thread count, and `inputs_checked` is its rank + 1.
 * Throws `exhaustive_limit_error` above `options.exhaustive_limit`.
 */
inline verdict verify_01( network const& net, verify_options const& options = {} )
{
  auto const n = net.channels();
  if ( n > options.exhaustive_limit || n >= 63u )
  {
    throw exhaustive_limit_error( n, options.exhaustive_limit );
  }
  auto const total = std::uint64_t{ 1 } << n;
  if ( n < 2u )
  {
    return { verdict::status_t::sorts_all, std::nullopt, total };
  }

  auto const chunks = detail::chunk_count( n );
  auto const lanes_mask = detail::valid_lanes( n );
  std::atomic<std::uint64_t> first_bad{ std::numeric_limits<std::uint64_t>::max() };

  detail::parallel_chunks( chunks, detail::resolve_threads( options.threads ), [&]( std::uint64_t begin, std::uint64_t end, unsigned ) {
    std::vector<std::uint64_t> slices( n );
    for ( auto chunk = begin; chunk < end; ++chunk )
    {
      // a lower-ranked failure is already known
      if ( ( chunk << 6u ) > first_bad.load( std::memory_order_relaxed ) )
      {
        return;
      }
      detail::load_chunk( n, chunk, slices );
      detail::run_sliced( net, slices );
      if ( auto const bad = detail::unsorted_lanes( slices ) & lanes_mask )
      {
        auto const rank = ( chunk << 6u ) + static_cast<std::uint64_t>( std::countr_zero( bad ) );
        auto seen = first_bad.load();
        while ( rank < seen && !first_bad.compare_exchange_weak( seen, rank ) )
        {
        }
        return;
      }
    }
  } );

  auto const bad = first_bad.load();
  if ( bad == std::numeric_limits<std::uint64_t>::max() )
  {
    return { verdict::status_t::sorts_all, std::nullopt, total };
  }
  return { verdict::status_t::counterexample, bit_vector::from_lex_key( n, bad ), bad + 1u };
}

/*! \brief Visits words 0^a y 1^b with 2 <= |y| <= max_window in counterexample order.
 *
 * Order: fewest unsorted bits first, then lexicographic.  With a, b maximal
 * the window y starts with 1 and ends with 0.  The visitor returns `false`
 * to stop early.
 */
inline void for_each_windowed( std::size_t n, std::size_t max_window, std::function<bool( bit_vector const& )> const& visit )
{
  max_window = std::min( max_window, n );
  for ( std::size_t w = 2; w <= max_window; ++w )
  {
    auto const inner = w - 2u;
    if ( inner >= 63u )
    {
      throw std::domain_error( "for_each_windowed: window too large to enumerate" );
    }
    // larger a means more leading zeros, hence lexicographically smaller
    for ( std::size_t a = n - w + 1; a-- > 0; )
    {
      auto const b = n - w - a;
      for ( std::uint64_t z = 0; z < ( std::uint64_t{ 1 } << inner ); ++z )
      {
        bit_vector x( n );
        x.set( a, true );
        for ( std::size_t k = 0; k < inner; ++k )
        {
          x.set( a + 1 + k, ( z >> ( inner - 1 - k ) ) & 1u );
        }
        for ( std::size_t k = 0; k < b; ++k )
        {
          x.set( n - 1 - k, true );
        }
        if ( !visit( x ) )
        {
          return;
        }
      }
    }
  }
}

/*! \brief Members of a family in counterexample order, excluding sorted words. */
inline std::vector<bit_vector> enumerate_family( std::size_t n, input_family const& family )
{
  std::vector<bit_vector> out;
  switch ( family.kind )
  {
  case input_family::kind_t::all_binary:
    for_each_windowed( n, n, [&out]( bit_vector const& x ) { out.push_back( x ); return true; } );
    break;
  case input_family::kind_t::windowed:
    for_each_windowed( n, family.window_bound, [&out]( bit_vector const& x ) { out.push_back( x ); return true; } );
    break;
  case input_family::kind_t::explicit_set:
    for ( auto const& x : family.vectors )
    {
      if ( x.width() != n )
      {
        throw std::invalid_argument( "explicit input family: width mismatch" );
      }
      if ( !is_sorted( x ) )
      {
        out.push_back( x );
      }
    }
    std::sort( out.begin(), out.end(), []( bit_vector const& x, bit_vector const& y ) {
      return std::pair{ x.window(), x.lex_key() } < std::pair{ y.window(), y.lex_key() };
    } );
    out.erase( std::unique( out.begin(), out.end() ), out.end() );
    break;
  }
  return out;
}

/*! \brief First member of `family` the network fails to sort.
 *
 * Members are tried fewest unsorted bits first, then lexicographically, so
 * the answer is deterministic.
 */
inline std::optional<bit_vector> find_counterexample( network const& net, input_family const& family )
{
  auto const n = net.channels();
  std::optional<bit_vector> found;
  std::vector<bit_vector> batch;
  batch.reserve( 64u );

  auto flush = [&]() {
    auto const outputs = evaluate_batch( net, batch );
    for ( std::size_t i = 0; i < outputs.size(); ++i )
    {
      if ( !is_sorted( outputs[i] ) )
      {
        found = batch[i];
        break;
      }
    }
    batch.clear();
    return !found;
  };

  if ( family.kind == input_family::kind_t::explicit_set )
  {
    for ( auto const& x : enumerate_family( n, family ) )
    {
      batch.push_back( x );
      if ( batch.size() == 64u && !flush() )
      {
        return found;
      }
    }
    flush();
    return found;
  }

  auto const bound = family.kind == input_family::kind_t::all_binary ? n : family.window_bound;
  for_each_windowed( n, bound, [&]( bit_vector const& x ) {
    batch.push_back( x );
    return batch.size() < 64u || flush();
  } );
  if ( !found && !batch.empty() )
  {
    flush();
  }
  return found;
}

/*! \brief True iff every input channel can influence every output channel.
 *
 * `reach[j]` holds the set of inputs that may reach channel j; a comparator
 * merges the sets of its two channels.  A network on fewer than two channels
 * trivially passes.
 */
inline bool check_reachability( network const& net )
{
  auto const n = net.channels();
  if ( n < 2u )
  {
    return true;
  }
  std::vector<std::uint64_t> reach( n );
  for ( std::size_t j = 0; j < n; ++j )
  {
    reach[j] = std::uint64_t{ 1 } << j;
  }
  for ( auto const& l : net.layers() )
  {
    for ( auto const& c : l )
    {
      auto const merged = reach[c.low] | reach[c.high];
      reach[c.low] = merged;
      reach[c.high] = merged;
    }
  }
  auto const full = n == 64u ? ~std::uint64_t{ 0 } : ( std::uint64_t{ 1 } << n ) - 1u;
  return std::all_of( reach.begin(), reach.end(), [full]( std::uint64_t r ) { return r == full; } );
}

/*! \brief Distinct outputs over all 2^n binary inputs. */
inline std::set<bit_vector> output_set( network const& net, verify_options const& options = {} )
{
  auto const n = net.channels();
  if ( n > options.exhaustive_limit || n >= 63u )
  {
    throw exhaustive_limit_error( n, options.exhaustive_limit );
  }
  if ( n == 0u )
  {
    return { bit_vector( 0u ) };
  }

  auto const chunks = detail::chunk_count( n );
  auto const lanes = std::min<std::uint64_t>( 64u, std::uint64_t{ 1 } << n );
  auto const threads = detail::resolve_threads( options.threads );
  std::vector<std::set<bit_vector>> partial( std::min<std::uint64_t>( threads, chunks ) );

  detail::parallel_chunks( chunks, threads, [&]( std::uint64_t begin, std::uint64_t end, unsigned worker ) {
    std::vector<std::uint64_t> slices( n );
    auto& out = partial[worker];
    for ( auto chunk = begin; chunk < end; ++chunk )
    {
      detail::load_chunk( n, chunk, slices );
      detail::run_sliced( net, slices );
      for ( std::uint64_t lane = 0; lane < lanes; ++lane )
      {
        std::uint64_t w = 0;
        for ( std::size_t ch = 0; ch < n; ++ch )
        {
          w |= ( ( slices[ch] >> lane ) & 1u ) << ch;
        }
        out.emplace( n, w );
      }
    }
  } );

  std::set<bit_vector> result;
  for ( auto& p : partial )
  {
    result.merge( p );
  }
  return result;
}

} // namespace sortnet
