// Test-only reference implementations.  Nothing here shares code paths with
// the library beyond the plain data types.

#pragma once

#include <sortnet/cnf.hpp>
#include <sortnet/core.hpp>

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <vector>

namespace oracle
{

/*! \brief Integer evaluation: min to the low channel, max to the high one. */
inline std::vector<int> sort_integers( sortnet::network const& net, std::vector<int> values )
{
  for ( auto const& l : net.layers() )
  {
    for ( auto const& c : l )
    {
      if ( values[c.low] > values[c.high] )
      {
        std::swap( values[c.low], values[c.high] );
      }
    }
  }
  return values;
}

/*! \brief Per-comparator interpreter over a vector<bool>, no bit tricks. */
inline std::vector<bool> run_naive( sortnet::network const& net, std::vector<bool> v )
{
  for ( std::size_t t = 0; t < net.depth(); ++t )
  {
    for ( auto const& c : net.layers()[t] )
    {
      bool const a = v[c.low], b = v[c.high];
      v[c.low] = a && b;
      v[c.high] = a || b;
    }
  }
  return v;
}

inline std::vector<bool> to_bools( sortnet::bit_vector const& x )
{
  std::vector<bool> v( x.width() );
  for ( std::size_t i = 0; i < x.width(); ++i )
  {
    v[i] = x[i];
  }
  return v;
}

inline bool bools_sorted( std::vector<bool> const& v )
{
  return std::is_sorted( v.begin(), v.end() );
}

/*! \brief Lexicographically smallest input (channel 0 first) left unsorted, by plain enumeration. */
inline std::optional<std::vector<bool>> brute_force_witness( sortnet::network const& net )
{
  auto const n = net.channels();
  for ( std::uint64_t k = 0; k < ( std::uint64_t{ 1 } << n ); ++k )
  {
    std::vector<bool> x( n );
    for ( std::size_t i = 0; i < n; ++i )
    {
      x[i] = ( k >> ( n - 1 - i ) ) & 1u;
    }
    if ( !bools_sorted( run_naive( net, x ) ) )
    {
      return x;
    }
  }
  return std::nullopt;
}

inline bool sorts_all_naive( sortnet::network const& net )
{
  return !brute_force_witness( net );
}

/*! \brief Random network: each layer pairs a random subset of channels. */
inline sortnet::network random_network( std::size_t n, std::size_t depth, std::mt19937_64& rng, double density = 0.8 )
{
  sortnet::network net( n );
  std::vector<sortnet::channel_t> channels( n );
  for ( std::size_t i = 0; i < n; ++i )
  {
    channels[i] = static_cast<sortnet::channel_t>( i );
  }
  std::bernoulli_distribution keep( density );
  for ( std::size_t t = 0; t < depth; ++t )
  {
    std::shuffle( channels.begin(), channels.end(), rng );
    std::vector<sortnet::comparator> cs;
    for ( std::size_t k = 0; k + 1 < n; k += 2 )
    {
      if ( keep( rng ) )
      {
        auto a = channels[k], b = channels[k + 1];
        cs.push_back( { std::min( a, b ), std::max( a, b ) } );
      }
    }
    if ( !cs.empty() )
    {
      net.add_layer( sortnet::layer( std::move( cs ) ) );
    }
  }
  return net;
}

/*! \brief Every valid layer on n channels (all partial matchings), including the empty one. */
inline std::vector<sortnet::layer> all_layers( std::size_t n )
{
  std::vector<sortnet::layer> out;
  std::vector<sortnet::comparator> current;
  std::function<void( std::uint32_t )> rec = [&]( std::uint32_t used ) {
    std::size_t first = 0;
    while ( first < n && ( used >> first ) & 1u )
    {
      ++first;
    }
    if ( first == n )
    {
      out.emplace_back( current );
      return;
    }
    // leave `first` unmatched
    rec( used | ( 1u << first ) );
    for ( auto j = first + 1; j < n; ++j )
    {
      if ( !( ( used >> j ) & 1u ) )
      {
        current.push_back( { static_cast<sortnet::channel_t>( first ), static_cast<sortnet::channel_t>( j ) } );
        rec( used | ( 1u << first ) | ( 1u << j ) );
        current.pop_back();
      }
    }
  };
  rec( 0u );
  return out;
}

/*! \brief Satisfiability by trying every assignment (<= ~22 variables). */
inline std::optional<sortnet::assignment> brute_force_sat( sortnet::cnf_formula const& f )
{
  auto const vars = static_cast<std::size_t>( f.variable_count() );
  sortnet::assignment a( vars + 1u, false );
  for ( std::uint64_t k = 0; k < ( std::uint64_t{ 1 } << vars ); ++k )
  {
    for ( std::size_t v = 1; v <= vars; ++v )
    {
      a[v] = ( k >> ( v - 1 ) ) & 1u;
    }
    if ( sortnet::satisfies( f, a ) )
    {
      return a;
    }
  }
  return std::nullopt;
}

/*! \brief Uniform random 3-SAT. */
inline sortnet::cnf_formula random_3sat( int vars, int clauses, std::mt19937_64& rng )
{
  sortnet::cnf_formula f;
  for ( int v = 0; v < vars; ++v )
  {
    f.new_variable();
  }
  std::uniform_int_distribution<int> pick( 1, vars );
  std::bernoulli_distribution sign( 0.5 );
  for ( int c = 0; c < clauses; ++c )
  {
    std::vector<int> lits;
    while ( lits.size() < 3u )
    {
      auto const v = pick( rng );
      if ( std::none_of( lits.begin(), lits.end(), [v]( int l ) { return std::abs( l ) == v; } ) )
      {
        lits.push_back( sign( rng ) ? v : -v );
      }
    }
    f.add_clause( lits );
  }
  return f;
}

} // namespace oracle
