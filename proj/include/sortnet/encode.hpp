/*!
  \file encode.hpp
  \brief CNF encoding of "a depth-d comparator network extending a prefix
         sorts these inputs and connects every input to every output"

  Variable families, all over layers t = 0..d-1 and boundaries t = 0..d:

  - comparator  g[t][i][j], i < j : comparator (i, j) sits in layer t
  - used        u[t][i]           : channel i is touched in layer t
  - value       v[x][t][i]        : value on channel i after t layers for input x
  - reach       r[t][i][j]        : input i influences channel j after t layers

  The encoding never forces a layer to be non-empty, so a depth-d instance is
  also solved by any shallower network.
*/

#pragma once

#include "cnf.hpp"
#include "core.hpp"

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sortnet
{

/*! \brief What a CNF variable stands for. */
struct variable_info
{
  enum class kind_t
  {
    comparator,
    used,
    value,
    reach
  };

  kind_t kind;
  std::size_t layer;
  std::size_t first;
  std::size_t second = 0;
  std::size_t input = 0;

  friend bool operator==( variable_info const&, variable_info const& ) = default;
};

/*! \brief Bidirectional map between semantic variables and DIMACS indices. */
class var_map
{
public:
  var_map() = default;
  var_map( std::size_t channels, std::size_t depth ) : channels_( channels ), depth_( depth ) {}

  std::size_t channels() const noexcept { return channels_; }
  std::size_t depth() const noexcept { return depth_; }
  std::size_t prefix_depth() const noexcept { return prefix_depth_; }

  int comparator( std::size_t t, std::size_t i, std::size_t j ) const
  {
    if ( i > j )
    {
      std::swap( i, j );
    }
    check( t < depth_ && j < channels_ && i != j, "comparator" );
    return comparator_.at( ( t * channels_ + i ) * channels_ + j );
  }

  int used( std::size_t t, std::size_t i ) const
  {
    check( t < depth_ && i < channels_, "used" );
    return used_.at( t * channels_ + i );
  }

  int value( std::size_t input, std::size_t t, std::size_t i ) const
  {
    check( input < inputs_.size() && t <= depth_ && i < channels_, "value" );
    return value_.at( input ).at( t * channels_ + i );
  }

  bool has_reachability() const noexcept { return !reach_.empty(); }

  int reach( std::size_t t, std::size_t i, std::size_t j ) const
  {
    check( has_reachability() && t <= depth_ && i < channels_ && j < channels_, "reach" );
    return reach_.at( ( t * channels_ + i ) * channels_ + j );
  }

  std::vector<bit_vector> const& inputs() const noexcept { return inputs_; }

  std::optional<std::size_t> input_index( bit_vector const& x ) const
  {
    if ( auto it = input_lookup_.find( x ); it != input_lookup_.end() )
    {
      return it->second;
    }
    return std::nullopt;
  }

  /*! \brief Reverse lookup; `std::nullopt` for indices the map does not own. */
  std::optional<variable_info> describe( int var ) const
  {
    if ( var <= 0 || static_cast<std::size_t>( var ) >= info_.size() || !info_[static_cast<std::size_t>( var )] )
    {
      return std::nullopt;
    }
    return info_[static_cast<std::size_t>( var )];
  }

  std::size_t comparator_variable_count() const noexcept { return count( variable_info::kind_t::comparator ); }
  std::size_t used_variable_count() const noexcept { return count( variable_info::kind_t::used ); }
  std::size_t value_variable_count() const noexcept { return count( variable_info::kind_t::value ); }
  std::size_t reach_variable_count() const noexcept { return count( variable_info::kind_t::reach ); }

  /*! \brief Comment lines `g <t> <i> <j> <var>` for every comparator variable. */
  std::vector<std::string> legend() const
  {
    std::vector<std::string> lines;
    for ( std::size_t t = 0; t < depth_; ++t )
    {
      for ( std::size_t i = 0; i < channels_; ++i )
      {
        for ( auto j = i + 1; j < channels_; ++j )
        {
          lines.push_back( "g " + std::to_string( t ) + " " + std::to_string( i ) + " " + std::to_string( j ) + " " + std::to_string( comparator( t, i, j ) ) );
        }
      }
    }
    return lines;
  }

private:
  friend class encoder_access;

  static void check( bool ok, char const* family )
  {
    if ( !ok )
    {
      throw std::out_of_range( std::string( "var_map: index out of range for " ) + family + " variable" );
    }
  }

  std::size_t count( variable_info::kind_t kind ) const noexcept
  {
    std::size_t c = 0;
    for ( auto const& i : info_ )
    {
      c += ( i && i->kind == kind ) ? 1u : 0u;
    }
    return c;
  }

  void record( int var, variable_info info )
  {
    if ( info_.size() <= static_cast<std::size_t>( var ) )
    {
      info_.resize( static_cast<std::size_t>( var ) + 1u );
    }
    info_[static_cast<std::size_t>( var )] = info;
  }

  std::size_t channels_ = 0;
  std::size_t depth_ = 0;
  std::size_t prefix_depth_ = 0;
  std::vector<int> comparator_; // [t][i][j], 0 where i >= j
  std::vector<int> used_;       // [t][i]
  std::vector<std::vector<int>> value_;
  std::vector<int> reach_;      // [t][i][j]
  std::vector<bit_vector> inputs_;
  std::map<bit_vector, std::size_t> input_lookup_;
  std::vector<std::optional<variable_info>> info_;
};

/*! \brief A formula together with the meaning of its variables. */
struct encoding
{
  cnf_formula formula;
  var_map vars;
};

class encoder_access
{
public:
  static encoding structure( std::size_t n, std::size_t d, network const& prefix )
  {
    if ( prefix.channels() != n )
    {
      throw std::invalid_argument( "encode_structure: prefix has " + std::to_string( prefix.channels() ) + " channels, expected " + std::to_string( n ) );
    }
    if ( prefix.depth() > d )
    {
      throw std::invalid_argument( "encode_structure: prefix depth " + std::to_string( prefix.depth() ) + " exceeds depth " + std::to_string( d ) );
    }
    if ( auto err = validate( prefix ) )
    {
      throw std::invalid_argument( "encode_structure: invalid prefix: " + *err );
    }

    encoding enc{ {}, var_map( n, d ) };
    auto& f = enc.formula;
    auto& m = enc.vars;
    m.prefix_depth_ = prefix.depth();
    m.comparator_.assign( d * n * n, 0 );
    m.used_.assign( d * n, 0 );

    for ( std::size_t t = 0; t < d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        for ( auto j = i + 1; j < n; ++j )
        {
          auto const v = f.new_variable();
          m.comparator_[( t * n + i ) * n + j] = v;
          m.record( v, { variable_info::kind_t::comparator, t, i, j } );
        }
      }
    }
    for ( std::size_t t = 0; t < d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        auto const v = f.new_variable();
        m.used_[t * n + i] = v;
        m.record( v, { variable_info::kind_t::used, t, i } );
      }
    }

    for ( std::size_t t = 0; t < d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        // at most one comparator per channel, pairwise
        for ( std::size_t j = 0; j < n; ++j )
        {
          for ( auto k = j + 1; k < n; ++k )
          {
            if ( j != i && k != i )
            {
              f.add_clause( { -m.comparator( t, i, j ), -m.comparator( t, i, k ) } );
            }
          }
        }
        // u[t][i] <-> OR_j g[t][i][j]
        std::vector<int> any{ -m.used( t, i ) };
        for ( std::size_t j = 0; j < n; ++j )
        {
          if ( j != i )
          {
            f.add_clause( { -m.comparator( t, i, j ), m.used( t, i ) } );
            any.push_back( m.comparator( t, i, j ) );
          }
        }
        f.add_clause( any );
      }
    }

    for ( std::size_t t = 0; t < prefix.depth(); ++t )
    {
      auto const& l = prefix.layers()[t];
      for ( std::size_t i = 0; i < n; ++i )
      {
        for ( auto j = i + 1; j < n; ++j )
        {
          comparator const c{ static_cast<channel_t>( i ), static_cast<channel_t>( j ) };
          auto const present = std::find( l.begin(), l.end(), c ) != l.end();
          f.add_clause( { present ? m.comparator( t, i, j ) : -m.comparator( t, i, j ) } );
        }
      }
    }
    return enc;
  }

  static void sortedness( encoding& enc, bit_vector const& x )
  {
    auto& f = enc.formula;
    auto& m = enc.vars;
    auto const n = m.channels_;
    auto const d = m.depth_;
    if ( x.width() != n )
    {
      throw std::invalid_argument( "add_sortedness: input width " + std::to_string( x.width() ) + " does not match " + std::to_string( n ) + " channels" );
    }
    if ( m.input_lookup_.count( x ) )
    {
      return;
    }

    auto const index = m.inputs_.size();
    m.inputs_.push_back( x );
    m.input_lookup_.emplace( x, index );
    auto& vars = m.value_.emplace_back( ( d + 1u ) * n );
    for ( std::size_t t = 0; t <= d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        auto const v = f.new_variable();
        vars[t * n + i] = v;
        m.record( v, { variable_info::kind_t::value, t, i, 0u, index } );
      }
    }
    auto val = [&]( std::size_t t, std::size_t i ) { return vars[t * n + i]; };

    for ( std::size_t i = 0; i < n; ++i )
    {
      f.add_clause( { x[i] ? val( 0, i ) : -val( 0, i ) } );
    }

    for ( std::size_t t = 0; t < d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        for ( auto j = i + 1; j < n; ++j )
        {
          auto const g = m.comparator( t, i, j );
          auto const a = val( t, i ), b = val( t, j );
          auto const lo = val( t + 1, i ), hi = val( t + 1, j );
          // lo <-> a & b
          f.add_clause( { -g, -lo, a } );
          f.add_clause( { -g, -lo, b } );
          f.add_clause( { -g, lo, -a, -b } );
          // hi <-> a | b
          f.add_clause( { -g, hi, -a } );
          f.add_clause( { -g, hi, -b } );
          f.add_clause( { -g, -hi, a, b } );
        }
        // untouched channels pass their value through
        auto const u = m.used( t, i );
        f.add_clause( { u, -val( t + 1, i ), val( t, i ) } );
        f.add_clause( { u, val( t + 1, i ), -val( t, i ) } );
      }
    }

    for ( std::size_t i = 0; i + 1 < n; ++i )
    {
      f.add_clause( { -val( d, i ), val( d, i + 1 ) } );
    }
  }

  static void reachability( encoding& enc )
  {
    auto& f = enc.formula;
    auto& m = enc.vars;
    if ( m.has_reachability() )
    {
      return;
    }
    auto const n = m.channels_;
    auto const d = m.depth_;
    m.reach_.assign( ( d + 1u ) * n * n, 0 );
    for ( std::size_t t = 0; t <= d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        for ( std::size_t j = 0; j < n; ++j )
        {
          auto const v = f.new_variable();
          m.reach_[( t * n + i ) * n + j] = v;
          m.record( v, { variable_info::kind_t::reach, t, i, j } );
        }
      }
    }

    for ( std::size_t i = 0; i < n; ++i )
    {
      for ( std::size_t j = 0; j < n; ++j )
      {
        f.add_clause( { i == j ? m.reach( 0, i, j ) : -m.reach( 0, i, j ) } );
      }
    }

    // r[t][i][j] <-> r[t-1][i][j] | OR_k ( g[t-1](j,k) & r[t-1][i][k] )
    // The backward direction uses that at most one g[t-1](j,k) holds and
    // u[t-1][j] says whether one does, so no auxiliary variables are needed.
    for ( std::size_t t = 1; t <= d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        for ( std::size_t j = 0; j < n; ++j )
        {
          auto const now = m.reach( t, i, j );
          auto const before = m.reach( t - 1, i, j );
          f.add_clause( { -before, now } );
          f.add_clause( { -now, before, m.used( t - 1, j ) } );
          for ( std::size_t k = 0; k < n; ++k )
          {
            if ( k == j )
            {
              continue;
            }
            auto const g = m.comparator( t - 1, j, k );
            auto const via = m.reach( t - 1, i, k );
            f.add_clause( { -g, -via, now } );
            f.add_clause( { -now, before, -g, via } );
          }
        }
      }
    }

    for ( std::size_t i = 0; i < n; ++i )
    {
      for ( std::size_t j = 0; j < n; ++j )
      {
        f.add_clause( { m.reach( d, i, j ) } );
      }
    }
  }
};

/*! \brief Structural clauses for a depth-`d` network on `n` channels.
 *
 * Every layer holds at most one comparator per channel, `u` is tied to the
 * comparators it summarizes, and the layers of `prefix` are fixed by unit
 * clauses (their comparators true, every other pair false).
 */
inline encoding encode_structure( std::size_t n, std::size_t d, network const& prefix )
{
  return encoder_access::structure( n, d, prefix );
}

inline encoding encode_structure( std::size_t n, std::size_t d )
{
  return encoder_access::structure( n, d, network( n ) );
}

/*! \brief Requires the network to sort `x`; registering the same input twice is a no-op. */
inline void add_sortedness( encoding& enc, bit_vector const& x )
{
  encoder_access::sortedness( enc, x );
}

/*! \brief Requires every input channel to influence every output channel. */
inline void add_reachability( encoding& enc )
{
  encoder_access::reachability( enc );
}

/*! \brief Extracts the network from a model.
 *
 * Empty layers are dropped, so the result's depth is the effective depth.
 * A model placing two comparators on one channel means the encoding is
 * broken and raises `std::logic_error`.
 */
inline network decode_model( var_map const& vars, assignment const& model )
{
  auto const n = vars.channels();
  network net( n );
  for ( std::size_t t = 0; t < vars.depth(); ++t )
  {
    std::vector<comparator> cs;
    for ( std::size_t i = 0; i < n; ++i )
    {
      for ( auto j = i + 1; j < n; ++j )
      {
        auto const v = static_cast<std::size_t>( vars.comparator( t, i, j ) );
        if ( v >= model.size() )
        {
          throw std::invalid_argument( "decode_model: model does not assign comparator variable " + std::to_string( v ) );
        }
        if ( model[v] )
        {
          cs.push_back( { static_cast<channel_t>( i ), static_cast<channel_t>( j ) } );
        }
      }
    }
    if ( !cs.empty() )
    {
      net.add_layer( layer( std::move( cs ) ) );
    }
  }
  if ( auto err = validate( net ) )
  {
    throw std::logic_error( "decode_model: model violates the structural encoding: " + *err );
  }
  return net;
}

/*! \brief The assignment a concrete network induces on every variable of `enc`.
 *
 * The network occupies layers 0..depth-1; remaining layers are empty.  Used to
 * check that the clauses admit every genuine network.
 */
inline assignment induced_assignment( encoding const& enc, network const& net )
{
  auto const& m = enc.vars;
  auto const n = m.channels();
  auto const d = m.depth();
  if ( net.channels() != n || net.depth() > d )
  {
    throw std::invalid_argument( "induced_assignment: network does not fit the encoding" );
  }

  assignment a( static_cast<std::size_t>( enc.formula.variable_count() ) + 1u, false );
  auto set = [&a]( int var, bool value ) { a[static_cast<std::size_t>( var )] = value; };

  std::vector<std::vector<comparator>> rows( d );
  for ( std::size_t t = 0; t < net.depth(); ++t )
  {
    rows[t] = net.layers()[t].comparators();
  }

  for ( std::size_t t = 0; t < d; ++t )
  {
    for ( auto const& c : rows[t] )
    {
      set( m.comparator( t, c.low, c.high ), true );
      set( m.used( t, c.low ), true );
      set( m.used( t, c.high ), true );
    }
  }

  for ( std::size_t x = 0; x < m.inputs().size(); ++x )
  {
    auto word = m.inputs()[x];
    for ( std::size_t t = 0; t <= d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        set( m.value( x, t, i ), word[i] );
      }
      if ( t < d )
      {
        word = evaluate( network( n, { layer( rows[t] ) } ), word );
      }
    }
  }

  if ( m.has_reachability() )
  {
    std::vector<std::uint64_t> reach( n );
    for ( std::size_t j = 0; j < n; ++j )
    {
      reach[j] = std::uint64_t{ 1 } << j;
    }
    for ( std::size_t t = 0; t <= d; ++t )
    {
      for ( std::size_t i = 0; i < n; ++i )
      {
        for ( std::size_t j = 0; j < n; ++j )
        {
          set( m.reach( t, i, j ), ( reach[j] >> i ) & 1u );
        }
      }
      if ( t < d )
      {
        for ( auto const& c : rows[t] )
        {
          auto const merged = reach[c.low] | reach[c.high];
          reach[c.low] = merged;
          reach[c.high] = merged;
        }
      }
    }
  }
  return a;
}

/*! \brief DIMACS with a `c g <t> <i> <j> <var>` legend line per comparator variable. */
inline void emit_dimacs( std::ostream& out, encoding const& enc )
{
  auto const legend = enc.vars.legend();
  write_dimacs( out, enc.formula, legend );
}

inline void emit_dimacs( std::ostream& out, cnf_formula const& formula )
{
  write_dimacs( out, formula );
}

} // namespace sortnet
