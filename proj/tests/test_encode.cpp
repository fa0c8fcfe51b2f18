#include "oracles.hpp"

#include <sortnet/backend.hpp>
#include <sortnet/encode.hpp>
#include <sortnet/generators.hpp>
#include <sortnet/prefix.hpp>
#include <sortnet/verify.hpp>

#include <gtest/gtest.h>

#include <bit>
#include <fstream>
#include <random>
#include <sstream>

using namespace sortnet;

namespace
{

bool is_sat( cnf_formula const& f )
{
  return solve( f ).status == solver_result::status_t::satisfiable;
}

std::string read_file( std::string const& path )
{
  std::ifstream in( path );
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

} // namespace

TEST( encode_structure, two_channels_one_layer )
{
  auto const enc = encode_structure( 2, 1 );
  EXPECT_EQ( enc.vars.comparator_variable_count(), 1u );
  EXPECT_EQ( enc.vars.used_variable_count(), 2u );
  EXPECT_EQ( enc.vars.comparator( 0, 0, 1 ), enc.vars.comparator( 0, 1, 0 ) );
  EXPECT_THROW( enc.vars.comparator( 1, 0, 1 ), std::out_of_range );
  EXPECT_THROW( enc.vars.comparator( 0, 1, 1 ), std::out_of_range );
}

TEST( encode_structure, at_most_one_per_channel )
{
  auto enc = encode_structure( 3, 1 );
  auto const& m = enc.vars;
  EXPECT_EQ( m.comparator_variable_count(), 3u );
  // any two comparators of a 3-channel layer share a channel
  for ( auto [a, b] : { std::pair{ m.comparator( 0, 0, 1 ), m.comparator( 0, 1, 2 ) }, std::pair{ m.comparator( 0, 0, 1 ), m.comparator( 0, 0, 2 ) }, std::pair{ m.comparator( 0, 0, 2 ), m.comparator( 0, 1, 2 ) } } )
  {
    auto f = enc.formula;
    f.add_clause( { a } );
    f.add_clause( { b } );
    EXPECT_FALSE( oracle::brute_force_sat( f ) );
  }
  auto f = enc.formula;
  f.add_clause( { m.comparator( 0, 0, 1 ) } );
  EXPECT_TRUE( oracle::brute_force_sat( f ) );
}

TEST( encode_structure, used_matches_comparators )
{
  auto const enc = encode_structure( 4, 1 );
  auto const& m = enc.vars;
  auto f = enc.formula;
  f.add_clause( { m.used( 0, 2 ) } );
  f.add_clause( { -m.comparator( 0, 0, 2 ) } );
  f.add_clause( { -m.comparator( 0, 1, 2 ) } );
  auto const model = oracle::brute_force_sat( f );
  ASSERT_TRUE( model );
  EXPECT_TRUE( ( *model )[static_cast<std::size_t>( m.comparator( 0, 2, 3 ) )] );
}

TEST( encode_structure, prefix_is_fixed )
{
  auto const prefix = figure_prefix( "fig2-3layer" );
  auto const enc = encode_structure( 17, 10, prefix );
  EXPECT_EQ( enc.vars.prefix_depth(), 3u );
  auto const r = solve( enc.formula );
  ASSERT_EQ( r.status, solver_result::status_t::satisfiable );
  auto const net = decode_model( enc.vars, *r.model );
  ASSERT_GE( net.depth(), 3u );
  EXPECT_EQ( net.prefix( 3 ), prefix );
}

TEST( encode_structure, rejects_bad_prefix )
{
  EXPECT_THROW( encode_structure( 5, 3, canonical_prefix( 4 ) ), std::invalid_argument );
  EXPECT_THROW( encode_structure( 4, 1, batcher_oddeven_sort( 4 ) ), std::invalid_argument );
}

TEST( add_sortedness, single_input_forces_comparator )
{
  auto enc = encode_structure( 2, 1 );
  add_sortedness( enc, bit_vector::from_string( "10" ) );
  EXPECT_TRUE( is_sat( enc.formula ) );
  auto f = enc.formula;
  f.add_clause( { -enc.vars.comparator( 0, 0, 1 ) } );
  EXPECT_FALSE( is_sat( f ) );
  EXPECT_FALSE( oracle::brute_force_sat( f ) );
}

TEST( add_sortedness, decoded_network_sorts_the_input )
{
  auto enc = encode_structure( 4, 3 );
  auto const x = bit_vector::from_string( "1010" );
  add_sortedness( enc, x );
  auto const r = solve( enc.formula );
  ASSERT_EQ( r.status, solver_result::status_t::satisfiable );
  EXPECT_TRUE( is_sorted( evaluate( decode_model( enc.vars, *r.model ), x ) ) );
}

TEST( add_sortedness, idempotent_and_width_checked )
{
  auto enc = encode_structure( 3, 2 );
  add_sortedness( enc, bit_vector::from_string( "110" ) );
  auto const clauses = enc.formula.clause_count();
  add_sortedness( enc, bit_vector::from_string( "110" ) );
  EXPECT_EQ( enc.formula.clause_count(), clauses );
  EXPECT_EQ( enc.vars.inputs().size(), 1u );
  EXPECT_THROW( add_sortedness( enc, bit_vector::from_string( "10" ) ), std::invalid_argument );
}

TEST( add_sortedness, depth_zero )
{
  auto enc = encode_structure( 4, 0 );
  EXPECT_EQ( enc.formula.variable_count(), 0 );
  add_sortedness( enc, bit_vector::from_string( "0011" ) );
  EXPECT_TRUE( is_sat( enc.formula ) );
  add_sortedness( enc, bit_vector::from_string( "0100" ) );
  EXPECT_FALSE( is_sat( enc.formula ) );
}

TEST( add_reachability, forces_the_only_comparator )
{
  auto enc = encode_structure( 2, 1 );
  add_reachability( enc );
  auto const model = oracle::brute_force_sat( enc.formula );
  ASSERT_TRUE( model );
  EXPECT_TRUE( ( *model )[static_cast<std::size_t>( enc.vars.comparator( 0, 0, 1 ) )] );
}

TEST( add_reachability, weaker_than_full_sortedness )
{
  auto enc = encode_structure( 4, 2 );
  add_reachability( enc );
  auto const r = solve( enc.formula );
  ASSERT_EQ( r.status, solver_result::status_t::satisfiable );
  EXPECT_TRUE( check_reachability( decode_model( enc.vars, *r.model ) ) );
  for ( std::uint64_t k = 0; k < 16; ++k )
  {
    add_sortedness( enc, bit_vector( 4, k ) );
  }
  EXPECT_FALSE( is_sat( enc.formula ) );
}

TEST( add_reachability, decoded_networks_are_complete )
{
  for ( std::size_t n = 2; n <= 6; ++n )
  {
    for ( std::size_t d = 1; d <= 4; ++d )
    {
      auto enc = encode_structure( n, d );
      add_reachability( enc );
      auto const r = solve( enc.formula );
      // same as the gossip problem: ceil(log2 n) rounds, one more for odd n
      auto const needed = static_cast<std::size_t>( std::bit_width( n - 1 ) ) + n % 2u;
      ASSERT_EQ( r.status == solver_result::status_t::satisfiable, d >= needed ) << n << " " << d;
      if ( r.model )
      {
        EXPECT_TRUE( check_reachability( decode_model( enc.vars, *r.model ) ) );
      }
    }
  }
}

TEST( induced_assignment, published_networks_satisfy_reachability )
{
  for ( auto name : { "paper17d10", "paper20d11" } )
  {
    auto const net = known_network( name );
    auto enc = encode_structure( net.channels(), net.depth() );
    add_reachability( enc );
    EXPECT_TRUE( satisfies( enc.formula, induced_assignment( enc, net ) ) ) << name;
  }
}

TEST( induced_assignment, batcher_satisfies_everything )
{
  for ( std::size_t n = 2; n <= 8; ++n )
  {
    auto const net = batcher_oddeven_sort( n );
    auto enc = encode_structure( n, net.depth() + 1u, net.prefix( 1 ) );
    add_reachability( enc );
    for ( auto const& x : enumerate_family( n, input_family::all_binary() ) )
    {
      add_sortedness( enc, x );
    }
    EXPECT_TRUE( satisfies( enc.formula, induced_assignment( enc, net ) ) ) << n;
    EXPECT_EQ( decode_model( enc.vars, induced_assignment( enc, net ) ), net );
  }
}

TEST( induced_assignment, soundness_on_random_networks )
{
  std::mt19937_64 rng( 21 );
  for ( int round = 0; round < 100; ++round )
  {
    auto const n = 2u + rng() % 4u;
    auto const d = 1u + rng() % 4u;
    auto const net = oracle::random_network( n, d, rng );
    auto enc = encode_structure( n, d );
    std::vector<bit_vector> inputs;
    for ( std::uint64_t k = 0; k < ( 1u << n ); ++k )
    {
      if ( rng() % 3u == 0u )
      {
        inputs.emplace_back( n, k );
        add_sortedness( enc, inputs.back() );
      }
    }
    bool const sorts = std::all_of( inputs.begin(), inputs.end(), [&]( auto const& x ) { return is_sorted( evaluate( net, x ) ); } );
    EXPECT_EQ( satisfies( enc.formula, induced_assignment( enc, net ) ), sorts );
  }
}

TEST( decode_model, all_false_is_empty )
{
  auto const enc = encode_structure( 5, 3 );
  assignment const none( static_cast<std::size_t>( enc.formula.variable_count() ) + 1u, false );
  auto const net = decode_model( enc.vars, none );
  EXPECT_EQ( net.channels(), 5u );
  EXPECT_EQ( net.depth(), 0u );
}

TEST( decode_model, strips_interior_empty_layers )
{
  auto const enc = encode_structure( 3, 3 );
  assignment a( static_cast<std::size_t>( enc.formula.variable_count() ) + 1u, false );
  a[static_cast<std::size_t>( enc.vars.comparator( 0, 0, 1 ) )] = true;
  a[static_cast<std::size_t>( enc.vars.comparator( 2, 1, 2 ) )] = true;
  EXPECT_EQ( decode_model( enc.vars, a ), network( 3, { layer{ { 0, 1 } }, layer{ { 1, 2 } } } ) );
}

TEST( decode_model, rejects_overlapping_comparators )
{
  auto const enc = encode_structure( 3, 1 );
  assignment a( static_cast<std::size_t>( enc.formula.variable_count() ) + 1u, false );
  a[static_cast<std::size_t>( enc.vars.comparator( 0, 0, 1 ) )] = true;
  a[static_cast<std::size_t>( enc.vars.comparator( 0, 1, 2 ) )] = true;
  EXPECT_THROW( decode_model( enc.vars, a ), std::logic_error );
}

TEST( var_map, counts_and_reverse_lookup )
{
  for ( std::size_t n : { 2u, 3u, 5u } )
  {
    for ( std::size_t d : { 1u, 2u, 4u } )
    {
      auto enc = encode_structure( n, d );
      add_sortedness( enc, bit_vector( n, 1u ) );
      add_sortedness( enc, bit_vector( n, 2u ) );
      add_reachability( enc );
      auto const& m = enc.vars;
      EXPECT_EQ( m.comparator_variable_count(), d * n * ( n - 1 ) / 2 );
      EXPECT_EQ( m.used_variable_count(), d * n );
      EXPECT_EQ( m.value_variable_count(), 2u * ( d + 1 ) * n );
      EXPECT_EQ( m.reach_variable_count(), ( d + 1 ) * n * n );
      EXPECT_EQ( static_cast<std::size_t>( enc.formula.variable_count() ), m.comparator_variable_count() + m.used_variable_count() + m.value_variable_count() + m.reach_variable_count() );

      std::set<int> seen;
      for ( int v = 1; v <= enc.formula.variable_count(); ++v )
      {
        auto const info = m.describe( v );
        ASSERT_TRUE( info );
        int back = 0;
        switch ( info->kind )
        {
        case variable_info::kind_t::comparator:
          back = m.comparator( info->layer, info->first, info->second );
          break;
        case variable_info::kind_t::used:
          back = m.used( info->layer, info->first );
          break;
        case variable_info::kind_t::value:
          back = m.value( info->input, info->layer, info->first );
          break;
        case variable_info::kind_t::reach:
          back = m.reach( info->layer, info->first, info->second );
          break;
        }
        EXPECT_EQ( back, v );
        seen.insert( back );
      }
      EXPECT_EQ( seen.size(), static_cast<std::size_t>( enc.formula.variable_count() ) );
      EXPECT_FALSE( m.describe( 0 ) );
      EXPECT_FALSE( m.describe( enc.formula.variable_count() + 1 ) );
      EXPECT_EQ( m.input_index( bit_vector( n, 2u ) ), 1u );
    }
  }
}

TEST( emit_dimacs, empty_formula )
{
  std::ostringstream out;
  emit_dimacs( out, cnf_formula{} );
  EXPECT_EQ( out.str(), "p cnf 0 0\n" );
}

TEST( emit_dimacs, round_trip )
{
  auto enc = encode_structure( 3, 2 );
  add_sortedness( enc, bit_vector::from_string( "101" ) );
  add_reachability( enc );
  std::ostringstream out;
  emit_dimacs( out, enc );
  std::istringstream in( out.str() );
  EXPECT_EQ( read_dimacs( in ), enc.formula );
  EXPECT_NE( out.str().find( "c g 0 0 1 1\n" ), std::string::npos );
}

TEST( emit_dimacs, golden_structure_file )
{
  auto const enc = encode_structure( 3, 3 );
  std::ostringstream out;
  emit_dimacs( out, enc );
  EXPECT_EQ( out.str(), read_file( SORTNET_TEST_DATA "/n3_d3_structure.cnf" ) );
}

TEST( read_dimacs, errors )
{
  std::istringstream missing( "1 2 0\n" );
  EXPECT_THROW( read_dimacs( missing ), std::runtime_error );
  std::istringstream count( "p cnf 2 2\n1 2 0\n" );
  EXPECT_THROW( read_dimacs( count ), std::runtime_error );
  std::istringstream range( "p cnf 2 1\n1 3 0\n" );
  EXPECT_THROW( read_dimacs( range ), std::exception );
}
