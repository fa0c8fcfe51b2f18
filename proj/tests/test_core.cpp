#include "oracles.hpp"

#include <sortnet/core.hpp>
#include <sortnet/generators.hpp>
#include <sortnet/io.hpp>
#include <sortnet/prefix.hpp>
#include <sortnet/verify.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace sortnet;

TEST( validate, empty_network_is_valid )
{
  EXPECT_FALSE( validate( network( 5 ) ) );
}

TEST( validate, channel_used_twice )
{
  network net( 4, { layer{ { 0, 1 }, { 1, 2 } } } );
  auto const err = validate( net );
  ASSERT_TRUE( err );
  EXPECT_EQ( *err, "channel 1 used twice in layer 0" );
}

TEST( validate, rejects_empty_layer_and_bad_comparators )
{
  EXPECT_TRUE( validate( network( 3, { layer{ { 0, 1 } }, layer{} } ) ) );
  EXPECT_TRUE( validate( network( 3, { layer{ { 1, 1 } } } ) ) );
  EXPECT_TRUE( validate( network( 3, { layer{ { 2, 1 } } } ) ) );
  EXPECT_TRUE( validate( network( 3, { layer{ { 0, 3 } } } ) ) );
}

TEST( validate, published_networks )
{
  for ( auto name : known_network_names )
  {
    EXPECT_FALSE( validate( known_network( name ) ) ) << name;
  }
  auto const fig2 = known_network( "paper17d10" );
  EXPECT_EQ( fig2.channels(), 17u );
  EXPECT_EQ( fig2.depth(), 10u );
}

TEST( layer, canonical_order_is_idempotent )
{
  layer a{ { 2, 3 }, { 0, 1 } };
  layer b{ { 0, 1 }, { 2, 3 } };
  EXPECT_EQ( a, b );
  EXPECT_EQ( layer( a.comparators() ), a );
  EXPECT_EQ( a.comparators().front(), ( comparator{ 0, 1 } ) );

  network n1( 4, { a } ), n2( 4, { layer{ { 2, 3 }, { 0, 1 } } } );
  for ( std::uint64_t k = 0; k < 16; ++k )
  {
    EXPECT_EQ( evaluate( n1, bit_vector( 4, k ) ), evaluate( n2, bit_vector( 4, k ) ) );
  }
}

TEST( bit_vector, text_and_order )
{
  auto const v = bit_vector::from_string( "0101" );
  EXPECT_EQ( v.width(), 4u );
  EXPECT_FALSE( v[0] );
  EXPECT_TRUE( v[1] );
  EXPECT_EQ( v.to_string(), "0101" );
  EXPECT_EQ( v.lex_key(), 5u );
  EXPECT_EQ( bit_vector::from_lex_key( 4, 5 ), v );
  EXPECT_LT( bit_vector::from_string( "0011" ), bit_vector::from_string( "0100" ) );
  EXPECT_EQ( bit_vector::from_string( "0010111" ).window(), 2u );
  EXPECT_EQ( bit_vector::from_string( "0101011" ).window(), 4u );
  EXPECT_EQ( bit_vector::from_string( "0011" ).window(), 0u );
  EXPECT_THROW( bit_vector::from_string( "01x" ), std::invalid_argument );
  EXPECT_THROW( bit_vector( 65 ), std::invalid_argument );
}

TEST( evaluate, basics )
{
  network single( 2, { layer{ { 0, 1 } } } );
  EXPECT_EQ( evaluate( single, bit_vector::from_string( "10" ) ).to_string(), "01" );

  auto const fig3 = known_network( "paper20d11" );
  EXPECT_EQ( evaluate( fig3, bit_vector( 20 ) ), bit_vector( 20 ) );
  EXPECT_THROW( evaluate( fig3, bit_vector( 19 ) ), std::invalid_argument );
}

TEST( evaluate, reverse_sorted_input_on_fig3 )
{
  auto const fig3 = known_network( "paper20d11" );
  auto const x = bit_vector::from_string( "11111111110000000000" );
  auto const y = evaluate( fig3, x );
  EXPECT_EQ( y.to_string(), "00000000001111111111" );
  EXPECT_EQ( oracle::run_naive( fig3, oracle::to_bools( x ) ), oracle::to_bools( y ) );
}

TEST( evaluate, conserves_content_and_is_monotone )
{
  std::mt19937_64 rng( 7 );
  for ( int round = 0; round < 50; ++round )
  {
    auto const n = 2u + rng() % 15u;
    auto const net = oracle::random_network( n, 1u + rng() % 8u, rng );
    for ( int k = 0; k < 40; ++k )
    {
      bit_vector x( n, rng() );
      bit_vector y( n, x.word() | rng() ); // y >= x bitwise
      auto const ex = evaluate( net, x ), ey = evaluate( net, y );
      EXPECT_EQ( ex.count_ones(), x.count_ones() );
      EXPECT_EQ( ex.word() & ~ey.word(), 0u );
      EXPECT_EQ( oracle::to_bools( ex ), oracle::run_naive( net, oracle::to_bools( x ) ) );
    }
  }
}

TEST( evaluate_batch, empty_batch )
{
  EXPECT_TRUE( evaluate_batch( network( 3 ), {} ).empty() );
}

TEST( evaluate_batch, four_poset_has_six_outputs )
{
  auto const prefix = poset_prefix( 4, 4, { 0 } );
  std::vector<bit_vector> inputs;
  for ( std::uint64_t k = 0; k < 16; ++k )
  {
    inputs.emplace_back( 4, k );
  }
  auto const outputs = evaluate_batch( prefix, inputs );
  std::set<bit_vector> distinct( outputs.begin(), outputs.end() );
  EXPECT_EQ( distinct.size(), 6u );
}

TEST( evaluate_batch, matches_pointwise_evaluation )
{
  std::mt19937_64 rng( 11 );
  auto const net = known_network( "paper17d10" ).prefix( 6 );
  std::vector<bit_vector> inputs;
  for ( int k = 0; k < 1000; ++k )
  {
    inputs.emplace_back( 17, rng() );
  }
  auto const outputs = evaluate_batch( net, inputs );
  ASSERT_EQ( outputs.size(), inputs.size() );
  for ( std::size_t k = 0; k < inputs.size(); ++k )
  {
    EXPECT_EQ( outputs[k], evaluate( net, inputs[k] ) );
  }

  for ( int round = 0; round < 30; ++round )
  {
    auto const n = 1u + rng() % 30u;
    auto const random_net = oracle::random_network( n, rng() % 10u, rng );
    std::vector<bit_vector> batch;
    for ( auto k = rng() % 200u; k > 0; --k )
    {
      batch.emplace_back( n, rng() );
    }
    auto const out = evaluate_batch( random_net, batch );
    for ( std::size_t k = 0; k < batch.size(); ++k )
    {
      EXPECT_EQ( out[k], evaluate( random_net, batch[k] ) );
    }
  }
}

TEST( remove_channel, untouched_last_channel )
{
  network net( 4, { layer{ { 0, 1 } }, layer{ { 1, 2 } } } );
  auto const reduced = remove_channel( net, 3 );
  EXPECT_EQ( reduced, network( 3, { layer{ { 0, 1 } }, layer{ { 1, 2 } } } ) );
}

TEST( remove_channel, single_comparator )
{
  network net( 2, { layer{ { 0, 1 } } } );
  EXPECT_EQ( remove_channel( net, 0 ), network( 1 ) );
  EXPECT_EQ( remove_channel( net, 1 ), network( 1 ) );
  EXPECT_THROW( remove_channel( net, 2 ), std::out_of_range );
}

TEST( remove_channel, fig3_to_nineteen_channels )
{
  auto const fig3 = known_network( "paper20d11" );
  for ( channel_t c : { 0u, 7u, 19u } )
  {
    auto const reduced = remove_channel( fig3, c );
    EXPECT_EQ( reduced.channels(), 19u );
    EXPECT_LE( reduced.depth(), 11u );
    EXPECT_FALSE( validate( reduced ) );
    EXPECT_TRUE( verify_01( reduced ).sorts() ) << "channel " << c;
  }
}

TEST( remove_channel, preserves_sorting_for_every_channel_small_n )
{
  for ( std::size_t n = 2; n <= 12; ++n )
  {
    auto const net = batcher_oddeven_sort( n );
    for ( channel_t c = 0; c < n; ++c )
    {
      auto const reduced = remove_channel( net, c );
      ASSERT_FALSE( validate( reduced ) );
      EXPECT_LE( reduced.depth(), net.depth() );
      EXPECT_TRUE( oracle::sorts_all_naive( reduced ) ) << "n=" << n << " channel " << c;
    }
  }
  auto const fig2 = known_network( "paper17d10" );
  for ( channel_t c = 0; c < 17; c += 4 )
  {
    EXPECT_TRUE( verify_01( remove_channel( fig2, c ) ).sorts() );
  }
}

TEST( io, text_format )
{
  auto const net = parse_network_text( "# a comment\nn 4\n0:1,2:3\n0:2,1:3  # trailing\n\n1:2\n" );
  EXPECT_EQ( net, batcher_oddeven_sort( 4 ) );
  EXPECT_EQ( to_text( net ), "n 4\n0:1,2:3\n0:2,1:3\n1:2\n" );
  EXPECT_EQ( parse_network_text( to_text( known_network( "paper20d11" ) ) ), known_network( "paper20d11" ) );
}

TEST( io, text_errors )
{
  EXPECT_THROW( parse_network_text( "" ), parse_error );
  EXPECT_THROW( parse_network_text( "0:1\n" ), parse_error );
  EXPECT_THROW( parse_network_text( "n 4\n1:0\n" ), parse_error );
  EXPECT_THROW( parse_network_text( "n 4\n0:1,1:2\n" ), parse_error );
  EXPECT_THROW( parse_network_text( "n 4\n0:4\n" ), parse_error );
  EXPECT_THROW( parse_network_text( "n 4\n0-1\n" ), parse_error );
  EXPECT_THROW( parse_network_text( "n four\n" ), parse_error );
}

TEST( io, json_mirror )
{
  auto const net = batcher_oddeven_sort( 4 );
  auto const js = to_json( net );
  EXPECT_EQ( js.dump(), R"({"layers":[[[0,1],[2,3]],[[0,2],[1,3]],[[1,2]]],"n":4})" );
  EXPECT_EQ( network_from_json( js ), net );
  std::istringstream in( js.dump() );
  EXPECT_EQ( read_network( in ), net );
  EXPECT_THROW( network_from_json( nlohmann::json::parse( R"({"n":2,"layers":[[[1,0]]]})" ) ), parse_error );
}
