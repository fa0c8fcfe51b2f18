// sortnet: verify, synthesize, encode and generate sorting networks.
//
// Exit codes: 0 success / sorts-all, 1 negative result (counterexample or
// infeasible), 2 usage or parse error, 3 resource limit.

#include <sortnet/cegis.hpp>
#include <sortnet/encode.hpp>
#include <sortnet/generators.hpp>
#include <sortnet/io.hpp>
#include <sortnet/prefix.hpp>
#include <sortnet/verify.hpp>

#include "CLI11.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace
{

constexpr int exit_ok = 0;
constexpr int exit_negative = 1;
constexpr int exit_usage = 2;
constexpr int exit_limit = 3;

struct usage_error : std::runtime_error
{
  using std::runtime_error::runtime_error;
};

sortnet::network load_network( std::string const& path )
{
  if ( path == "-" )
  {
    return sortnet::read_network( std::cin );
  }
  std::ifstream in( path );
  if ( !in )
  {
    throw usage_error( "cannot open '" + path + "'" );
  }
  return sortnet::read_network( in );
}

// all | windowed:<k> | <file with one bitstring per line>
sortnet::input_family parse_family( std::string const& text, std::size_t n )
{
  if ( text == "all" )
  {
    return sortnet::input_family::all_binary();
  }
  if ( text.rfind( "windowed:", 0 ) == 0 )
  {
    try
    {
      return sortnet::input_family::windowed( std::stoul( text.substr( 9 ) ) );
    }
    catch ( std::exception const& )
    {
      throw usage_error( "bad window bound in '" + text + "'" );
    }
  }
  if ( text == "none" )
  {
    return sortnet::input_family::explicit_set( {} );
  }
  std::ifstream in( text );
  if ( !in )
  {
    throw usage_error( "unknown input family '" + text + "' (expected all, windowed:<k>, none or a file)" );
  }
  std::vector<sortnet::bit_vector> vectors;
  std::string line;
  while ( std::getline( in, line ) )
  {
    auto const first = line.find_first_not_of( " \t\r" );
    if ( first == std::string::npos || line[first] == '#' )
    {
      continue;
    }
    auto const last = line.find_last_not_of( " \t\r" );
    auto v = sortnet::bit_vector::from_string( line.substr( first, last - first + 1 ) );
    if ( v.width() != n )
    {
      throw usage_error( "input '" + v.to_string() + "' has width " + std::to_string( v.width() ) + ", expected " + std::to_string( n ) );
    }
    vectors.push_back( v );
  }
  return sortnet::input_family::explicit_set( std::move( vectors ) );
}

// none | canonical | fig2-3layer | fig3-4layer | poset<2|4|8>:<start>[,<start>...] | <file>
sortnet::network parse_prefix( std::string const& text, std::size_t n )
{
  if ( text == "none" )
  {
    return sortnet::network( n );
  }
  if ( text == "canonical" )
  {
    return sortnet::canonical_prefix( n );
  }
  if ( text == "fig2-3layer" || text == "fig3-4layer" )
  {
    auto p = sortnet::figure_prefix( text );
    if ( p.channels() != n )
    {
      throw usage_error( "prefix " + text + " has " + std::to_string( p.channels() ) + " channels, --n is " + std::to_string( n ) );
    }
    return p;
  }
  if ( text.rfind( "poset", 0 ) == 0 && text.find( ':' ) != std::string::npos )
  {
    auto const colon = text.find( ':' );
    try
    {
      auto const block = std::stoul( text.substr( 5, colon - 5 ) );
      std::vector<sortnet::channel_t> starts;
      std::stringstream list( text.substr( colon + 1 ) );
      std::string item;
      while ( std::getline( list, item, ',' ) )
      {
        starts.push_back( static_cast<sortnet::channel_t>( std::stoul( item ) ) );
      }
      return sortnet::poset_prefix( block, n, starts );
    }
    catch ( std::invalid_argument const& e )
    {
      throw usage_error( "bad poset prefix '" + text + "': " + e.what() );
    }
  }
  if ( !std::filesystem::exists( text ) )
  {
    throw usage_error( "unknown prefix '" + text + "'" );
  }
  auto p = load_network( text );
  if ( p.channels() != n )
  {
    throw usage_error( "prefix file has " + std::to_string( p.channels() ) + " channels, --n is " + std::to_string( n ) );
  }
  return p;
}

void write_output( std::string const& path, std::string const& content )
{
  if ( path.empty() || path == "-" )
  {
    std::cout << content;
    return;
  }
  std::ofstream out( path );
  if ( !out || !( out << content ) )
  {
    throw std::runtime_error( "cannot write '" + path + "'" );
  }
}

struct verify_args
{
  std::string file;
  std::string family = "all";
  bool json = false;
  unsigned threads = 0;
  std::size_t limit = 26;
};

int run_verify( verify_args const& args )
{
  auto const net = load_network( args.file );
  auto const start = std::chrono::steady_clock::now();
  sortnet::verify_options options{ args.limit, args.threads };

  sortnet::verdict v;
  if ( args.family == "all" )
  {
    try
    {
      v = sortnet::verify_01( net, options );
    }
    catch ( sortnet::exhaustive_limit_error const& e )
    {
      throw usage_error( e.what() );
    }
  }
  else
  {
    auto const family = parse_family( args.family, net.channels() );
    auto const members = sortnet::enumerate_family( net.channels(), family );
    v.inputs_checked = members.size();
    if ( auto cex = sortnet::find_counterexample( net, family ) )
    {
      v.status = sortnet::verdict::status_t::counterexample;
      v.witness = cex;
    }
  }
  auto const ms = std::chrono::duration<double, std::milli>( std::chrono::steady_clock::now() - start ).count();

  if ( args.json )
  {
    auto js = sortnet::to_json( v );
    js["channels"] = net.channels();
    js["depth"] = net.depth();
    js["size"] = net.size();
    js["wall_ms"] = ms;
    std::cout << js.dump() << '\n';
  }
  else if ( v.sorts() )
  {
    std::cout << v.inputs_checked << " inputs, sorts-all (" << net.channels() << " channels, depth " << net.depth() << ", " << net.size() << " comparators, " << ms << " ms)\n";
  }
  else
  {
    std::cout << "counterexample " << v.witness->to_string() << " -> " << sortnet::evaluate( net, *v.witness ).to_string() << '\n'
              << v.inputs_checked << " inputs checked (" << ms << " ms)\n";
  }
  return v.sorts() ? exit_ok : exit_negative;
}

struct synth_args
{
  std::size_t n = 0;
  std::size_t depth = 0;
  std::string prefix = "canonical";
  bool no_reachability = false;
  double timeout = 0.0;
  double call_timeout = 0.0;
  std::uint64_t seed = 0;
  std::string seeds = "windowed:2";
  std::string family = "all";
  std::string trace_out;
  std::string out;
  std::string solver;
  bool json = false;
  unsigned threads = 0;
};

int run_synth( synth_args const& args )
{
  sortnet::synthesis_config config;
  config.n = args.n;
  config.d = args.depth;
  config.prefix = parse_prefix( args.prefix, args.n );
  if ( config.prefix.depth() > args.depth )
  {
    throw usage_error( "prefix has " + std::to_string( config.prefix.depth() ) + " layers, more than --depth " + std::to_string( args.depth ) );
  }
  config.use_reachability = !args.no_reachability;
  config.seed_inputs = parse_family( args.seeds, args.n );
  config.counterexample_family = parse_family( args.family, args.n );
  config.seed = args.seed;
  config.verification.threads = args.threads;
  if ( args.timeout > 0.0 )
  {
    config.global_time = std::chrono::milliseconds( static_cast<long long>( args.timeout * 1000.0 ) );
  }
  if ( args.call_timeout > 0.0 )
  {
    config.per_call.wall_time = std::chrono::milliseconds( static_cast<long long>( args.call_timeout * 1000.0 ) );
  }

  auto backend = sortnet::make_backend( args.solver, args.seed );
  auto const outcome = sortnet::synthesize( config, *backend );

  if ( !args.trace_out.empty() )
  {
    std::ofstream trace( args.trace_out );
    sortnet::write_trace( trace, outcome.trace );
  }

  if ( args.json )
  {
    nlohmann::json js{ { "status", sortnet::to_string( outcome.status ) },
                       { "iterations", outcome.trace.size() },
                       { "inputs", outcome.input_count },
                       { "backend", backend->name() } };
    js["network"] = outcome.result ? sortnet::to_json( *outcome.result ) : nlohmann::json( nullptr );
    std::cerr << js.dump() << '\n';
  }
  else
  {
    std::cerr << sortnet::to_string( outcome.status ) << " after " << outcome.trace.size() << " iterations, " << outcome.input_count << " inputs\n";
  }

  switch ( outcome.status )
  {
  case sortnet::synthesis_outcome::status_t::network_found:
    write_output( args.out, sortnet::to_text( *outcome.result ) );
    return exit_ok;
  case sortnet::synthesis_outcome::status_t::infeasible:
    return exit_negative;
  default:
    return exit_limit;
  }
}

struct emit_args
{
  std::size_t n = 0;
  std::size_t depth = 0;
  std::string prefix = "none";
  std::string inputs = "all";
  bool reachability = false;
  std::string out;
};

int run_emit( emit_args const& args )
{
  auto enc = sortnet::encode_structure( args.n, args.depth, parse_prefix( args.prefix, args.n ) );
  if ( args.reachability && args.n >= 2u )
  {
    sortnet::add_reachability( enc );
  }
  for ( auto const& x : sortnet::enumerate_family( args.n, parse_family( args.inputs, args.n ) ) )
  {
    sortnet::add_sortedness( enc, x );
  }
  std::ostringstream text;
  sortnet::emit_dimacs( text, enc );
  write_output( args.out, text.str() );
  return exit_ok;
}

struct gen_args
{
  std::size_t n = 0;
  std::string name;
  bool json = false;
};

int emit_network( sortnet::network const& net, bool json )
{
  if ( json )
  {
    std::cout << sortnet::to_json( net ).dump() << '\n';
  }
  else
  {
    sortnet::write_network_text( std::cout, net );
  }
  return exit_ok;
}

} // namespace

int main( int argc, char** argv )
{
  CLI::App app{ "Verify, synthesize, encode and generate sorting networks" };
  app.set_config( "--config", "", "TOML/INI file with default option values" );
  app.require_subcommand( 1 );

  verify_args va;
  auto* verify = app.add_subcommand( "verify", "Check a network on all binary inputs (or a chosen family)" );
  verify->add_option( "file", va.file, "Network file, '-' for stdin" )->required();
  verify->add_option( "--family", va.family, "all | windowed:<k> | <file of bitstrings>" );
  verify->add_flag( "--json", va.json, "Machine-readable report" );
  verify->add_option( "--threads", va.threads, "Worker threads (0 = all cores)" );
  verify->add_option( "--limit", va.limit, "Largest channel count checked exhaustively" );

  synth_args sa;
  auto* synth = app.add_subcommand( "synth", "Synthesize a sorting network by counterexample-guided search" );
  synth->add_option( "--n", sa.n, "Channels" )->required();
  synth->add_option( "--depth", sa.depth, "Layers" )->required();
  synth->add_option( "--prefix", sa.prefix, "none | canonical | fig2-3layer | fig3-4layer | poset<k>:<starts> | <file>" );
  synth->add_flag( "--no-reachability", sa.no_reachability, "Drop the reachability constraints" );
  synth->add_option( "--timeout", sa.timeout, "Global wall-clock budget in seconds" );
  synth->add_option( "--call-timeout", sa.call_timeout, "Wall-clock budget per solver call in seconds" );
  synth->add_option( "--seed", sa.seed, "Solver seed" );
  synth->add_option( "--seeds", sa.seeds, "Initial inputs: windowed:<k> | none | <file>" );
  synth->add_option( "--family", sa.family, "Counterexample family: all | windowed:<k> | <file>" );
  synth->add_option( "--trace-out", sa.trace_out, "Write the iteration trace as JSON lines" );
  synth->add_option( "--out", sa.out, "Write the network here instead of stdout" );
  synth->add_option( "--solver", sa.solver, "External DIMACS solver executable (default: embedded)" )->envname( "SORTNET_SOLVER" );
  synth->add_flag( "--json", sa.json, "Machine-readable summary on stderr" );
  synth->add_option( "--threads", sa.threads, "Verification threads (0 = all cores)" );

  emit_args ea;
  auto* emit = app.add_subcommand( "emit-cnf", "Write the DIMACS encoding of a synthesis instance" );
  emit->add_option( "--n", ea.n, "Channels" )->required();
  emit->add_option( "--depth", ea.depth, "Layers" )->required();
  emit->add_option( "--prefix", ea.prefix, "none | canonical | fig2-3layer | fig3-4layer | poset<k>:<starts> | <file>" );
  emit->add_option( "--inputs", ea.inputs, "Inputs to sort: all | windowed:<k> | none | <file>" );
  emit->add_flag( "--reachability", ea.reachability, "Add the reachability constraints" );
  emit->add_option( "--out", ea.out, "Output file (default stdout)" );

  gen_args ga;
  auto* gen = app.add_subcommand( "gen", "Print a generated or published network" );
  gen->require_subcommand( 1 );
  auto* batcher = gen->add_subcommand( "batcher", "Batcher's odd-even mergesort" );
  batcher->add_option( "--n", ga.n, "Channels" )->required()->check( CLI::PositiveNumber );
  batcher->add_flag( "--json", ga.json, "JSON instead of text" );
  auto* known = gen->add_subcommand( "known", "A published network: paper17d10 | paper20d11 | paper19d11" );
  known->add_option( "name", ga.name, "Network name" )->required();
  known->add_flag( "--json", ga.json, "JSON instead of text" );

  try
  {
    app.parse( argc, argv );
  }
  catch ( CLI::CallForHelp const& e )
  {
    return app.exit( e );
  }
  catch ( CLI::ParseError const& e )
  {
    app.exit( e );
    return exit_usage;
  }

  try
  {
    if ( *verify )
      return run_verify( va );
    if ( *synth )
      return run_synth( sa );
    if ( *emit )
      return run_emit( ea );
    if ( *batcher )
      return emit_network( sortnet::batcher_oddeven_sort( ga.n ), ga.json );
    if ( *known )
      return emit_network( sortnet::known_network( ga.name ), ga.json );
  }
  catch ( sortnet::parse_error const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  catch ( usage_error const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  catch ( std::invalid_argument const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  catch ( sortnet::solver_error const& e )
  {
    std::cerr << "solver error: " << e.what() << '\n';
    return exit_usage;
  }
  catch ( std::exception const& e )
  {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
  return exit_usage;
}
