/*!
  \file cegis.hpp
  \brief Counterexample-guided synthesis of sorting networks

  Each iteration asks the solver for a network sorting the inputs collected
  so far, then searches for an input that network fails on.  The loop stops
  when no counterexample exists (the candidate is re-verified independently)
  or when the solver proves that no network sorts the collected inputs.
*/

#pragma once

#include "backend.hpp"
#include "core.hpp"
#include "encode.hpp"
#include "verify.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <istream>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace sortnet
{

struct synthesis_config
{
  std::size_t n = 0;
  std::size_t d = 0;
  /*! Fixed leading layers; a default-constructed network means no prefix. */
  network prefix;
  bool use_reachability = true;
  /*! Inputs registered before the first solver call. */
  input_family seed_inputs = input_family::windowed( 2u );
  input_family counterexample_family = input_family::all_binary();
  solve_limits per_call;
  std::optional<std::chrono::milliseconds> global_time;
  std::uint64_t seed = 0u;
  verify_options verification;
};

struct trace_record
{
  std::size_t iteration = 0;
  /*! Input added after this iteration; absent on the final one. */
  std::optional<bit_vector> counterexample;
  solver_result::status_t solver_status = solver_result::status_t::unknown;
  std::uint64_t conflicts = 0;
  std::uint64_t wall_ms = 0;

  /*! Equal up to timing. */
  bool same_run( trace_record const& other ) const
  {
    return iteration == other.iteration && counterexample == other.counterexample && solver_status == other.solver_status && conflicts == other.conflicts;
  }
};

using synthesis_trace = std::vector<trace_record>;

struct synthesis_outcome
{
  enum class status_t
  {
    network_found,
    infeasible,
    resource_limit
  };

  status_t status = status_t::resource_limit;
  std::optional<network> result;
  synthesis_trace trace;
  /*! Inputs in the final formula, seeds included. */
  std::size_t input_count = 0;
};

inline char const* to_string( synthesis_outcome::status_t s )
{
  switch ( s )
  {
  case synthesis_outcome::status_t::network_found: return "network-found";
  case synthesis_outcome::status_t::infeasible: return "infeasible";
  default: return "resource-limit";
  }
}

inline nlohmann::json to_json( trace_record const& r )
{
  return { { "iteration", r.iteration },
           { "counterexample", r.counterexample ? nlohmann::json( r.counterexample->to_string() ) : nlohmann::json( nullptr ) },
           { "solver_status", to_string( r.solver_status ) },
           { "conflicts", r.conflicts },
           { "wall_ms", r.wall_ms } };
}

inline trace_record trace_record_from_json( nlohmann::json const& js )
{
  trace_record r;
  r.iteration = js.at( "iteration" ).get<std::size_t>();
  if ( !js.at( "counterexample" ).is_null() )
  {
    r.counterexample = bit_vector::from_string( js.at( "counterexample" ).get<std::string>() );
  }
  auto const status = js.at( "solver_status" ).get<std::string>();
  r.solver_status = status == "sat" ? solver_result::status_t::satisfiable : status == "unsat" ? solver_result::status_t::unsatisfiable : solver_result::status_t::unknown;
  r.conflicts = js.at( "conflicts" ).get<std::uint64_t>();
  r.wall_ms = js.at( "wall_ms" ).get<std::uint64_t>();
  return r;
}

/*! \brief One JSON object per line, one line per iteration. */
inline void write_trace( std::ostream& out, synthesis_trace const& trace )
{
  for ( auto const& r : trace )
  {
    out << to_json( r ).dump() << '\n';
  }
}

inline synthesis_trace read_trace( std::istream& in )
{
  synthesis_trace trace;
  std::string line;
  while ( std::getline( in, line ) )
  {
    if ( line.find_first_not_of( " \t\r" ) == std::string::npos )
    {
      continue;
    }
    trace.push_back( trace_record_from_json( nlohmann::json::parse( line ) ) );
  }
  return trace;
}

namespace detail
{

class synthesis_run
{
public:
  synthesis_run( synthesis_config const& config, sat_backend& backend )
      : config_( config ), backend_( backend ), start_( std::chrono::steady_clock::now() )
  {
    auto const n = config.n;
    auto prefix = config.prefix;
    if ( prefix.channels() == 0u && prefix.depth() == 0u )
    {
      prefix = network( n );
    }
    if ( prefix.channels() != n )
    {
      throw std::invalid_argument( "synthesize: prefix has " + std::to_string( prefix.channels() ) + " channels, expected " + std::to_string( n ) );
    }
    if ( prefix.depth() > config.d )
    {
      throw std::invalid_argument( "synthesize: prefix deeper than the requested depth" );
    }
    enc_ = encode_structure( n, config.d, prefix );
    if ( config.use_reachability && n >= 2u )
    {
      add_reachability( enc_ );
    }
    for ( auto const& x : enumerate_family( n, config.seed_inputs ) )
    {
      add_sortedness( enc_, x );
    }
  }

  /*! \brief Solves the current formula; fills `candidate` on success. */
  std::optional<synthesis_outcome::status_t> step( trace_record& record, std::optional<network>& candidate )
  {
    auto limits = config_.per_call;
    if ( config_.global_time )
    {
      auto const left = std::chrono::duration_cast<std::chrono::milliseconds>( start_ + *config_.global_time - std::chrono::steady_clock::now() );
      if ( left.count() <= 0 )
      {
        // budget spent before calling the solver; nothing to record
        return synthesis_outcome::status_t::resource_limit;
      }
      limits.wall_time = limits.wall_time ? std::min( *limits.wall_time, left ) : left;
    }
    record.iteration = outcome_.trace.size() + 1u;

    auto const r = backend_.solve( enc_.formula, limits );
    record.solver_status = r.status;
    record.conflicts = r.conflicts;
    record.wall_ms = static_cast<std::uint64_t>( r.wall_time.count() );

    if ( r.status == solver_result::status_t::unsatisfiable )
    {
      return synthesis_outcome::status_t::infeasible;
    }
    if ( r.status == solver_result::status_t::unknown )
    {
      return synthesis_outcome::status_t::resource_limit;
    }
    if ( !r.model || !satisfies( enc_.formula, *r.model ) )
    {
      throw solver_error( "backend " + backend_.name() + " returned a model that violates the formula" );
    }
    candidate = decode_model( enc_.vars, *r.model );
    return std::nullopt;
  }

  /*! \brief Registers a counterexample after checking progress. */
  void add_counterexample( network const& candidate, bit_vector const& x, trace_record& record )
  {
    if ( is_sorted( evaluate( candidate, x ) ) )
    {
      throw std::logic_error( "synthesize: counterexample " + x.to_string() + " is sorted by the candidate" );
    }
    if ( enc_.vars.input_index( x ) )
    {
      throw std::logic_error( "synthesize: counterexample " + x.to_string() + " was already registered" );
    }
    add_sortedness( enc_, x );
    record.counterexample = x;
  }

  /*! \brief Independent check of a candidate; returns a failing input if any. */
  std::optional<bit_vector> final_check( network const& candidate ) const
  {
    if ( candidate.channels() <= config_.verification.exhaustive_limit )
    {
      auto const v = verify_01( candidate, config_.verification );
      return v.witness;
    }
    return find_counterexample( candidate, config_.counterexample_family );
  }

  synthesis_outcome finish( synthesis_outcome::status_t status, std::optional<network> result = std::nullopt )
  {
    outcome_.status = status;
    outcome_.result = std::move( result );
    outcome_.input_count = enc_.vars.inputs().size();
    return std::move( outcome_ );
  }

  /*! \brief Handles a candidate: either accepts it or adds a counterexample. */
  std::optional<synthesis_outcome> conclude( network const& candidate, std::optional<bit_vector> cex, trace_record& record )
  {
    if ( !cex )
    {
      cex = final_check( candidate );
      if ( !cex )
      {
        outcome_.trace.push_back( record );
        return finish( synthesis_outcome::status_t::network_found, candidate );
      }
    }
    add_counterexample( candidate, *cex, record );
    outcome_.trace.push_back( record );
    return std::nullopt;
  }

  void push( trace_record const& r ) { outcome_.trace.push_back( r ); }

  synthesis_config const& config() const noexcept { return config_; }

private:
  synthesis_config const& config_;
  sat_backend& backend_;
  std::chrono::steady_clock::time_point start_;
  encoding enc_;
  synthesis_outcome outcome_;
};

} // namespace detail

/*! \brief Runs the counterexample-guided loop on `backend`.
 *
 * A `network_found` outcome has been re-verified exhaustively (or over the
 * counterexample family when n exceeds the exhaustive limit).  The trace has
 * one record per solver call; each record but the last carries the input
 * added after that call.
 */
inline synthesis_outcome synthesize( synthesis_config const& config, sat_backend& backend )
{
  detail::synthesis_run run( config, backend );
  for ( ;; )
  {
    trace_record record;
    std::optional<network> candidate;
    if ( auto stop = run.step( record, candidate ) )
    {
      if ( record.iteration > 0u )
      {
        run.push( record );
      }
      return run.finish( *stop );
    }
    auto cex = find_counterexample( *candidate, config.counterexample_family );
    if ( auto done = run.conclude( *candidate, cex, record ) )
    {
      return std::move( *done );
    }
  }
}

/*! \brief Runs `synthesize` on an embedded backend seeded with `config.seed`. */
inline synthesis_outcome synthesize( synthesis_config const& config )
{
  embedded_backend backend( config.seed );
  return synthesize( config, backend );
}

/*! \brief Re-runs a recorded trace, taking counterexamples from it instead of searching.
 *
 * Recorded inputs the current candidate already sorts are skipped (a replay
 * with larger depth may not need them).  Once the recorded inputs run out the
 * loop continues with live counterexample search, so the replay still ends
 * with a verified network or a genuine infeasibility.  Recorded inputs of the
 * wrong width raise `std::invalid_argument`.
 */
inline synthesis_outcome replay( synthesis_trace const& trace, synthesis_config const& config, sat_backend& backend )
{
  for ( auto const& r : trace )
  {
    if ( r.counterexample && r.counterexample->width() != config.n )
    {
      throw std::invalid_argument( "replay: trace input " + r.counterexample->to_string() + " does not match " + std::to_string( config.n ) + " channels" );
    }
  }

  detail::synthesis_run run( config, backend );
  std::size_t next = 0;
  for ( ;; )
  {
    trace_record record;
    std::optional<network> candidate;
    if ( auto stop = run.step( record, candidate ) )
    {
      if ( record.iteration > 0u )
      {
        run.push( record );
      }
      return run.finish( *stop );
    }

    std::optional<bit_vector> cex;
    for ( ; next < trace.size() && !cex; ++next )
    {
      auto const& recorded = trace[next].counterexample;
      if ( recorded && !is_sorted( evaluate( *candidate, *recorded ) ) )
      {
        cex = recorded;
      }
    }
    if ( !cex )
    {
      cex = find_counterexample( *candidate, config.counterexample_family );
    }
    if ( auto done = run.conclude( *candidate, cex, record ) )
    {
      return std::move( *done );
    }
  }
}

inline synthesis_outcome replay( synthesis_trace const& trace, synthesis_config const& config )
{
  embedded_backend backend( config.seed );
  return replay( trace, config, backend );
}

} // namespace sortnet
