/*!
  \file backend.hpp
  \brief SAT backends: the embedded CDCL solver and external DIMACS solvers
*/

#pragma once

#include "cdcl.hpp"
#include "cnf.hpp"

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace sortnet
{

struct solve_limits
{
  std::optional<std::chrono::milliseconds> wall_time;
  std::optional<std::uint64_t> conflicts;
};

struct solver_result
{
  enum class status_t
  {
    satisfiable,
    unsatisfiable,
    unknown
  };

  status_t status = status_t::unknown;
  std::optional<assignment> model;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::chrono::milliseconds wall_time{ 0 };
};

inline char const* to_string( solver_result::status_t s )
{
  switch ( s )
  {
  case solver_result::status_t::satisfiable: return "sat";
  case solver_result::status_t::unsatisfiable: return "unsat";
  default: return "unknown";
  }
}

/*! \brief A backend failed for a reason other than hitting a limit. */
class solver_error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/*! \brief Simplification pass run before solving.
 *
 * Must return a formula over the same variables whose every model is also a
 * model of its input.
 */
using preprocessor = std::function<cnf_formula( cnf_formula const& )>;

class sat_backend
{
public:
  virtual ~sat_backend() = default;

  solver_result solve( cnf_formula const& formula, solve_limits const& limits = {} )
  {
    if ( preprocess_ )
    {
      auto simplified = preprocess_( formula );
      if ( simplified.variable_count() != formula.variable_count() )
      {
        throw solver_error( "preprocessor changed the variable count" );
      }
      return run( simplified, limits );
    }
    return run( formula, limits );
  }

  void set_preprocessor( preprocessor p ) { preprocess_ = std::move( p ); }

  virtual std::string name() const = 0;

protected:
  virtual solver_result run( cnf_formula const& formula, solve_limits const& limits ) = 0;

private:
  preprocessor preprocess_;
};

/*! \brief In-process CDCL solver; deterministic for a fixed seed. */
class embedded_backend final : public sat_backend
{
public:
  explicit embedded_backend( std::uint64_t seed = 0u ) : seed_( seed ) {}

  std::string name() const override { return "embedded"; }

protected:
  solver_result run( cnf_formula const& formula, solve_limits const& limits ) override
  {
    auto const start = std::chrono::steady_clock::now();
    sat::cdcl_solver solver( seed_ );
    solver.ensure_variables( formula.variable_count() );
    formula.for_each_clause( [&solver]( std::span<int const> c ) { solver.add_clause( c ); } );

    sat::cdcl_solver::limits lim;
    lim.conflicts = limits.conflicts;
    if ( limits.wall_time )
    {
      lim.deadline = start + *limits.wall_time;
    }

    solver_result r;
    switch ( solver.solve( lim ) )
    {
    case sat::cdcl_solver::result::satisfiable:
      r.status = solver_result::status_t::satisfiable;
      r.model = solver.model();
      r.model->resize( static_cast<std::size_t>( formula.variable_count() ) + 1u );
      break;
    case sat::cdcl_solver::result::unsatisfiable:
      r.status = solver_result::status_t::unsatisfiable;
      break;
    case sat::cdcl_solver::result::unknown:
      r.status = solver_result::status_t::unknown;
      break;
    }
    r.conflicts = solver.stats().conflicts;
    r.decisions = solver.stats().decisions;
    r.wall_time = std::chrono::duration_cast<std::chrono::milliseconds>( std::chrono::steady_clock::now() - start );
    return r;
  }

private:
  std::uint64_t seed_;
};

namespace detail
{

/*! \brief Parses `s` and `v` lines of a solver's standard output. */
inline solver_result parse_solver_output( std::string const& output, int variables )
{
  solver_result r;
  std::optional<solver_result::status_t> status;
  std::vector<int> values;
  bool terminated = false;

  std::istringstream in( output );
  std::string line;
  while ( std::getline( in, line ) )
  {
    if ( line.rfind( "s ", 0 ) == 0 )
    {
      auto const word = line.substr( 2 );
      if ( word.rfind( "SATISFIABLE", 0 ) == 0 )
        status = solver_result::status_t::satisfiable;
      else if ( word.rfind( "UNSATISFIABLE", 0 ) == 0 )
        status = solver_result::status_t::unsatisfiable;
      else if ( word.rfind( "UNKNOWN", 0 ) == 0 || word.rfind( "INDETERMINATE", 0 ) == 0 )
        status = solver_result::status_t::unknown;
      else
        throw solver_error( "external solver: unrecognized status line '" + line + "'" );
    }
    else if ( line.rfind( "v ", 0 ) == 0 || line == "v" )
    {
      std::istringstream lits( line.substr( 1 ) );
      std::string tok;
      while ( lits >> tok )
      {
        int lit = 0;
        try
        {
          lit = std::stoi( tok );
        }
        catch ( std::exception const& )
        {
          throw solver_error( "external solver: malformed model literal '" + tok + "'" );
        }
        if ( lit == 0 )
        {
          terminated = true;
        }
        else
        {
          values.push_back( lit );
        }
      }
    }
  }

  if ( !status )
  {
    throw solver_error( "external solver: missing status line" );
  }
  r.status = *status;
  if ( r.status == solver_result::status_t::satisfiable )
  {
    if ( !terminated )
    {
      throw solver_error( "external solver: truncated model (no terminating 0)" );
    }
    assignment model( static_cast<std::size_t>( variables ) + 1u, false );
    std::vector<bool> assigned( model.size(), false );
    for ( auto lit : values )
    {
      auto const v = static_cast<std::size_t>( std::abs( lit ) );
      if ( v < model.size() )
      {
        model[v] = lit > 0;
        assigned[v] = true;
      }
    }
    for ( std::size_t v = 1; v < model.size(); ++v )
    {
      if ( !assigned[v] )
      {
        throw solver_error( "external solver: truncated model (variable " + std::to_string( v ) + " unassigned)" );
      }
    }
    r.model = std::move( model );
  }
  return r;
}

class temp_file
{
public:
  temp_file()
  {
    auto pattern = ( std::filesystem::temp_directory_path() / "sortnet-XXXXXX.cnf" ).string();
    auto const fd = ::mkstemps( pattern.data(), 4 );
    if ( fd < 0 )
    {
      throw solver_error( std::string( "cannot create temporary file: " ) + std::strerror( errno ) );
    }
    ::close( fd );
    path_ = pattern;
  }
  temp_file( temp_file const& ) = delete;
  temp_file& operator=( temp_file const& ) = delete;
  ~temp_file()
  {
    std::error_code ec;
    std::filesystem::remove( path_, ec );
  }

  std::string const& path() const noexcept { return path_; }

private:
  std::string path_;
};

} // namespace detail

/*! \brief Runs an executable as `<path> <file.cnf>` and reads its `s`/`v` lines.
 *
 * Exit codes 0, 10 and 20 are accepted.  When the wall-time limit passes, the
 * process is killed and the result is `unknown`.  Crashes, other exit codes
 * and malformed output raise `solver_error`.
 */
inline solver_result solve_external( std::string const& solver_path, cnf_formula const& formula, solve_limits const& limits = {} )
{
  auto const start = std::chrono::steady_clock::now();
  detail::temp_file cnf;
  {
    std::ofstream out( cnf.path() );
    write_dimacs( out, formula );
  }

  int pipe_fds[2];
  if ( ::pipe( pipe_fds ) != 0 )
  {
    throw solver_error( std::string( "pipe failed: " ) + std::strerror( errno ) );
  }
  auto const pid = ::fork();
  if ( pid < 0 )
  {
    ::close( pipe_fds[0] );
    ::close( pipe_fds[1] );
    throw solver_error( std::string( "fork failed: " ) + std::strerror( errno ) );
  }
  if ( pid == 0 )
  {
    ::dup2( pipe_fds[1], STDOUT_FILENO );
    ::close( pipe_fds[0] );
    ::close( pipe_fds[1] );
    auto const devnull = ::open( "/dev/null", O_WRONLY );
    if ( devnull >= 0 )
    {
      ::dup2( devnull, STDERR_FILENO );
    }
    ::execl( solver_path.c_str(), solver_path.c_str(), cnf.path().c_str(), static_cast<char*>( nullptr ) );
    ::_exit( 127 );
  }
  ::close( pipe_fds[1] );

  std::string output;
  bool timed_out = false;
  char buffer[4096];
  for ( ;; )
  {
    int wait_ms = -1;
    if ( limits.wall_time )
    {
      auto const left = std::chrono::duration_cast<std::chrono::milliseconds>( start + *limits.wall_time - std::chrono::steady_clock::now() ).count();
      if ( left <= 0 )
      {
        timed_out = true;
        break;
      }
      wait_ms = static_cast<int>( std::min<long long>( left, 1000 ) );
    }
    pollfd pfd{ pipe_fds[0], POLLIN, 0 };
    auto const ready = ::poll( &pfd, 1, wait_ms );
    if ( ready < 0 && errno != EINTR )
    {
      break;
    }
    if ( ready <= 0 )
    {
      continue;
    }
    auto const got = ::read( pipe_fds[0], buffer, sizeof( buffer ) );
    if ( got <= 0 )
    {
      break;
    }
    output.append( buffer, static_cast<std::size_t>( got ) );
  }
  ::close( pipe_fds[0] );

  if ( timed_out )
  {
    ::kill( pid, SIGKILL );
  }
  int status = 0;
  while ( ::waitpid( pid, &status, 0 ) < 0 && errno == EINTR )
  {
  }
  auto const elapsed = std::chrono::duration_cast<std::chrono::milliseconds>( std::chrono::steady_clock::now() - start );

  if ( timed_out )
  {
    solver_result r;
    r.status = solver_result::status_t::unknown;
    r.wall_time = elapsed;
    return r;
  }
  if ( WIFSIGNALED( status ) )
  {
    throw solver_error( "external solver killed by signal " + std::to_string( WTERMSIG( status ) ) );
  }
  auto const code = WIFEXITED( status ) ? WEXITSTATUS( status ) : -1;
  if ( code == 127 )
  {
    throw solver_error( "external solver '" + solver_path + "' could not be executed" );
  }
  if ( code != 0 && code != 10 && code != 20 )
  {
    throw solver_error( "external solver exited with unexpected code " + std::to_string( code ) );
  }
  auto r = detail::parse_solver_output( output, formula.variable_count() );
  if ( ( code == 10 && r.status != solver_result::status_t::satisfiable ) || ( code == 20 && r.status != solver_result::status_t::unsatisfiable ) )
  {
    throw solver_error( "external solver exit code " + std::to_string( code ) + " contradicts its status line" );
  }
  r.wall_time = elapsed;
  return r;
}

class external_backend final : public sat_backend
{
public:
  explicit external_backend( std::string solver_path ) : path_( std::move( solver_path ) ) {}

  std::string name() const override { return "external:" + path_; }

protected:
  solver_result run( cnf_formula const& formula, solve_limits const& limits ) override
  {
    return solve_external( path_, formula, limits );
  }

private:
  std::string path_;
};

/*! \brief Solves with a fresh embedded backend. */
inline solver_result solve( cnf_formula const& formula, solve_limits const& limits = {}, std::uint64_t seed = 0u )
{
  embedded_backend backend( seed );
  return backend.solve( formula, limits );
}

/*! \brief Embedded backend when `solver_path` is empty, otherwise an external one. */
inline std::unique_ptr<sat_backend> make_backend( std::string const& solver_path, std::uint64_t seed = 0u )
{
  if ( solver_path.empty() )
  {
    return std::make_unique<embedded_backend>( seed );
  }
  return std::make_unique<external_backend>( solver_path );
}

} // namespace sortnet
