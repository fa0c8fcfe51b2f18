/*!
  \file cnf.hpp
  \brief Clause database in DIMACS numbering
*/

#pragma once

#include <cstdint>
#include <cstdlib>
#include <initializer_list>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sortnet
{

/*! \brief A formula in conjunctive normal form.
 *
 * Variables are numbered from 1; a literal is a nonzero signed integer.
 * Clauses are stored flat, each terminated by 0.
 */
class cnf_formula
{
public:
  int variable_count() const noexcept { return variables_; }
  std::size_t clause_count() const noexcept { return starts_.size(); }

  int new_variable() { return ++variables_; }

  void add_clause( std::span<int const> lits )
  {
    if ( lits.empty() )
    {
      throw std::invalid_argument( "cnf_formula: empty clause" );
    }
    starts_.push_back( literals_.size() );
    for ( auto l : lits )
    {
      if ( l == 0 || std::abs( l ) > variables_ )
      {
        throw std::invalid_argument( "cnf_formula: literal " + std::to_string( l ) + " outside 1.." + std::to_string( variables_ ) );
      }
      literals_.push_back( l );
    }
    literals_.push_back( 0 );
  }

  void add_clause( std::initializer_list<int> lits )
  {
    add_clause( std::span<int const>( lits.begin(), lits.size() ) );
  }

  /*! \brief Literals of clause `i`, without the terminating 0. */
  std::span<int const> clause( std::size_t i ) const
  {
    auto const begin = starts_.at( i );
    auto end = begin;
    while ( literals_[end] != 0 )
    {
      ++end;
    }
    return { literals_.data() + begin, end - begin };
  }

  template<class Fn>
  void for_each_clause( Fn&& fn ) const
  {
    std::size_t begin = 0;
    for ( std::size_t i = 0; i < literals_.size(); ++i )
    {
      if ( literals_[i] == 0 )
      {
        fn( std::span<int const>( literals_.data() + begin, i - begin ) );
        begin = i + 1;
      }
    }
  }

  friend bool operator==( cnf_formula const&, cnf_formula const& ) = default;

private:
  int variables_ = 0;
  std::vector<int> literals_;
  std::vector<std::size_t> starts_;
};

/*! \brief Assignment indexed by variable; entry 0 is unused. */
using assignment = std::vector<bool>;

/*! \brief True iff every clause has a literal made true by `model`. */
inline bool satisfies( cnf_formula const& formula, assignment const& model )
{
  if ( model.size() < static_cast<std::size_t>( formula.variable_count() ) + 1u )
  {
    return false;
  }
  bool ok = true;
  formula.for_each_clause( [&]( std::span<int const> c ) {
    if ( !ok )
    {
      return;
    }
    bool sat = false;
    for ( auto l : c )
    {
      if ( model[static_cast<std::size_t>( std::abs( l ) )] == ( l > 0 ) )
      {
        sat = true;
        break;
      }
    }
    ok = sat;
  } );
  return ok;
}

/*! \brief Writes `p cnf` header and clauses; comment lines go first. */
inline void write_dimacs( std::ostream& out, cnf_formula const& formula, std::span<std::string const> comments = {} )
{
  for ( auto const& c : comments )
  {
    out << "c " << c << '\n';
  }
  out << "p cnf " << formula.variable_count() << ' ' << formula.clause_count() << '\n';
  formula.for_each_clause( [&out]( std::span<int const> c ) {
    for ( auto l : c )
    {
      out << l << ' ';
    }
    out << "0\n";
  } );
  if ( !out )
  {
    throw std::runtime_error( "write_dimacs: output stream failed" );
  }
}

/*! \brief Parses DIMACS CNF; clauses may span lines, `c` lines are skipped. */
inline cnf_formula read_dimacs( std::istream& in )
{
  cnf_formula formula;
  std::string token;
  bool header = false;
  long declared_clauses = 0;
  std::vector<int> current;

  while ( in >> token )
  {
    if ( token == "c" )
    {
      std::getline( in, token );
      continue;
    }
    if ( token == "p" )
    {
      std::string format;
      int vars = 0;
      if ( header || !( in >> format >> vars >> declared_clauses ) || format != "cnf" || vars < 0 || declared_clauses < 0 )
      {
        throw std::runtime_error( "read_dimacs: malformed header" );
      }
      header = true;
      while ( formula.variable_count() < vars )
      {
        formula.new_variable();
      }
      continue;
    }
    if ( !header )
    {
      throw std::runtime_error( "read_dimacs: clause before 'p cnf' header" );
    }
    int lit = 0;
    try
    {
      std::size_t used = 0;
      lit = std::stoi( token, &used );
      if ( used != token.size() )
      {
        throw std::invalid_argument( token );
      }
    }
    catch ( std::exception const& )
    {
      throw std::runtime_error( "read_dimacs: unexpected token '" + token + "'" );
    }
    if ( lit == 0 )
    {
      formula.add_clause( current );
      current.clear();
    }
    else
    {
      current.push_back( lit );
    }
  }
  if ( !header )
  {
    throw std::runtime_error( "read_dimacs: missing 'p cnf' header" );
  }
  if ( !current.empty() )
  {
    throw std::runtime_error( "read_dimacs: last clause not terminated by 0" );
  }
  if ( static_cast<long>( formula.clause_count() ) != declared_clauses )
  {
    throw std::runtime_error( "read_dimacs: header declares " + std::to_string( declared_clauses ) + " clauses, found " + std::to_string( formula.clause_count() ) );
  }
  return formula;
}

} // namespace sortnet
