// dimacs_solve: standalone front end of the embedded CDCL solver.
//
// Usage: dimacs_solve <file.cnf>
// Prints the conventional `s SATISFIABLE` / `s UNSATISFIABLE` line and, for
// satisfiable formulas, the model on `v` lines.  Exit code 10 (sat), 20
// (unsat), 1 on error.

#include <sortnet/backend.hpp>
#include <sortnet/cnf.hpp>

#include <fstream>
#include <iostream>

int main( int argc, char** argv )
{
  if ( argc != 2 )
  {
    std::cerr << "usage: " << argv[0] << " <file.cnf>\n";
    return 1;
  }
  std::ifstream in( argv[1] );
  if ( !in )
  {
    std::cerr << "cannot open " << argv[1] << '\n';
    return 1;
  }

  sortnet::cnf_formula formula;
  try
  {
    formula = sortnet::read_dimacs( in );
  }
  catch ( std::exception const& e )
  {
    std::cerr << e.what() << '\n';
    return 1;
  }

  auto const r = sortnet::solve( formula );
  if ( r.status == sortnet::solver_result::status_t::unsatisfiable )
  {
    std::cout << "s UNSATISFIABLE\n";
    return 20;
  }
  if ( r.status != sortnet::solver_result::status_t::satisfiable )
  {
    std::cout << "s UNKNOWN\n";
    return 0;
  }
  std::cout << "s SATISFIABLE\n";
  auto const& model = *r.model;
  std::size_t on_line = 0;
  for ( int v = 1; v <= formula.variable_count(); ++v )
  {
    if ( on_line == 0 )
    {
      std::cout << 'v';
    }
    std::cout << ' ' << ( model[static_cast<std::size_t>( v )] ? v : -v );
    if ( ++on_line == 16 )
    {
      std::cout << '\n';
      on_line = 0;
    }
  }
  std::cout << ( on_line == 0 ? "v 0\n" : " 0\n" );
  return 10;
}
