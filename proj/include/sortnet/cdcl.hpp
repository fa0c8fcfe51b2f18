/*!
  \file cdcl.hpp
  \brief A compact conflict-driven clause-learning SAT solver

  MiniSat-style core: two watched literals with blockers, first-UIP learning
  with recursive minimization, VSIDS with phase saving, Luby restarts and
  activity/LBD based clause deletion.  Fully deterministic for a fixed seed.
*/

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace sortnet::sat
{

class cdcl_solver
{
public:
  enum class result
  {
    satisfiable,
    unsatisfiable,
    unknown
  };

  struct limits
  {
    std::optional<std::uint64_t> conflicts;
    std::optional<std::chrono::steady_clock::time_point> deadline;
  };

  struct statistics
  {
    std::uint64_t conflicts = 0;
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t restarts = 0;
  };

  explicit cdcl_solver( std::uint64_t seed = 0u ) : rng_state_( seed * 0x9E3779B97F4A7C15ull + 1u ), seeded_( seed != 0u ) {}

  int variable_count() const noexcept { return static_cast<int>( assigns_.size() ); }
  statistics const& stats() const noexcept { return stats_; }

  /*! \brief Allocates the next variable; returns its 1-based DIMACS index. */
  int new_variable()
  {
    auto const v = static_cast<var_t>( assigns_.size() );
    assigns_.push_back( 0 );
    level_.push_back( 0 );
    reason_.push_back( no_reason );
    activity_.push_back( seeded_ ? next_random() * 1e-5 : 0.0 );
    polarity_.push_back( 1 );
    seen_.push_back( 0 );
    heap_index_.push_back( -1 );
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert( v );
    return static_cast<int>( v ) + 1;
  }

  void ensure_variables( int count )
  {
    while ( variable_count() < count )
    {
      new_variable();
    }
  }

  /*! \brief Adds a clause in DIMACS literals; returns false once the formula is known unsatisfiable. */
  bool add_clause( std::span<int const> dimacs )
  {
    if ( !ok_ )
    {
      return false;
    }
    cancel_until( 0 );
    std::vector<lit_t> lits;
    lits.reserve( dimacs.size() );
    for ( auto d : dimacs )
    {
      if ( d == 0 )
      {
        throw std::invalid_argument( "cdcl_solver: literal 0" );
      }
      ensure_variables( std::abs( d ) );
      lits.push_back( from_dimacs( d ) );
    }
    std::sort( lits.begin(), lits.end() );
    std::vector<lit_t> kept;
    for ( std::size_t i = 0; i < lits.size(); ++i )
    {
      auto const l = lits[i];
      if ( value( l ) == 1 || ( i > 0 && lits[i - 1] == negate( l ) ) )
      {
        return true; // satisfied or tautology
      }
      if ( value( l ) == -1 || ( i > 0 && lits[i - 1] == l ) )
      {
        continue;
      }
      kept.push_back( l );
    }
    if ( kept.empty() )
    {
      ok_ = false;
      return false;
    }
    if ( kept.size() == 1u )
    {
      enqueue( kept[0], no_reason );
      if ( propagate() != no_reason )
      {
        ok_ = false;
      }
      return ok_;
    }
    attach( store( std::move( kept ), false ) );
    return true;
  }

  result solve( limits const& lim = {} )
  {
    model_.clear();
    if ( !ok_ )
    {
      return result::unsatisfiable;
    }
    cancel_until( 0 );
    if ( propagate() != no_reason )
    {
      ok_ = false;
      return result::unsatisfiable;
    }

    if ( max_learnts_ == 0.0 )
    {
      max_learnts_ = std::max( 2000.0, static_cast<double>( clauses_.size() ) / 3.0 );
    }
    auto const start_conflicts = stats_.conflicts;
    std::uint64_t restart_round = 0;
    for ( ;; )
    {
      auto const budget = static_cast<std::uint64_t>( luby( restart_round++ ) * restart_unit );
      auto const r = search( budget, start_conflicts, lim );
      if ( r != search_result::restart )
      {
        if ( r == search_result::sat )
        {
          model_.assign( assigns_.size() + 1u, false );
          for ( std::size_t v = 0; v < assigns_.size(); ++v )
          {
            model_[v + 1u] = assigns_[v] == 1;
          }
          cancel_until( 0 );
          return result::satisfiable;
        }
        cancel_until( 0 );
        if ( r == search_result::unsat )
        {
          ok_ = false;
          return result::unsatisfiable;
        }
        return result::unknown;
      }
      ++stats_.restarts;
    }
  }

  /*! \brief Model of the last satisfiable call, indexed by DIMACS variable (entry 0 unused). */
  std::vector<bool> const& model() const noexcept { return model_; }

private:
  using var_t = std::uint32_t;
  using lit_t = std::uint32_t;
  using cref_t = std::uint32_t;

  static constexpr cref_t no_reason = std::numeric_limits<cref_t>::max();
  static constexpr double restart_unit = 100.0;

  enum class search_result
  {
    sat,
    unsat,
    restart,
    limit
  };

  struct clause
  {
    std::vector<lit_t> lits;
    double activity = 0.0;
    std::uint32_t lbd = 0;
    bool learnt = false;
    bool removed = false;
  };

  struct watcher
  {
    cref_t cref;
    lit_t blocker;
  };

  static lit_t from_dimacs( int d ) noexcept
  {
    return static_cast<lit_t>( ( std::abs( d ) - 1 ) * 2 + ( d < 0 ? 1 : 0 ) );
  }
  static lit_t negate( lit_t l ) noexcept { return l ^ 1u; }
  static var_t var_of( lit_t l ) noexcept { return l >> 1u; }
  static bool is_negative( lit_t l ) noexcept { return l & 1u; }

  // 1 true, -1 false, 0 unassigned
  int value( lit_t l ) const noexcept
  {
    auto const a = assigns_[var_of( l )];
    return is_negative( l ) ? -a : a;
  }

  int decision_level() const noexcept { return static_cast<int>( trail_lim_.size() ); }

  double next_random() noexcept
  {
    // splitmix64
    auto z = ( rng_state_ += 0x9E3779B97F4A7C15ull );
    z = ( z ^ ( z >> 30u ) ) * 0xBF58476D1CE4E5B9ull;
    z = ( z ^ ( z >> 27u ) ) * 0x94D049BB133111EBull;
    z ^= z >> 31u;
    return static_cast<double>( z >> 11u ) * 0x1.0p-53;
  }

  static double luby( std::uint64_t x )
  {
    std::uint64_t size = 1;
    int seq = 0;
    while ( size < x + 1u )
    {
      ++seq;
      size = 2u * size + 1u;
    }
    while ( size - 1u != x )
    {
      size = ( size - 1u ) >> 1u;
      --seq;
      x %= size;
    }
    return std::pow( 2.0, seq );
  }

  cref_t store( std::vector<lit_t> lits, bool learnt )
  {
    auto const cr = static_cast<cref_t>( clauses_.size() );
    clauses_.push_back( { std::move( lits ), 0.0, 0u, learnt, false } );
    if ( learnt )
    {
      learnts_.push_back( cr );
    }
    return cr;
  }

  void attach( cref_t cr )
  {
    auto const& c = clauses_[cr].lits;
    watches_[negate( c[0] )].push_back( { cr, c[1] } );
    watches_[negate( c[1] )].push_back( { cr, c[0] } );
  }

  void enqueue( lit_t l, cref_t from )
  {
    auto const v = var_of( l );
    assigns_[v] = is_negative( l ) ? -1 : 1;
    level_[v] = decision_level();
    reason_[v] = from;
    trail_.push_back( l );
  }

  void cancel_until( int target )
  {
    if ( decision_level() <= target )
    {
      return;
    }
    for ( auto i = trail_.size(); i-- > trail_lim_[static_cast<std::size_t>( target )]; )
    {
      auto const v = var_of( trail_[i] );
      polarity_[v] = is_negative( trail_[i] ) ? 1 : 0;
      assigns_[v] = 0;
      reason_[v] = no_reason;
      if ( heap_index_[v] < 0 )
      {
        heap_insert( v );
      }
    }
    trail_.resize( trail_lim_[static_cast<std::size_t>( target )] );
    trail_lim_.resize( static_cast<std::size_t>( target ) );
    qhead_ = std::min( qhead_, trail_.size() );
  }

  cref_t propagate()
  {
    cref_t conflict = no_reason;
    while ( qhead_ < trail_.size() )
    {
      auto const p = trail_[qhead_++];
      auto const false_lit = negate( p );
      auto& ws = watches_[p];
      ++stats_.propagations;
      std::size_t i = 0, j = 0;
      while ( i < ws.size() )
      {
        auto const w = ws[i++];
        if ( value( w.blocker ) == 1 )
        {
          ws[j++] = w;
          continue;
        }
        auto& c = clauses_[w.cref];
        if ( c.removed )
        {
          continue;
        }
        auto& lits = c.lits;
        if ( lits[0] == false_lit )
        {
          std::swap( lits[0], lits[1] );
        }
        auto const first = lits[0];
        watcher const updated{ w.cref, first };
        if ( first != w.blocker && value( first ) == 1 )
        {
          ws[j++] = updated;
          continue;
        }
        bool moved = false;
        for ( std::size_t k = 2; k < lits.size(); ++k )
        {
          if ( value( lits[k] ) != -1 )
          {
            std::swap( lits[1], lits[k] );
            watches_[negate( lits[1] )].push_back( updated );
            moved = true;
            break;
          }
        }
        if ( moved )
        {
          continue;
        }
        ws[j++] = updated;
        if ( value( first ) == -1 )
        {
          conflict = w.cref;
          qhead_ = trail_.size();
          while ( i < ws.size() )
          {
            ws[j++] = ws[i++];
          }
        }
        else
        {
          enqueue( first, w.cref );
        }
      }
      ws.resize( j );
      if ( conflict != no_reason )
      {
        break;
      }
    }
    return conflict;
  }

  void bump_variable( var_t v )
  {
    if ( ( activity_[v] += var_inc_ ) > 1e100 )
    {
      for ( auto& a : activity_ )
      {
        a *= 1e-100;
      }
      var_inc_ *= 1e-100;
    }
    if ( heap_index_[v] >= 0 )
    {
      heap_up( static_cast<std::size_t>( heap_index_[v] ) );
    }
  }

  void bump_clause( clause& c )
  {
    if ( ( c.activity += cla_inc_ ) > 1e20 )
    {
      for ( auto cr : learnts_ )
      {
        clauses_[cr].activity *= 1e-20;
      }
      cla_inc_ *= 1e-20;
    }
  }

  std::uint32_t abstract_level( var_t v ) const noexcept
  {
    return std::uint32_t{ 1 } << ( static_cast<std::uint32_t>( level_[v] ) & 31u );
  }

  bool redundant( lit_t p, std::uint32_t levels, std::vector<lit_t>& to_clear )
  {
    std::vector<lit_t> stack{ p };
    auto const top = to_clear.size();
    while ( !stack.empty() )
    {
      auto const q = stack.back();
      stack.pop_back();
      auto const& c = clauses_[reason_[var_of( q )]].lits;
      for ( std::size_t k = 1; k < c.size(); ++k )
      {
        auto const l = c[k];
        auto const v = var_of( l );
        if ( seen_[v] || level_[v] == 0 )
        {
          continue;
        }
        if ( reason_[v] != no_reason && ( abstract_level( v ) & levels ) != 0u )
        {
          seen_[v] = 1;
          stack.push_back( l );
          to_clear.push_back( l );
        }
        else
        {
          for ( auto k2 = top; k2 < to_clear.size(); ++k2 )
          {
            seen_[var_of( to_clear[k2] )] = 0;
          }
          to_clear.resize( top );
          return false;
        }
      }
    }
    return true;
  }

  std::pair<std::vector<lit_t>, int> analyze( cref_t conflict )
  {
    std::vector<lit_t> learnt{ 0u };
    int path = 0;
    std::optional<lit_t> p;
    auto index = trail_.size();

    do
    {
      auto& c = clauses_[conflict];
      if ( c.learnt )
      {
        bump_clause( c );
      }
      for ( std::size_t k = p ? 1u : 0u; k < c.lits.size(); ++k )
      {
        auto const q = c.lits[k];
        auto const v = var_of( q );
        if ( !seen_[v] && level_[v] > 0 )
        {
          bump_variable( v );
          seen_[v] = 1;
          if ( level_[v] >= decision_level() )
          {
            ++path;
          }
          else
          {
            learnt.push_back( q );
          }
        }
      }
      while ( !seen_[var_of( trail_[--index] )] )
      {
      }
      p = trail_[index];
      conflict = reason_[var_of( *p )];
      seen_[var_of( *p )] = 0;
      --path;
    } while ( path > 0 );
    learnt[0] = negate( *p );

    // recursive minimization
    std::vector<lit_t> to_clear( learnt.begin(), learnt.end() );
    std::uint32_t levels = 0;
    for ( std::size_t k = 1; k < learnt.size(); ++k )
    {
      levels |= abstract_level( var_of( learnt[k] ) );
    }
    std::size_t out = 1;
    for ( std::size_t k = 1; k < learnt.size(); ++k )
    {
      auto const v = var_of( learnt[k] );
      if ( reason_[v] == no_reason || !redundant( learnt[k], levels, to_clear ) )
      {
        learnt[out++] = learnt[k];
      }
    }
    learnt.resize( out );
    for ( auto l : to_clear )
    {
      seen_[var_of( l )] = 0;
    }

    int backtrack = 0;
    if ( learnt.size() > 1u )
    {
      std::size_t best = 1;
      for ( std::size_t k = 2; k < learnt.size(); ++k )
      {
        if ( level_[var_of( learnt[k] )] > level_[var_of( learnt[best] )] )
        {
          best = k;
        }
      }
      std::swap( learnt[1], learnt[best] );
      backtrack = level_[var_of( learnt[1] )];
    }
    return { std::move( learnt ), backtrack };
  }

  std::uint32_t compute_lbd( std::vector<lit_t> const& lits )
  {
    std::vector<int> levels;
    for ( auto l : lits )
    {
      levels.push_back( level_[var_of( l )] );
    }
    std::sort( levels.begin(), levels.end() );
    return static_cast<std::uint32_t>( std::unique( levels.begin(), levels.end() ) - levels.begin() );
  }

  bool locked( cref_t cr ) const
  {
    auto const& c = clauses_[cr].lits;
    return value( c[0] ) == 1 && reason_[var_of( c[0] )] == cr;
  }

  void reduce_learnts()
  {
    std::vector<cref_t> candidates;
    std::vector<cref_t> keep;
    for ( auto cr : learnts_ )
    {
      auto const& c = clauses_[cr];
      if ( c.removed )
      {
        continue;
      }
      if ( c.lbd <= 2u || c.lits.size() <= 2u || locked( cr ) )
      {
        keep.push_back( cr );
      }
      else
      {
        candidates.push_back( cr );
      }
    }
    std::stable_sort( candidates.begin(), candidates.end(), [this]( cref_t a, cref_t b ) {
      return clauses_[a].activity < clauses_[b].activity;
    } );
    auto const drop = candidates.size() / 2u;
    for ( std::size_t k = 0; k < candidates.size(); ++k )
    {
      if ( k < drop )
      {
        auto& c = clauses_[candidates[k]];
        c.removed = true;
        c.lits.clear();
        c.lits.shrink_to_fit();
      }
      else
      {
        keep.push_back( candidates[k] );
      }
    }
    std::sort( keep.begin(), keep.end() );
    learnts_ = std::move( keep );
  }

  std::optional<lit_t> pick_branch()
  {
    while ( !heap_.empty() )
    {
      auto const v = heap_pop();
      if ( assigns_[v] == 0 )
      {
        return static_cast<lit_t>( 2u * v + polarity_[v] );
      }
    }
    return std::nullopt;
  }

  bool out_of_time( limits const& lim ) const
  {
    return lim.deadline && std::chrono::steady_clock::now() >= *lim.deadline;
  }

  search_result search( std::uint64_t budget, std::uint64_t start_conflicts, limits const& lim )
  {
    std::uint64_t conflicts_here = 0;
    for ( ;; )
    {
      auto const conflict = propagate();
      if ( conflict != no_reason )
      {
        ++stats_.conflicts;
        ++conflicts_here;
        if ( decision_level() == 0 )
        {
          return search_result::unsat;
        }
        auto [learnt, backtrack] = analyze( conflict );
        cancel_until( backtrack );
        if ( learnt.size() == 1u )
        {
          enqueue( learnt[0], no_reason );
        }
        else
        {
          auto const lbd = compute_lbd( learnt );
          auto const cr = store( std::move( learnt ), true );
          clauses_[cr].lbd = lbd;
          attach( cr );
          bump_clause( clauses_[cr] );
          enqueue( clauses_[cr].lits[0], cr );
        }
        var_inc_ /= 0.95;
        cla_inc_ /= 0.999;

        if ( lim.conflicts && stats_.conflicts - start_conflicts >= *lim.conflicts )
        {
          return search_result::limit;
        }
        if ( ( stats_.conflicts & 63u ) == 0u && out_of_time( lim ) )
        {
          return search_result::limit;
        }
        continue;
      }

      if ( conflicts_here >= budget )
      {
        return search_result::restart;
      }
      if ( static_cast<double>( learnts_.size() ) - static_cast<double>( trail_.size() ) >= max_learnts_ )
      {
        reduce_learnts();
        max_learnts_ *= 1.1;
      }
      auto const next = pick_branch();
      if ( !next )
      {
        return search_result::sat;
      }
      ++stats_.decisions;
      if ( ( stats_.decisions & 4095u ) == 0u && out_of_time( lim ) )
      {
        return search_result::limit;
      }
      trail_lim_.push_back( trail_.size() );
      enqueue( *next, no_reason );
    }
  }

  // max-heap on activity, ties broken by lower variable index
  bool heap_less( var_t a, var_t b ) const noexcept
  {
    return activity_[a] > activity_[b] || ( activity_[a] == activity_[b] && a < b );
  }

  void heap_insert( var_t v )
  {
    heap_index_[v] = static_cast<int>( heap_.size() );
    heap_.push_back( v );
    heap_up( heap_.size() - 1u );
  }

  var_t heap_pop()
  {
    auto const top = heap_.front();
    heap_index_[top] = -1;
    heap_.front() = heap_.back();
    heap_.pop_back();
    if ( !heap_.empty() )
    {
      heap_index_[heap_.front()] = 0;
      heap_down( 0 );
    }
    return top;
  }

  void heap_up( std::size_t i )
  {
    auto const v = heap_[i];
    while ( i > 0 )
    {
      auto const parent = ( i - 1u ) / 2u;
      if ( !heap_less( v, heap_[parent] ) )
      {
        break;
      }
      heap_[i] = heap_[parent];
      heap_index_[heap_[i]] = static_cast<int>( i );
      i = parent;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<int>( i );
  }

  void heap_down( std::size_t i )
  {
    auto const v = heap_[i];
    for ( ;; )
    {
      auto child = 2u * i + 1u;
      if ( child >= heap_.size() )
      {
        break;
      }
      if ( child + 1u < heap_.size() && heap_less( heap_[child + 1u], heap_[child] ) )
      {
        ++child;
      }
      if ( !heap_less( heap_[child], v ) )
      {
        break;
      }
      heap_[i] = heap_[child];
      heap_index_[heap_[i]] = static_cast<int>( i );
      i = child;
    }
    heap_[i] = v;
    heap_index_[v] = static_cast<int>( i );
  }

  std::vector<clause> clauses_;
  std::vector<cref_t> learnts_;
  std::vector<std::vector<watcher>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<int> level_;
  std::vector<cref_t> reason_;
  std::vector<double> activity_;
  std::vector<std::uint8_t> polarity_;
  std::vector<std::uint8_t> seen_;
  std::vector<int> heap_index_;
  std::vector<var_t> heap_;
  std::vector<lit_t> trail_;
  std::vector<std::size_t> trail_lim_;
  std::size_t qhead_ = 0;
  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  double max_learnts_ = 0.0;
  bool ok_ = true;
  std::uint64_t rng_state_;
  bool seeded_;
  statistics stats_;
  std::vector<bool> model_;
};

} // namespace sortnet::sat
