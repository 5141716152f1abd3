#pragma once

// Adversarial search for the residual-growth constant A in the bound
// ||(I - P) f(x)|| <= sqrt(A ||x|| + eps^2).  The known constructions pin
// A to [2 eps, 6 eps]; the searcher reports numerical lower bounds on the
// achievable growth over monotone concave piecewise-linear graph maps.

#include <cstdint>
#include <utility>
#include <vector>

#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"

namespace isostab::search {

struct SearchConfig {
  double epsilon = 0.1;
  int knot_count = 16;      // piecewise-linear resolution, in [2, 256]
  double t_max = 1e4;       // horizon for the growth-rate estimate
  int iterations = 24;      // coordinate sweeps per restart
  int restarts = 4;         // restart 0 seeds the sqrt-graph interpolant
  std::uint64_t seed = 1;
};

void validate(const SearchConfig& cfg);

/// Smallest A making sqrt(A ||x|| + eps^2) dominate the observed orthogonal
/// residual over a deterministic sample of the ball ||x|| <= t_max:
/// sup max(0, (k_norm^2 - eps^2) / ||x||).
double growth_rate(const gallery::MapSpec& spec,
                   const extractor::IsometryFrame& frame, double t_max);

struct GrowthDetail {
  double rate = 0.0;
  Vector witness_x;  // sample point attaining the rate
};
GrowthDetail growth_rate_detail(const gallery::MapSpec& spec,
                                const extractor::IsometryFrame& frame,
                                double t_max);

struct SearchResult {
  double A_hat = 0.0;  // best certified growth rate found (lower bound only)
  gallery::MapSpec witness;
  double witness_t = 0.0;
  bool certified_witness = false;
  int winning_restart = -1;
  std::vector<std::pair<int, double>> history;  // (sweep, best so far)
};

/// Derivative-free coordinate search over admissible graph families:
/// knot values move by shrinking steps (factor 0.5, 8 decay rounds), every
/// candidate is re-certified before scoring, restarts run independently and
/// reduce to the max rate with lowest-index tie-break.  Deterministic for a
/// fixed config.  Throws when no restart yields a certified candidate.
SearchResult search_sharp_A(const SearchConfig& cfg);

}  // namespace isostab::search
