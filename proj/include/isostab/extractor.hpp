#pragma once

// Recovers the linear isometry U behind an epsilon-isometry via the doubling
// limit  U x = lim_n 2^-n f(2^n x)  with an a-priori stopping rule, and
// assembles the frame (U, P, T) with P = U U^T and T = U^T.

#include <utility>
#include <vector>

#include "isostab/gallery.hpp"
#include "isostab/space.hpp"

namespace isostab::extractor {

struct ExtractionConfig {
  double tol = 1e-6;  // target per-point accuracy of the limit estimate
  int n_max = 60;     // cap on the doubling index
};

void validate(const ExtractionConfig& cfg);

/// Unconditional error bound on the doubling estimate after n halvings:
/// sqrt(6 eps r / 2^n + eps^2 / 4^n), where r = ||x||.  Derived from the
/// pointwise bound ||f(z) - Uz|| <= sqrt(6 eps ||z|| + eps^2) at z = 2^n x.
double apriori_rate(double eps, double r, int n);

/// Smallest n with apriori_rate(eps, r, n) <= tol, or n_max when none is
/// reached (then *converged is set false).
int stopping_index(double eps, double r, const ExtractionConfig& cfg,
                   bool* converged);

/// 2^-n f(2^n x).  Throws OverflowGuardError when 2^n ||x|| leaves the safe
/// floating-point range.
Vector doubling_estimate(const gallery::MapFn& fn, const Vector& x, int n);

/// Doubling estimate at the a-priori stopping index.  x = 0 returns 0 at
/// n = 0.  Second member is the index used.
std::pair<Vector, int> extract_at(const gallery::MapSpec& spec,
                                  const Vector& x,
                                  const ExtractionConfig& cfg);
std::pair<Vector, int> extract_at_fn(const gallery::MapFn& fn,
                                     const Vector& x,
                                     const ExtractionConfig& cfg);

struct ExtractionResult {
  Matrix raw_U;  // doubling-limit estimates at the standard basis vectors
  Matrix U;      // nearest_isometry(raw_U)
  std::vector<int> per_column_n;
  double ortho_deviation = 0.0;  // ||raw_U^T raw_U - I||_max, pre-correction
  bool converged = false;  // every column stopped by tolerance, not n_max
};

struct IsometryFrame {
  Matrix U;  // dim_out x dim_in, orthonormal columns
  Matrix P;  // U U^T, orthogonal projection onto Im U
  Matrix T;  // U^T, norm-one left inverse of U

  /// Builds the frame from a known isometry; validates the columns.
  static IsometryFrame from_isometry(const Matrix& u);
};

struct FrameDeviations {
  double p_idempotent;    // ||P^2 - P||_max
  double p_symmetric;     // ||P - P^T||_max
  double tu_identity;     // ||T U - I||_max
  double t_annihilates;   // ||T (I - P)||_max
  double t_op_norm;       // largest singular value of T
};
FrameDeviations frame_deviations(const IsometryFrame& frame);

/// Extracts every basis column, corrects with the polar factor, and
/// cross-checks linearity of the limit at random points.  Throws
/// InconsistencyError when the limit is not close to a linear isometry
/// (uncertified or adversarial map).
std::pair<ExtractionResult, IsometryFrame> assemble_frame(
    const gallery::MapSpec& spec, const ExtractionConfig& cfg);
std::pair<ExtractionResult, IsometryFrame> assemble_frame_fn(
    const gallery::MapFn& fn, const ExtractionConfig& cfg);

}  // namespace isostab::extractor
