#pragma once

// Finite-dimensional real inner-product arithmetic: Gram operations,
// orthonormalization, and nearest-isometry correction.  Everything here is a
// pure function on immutable values and safe to call concurrently.

#include <Eigen/Dense>

#include <vector>

#include "isostab/errors.hpp"

namespace isostab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Absolute tolerance for "orthonormal within noise" checks (unit-scale data).
inline constexpr double kOrthTol = 1e-9;
/// Absolute tolerance below which a pivot counts as rank-deficient.
inline constexpr double kRankTol = 1e-8;

/// Euclidean inner product.  Throws DimensionError on mismatched sizes.
double inner(const Vector& a, const Vector& b);

/// Euclidean norm, sqrt(inner(a, a)).
double norm(const Vector& a);

/// Modified Gram-Schmidt with one re-orthogonalization pass.  Returns an
/// orthonormal list spanning the same subspace.  Throws RankDeficiencyError
/// (carrying the offending index) when a pivot norm falls below kRankTol.
std::vector<Vector> gram_schmidt(const std::vector<Vector>& vs);

/// Matrix with orthonormal columns closest to `m` in Frobenius norm: the
/// polar factor, computed from the SVD with every singular value replaced
/// by one.  Requires cols <= rows and full column rank within kRankTol.
Matrix nearest_isometry(const Matrix& m);

/// Largest absolute entry.
double max_abs(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

bool is_finite(const Vector& v);
bool is_finite(const Matrix& m);

/// Throws InvalidSpecError unless every entry of `v` is finite.
void require_finite(const Vector& v, const char* what);

}  // namespace isostab
