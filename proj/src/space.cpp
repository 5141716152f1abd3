#include "isostab/space.hpp"

#include <cmath>
#include <string>

namespace isostab {

double inner(const Vector& a, const Vector& b) {
  if (a.size() != b.size()) {
    throw DimensionError("inner: dimension mismatch (" +
                         std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + ")");
  }
  return a.dot(b);
}

double norm(const Vector& a) { return a.norm(); }

std::vector<Vector> gram_schmidt(const std::vector<Vector>& vs) {
  std::vector<Vector> q;
  if (vs.empty()) return q;
  const Eigen::Index dim = vs.front().size();
  q.reserve(vs.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (vs[i].size() != dim) {
      throw DimensionError("gram_schmidt: vector " + std::to_string(i) +
                           " has dimension " + std::to_string(vs[i].size()) +
                           ", expected " + std::to_string(dim));
    }
    Vector v = vs[i];
    // Two projection passes keep the result orthonormal well below kOrthTol
    // even for badly conditioned inputs.
    for (int pass = 0; pass < 2; ++pass) {
      for (const Vector& e : q) v -= e.dot(v) * e;
    }
    const double nv = v.norm();
    if (nv < kRankTol) {
      throw RankDeficiencyError(
          "gram_schmidt: vector " + std::to_string(i) +
              " is numerically dependent on its predecessors (pivot norm " +
              std::to_string(nv) + ")",
          static_cast<int>(i));
    }
    q.push_back(v / nv);
  }
  return q;
}

Matrix nearest_isometry(const Matrix& m) {
  if (m.cols() > m.rows()) {
    throw DimensionError("nearest_isometry: need cols <= rows, got " +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0 || sv(sv.size() - 1) < kRankTol) {
    throw RankDeficiencyError(
        "nearest_isometry: matrix is column rank-deficient (smallest "
        "singular value " +
            std::to_string(sv.size() ? sv(sv.size() - 1) : 0.0) + ")",
        -1);
  }
  return svd.matrixU() * svd.matrixV().transpose();
}

double max_abs(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

bool is_finite(const Vector& v) { return v.allFinite(); }
bool is_finite(const Matrix& m) { return m.allFinite(); }

void require_finite(const Vector& v, const char* what) {
  if (v.size() < 1) {
    throw InvalidSpecError(std::string(what) + ": dimension must be >= 1");
  }
  if (!v.allFinite()) {
    throw InvalidSpecError(std::string(what) + ": entries must be finite");
  }
}

}  // namespace isostab
