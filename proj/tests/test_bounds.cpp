#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isostab/bounds.hpp"
#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"
#include "isostab/rng.hpp"

using namespace isostab;
using extractor::IsometryFrame;

namespace {

Vector v1(double t) {
  Vector v(1);
  v(0) = t;
  return v;
}

Matrix random_orthonormal(std::uint64_t seed, int rows, int cols) {
  const rng::Stream s{rng::mix64(seed)};
  std::vector<Vector> vs;
  for (int j = 0; j < cols; ++j) {
    Vector v(rows);
    for (int i = 0; i < rows; ++i) v(i) = s.gauss(j * 64 + i);
    vs.push_back(v);
  }
  const auto q = gram_schmidt(vs);
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) m.col(j) = q[j];
  return m;
}

IsometryFrame line_frame() {
  Matrix u(2, 1);
  u << 1, 0;
  return IsometryFrame::from_isometry(u);
}

}  // namespace

TEST_CASE("residuals vanish for exact isometries") {
  const Matrix q = random_orthonormal(3, 4, 3);
  const auto spec = gallery::exact_isometry(q, 0.1);
  const auto frame = IsometryFrame::from_isometry(q);
  const rng::Stream s{5};
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 10 * s.sym(trial * 4 + i);
    const auto r = bounds::residual_at(spec, frame, x);
    CHECK(r.h_norm <= 1e-13);
    CHECK(r.k_norm <= 1e-13);
    CHECK(r.t_resid <= 1e-13);
    CHECK(r.full_resid <= 1e-13);
  }
}

TEST_CASE("sqrt graph residuals against the closed form") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto r = bounds::residual_at(spec, line_frame(), v1(1.0));
  CHECK(r.h_norm <= 1e-16);
  CHECK(r.k_norm == std::sqrt(0.2));
  CHECK(r.bound4_margin ==
        doctest::Approx(std::sqrt(0.61) - std::sqrt(0.2)).epsilon(1e-14));
  CHECK(r.bound4_margin == doctest::Approx(0.3338).epsilon(1e-3));
}

TEST_CASE("point perturbation residual at the bump") {
  const auto spec = gallery::point_perturb(0.1, 0.01);
  const auto r = bounds::residual_at(spec, line_frame(), v1(0.01));
  CHECK(r.k_norm == 0.1);
  const double bound = bounds::bound4_value(0.1, 0.01);
  CHECK(bound == doctest::Approx(std::sqrt(0.016)).epsilon(1e-15));
  CHECK(bound == doctest::Approx(0.126491).epsilon(1e-5));
  CHECK(r.bound4_margin == doctest::Approx(bound - 0.1).epsilon(1e-12));
}

TEST_CASE("pythagoras: full residual splits into h and k") {
  const auto spec = gallery::make_bounded_perturb(
      random_orthonormal(7, 4, 2), 0.2, 11);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
  const rng::Stream s{13};
  for (int trial = 0; trial < 50; ++trial) {
    Vector x(2);
    for (int i = 0; i < 2; ++i) x(i) = 30 * s.sym(trial * 4 + i);
    const auto r = bounds::residual_at(spec, frame, x);
    const double lhs = r.full_resid * r.full_resid;
    const double rhs = r.h_norm * r.h_norm + r.k_norm * r.k_norm;
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, rhs));
    // T = U^T is isometric on Im U, so the two 2-eps residuals agree.
    CHECK(std::abs(r.t_resid - r.h_norm) <= 1e-9 * (1.0 + r.h_norm));
  }
}

TEST_CASE("verify_bounds: certified specs pass everywhere") {
  const std::vector<gallery::MapSpec> specs = {
      gallery::graph_sqrt(0.1),
      gallery::point_perturb(0.1, 0.5),
      gallery::make_bounded_perturb(random_orthonormal(17, 3, 2), 0.2, 5),
  };
  for (const auto& spec : specs) {
    const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
    const auto rep = bounds::verify_bounds(spec, frame, {1000, 100.0, 19});
    CHECK(rep.all_pass);
    CHECK(rep.min_margin2 >= -bounds::kMarginTol);
    CHECK(rep.min_margin3 >= -bounds::kMarginTol);
    CHECK(rep.min_margin4 >= -bounds::kMarginTol);
    CHECK(rep.samples.size() >= 1000);
  }
}

TEST_CASE("verify_bounds: bounded perturbation keeps half its budget") {
  const double eps = 0.2;
  const auto spec = gallery::make_bounded_perturb(
      random_orthonormal(23, 4, 3), eps, 7);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
  const auto rep = bounds::verify_bounds(spec, frame, {1000, 100.0, 23});
  CHECK(rep.all_pass);
  // Oracle: h_norm <= ||f - Ux|| <= eps/2 plus extraction slack, so the
  // 2-eps margin keeps at least eps.
  CHECK(rep.min_margin3 >= eps);
}

TEST_CASE("verify_bounds: exact isometry margins equal the bound values") {
  const Matrix q = random_orthonormal(29, 5, 3);
  const auto spec = gallery::exact_isometry(q, 0.1);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
  const auto rep = bounds::verify_bounds(spec, frame, {500, 100.0, 29});
  CHECK(rep.all_pass);
  CHECK(rep.min_margin2 == doctest::Approx(0.2).epsilon(1e-9));
  CHECK(rep.min_margin3 == doctest::Approx(0.2).epsilon(1e-9));
  // The grid contains the origin, where the orthogonal bound equals eps.
  CHECK(rep.min_margin4 == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("ball membership: exact isometry with slack epsilon") {
  const Matrix q = random_orthonormal(31, 3, 2);
  const auto spec = gallery::exact_isometry(q, 0.1);
  Vector x(2);
  x << 1.5, -0.5;
  for (const int k : {1, 2, 4, 8}) {
    const auto [b1, b2] = bounds::ball_membership(spec, x, k);
    CHECK(b1);
    CHECK(b2);
  }
  // Oracle: direct evaluation of the two norms.
  const Vector fx = gallery::eval(spec, x);
  CHECK(std::abs(fx.norm() - x.norm()) <= 1e-12);
}

TEST_CASE("ball membership: sqrt graph and point perturbation") {
  const auto gs = gallery::graph_sqrt(0.1);
  const auto [a1, a2] = bounds::ball_membership(gs, v1(1.0), 4);
  CHECK(a1);
  CHECK(a2);
  // Oracle: ||f(1)|| = sqrt(1.2) <= 1.1 fails? No: sqrt(1.2) = 1.0954 <= 1.1.
  CHECK(std::sqrt(1.2) <= 1.0 + 0.1);
  CHECK(std::sqrt(9.2) <= 3.0 + 0.1);

  const auto pp = gallery::point_perturb(0.1, 0.8);
  const auto [c1, c2] = bounds::ball_membership(pp, v1(0.8), 2);
  CHECK(c1);
  CHECK(c2);
}

TEST_CASE("ball membership across certified specs and powers of two") {
  const std::vector<gallery::MapSpec> specs = {
      gallery::graph_sqrt(0.1),
      gallery::point_perturb(0.1, 0.3),
      gallery::make_bounded_perturb(random_orthonormal(37, 3, 2), 0.2, 9),
  };
  const rng::Stream s{41};
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 10; ++trial) {
      Vector x(spec.dim_in);
      for (int i = 0; i < spec.dim_in; ++i) {
        x(i) = 20 * s.sym(trial * 8 + i);
      }
      if (x.norm() == 0.0) continue;
      for (const int k : {2, 4, 8, 16}) {
        const auto [b1, b2] = bounds::ball_membership(spec, x, k);
        CHECK(b1);
        CHECK(b2);
      }
    }
  }
}

TEST_CASE("midpoint inequality: hand-checked sqrt graph trace") {
  const auto spec = gallery::graph_sqrt(0.1);
  const Vector y = gallery::eval(spec, v1(1.0));
  const auto c = bounds::midpoint_inequality(spec, v1(1.0), 4, y);
  CHECK(c.lhs == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(c.rhs == doctest::Approx(0.458125).epsilon(1e-15));
  CHECK(c.holds);
}

TEST_CASE("midpoint inequality: trivial at the image of x for isometries") {
  const Matrix q = random_orthonormal(43, 3, 2);
  const auto spec = gallery::exact_isometry(q, 0.1);
  Vector x(2);
  x << 0.7, 0.4;
  const Vector y = gallery::eval(spec, x);
  const auto c = bounds::midpoint_inequality(spec, x, 4, y);
  CHECK(c.lhs <= 1e-28);
  CHECK(c.holds);
}

TEST_CASE("midpoint inequality: rejection-sampled y in both balls") {
  const auto spec = gallery::graph_sqrt(0.1);
  const double eps = 0.1;
  const Vector x = v1(1.0);
  const int k = 4;
  const Vector fkx = gallery::eval(spec, v1(4.0));
  const rng::Stream s{47};
  int found = 0;
  for (std::uint64_t i = 0; i < 100000 && found < 200; ++i) {
    // Rejection sample from the bounding box of B1.
    Vector y(2);
    y(0) = (1.0 + eps) * s.sym(2 * i);
    y(1) = (1.0 + eps) * s.sym(2 * i + 1);
    if (y.norm() > 1.0 + eps) continue;
    if ((y - fkx).norm() > (k - 1) * 1.0 + eps) continue;
    ++found;
    const auto c = bounds::midpoint_inequality(spec, x, k, y);
    CHECK(c.holds);
  }
  CHECK(found > 0);
}

TEST_CASE("midpoint inequality: precondition failures are named") {
  const auto spec = gallery::graph_sqrt(0.1);
  // k r - eps <= 0
  CHECK_THROWS_WITH_AS(
      bounds::midpoint_inequality(spec, v1(0.05), 1, Vector::Zero(2)),
      doctest::Contains("k*r - eps"), PreconditionError);
  // y outside B1
  Vector big(2);
  big << 5.0, 0.0;
  CHECK_THROWS_WITH_AS(bounds::midpoint_inequality(spec, v1(1.0), 4, big),
                       doctest::Contains("B1"), PreconditionError);
  // y inside B1 but outside B2
  Vector opposite(2);
  opposite << -1.05, 0.0;
  CHECK_THROWS_WITH_AS(
      bounds::midpoint_inequality(spec, v1(1.0), 4, opposite),
      doctest::Contains("B2"), PreconditionError);
}

TEST_CASE("midpoint trace tightens towards the unconditional bound") {
  const auto spec = gallery::graph_sqrt(0.1);
  const double eps = 0.1;
  const Vector x = v1(1.0);
  const Vector y = gallery::eval(spec, x);
  const double full_sq = 0.2;  // ||f(1) - U 1||^2 = (sqrt(0.2))^2
  double prev_rhs = 0.0;
  for (int n = 1; n <= 20; ++n) {
    const int k = 1 << n;
    const auto c = bounds::midpoint_inequality(spec, x, k, y);
    CHECK(c.holds);
    CHECK(c.rhs >= prev_rhs);
    prev_rhs = c.rhs;
    if (n == 20) {
      CHECK(std::abs(c.rhs - (6.0 * eps + eps * eps)) <= 1e-5);
      CHECK(std::abs(c.lhs - full_sq) <= 1e-3);
    }
  }
}

TEST_CASE("midpoint defect: fixed values and degenerate pairs") {
  const auto spec = gallery::graph_sqrt(0.1);
  const double defect = bounds::midpoint_defect(spec, v1(0.0), v1(4.0));
  // Oracle: |sqrt(0.4) - sqrt(0.8)/2| by direct substitution.
  CHECK(defect ==
        doctest::Approx(std::sqrt(0.4) - std::sqrt(0.8) / 2).epsilon(1e-14));
  CHECK(defect == doctest::Approx(0.1852).epsilon(1e-3));
  CHECK(bounds::midpoint_defect(spec, v1(2.5), v1(2.5)) == 0.0);
  const auto pp = gallery::point_perturb(0.1, 1.0);
  CHECK(bounds::midpoint_defect(pp, v1(3.0), v1(3.0)) == 0.0);
}
