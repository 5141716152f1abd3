#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"
#include "isostab/rng.hpp"

using namespace isostab;
using extractor::ExtractionConfig;

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

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(extractor::validate(ExtractionConfig{1e-11, 40}),
                  InvalidSpecError);
  CHECK_THROWS_AS(extractor::validate(ExtractionConfig{1e-6, 61}),
                  InvalidSpecError);
}

TEST_CASE("exact isometry extracts immediately") {
  const Matrix q = random_orthonormal(3, 5, 3);
  const auto spec = gallery::exact_isometry(q, 0.1);
  const rng::Stream s{5};
  for (int trial = 0; trial < 10; ++trial) {
    Vector x(3);
    for (int i = 0; i < 3; ++i) x(i) = 3.0 * s.gauss(trial * 4 + i);
    const auto [u, n] = extractor::extract_at(spec, x, {1e-6, 60});
    CHECK(n == 0);  // the limit is already exact for a linear map
    CHECK((u - q * x).norm() <= 1e-14 * (1.0 + x.norm()));
  }
}

TEST_CASE("sqrt graph: doubling estimates decay at the known rate") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto fn = gallery::to_fn(spec);
  // Second coordinate of 2^-n f(2^n * 1) is sqrt(0.2 / 2^n).
  const Vector u30 = extractor::doubling_estimate(fn, v1(1.0), 30);
  CHECK(u30(0) == 1.0);
  CHECK(std::abs(u30(1) - std::sqrt(0.2 / std::ldexp(1.0, 30))) <= 1e-18);
  CHECK(u30(1) == doctest::Approx(1.365e-5).epsilon(1e-3));
}

TEST_CASE("stopping rule follows the a-priori bound") {
  const ExtractionConfig cfg{1e-5, 60};
  bool conv = false;
  const int n = extractor::stopping_index(0.1, 1.0, cfg, &conv);
  CHECK(conv);
  CHECK(extractor::apriori_rate(0.1, 1.0, n) <= cfg.tol);
  if (n > 0) CHECK(extractor::apriori_rate(0.1, 1.0, n - 1) > cfg.tol);
}

TEST_CASE("extraction error is within the a-priori bound") {
  // Oracle: the true isometry of a BoundedPerturb spec is its own U, so the
  // bound sqrt(6 eps r / 2^n + eps^2 / 4^n) can be checked directly.
  const Matrix q = random_orthonormal(7, 3, 2);
  const double eps = 0.2;
  const auto spec = gallery::make_bounded_perturb(q, eps, 17);
  const auto fn = gallery::to_fn(spec);
  const rng::Stream s{11};
  for (int trial = 0; trial < 20; ++trial) {
    Vector x(2);
    for (int i = 0; i < 2; ++i) x(i) = s.gauss(trial * 4 + i);
    x /= x.norm();
    const Vector u30 = extractor::doubling_estimate(fn, x, 30);
    const double bound = extractor::apriori_rate(eps, 1.0, 30);
    CHECK((u30 - q * x).norm() <= bound);
    CHECK(bound == doctest::Approx(3.343e-5).epsilon(1e-3));
  }
}

TEST_CASE("cauchy property of the doubling sequence") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto fn = gallery::to_fn(spec);
  const rng::Stream s{13};
  for (int trial = 0; trial < 10; ++trial) {
    const double t = 20.0 * s.sym(trial);
    if (t == 0.0) continue;
    const double r = std::abs(t);
    for (int n = 0; n < 20; n += 3) {
      const Vector a = extractor::doubling_estimate(fn, v1(t), n);
      const Vector b = extractor::doubling_estimate(fn, v1(t), n + 1);
      const double cap = extractor::apriori_rate(0.1, r, n) +
                         extractor::apriori_rate(0.1, r, n + 1);
      CHECK((a - b).norm() <= cap);
    }
  }
}

TEST_CASE("exact isometry frame: raw columns are already orthonormal") {
  const Matrix q = random_orthonormal(17, 5, 3);
  const auto spec = gallery::exact_isometry(q, 0.1);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
  CHECK(res.ortho_deviation <= 1e-12);
  CHECK(max_abs(frame.U - q) <= 1e-12);
  for (const int n : res.per_column_n) CHECK(n <= 1);
}

TEST_CASE("sqrt graph frame: U, P, T match the known isometry") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
  CHECK(res.converged);
  CHECK(res.per_column_n[0] >= 30);
  CHECK(std::abs(frame.U(0, 0) - 1.0) <= 1e-9);
  CHECK(std::abs(frame.U(1, 0)) <= 1e-6);
  CHECK(std::abs(frame.P(0, 0) - 1.0) <= 1e-6);
  CHECK(std::abs(frame.P(1, 1)) <= 1e-6);
  CHECK(res.ortho_deviation <= 1e-10);
}

TEST_CASE("point perturbation frame: the bump vanishes in the limit") {
  const auto spec = gallery::point_perturb(0.1, 0.37);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
  CHECK(res.converged);
  // Doubling points 2^n never revisit delta, so the raw column is exact.
  CHECK(frame.U(0, 0) == 1.0);
  CHECK(frame.U(1, 0) == 0.0);
  CHECK(res.ortho_deviation == 0.0);
}

TEST_CASE("frame identities hold after assembly") {
  const Matrix q = random_orthonormal(19, 5, 3);
  const std::vector<gallery::MapSpec> specs = {
      gallery::exact_isometry(q, 0.1),
      gallery::graph_sqrt(0.1),
      gallery::make_bounded_perturb(random_orthonormal(23, 4, 2), 0.2, 3),
  };
  for (const auto& spec : specs) {
    const auto [res, frame] = extractor::assemble_frame(spec, {1e-6, 60});
    const auto dev = extractor::frame_deviations(frame);
    CHECK(dev.p_idempotent <= 1e-10);
    CHECK(dev.p_symmetric <= 1e-10);
    CHECK(dev.tu_identity <= 1e-10);
    CHECK(dev.t_annihilates <= 1e-10);
    CHECK(std::abs(dev.t_op_norm - 1.0) <= 1e-9);
    CHECK(max_abs(frame.P - frame.U * frame.U.transpose()) <= 1e-15);
  }
}

TEST_CASE("extraction is orthogonally equivariant") {
  const double eps = 0.15;
  const Matrix u_true = random_orthonormal(29, 4, 2);
  const auto spec = gallery::make_bounded_perturb(u_true, eps, 31);
  const gallery::MapFn fn = gallery::to_fn(spec);
  const Matrix r = random_orthonormal(31, 4, 4);
  const Matrix q = random_orthonormal(37, 2, 2);
  gallery::MapFn conj = fn;
  conj.eval = [&fn, r, q](const Vector& x) {
    return Vector(r * fn.eval(Vector(q * x)));
  };
  const double tol = 1e-6;
  const auto [res_a, frame_a] = extractor::assemble_frame_fn(fn, {tol, 60});
  const auto [res_b, frame_b] = extractor::assemble_frame_fn(conj, {tol, 60});
  CHECK((frame_b.U - r * frame_a.U * q).norm() <= 2.0 * 2 * tol);
}

TEST_CASE("extraction scales linearly") {
  const auto spec = gallery::graph_sqrt(0.1);
  const ExtractionConfig cfg{1e-6, 60};
  for (const double t : {0.5, 1.0, 3.0}) {
    const auto [u, n1] = extractor::extract_at(spec, v1(t), cfg);
    const auto [u2, n2] = extractor::extract_at(spec, v1(2.0 * t), cfg);
    CHECK((u2 - 2.0 * u).norm() <= 2.0 * cfg.tol);
  }
}

TEST_CASE("zero input returns zero without evaluation") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto [u, n] = extractor::extract_at(spec, v1(0.0), {1e-6, 60});
  CHECK(u.norm() == 0.0);
  CHECK(n == 0);
}

TEST_CASE("doubling overflow guard") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto fn = gallery::to_fn(spec);
  CHECK_THROWS_AS(extractor::doubling_estimate(fn, v1(1e290), 60),
                  OverflowGuardError);
}

TEST_CASE("n_max stop reports non-convergence") {
  const auto spec = gallery::graph_sqrt(0.1);
  const auto [u, n] = extractor::extract_at(spec, v1(1.0), {1e-10, 20});
  CHECK(n == 20);
  const auto [res, frame] = extractor::assemble_frame(spec, {1e-10, 20});
  CHECK_FALSE(res.converged);
}

TEST_CASE("contractions are flagged as inconsistent") {
  gallery::MapFn fn;
  fn.dim_in = 2;
  fn.dim_out = 2;
  fn.epsilon = 0.1;
  fn.analytic_epsilon = 0.1;
  fn.eval = [](const Vector& x) { return Vector(0.5 * x); };
  CHECK_THROWS_AS(extractor::assemble_frame_fn(fn, {1e-6, 60}),
                  InconsistencyError);
}

TEST_CASE("doubling-periodic maps fail the linearity cross-check") {
  // 2^-n f(2^n x) is constant in n for this map, so the basis columns look
  // perfectly orthonormal while the limit is nonlinear off the basis rays.
  gallery::MapFn fn;
  fn.dim_in = 2;
  fn.dim_out = 2;
  fn.epsilon = 0.1;
  fn.analytic_epsilon = 0.1;
  fn.eval = [](const Vector& x) {
    const double r = x.norm();
    if (r == 0.0) return Vector(Vector::Zero(2));
    const double wobble = 1.0 + 0.3 * std::sin(
        6.283185307179586 * std::log2(r));
    return Vector(wobble * x);
  };
  CHECK_THROWS_AS(extractor::assemble_frame_fn(fn, {1e-6, 60}),
                  InconsistencyError);
}

TEST_CASE("frames reject non-orthonormal input") {
  Matrix m(2, 2);
  m << 1, 0, 1, 1;
  CHECK_THROWS_AS(extractor::IsometryFrame::from_isometry(m),
                  InvalidSpecError);
}

TEST_CASE("wide maps admit no isometry") {
  gallery::MapFn fn;
  fn.dim_in = 3;
  fn.dim_out = 2;
  fn.epsilon = 0.1;
  fn.analytic_epsilon = 0.0;
  fn.eval = [](const Vector& x) { return Vector(x.head(2)); };
  CHECK_THROWS_AS(extractor::assemble_frame_fn(fn, {1e-6, 60}),
                  InvalidSpecError);
}
