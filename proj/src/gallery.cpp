#include "isostab/gallery.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "isostab/json_writer.hpp"
#include "isostab/parallel.hpp"
#include "isostab/rng.hpp"

namespace isostab::gallery {

namespace {

constexpr double kTwoPi = 6.283185307179586477;

Matrix row_major_view(std::span<const double> data, int rows, int cols) {
  Matrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = data[i * cols + j];
  return m;
}

void check_orthonormal_columns(const Matrix& u, const char* who) {
  const Matrix gram = u.transpose() * u;
  const double dev =
      max_abs(gram - Matrix::Identity(u.cols(), u.cols()));
  if (dev > kOrthTol) {
    throw InvalidSpecError(std::string(who) +
                           ": columns are not orthonormal (deviation " +
                           format_double(dev) + " > " + format_double(kOrthTol) +
                           ")");
  }
}

struct BoundedView {
  double eta_scale;
  Matrix u;  // dim_out x dim_in
  Matrix w;  // dim_out x dim_in, perturbation frequencies
  Vector phi;
};

BoundedView bounded_view(const MapSpec& spec) {
  const int m = spec.dim_in, k = spec.dim_out;
  const std::span<const double> p(spec.params);
  BoundedView v;
  v.eta_scale = p[0];
  v.u = row_major_view(p.subspan(1, k * m), k, m);
  v.w = row_major_view(p.subspan(1 + k * m, k * m), k, m);
  v.phi = Vector(k);
  for (int i = 0; i < k; ++i) v.phi(i) = p[1 + 2 * k * m + i];
  return v;
}

double graph_g(std::span<const double> knots, std::span<const double> values,
               double t) {
  if (t <= 0.0) return 0.0;
  const std::size_t k = knots.size();
  if (t >= knots[k - 1]) return values[k - 1];
  // First segment runs from the origin.
  double t0 = 0.0, g0 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (t < knots[i]) {
      const double slope = (values[i] - g0) / (knots[i] - t0);
      return g0 + slope * (t - t0);
    }
    t0 = knots[i];
    g0 = values[i];
  }
  return values[k - 1];
}

}  // namespace

const char* family_name(Family f) {
  switch (f) {
    case Family::ExactIsometry: return "ExactIsometry";
    case Family::GraphSqrt: return "GraphSqrt";
    case Family::PointPerturb: return "PointPerturb";
    case Family::BoundedPerturb: return "BoundedPerturb";
    case Family::GraphFamily: return "GraphFamily";
  }
  return "?";
}

Family family_from_name(const std::string& name) {
  for (const Family f :
       {Family::ExactIsometry, Family::GraphSqrt, Family::PointPerturb,
        Family::BoundedPerturb, Family::GraphFamily}) {
    if (name == family_name(f)) return f;
  }
  throw ParseError("unknown map family \"" + name + "\"");
}

void validate(const MapSpec& spec) {
  if (!(spec.epsilon >= kEpsMin && spec.epsilon <= kEpsMax)) {
    throw InvalidSpecError("epsilon must lie in [1e-4, 1e3], got " +
                           format_double(spec.epsilon));
  }
  if (spec.dim_in < 1 || spec.dim_out < 1) {
    throw InvalidSpecError("dimensions must be >= 1");
  }
  if (spec.dim_out < spec.dim_in) {
    throw InvalidSpecError("dim_out must be >= dim_in (got " +
                           std::to_string(spec.dim_out) + " < " +
                           std::to_string(spec.dim_in) + ")");
  }
  for (const double p : spec.params) {
    if (!std::isfinite(p)) throw InvalidSpecError("params must be finite");
  }
  const int m = spec.dim_in, k = spec.dim_out;
  switch (spec.family) {
    case Family::ExactIsometry: {
      if (spec.params.size() != static_cast<std::size_t>(k * m)) {
        throw InvalidSpecError(
            "ExactIsometry: params must hold the dim_out x dim_in matrix "
            "row-major (" +
            std::to_string(k * m) + " entries)");
      }
      check_orthonormal_columns(
          row_major_view(spec.params, k, m), "ExactIsometry");
      break;
    }
    case Family::GraphSqrt: {
      if (m != 1 || k != 2)
        throw InvalidSpecError("GraphSqrt: requires dim_in = 1, dim_out = 2");
      if (!spec.params.empty())
        throw InvalidSpecError("GraphSqrt: takes no parameters");
      break;
    }
    case Family::PointPerturb: {
      if (m != 1 || k != 2)
        throw InvalidSpecError("PointPerturb: requires dim_in = 1, dim_out = 2");
      if (spec.params.size() != 1)
        throw InvalidSpecError("PointPerturb: params must be [delta]");
      if (!(spec.params[0] > 0))
        throw InvalidSpecError("PointPerturb: delta must be positive");
      break;
    }
    case Family::BoundedPerturb: {
      const std::size_t want = 1 + 2 * static_cast<std::size_t>(k) * m + k;
      if (spec.params.size() != want) {
        throw InvalidSpecError(
            "BoundedPerturb: params must be [eta_scale, U, W, phi] (" +
            std::to_string(want) + " entries)");
      }
      const BoundedView v = bounded_view(spec);
      if (!(v.eta_scale > 0 && v.eta_scale <= 1))
        throw InvalidSpecError("BoundedPerturb: eta_scale must be in (0, 1]");
      if (v.eta_scale != spec.epsilon)
        throw InvalidSpecError(
            "BoundedPerturb: epsilon must equal eta_scale (the map is "
            "certified exactly at its perturbation budget)");
      check_orthonormal_columns(v.u, "BoundedPerturb");
      break;
    }
    case Family::GraphFamily: {
      if (m != 1 || k != 2)
        throw InvalidSpecError("GraphFamily: requires dim_in = 1, dim_out = 2");
      if (spec.params.size() < 2 || spec.params.size() % 2 != 0) {
        throw InvalidSpecError(
            "GraphFamily: params must be [t_1..t_K, g_1..g_K]");
      }
      const auto knots = graph_knots(spec);
      const auto values = graph_values(spec);
      double prev_t = 0.0, prev_g = 0.0;
      double prev_slope = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < knots.size(); ++i) {
        if (!(knots[i] > prev_t)) {
          throw InvalidSpecError(
              "GraphFamily: knots must be strictly increasing and positive");
        }
        const double slope = (values[i] - prev_g) / (knots[i] - prev_t);
        const double slack = 1e-9 * (1.0 + std::abs(prev_slope));
        if (slope < -1e-12) {
          throw InvalidSpecError(
              "GraphFamily: g must be nondecreasing (segment " +
              std::to_string(i) + " has negative slope)");
        }
        if (slope > prev_slope + slack) {
          throw InvalidSpecError(
              "GraphFamily: g must be concave (slope increases at knot " +
              std::to_string(i) + ")");
        }
        prev_t = knots[i];
        prev_g = values[i];
        prev_slope = slope;
      }
      break;
    }
  }
}

MapSpec exact_isometry(const Matrix& u, double epsilon) {
  MapSpec spec;
  spec.family = Family::ExactIsometry;
  spec.epsilon = epsilon;
  spec.dim_in = static_cast<int>(u.cols());
  spec.dim_out = static_cast<int>(u.rows());
  spec.params.resize(u.size());
  for (int i = 0; i < u.rows(); ++i)
    for (int j = 0; j < u.cols(); ++j) spec.params[i * u.cols() + j] = u(i, j);
  validate(spec);
  return spec;
}

MapSpec graph_sqrt(double epsilon) {
  MapSpec spec;
  spec.family = Family::GraphSqrt;
  spec.epsilon = epsilon;
  spec.dim_in = 1;
  spec.dim_out = 2;
  validate(spec);
  return spec;
}

MapSpec point_perturb(double epsilon, double delta) {
  MapSpec spec;
  spec.family = Family::PointPerturb;
  spec.epsilon = epsilon;
  spec.dim_in = 1;
  spec.dim_out = 2;
  spec.params = {delta};
  validate(spec);
  return spec;
}

MapSpec graph_family(double epsilon, std::vector<double> knots,
                     std::vector<double> values) {
  if (knots.size() != values.size()) {
    throw InvalidSpecError("GraphFamily: knots and values differ in length");
  }
  MapSpec spec;
  spec.family = Family::GraphFamily;
  spec.epsilon = epsilon;
  spec.dim_in = 1;
  spec.dim_out = 2;
  spec.params = std::move(knots);
  spec.params.insert(spec.params.end(), values.begin(), values.end());
  validate(spec);
  return spec;
}

MapSpec make_bounded_perturb(const Matrix& u, double eta_scale,
                             std::uint64_t seed) {
  check_orthonormal_columns(u, "make_bounded_perturb");
  if (!(eta_scale > 0 && eta_scale <= 1)) {
    throw InvalidSpecError("make_bounded_perturb: eta_scale must be in (0, 1]");
  }
  const int k = static_cast<int>(u.rows());
  const int m = static_cast<int>(u.cols());
  const rng::Stream freq{rng::derive(seed, "bp-freq")};
  const rng::Stream phase{rng::derive(seed, "bp-phase")};
  MapSpec spec;
  spec.family = Family::BoundedPerturb;
  spec.epsilon = eta_scale;
  spec.dim_in = m;
  spec.dim_out = k;
  spec.params.reserve(1 + 2 * k * m + k);
  spec.params.push_back(eta_scale);
  for (int i = 0; i < k * m; ++i) {
    spec.params.push_back(u(i / m, i % m));
  }
  for (int i = 0; i < k * m; ++i) {
    spec.params.push_back(freq.gauss(i));
  }
  for (int i = 0; i < k; ++i) {
    spec.params.push_back(kTwoPi * phase.u01(i));
  }
  validate(spec);
  return spec;
}

std::span<const double> graph_knots(const MapSpec& spec) {
  const std::size_t k = spec.params.size() / 2;
  return std::span<const double>(spec.params).first(k);
}

std::span<const double> graph_values(const MapSpec& spec) {
  const std::size_t k = spec.params.size() / 2;
  return std::span<const double>(spec.params).last(k);
}

double graph_family_g(const MapSpec& spec, double t) {
  return graph_g(graph_knots(spec), graph_values(spec), t);
}

Vector graph_family_eval(const MapSpec& spec, double t) {
  Vector out(2);
  out(0) = t;
  out(1) = t > 0.0 ? graph_family_g(spec, t) : 0.0;
  return out;
}

bool graph_family_admissible(const MapSpec& spec, std::string* reason) {
  const auto knots = graph_knots(spec);
  const auto values = graph_values(spec);
  const double eps = spec.epsilon;
  // g concave with g(0) = 0 makes increments over a span h largest at the
  // origin, so the pair inequality reduces to g(h)^2 <= 2 eps h + eps^2 at
  // the knots; beyond the last knot g is flat and the bound keeps growing.
  for (std::size_t i = 0; i < knots.size(); ++i) {
    const double cap = 2.0 * eps * knots[i] + eps * eps;
    if (values[i] * values[i] > cap * (1.0 + 1e-12)) {
      if (reason != nullptr) {
        *reason = "g(" + format_double(knots[i]) + ") = " +
                  format_double(values[i]) +
                  " exceeds sqrt(2 eps t + eps^2) = " +
                  format_double(std::sqrt(cap));
      }
      return false;
    }
  }
  return true;
}

double analytic_epsilon(const MapSpec& spec) {
  return spec.family == Family::ExactIsometry ? 0.0 : spec.epsilon;
}

std::vector<Vector> critical_points(const MapSpec& spec) {
  std::vector<Vector> pts;
  if (spec.family == Family::PointPerturb) {
    Vector d(1);
    d(0) = spec.params[0];
    pts.push_back(d);
  } else if (spec.family == Family::GraphFamily) {
    for (const double t : graph_knots(spec)) {
      Vector v(1);
      v(0) = t;
      pts.push_back(v);
    }
  }
  return pts;
}

Vector eval(const MapSpec& spec, const Vector& x) {
  if (x.size() != spec.dim_in) {
    throw DimensionError("eval: expected dimension " +
                         std::to_string(spec.dim_in) + ", got " +
                         std::to_string(x.size()));
  }
  require_finite(x, "eval");
  switch (spec.family) {
    case Family::ExactIsometry:
      return row_major_view(spec.params, spec.dim_out, spec.dim_in) * x;
    case Family::GraphSqrt: {
      const double t = x(0);
      Vector out(2);
      out(0) = t;
      out(1) = t > 0.0 ? std::sqrt(2.0 * spec.epsilon * t) : 0.0;
      return out;
    }
    case Family::PointPerturb: {
      const double t = x(0);
      Vector out(2);
      out(0) = t;
      out(1) = t == spec.params[0] ? spec.epsilon : 0.0;
      return out;
    }
    case Family::BoundedPerturb: {
      const BoundedView v = bounded_view(spec);
      const double r2 = x.squaredNorm();
      const double damp = r2 / (1.0 + r2);  // smooth, 0 at 0, < 1
      const double amp = 0.5 * v.eta_scale * damp / std::sqrt(spec.dim_out);
      Vector out = v.u * x;
      for (int i = 0; i < spec.dim_out; ++i) {
        out(i) += amp * std::sin(v.w.row(i).dot(x) + v.phi(i));
      }
      return out;
    }
    case Family::GraphFamily:
      return graph_family_eval(spec, x(0));
  }
  throw Error("eval: unreachable");
}

MapFn to_fn(const MapSpec& spec) {
  validate(spec);
  MapFn fn;
  fn.dim_in = spec.dim_in;
  fn.dim_out = spec.dim_out;
  fn.epsilon = spec.epsilon;
  fn.analytic_epsilon = analytic_epsilon(spec);
  fn.critical_points = critical_points(spec);
  switch (spec.family) {
    case Family::ExactIsometry: {
      Matrix u = row_major_view(spec.params, spec.dim_out, spec.dim_in);
      fn.eval = [u = std::move(u)](const Vector& x) { return u * x; };
      break;
    }
    case Family::BoundedPerturb: {
      BoundedView v = bounded_view(spec);
      const int k = spec.dim_out;
      fn.eval = [v = std::move(v), k](const Vector& x) {
        const double r2 = x.squaredNorm();
        const double amp =
            0.5 * v.eta_scale * (r2 / (1.0 + r2)) / std::sqrt(k);
        Vector out = v.u * x;
        for (int i = 0; i < k; ++i) {
          out(i) += amp * std::sin(v.w.row(i).dot(x) + v.phi(i));
        }
        return out;
      };
      break;
    }
    default:
      fn.eval = [spec](const Vector& x) { return eval(spec, x); };
  }
  return fn;
}

namespace {

double pair_violation(const MapFn& fn, const Vector& x, const Vector& y) {
  return std::abs((fn.eval(x) - fn.eval(y)).norm() - (x - y).norm());
}

struct WorstPair {
  double violation = -1.0;
  std::int64_t index = -1;
  Vector x, y;
};

void consider(WorstPair& best, double v, std::int64_t idx, const Vector& x,
              const Vector& y) {
  if (v > best.violation) best = {v, idx, x, y};
}

}  // namespace

CertReport certify_fn(const MapFn& fn, const SamplerConfig& sampler) {
  if (sampler.n < 1) {
    throw InvalidSpecError("certify: sample count must be >= 1");
  }
  if (!(sampler.radius > 0)) {
    throw InvalidSpecError("certify: radius must be positive");
  }

  WorstPair best;
  std::int64_t checked = 0;

  const auto grid =
      grid_points(fn.dim_in, sampler.radius, fn.critical_points);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = i + 1; j < grid.size(); ++j) {
      consider(best, pair_violation(fn, grid[i], grid[j]), checked, grid[i],
               grid[j]);
      ++checked;
    }
  }

  // Random pairs, fixed chunking so the reduction is seed-deterministic no
  // matter how many threads run.
  const std::uint64_t seed_a = rng::derive(sampler.seed, "certify-a");
  const std::uint64_t seed_b = rng::derive(sampler.seed, "certify-b");
  constexpr std::int64_t kChunk = 1024;
  const std::int64_t n_chunks = (sampler.n + kChunk - 1) / kChunk;
  std::vector<WorstPair> parts(n_chunks);
  const std::int64_t base = checked;
  par::for_chunks(sampler.n, kChunk,
                  [&](std::int64_t c, std::int64_t b, std::int64_t e) {
                    WorstPair local;
                    for (std::int64_t i = b; i < e; ++i) {
                      const Vector x = ball_point(seed_a, i, fn.dim_in,
                                                  sampler.radius);
                      const Vector y = ball_point(seed_b, i, fn.dim_in,
                                                  sampler.radius);
                      consider(local, pair_violation(fn, x, y), base + i, x,
                               y);
                    }
                    parts[c] = std::move(local);
                  });
  for (const WorstPair& p : parts) {
    if (p.violation > best.violation) best = p;
  }
  checked += sampler.n;

  CertReport rep;
  rep.samples_checked = checked;
  rep.max_violation = std::max(best.violation, 0.0);
  rep.worst_x = best.x;
  rep.worst_y = best.y;
  rep.certified = rep.max_violation <= fn.epsilon;
  return rep;
}

CertReport certify(const MapSpec& spec, const SamplerConfig& sampler) {
  return certify_fn(to_fn(spec), sampler);
}

const std::vector<FamilySchema>& family_schemas() {
  static const std::vector<FamilySchema> schemas = {
      {"ExactIsometry", "f(x) = U x for a matrix U with orthonormal columns",
       "params = U row-major (dim_out x dim_in entries)"},
      {"GraphSqrt",
       "f(t) = (t, sqrt(2 eps t)) for t >= 0 and (t, 0) for t < 0",
       "params = [] (dim_in = 1, dim_out = 2)"},
      {"PointPerturb",
       "f(t) = (t, 0) everywhere except f(delta) = (delta, eps)",
       "params = [delta], delta > 0 (dim_in = 1, dim_out = 2)"},
      {"BoundedPerturb",
       "f(x) = U x + eta(x), smooth field with eta(0) = 0 and sup ||eta|| <= "
       "eta_scale / 2",
       "params = [eta_scale, U row-major, W row-major, phi] "
       "(1 + 2*dim_out*dim_in + dim_out entries)"},
      {"GraphFamily",
       "f(t) = (t, g(t)) for t >= 0 and (t, 0) for t < 0; g piecewise "
       "linear, nonnegative, nondecreasing, concave, g(0) = 0, flat after "
       "the last knot",
       "params = [t_1..t_K, g_1..g_K] with 0 < t_1 < ... < t_K"},
  };
  return schemas;
}

std::string to_json(const MapSpec& spec) {
  JsonWriter w;
  w.begin_object();
  w.key("family").value(family_name(spec.family));
  w.key("epsilon").value(spec.epsilon);
  w.key("dim_in").value(spec.dim_in);
  w.key("dim_out").value(spec.dim_out);
  w.key("params").value_array(spec.params);
  w.end_object();
  return w.take();
}

MapSpec from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("map file: ") + e.what());
  }
  try {
    MapSpec spec;
    spec.family = family_from_name(doc.at("family").get<std::string>());
    spec.epsilon = doc.at("epsilon").get<double>();
    spec.dim_in = doc.at("dim_in").get<int>();
    spec.dim_out = doc.at("dim_out").get<int>();
    spec.params = doc.at("params").get<std::vector<double>>();
    validate(spec);
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map file: ") + e.what());
  }
}

MapSpec load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open map file \"" + path + "\"");
  std::ostringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void save(const MapSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write map file \"" + path + "\"");
  out << to_json(spec);
}

}  // namespace isostab::gallery
