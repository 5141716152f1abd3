#pragma once

// Registry of concrete epsilon-isometry families and sampling-based
// certification of the defining inequality
//
//     | ||f(x) - f(y)|| - ||x - y|| | <= epsilon   for all x, y.
//
// Maps are closed, serializable specs (family + parameters), not arbitrary
// user code, so every run can be certified and reproduced from its report.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "isostab/sampler.hpp"
#include "isostab/space.hpp"

namespace isostab::gallery {

enum class Family {
  ExactIsometry,   // f(x) = U x, U with orthonormal columns
  GraphSqrt,       // f(t) = (t, sqrt(2 eps t)) for t >= 0, (t, 0) for t < 0
  PointPerturb,    // f(t) = (t, 0) except f(delta) = (delta, eps)
  BoundedPerturb,  // f(x) = U x + eta(x), sup ||eta|| <= eta_scale / 2
  GraphFamily,     // f(t) = (t, g(t)) with g piecewise linear, concave
};

const char* family_name(Family f);
Family family_from_name(const std::string& name);

/// Declared epsilon range; keeps eps^2 and 6 eps ||x|| well conditioned at
/// desk scale.
inline constexpr double kEpsMin = 1e-4;
inline constexpr double kEpsMax = 1e3;

struct MapSpec {
  Family family = Family::GraphSqrt;
  double epsilon = 0.1;
  int dim_in = 1;
  int dim_out = 2;
  std::vector<double> params;
};

/// Checks every family-specific parameter constraint; throws InvalidSpecError
/// naming the violated constraint.
void validate(const MapSpec& spec);

// Constructors.  Each validates before returning.
MapSpec exact_isometry(const Matrix& u, double epsilon);
MapSpec graph_sqrt(double epsilon);
MapSpec point_perturb(double epsilon, double delta);
MapSpec graph_family(double epsilon, std::vector<double> knots,
                     std::vector<double> values);

/// Generator: f(x) = U x + eta(x) with a fixed smooth perturbation field,
/// eta(0) = 0 and sup ||eta|| <= eta_scale / 2, hence an eta_scale-isometry
/// by the triangle inequality.  The field is drawn once from `seed` and
/// stored in the params, so the spec is self-contained.
MapSpec make_bounded_perturb(const Matrix& u, double eta_scale,
                             std::uint64_t seed);

/// Evaluates f(x).  f(0) = 0 for every family.
Vector eval(const MapSpec& spec, const Vector& x);

// GraphFamily accessors.
double graph_family_g(const MapSpec& spec, double t);
Vector graph_family_eval(const MapSpec& spec, double t);
std::span<const double> graph_knots(const MapSpec& spec);
std::span<const double> graph_values(const MapSpec& spec);

/// Closed-form admissibility for GraphFamily: the map is an eps-isometry
/// iff g(h)^2 <= 2 eps h + eps^2 at every knot and g is eventually flat
/// (both built into the representation).  Fills `reason` on failure.
bool graph_family_admissible(const MapSpec& spec, std::string* reason = nullptr);

/// Largest pair violation the family provably reaches: 0 for ExactIsometry,
/// the declared epsilon otherwise.  Drives the extraction stopping rule.
double analytic_epsilon(const MapSpec& spec);

/// Domain points samplers must always cover (delta for PointPerturb, knots
/// for GraphFamily).
std::vector<Vector> critical_points(const MapSpec& spec);

/// Flattened callable view used by certification, extraction and scoring
/// loops; also the hook for testing conjugated or adversarial maps.
struct MapFn {
  int dim_in = 0;
  int dim_out = 0;
  double epsilon = 0.0;
  double analytic_epsilon = 0.0;
  std::vector<Vector> critical_points;
  std::function<Vector(const Vector&)> eval;
};
MapFn to_fn(const MapSpec& spec);

struct CertReport {
  std::int64_t samples_checked = 0;
  double max_violation = 0.0;
  Vector worst_x, worst_y;
  bool certified = false;  // no violation above epsilon was found
};

/// Checks the defining inequality over `sampler.n` random pairs in the ball
/// plus all pairs of the deterministic grid.  A violation is a report
/// outcome, not an error.  Sampling cannot prove the property; certified
/// means "no violation found".
CertReport certify(const MapSpec& spec, const SamplerConfig& sampler);
CertReport certify_fn(const MapFn& fn, const SamplerConfig& sampler);

struct FamilySchema {
  std::string name;
  std::string doc;
  std::string params;
};
const std::vector<FamilySchema>& family_schemas();

// Map files are flat JSON documents with fields
//   family, epsilon, dim_in, dim_out, params
// (see README for the per-family params layout).
std::string to_json(const MapSpec& spec);
MapSpec from_json(const std::string& text);
MapSpec load(const std::string& path);
void save(const MapSpec& spec, const std::string& path);

}  // namespace isostab::gallery
