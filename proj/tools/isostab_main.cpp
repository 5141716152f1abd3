// isostab: numerical laboratory for approximate isometries between
// finite-dimensional real Hilbert spaces.
//
// Exit codes, uniform across subcommands:
//   0  success / all checked properties passed
//   1  a checked property failed (violation found, n_max stop, bound miss)
//   2  usage, parse, or precondition error

#include <chrono>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "isostab/bounds.hpp"
#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"
#include "isostab/json_writer.hpp"
#include "isostab/report.hpp"
#include "isostab/rng.hpp"
#include "isostab/search.hpp"
#include "isostab/version.hpp"

namespace {

using namespace isostab;

Vector parse_csv_vector(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      vals.push_back(std::stod(item, &pos));
      while (pos < item.size() &&
             std::isspace(static_cast<unsigned char>(item[pos]))) {
        ++pos;
      }
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("--x: \"" + item + "\" is not a number");
    }
  }
  if (vals.empty()) throw ParseError("--x: empty coordinate list");
  Vector x(static_cast<Eigen::Index>(vals.size()));
  for (std::size_t i = 0; i < vals.size(); ++i) x(i) = vals[i];
  require_finite(x, "--x");
  return x;
}

std::string csv_line(const Vector& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(v(i));
  }
  return out;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write \"" + path + "\"");
  out << text;
}

// Wraps a payload writer in the run manifest; `config` echoes the
// subcommand's options so the report reproduces itself.
std::string make_report(const std::string& command, std::uint64_t seed,
                        const std::function<void(JsonWriter&)>& config,
                        const std::function<void(JsonWriter&)>& payload,
                        std::int64_t wall_ms) {
  JsonWriter w;
  w.begin_object();
  w.key("manifest").begin_object();
  w.key("command").value(command);
  w.key("tool_version").value(kToolVersion);
  w.key("seed").value(seed);
  w.key("config");
  w.begin_object();
  config(w);
  w.end_object();
  w.key("wall_time_ms").value(wall_ms);
  w.end_object();
  w.key("payload");
  payload(w);
  w.end_object();
  return w.take();
}

void emit(const std::string& out_path, const std::string& doc) {
  if (out_path.empty()) {
    std::cout << doc;
  } else {
    write_text(out_path, doc);
  }
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  std::int64_t ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - t0)
        .count();
  }
};

int cmd_gallery_list(const std::string& out_path) {
  JsonWriter w;
  w.begin_object();
  w.key("families").begin_array();
  for (const auto& schema : gallery::family_schemas()) {
    w.begin_object();
    w.key("name").value(schema.name);
    w.key("doc").value(schema.doc);
    w.key("params").value(schema.params);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  emit(out_path, w.take());
  return 0;
}

int cmd_gallery_eval(const std::string& map_path, const std::string& x_csv,
                     const std::string& out_path) {
  const auto spec = gallery::load(map_path);
  const Vector x = parse_csv_vector(x_csv);
  const Vector fx = gallery::eval(spec, x);
  std::cout << csv_line(fx) << "\n";
  if (!out_path.empty()) {
    JsonWriter w;
    w.begin_object();
    w.key("map");
    report::write_map_spec(w, spec);
    w.key("x");
    report::write_vector(w, x);
    w.key("fx");
    report::write_vector(w, fx);
    w.end_object();
    write_text(out_path, w.take());
  }
  return 0;
}

int cmd_certify(const std::string& map_path, std::int64_t samples,
                double radius, std::uint64_t seed,
                const std::string& out_path) {
  const Timer timer;
  const auto spec = gallery::load(map_path);
  const SamplerConfig sampler{samples, radius, rng::derive(seed, "certify")};
  const auto rep = gallery::certify(spec, sampler);
  emit(out_path,
       make_report(
           "certify", seed,
           [&](JsonWriter& w) {
             w.key("map_file").value(map_path);
             w.key("samples").value(samples);
             w.key("radius").value(radius);
           },
           [&](JsonWriter& w) {
             report::write_cert_payload(w, spec, sampler, rep);
           },
           timer.ms()));
  return rep.certified ? 0 : 1;
}

int cmd_extract(const std::string& map_path, double tol, int n_max,
                const std::string& out_path) {
  const Timer timer;
  const auto spec = gallery::load(map_path);
  const extractor::ExtractionConfig cfg{tol, n_max};
  const auto [res, frame] = extractor::assemble_frame(spec, cfg);
  emit(out_path,
       make_report(
           "extract", 0,
           [&](JsonWriter& w) {
             w.key("map_file").value(map_path);
             w.key("tol").value(tol);
             w.key("n_max").value(n_max);
           },
           [&](JsonWriter& w) {
             report::write_extraction_payload(w, spec, cfg, res, frame);
           },
           timer.ms()));
  if (!res.converged) {
    std::cerr << "extract: stopped at n_max = " << n_max
              << " before reaching tol = " << format_double(tol)
              << " (achieved rate "
              << format_double(extractor::apriori_rate(
                     gallery::analytic_epsilon(spec), 1.0, n_max))
              << ")\n";
    return 1;
  }
  return 0;
}

int cmd_bounds(const std::string& map_path, std::int64_t samples,
               double radius, std::uint64_t seed, double tol, int n_max,
               const std::string& csv_path, const std::string& out_path) {
  const Timer timer;
  const auto spec = gallery::load(map_path);
  const auto [res, frame] = extractor::assemble_frame(spec, {tol, n_max});
  const SamplerConfig sampler{samples, radius, rng::derive(seed, "bounds")};
  const auto rep = bounds::verify_bounds(spec, frame, sampler);
  if (!csv_path.empty()) write_text(csv_path, report::residual_csv(rep));
  emit(out_path,
       make_report(
           "bounds", seed,
           [&](JsonWriter& w) {
             w.key("map_file").value(map_path);
             w.key("samples").value(samples);
             w.key("radius").value(radius);
             w.key("tol").value(tol);
             w.key("n_max").value(n_max);
           },
           [&](JsonWriter& w) {
             report::write_bounds_payload(w, spec, sampler, rep);
           },
           timer.ms()));
  return rep.all_pass ? 0 : 1;
}

int cmd_prooftrace(const std::string& map_path, const std::string& x_csv,
                   int k, const std::string& out_path) {
  const Timer timer;
  const auto spec = gallery::load(map_path);
  const Vector x = parse_csv_vector(x_csv);
  const double r = x.norm();
  if (k < 1 || !(k * r - spec.epsilon > 0.0)) {
    throw PreconditionError(
        "prooftrace: require k*r - eps > 0 (got k = " + std::to_string(k) +
        ", r = " + format_double(r) + ", eps = " +
        format_double(spec.epsilon) + ")");
  }
  const auto [in_b1, in_b2] = bounds::ball_membership(spec, x, k);
  bool holds = false;
  double lhs = 0.0, rhs = 0.0;
  if (in_b1 && in_b2) {
    const Vector y = gallery::eval(spec, x);
    const auto c = bounds::midpoint_inequality(spec, x, k, y);
    lhs = c.lhs;
    rhs = c.rhs;
    holds = c.holds;
  }
  const double defect =
      bounds::midpoint_defect(spec, x, Vector(static_cast<double>(k) * x));
  const bool all_pass = in_b1 && in_b2 && holds;
  emit(out_path,
       make_report(
           "prooftrace", 0,
           [&](JsonWriter& w) {
             w.key("map_file").value(map_path);
             w.key("x").value(x_csv);
             w.key("k").value(k);
           },
           [&](JsonWriter& w) {
             w.begin_object();
             w.key("map");
             report::write_map_spec(w, spec);
             w.key("x");
             report::write_vector(w, x);
             w.key("r").value(r);
             w.key("k").value(k);
             w.key("ball_membership").begin_object();
             w.key("in_B1").value(in_b1);
             w.key("in_B2").value(in_b2);
             w.end_object();
             w.key("midpoint_inequality").begin_object();
             w.key("lhs").value(lhs);
             w.key("rhs").value(rhs);
             w.key("holds").value(holds);
             w.end_object();
             w.key("midpoint_defect_x_kx").value(defect);
             w.key("all_pass").value(all_pass);
             w.end_object();
           },
           timer.ms()));
  return all_pass ? 0 : 1;
}

int cmd_search(double eps, int knots, double t_max, int iters, int restarts,
               std::uint64_t seed, const std::string& witness_path,
               const std::string& out_path) {
  const Timer timer;
  search::SearchConfig cfg;
  cfg.epsilon = eps;
  cfg.knot_count = knots;
  cfg.t_max = t_max;
  cfg.iterations = iters;
  cfg.restarts = restarts;
  cfg.seed = rng::derive(seed, "search");
  const auto result = search::search_sharp_A(cfg);
  if (!witness_path.empty()) gallery::save(result.witness, witness_path);
  emit(out_path,
       make_report(
           "search", seed,
           [&](JsonWriter& w) {
             w.key("eps").value(eps);
             w.key("knots").value(knots);
             w.key("tmax").value(t_max);
             w.key("iters").value(iters);
             w.key("restarts").value(restarts);
           },
           [&](JsonWriter& w) {
             report::write_search_payload(w, cfg, result);
           },
           timer.ms()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "isostab: extract the linear isometry behind an approximate one, "
      "verify stability bounds, replay the proof inequalities, and probe "
      "the sharp residual-growth constant"};
  app.require_subcommand(1);

  std::string map_path, x_csv, out_path, csv_path, witness_path;
  std::int64_t samples = 10000;
  double radius = 100.0;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  int n_max = 60;
  int k = 2;
  double eps = 0.1;
  int knots = 16;
  double t_max = 1e4;
  int iters = 24;
  int restarts = 4;

  auto* gal = app.add_subcommand("gallery", "list or evaluate map families");
  gal->require_subcommand(1);
  auto* gal_list = gal->add_subcommand("list", "list families and schemas");
  gal_list->add_option("--out", out_path, "write the report to a file");
  auto* gal_eval = gal->add_subcommand("eval", "evaluate f(x)");
  gal_eval->add_option("--map", map_path, "map spec file")->required();
  gal_eval->add_option("--x", x_csv, "point, comma-separated")->required();
  gal_eval->add_option("--out", out_path, "write the report to a file");

  auto* certify = app.add_subcommand(
      "certify", "check the defining inequality over sampled pairs");
  certify->add_option("--map", map_path)->required();
  certify->add_option("--samples", samples, "random pair count");
  certify->add_option("--radius", radius, "sampling ball radius");
  certify->add_option("--seed", seed);
  certify->add_option("--out", out_path);

  auto* extract = app.add_subcommand(
      "extract", "recover the isometry via the doubling limit");
  extract->add_option("--map", map_path)->required();
  extract->add_option("--tol", tol, "target per-point accuracy");
  extract->add_option("--nmax", n_max, "cap on the doubling index");
  extract->add_option("--out", out_path);

  auto* bounds_cmd = app.add_subcommand(
      "bounds", "verify the stability bounds over sampled points");
  bounds_cmd->add_option("--map", map_path)->required();
  bounds_cmd->add_option("--samples", samples, "random point count");
  bounds_cmd->add_option("--radius", radius);
  bounds_cmd->add_option("--seed", seed);
  bounds_cmd->add_option("--tol", tol, "extraction tolerance");
  bounds_cmd->add_option("--nmax", n_max);
  bounds_cmd->add_option("--csv", csv_path, "dump the sample table");
  bounds_cmd->add_option("--out", out_path);

  auto* prooftrace = app.add_subcommand(
      "prooftrace", "ball membership and the k-indexed midpoint inequality");
  prooftrace->add_option("--map", map_path)->required();
  prooftrace->add_option("--x", x_csv)->required();
  prooftrace->add_option("--k", k, "doubling factor, k*||x|| > eps");
  prooftrace->add_option("--out", out_path);

  auto* search_cmd = app.add_subcommand(
      "search", "probe the sharp growth constant over graph families");
  search_cmd->add_option("--eps", eps);
  search_cmd->add_option("--knots", knots);
  search_cmd->add_option("--tmax", t_max);
  search_cmd->add_option("--iters", iters);
  search_cmd->add_option("--restarts", restarts);
  search_cmd->add_option("--seed", seed);
  search_cmd->add_option("--witness-out", witness_path,
                         "write the winning map spec");
  search_cmd->add_option("--out", out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (gal_list->parsed()) return cmd_gallery_list(out_path);
    if (gal_eval->parsed()) return cmd_gallery_eval(map_path, x_csv, out_path);
    if (certify->parsed())
      return cmd_certify(map_path, samples, radius, seed, out_path);
    if (extract->parsed()) return cmd_extract(map_path, tol, n_max, out_path);
    if (bounds_cmd->parsed())
      return cmd_bounds(map_path, samples, radius, seed, tol, n_max, csv_path,
                        out_path);
    if (prooftrace->parsed())
      return cmd_prooftrace(map_path, x_csv, k, out_path);
    if (search_cmd->parsed())
      return cmd_search(eps, knots, t_max, iters, restarts, seed,
                        witness_path, out_path);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
