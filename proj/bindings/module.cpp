#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isostab/bounds.hpp"
#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"
#include "isostab/report.hpp"
#include "isostab/search.hpp"
#include "isostab/space.hpp"
#include "isostab/version.hpp"

namespace py = pybind11;
using namespace isostab;

PYBIND11_MODULE(_core, m) {
  m.doc() =
      "Numerical laboratory for approximate isometries between "
      "finite-dimensional real Hilbert spaces: doubling-limit extraction, "
      "stability-bound verification, proof-step traces, and sharp-constant "
      "search.";
  m.attr("__version__") = kToolVersion;

  py::register_exception<Error>(m, "IsostabError");

  // ---- space ---------------------------------------------------------------
  m.def("inner", &inner, py::arg("a"), py::arg("b"));
  m.def("norm", &norm, py::arg("a"));
  m.def("gram_schmidt", &gram_schmidt, py::arg("vectors"));
  m.def("nearest_isometry", &nearest_isometry, py::arg("m"),
        "Closest matrix with orthonormal columns (polar factor).");
  m.def("operator_norm", &operator_norm, py::arg("m"));

  // ---- gallery ---------------------------------------------------------------
  py::class_<gallery::MapSpec>(m, "MapSpec")
      .def_property_readonly(
          "family",
          [](const gallery::MapSpec& s) {
            return std::string(gallery::family_name(s.family));
          })
      .def_readonly("epsilon", &gallery::MapSpec::epsilon)
      .def_readonly("dim_in", &gallery::MapSpec::dim_in)
      .def_readonly("dim_out", &gallery::MapSpec::dim_out)
      .def_readonly("params", &gallery::MapSpec::params)
      .def("to_json",
           [](const gallery::MapSpec& s) { return gallery::to_json(s); })
      .def("__repr__", [](const gallery::MapSpec& s) {
        return "MapSpec(" + std::string(gallery::family_name(s.family)) +
               ", eps=" + format_double(s.epsilon) + ")";
      });

  m.def("exact_isometry", &gallery::exact_isometry, py::arg("u"),
        py::arg("epsilon"));
  m.def("graph_sqrt", &gallery::graph_sqrt, py::arg("epsilon"));
  m.def("point_perturb", &gallery::point_perturb, py::arg("epsilon"),
        py::arg("delta"));
  m.def("make_bounded_perturb", &gallery::make_bounded_perturb, py::arg("u"),
        py::arg("eta_scale"), py::arg("seed"));
  m.def("graph_family", &gallery::graph_family, py::arg("epsilon"),
        py::arg("knots"), py::arg("values"));
  m.def("graph_family_admissible",
        [](const gallery::MapSpec& s) {
          std::string why;
          const bool ok = gallery::graph_family_admissible(s, &why);
          return py::make_tuple(ok, why);
        },
        py::arg("spec"));
  m.def("map_spec_from_json", &gallery::from_json, py::arg("text"));
  m.def("load_map_spec", &gallery::load, py::arg("path"));
  m.def("save_map_spec", &gallery::save, py::arg("spec"), py::arg("path"));
  m.def("eval_map", &gallery::eval, py::arg("spec"), py::arg("x"),
        "Evaluate f(x); f(0) = 0 for every family.");
  m.def("analytic_epsilon", &gallery::analytic_epsilon, py::arg("spec"));

  py::class_<SamplerConfig>(m, "SamplerConfig")
      .def(py::init([](std::int64_t n, double radius, std::uint64_t seed) {
             return SamplerConfig{n, radius, seed};
           }),
           py::arg("n") = 1000, py::arg("radius") = 100.0,
           py::arg("seed") = 0)
      .def_readwrite("n", &SamplerConfig::n)
      .def_readwrite("radius", &SamplerConfig::radius)
      .def_readwrite("seed", &SamplerConfig::seed);

  py::class_<gallery::CertReport>(m, "CertReport")
      .def_readonly("samples_checked", &gallery::CertReport::samples_checked)
      .def_readonly("max_violation", &gallery::CertReport::max_violation)
      .def_readonly("worst_x", &gallery::CertReport::worst_x)
      .def_readonly("worst_y", &gallery::CertReport::worst_y)
      .def_readonly("certified", &gallery::CertReport::certified);

  m.def("certify", &gallery::certify, py::arg("spec"), py::arg("sampler"),
        "Check the defining inequality over sampled pairs plus the "
        "deterministic grid; certified means no violation was found.");

  // ---- extractor -------------------------------------------------------------
  py::class_<extractor::ExtractionConfig>(m, "ExtractionConfig")
      .def(py::init([](double tol, int n_max) {
             return extractor::ExtractionConfig{tol, n_max};
           }),
           py::arg("tol") = 1e-6, py::arg("n_max") = 60)
      .def_readwrite("tol", &extractor::ExtractionConfig::tol)
      .def_readwrite("n_max", &extractor::ExtractionConfig::n_max);

  py::class_<extractor::ExtractionResult>(m, "ExtractionResult")
      .def_readonly("raw_U", &extractor::ExtractionResult::raw_U)
      .def_readonly("U", &extractor::ExtractionResult::U)
      .def_readonly("per_column_n",
                    &extractor::ExtractionResult::per_column_n)
      .def_readonly("ortho_deviation",
                    &extractor::ExtractionResult::ortho_deviation)
      .def_readonly("converged", &extractor::ExtractionResult::converged);

  py::class_<extractor::IsometryFrame>(m, "IsometryFrame")
      .def_static("from_isometry", &extractor::IsometryFrame::from_isometry,
                  py::arg("u"))
      .def_readonly("U", &extractor::IsometryFrame::U)
      .def_readonly("P", &extractor::IsometryFrame::P)
      .def_readonly("T", &extractor::IsometryFrame::T);

  py::class_<extractor::FrameDeviations>(m, "FrameDeviations")
      .def_readonly("p_idempotent", &extractor::FrameDeviations::p_idempotent)
      .def_readonly("p_symmetric", &extractor::FrameDeviations::p_symmetric)
      .def_readonly("tu_identity", &extractor::FrameDeviations::tu_identity)
      .def_readonly("t_annihilates",
                    &extractor::FrameDeviations::t_annihilates)
      .def_readonly("t_op_norm", &extractor::FrameDeviations::t_op_norm);

  m.def("apriori_rate", &extractor::apriori_rate, py::arg("eps"),
        py::arg("r"), py::arg("n"),
        "Unconditional error bound on the doubling estimate after n steps.");
  m.def("extract_at", &extractor::extract_at, py::arg("spec"), py::arg("x"),
        py::arg("config") = extractor::ExtractionConfig{},
        "Doubling estimate at the a-priori stopping index; returns (u, n).");
  m.def("assemble_frame", &extractor::assemble_frame, py::arg("spec"),
        py::arg("config") = extractor::ExtractionConfig{},
        "Extract the frame (U, P, T); returns (ExtractionResult, "
        "IsometryFrame).");
  m.def("frame_deviations", &extractor::frame_deviations, py::arg("frame"));

  // ---- bounds ----------------------------------------------------------------
  py::class_<bounds::ResidualSample>(m, "ResidualSample")
      .def_readonly("x", &bounds::ResidualSample::x)
      .def_readonly("r", &bounds::ResidualSample::r)
      .def_readonly("h_norm", &bounds::ResidualSample::h_norm)
      .def_readonly("k_norm", &bounds::ResidualSample::k_norm)
      .def_readonly("t_resid", &bounds::ResidualSample::t_resid)
      .def_readonly("full_resid", &bounds::ResidualSample::full_resid)
      .def_readonly("bound2_margin", &bounds::ResidualSample::bound2_margin)
      .def_readonly("bound3_margin", &bounds::ResidualSample::bound3_margin)
      .def_readonly("bound4_margin", &bounds::ResidualSample::bound4_margin);

  py::class_<bounds::BoundReport>(m, "BoundReport")
      .def_readonly("samples", &bounds::BoundReport::samples)
      .def_readonly("min_margin2", &bounds::BoundReport::min_margin2)
      .def_readonly("min_margin3", &bounds::BoundReport::min_margin3)
      .def_readonly("min_margin4", &bounds::BoundReport::min_margin4)
      .def_readonly("all_pass", &bounds::BoundReport::all_pass)
      .def_readonly("worst_x2", &bounds::BoundReport::worst_x2)
      .def_readonly("worst_x3", &bounds::BoundReport::worst_x3)
      .def_readonly("worst_x4", &bounds::BoundReport::worst_x4);

  py::class_<bounds::MidpointCheck>(m, "MidpointCheck")
      .def_readonly("lhs", &bounds::MidpointCheck::lhs)
      .def_readonly("rhs", &bounds::MidpointCheck::rhs)
      .def_readonly("holds", &bounds::MidpointCheck::holds);

  m.def("bound4_value", &bounds::bound4_value, py::arg("eps"), py::arg("r"));
  m.def("residual_at", &bounds::residual_at, py::arg("spec"),
        py::arg("frame"), py::arg("x"));
  m.def("verify_bounds", &bounds::verify_bounds, py::arg("spec"),
        py::arg("frame"), py::arg("sampler"));
  m.def("ball_membership", &bounds::ball_membership, py::arg("spec"),
        py::arg("x"), py::arg("k"));
  m.def("midpoint_inequality", &bounds::midpoint_inequality, py::arg("spec"),
        py::arg("x"), py::arg("k"), py::arg("y"));
  m.def("midpoint_defect", &bounds::midpoint_defect, py::arg("spec"),
        py::arg("x"), py::arg("y"));

  // ---- search ----------------------------------------------------------------
  py::class_<search::SearchConfig>(m, "SearchConfig")
      .def(py::init([](double epsilon, int knot_count, double t_max,
                       int iterations, int restarts, std::uint64_t seed) {
             search::SearchConfig cfg;
             cfg.epsilon = epsilon;
             cfg.knot_count = knot_count;
             cfg.t_max = t_max;
             cfg.iterations = iterations;
             cfg.restarts = restarts;
             cfg.seed = seed;
             return cfg;
           }),
           py::arg("epsilon") = 0.1, py::arg("knot_count") = 16,
           py::arg("t_max") = 1e4, py::arg("iterations") = 24,
           py::arg("restarts") = 4, py::arg("seed") = 1)
      .def_readwrite("epsilon", &search::SearchConfig::epsilon)
      .def_readwrite("knot_count", &search::SearchConfig::knot_count)
      .def_readwrite("t_max", &search::SearchConfig::t_max)
      .def_readwrite("iterations", &search::SearchConfig::iterations)
      .def_readwrite("restarts", &search::SearchConfig::restarts)
      .def_readwrite("seed", &search::SearchConfig::seed);

  py::class_<search::SearchResult>(m, "SearchResult")
      .def_readonly("A_hat", &search::SearchResult::A_hat)
      .def_readonly("witness", &search::SearchResult::witness)
      .def_readonly("witness_t", &search::SearchResult::witness_t)
      .def_readonly("certified_witness",
                    &search::SearchResult::certified_witness)
      .def_readonly("winning_restart", &search::SearchResult::winning_restart)
      .def_readonly("history", &search::SearchResult::history);

  m.def("growth_rate", &search::growth_rate, py::arg("spec"),
        py::arg("frame"), py::arg("t_max"),
        "Smallest A with sqrt(A ||x|| + eps^2) above the observed "
        "orthogonal residual on the sampled ball.");
  m.def("search_sharp_A", &search::search_sharp_A, py::arg("config"),
        "Numerical lower bound on the sharp growth constant over graph "
        "families (not a proof of sharpness).");

  // ---- reports ---------------------------------------------------------------
  m.def("serialize_bounds", &report::serialize_bounds, py::arg("spec"),
        py::arg("sampler"), py::arg("report"));
  m.def("serialize_search", &report::serialize_search, py::arg("config"),
        py::arg("result"));
  m.def("residual_csv", &report::residual_csv, py::arg("report"));
}
