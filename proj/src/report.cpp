#include "isostab/report.hpp"

namespace isostab::report {

void write_vector(JsonWriter& w, const Vector& v) {
  w.begin_array();
  for (Eigen::Index i = 0; i < v.size(); ++i) w.value(v(i));
  w.end_array();
}

void write_matrix(JsonWriter& w, const Matrix& m) {
  w.begin_object();
  w.key("rows").value(static_cast<int>(m.rows()));
  w.key("cols").value(static_cast<int>(m.cols()));
  w.key("data").begin_array();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.value(m(i, j));
  w.end_array();
  w.end_object();
}

void write_map_spec(JsonWriter& w, const gallery::MapSpec& spec) {
  w.begin_object();
  w.key("family").value(gallery::family_name(spec.family));
  w.key("epsilon").value(spec.epsilon);
  w.key("dim_in").value(spec.dim_in);
  w.key("dim_out").value(spec.dim_out);
  w.key("params").value_array(spec.params);
  w.end_object();
}

void write_sampler(JsonWriter& w, const SamplerConfig& sampler) {
  w.begin_object();
  w.key("samples").value(sampler.n);
  w.key("radius").value(sampler.radius);
  w.key("seed").value(sampler.seed);
  w.end_object();
}

void write_cert_report(JsonWriter& w, const gallery::CertReport& rep) {
  w.begin_object();
  w.key("samples_checked").value(rep.samples_checked);
  w.key("max_violation").value(rep.max_violation);
  w.key("worst_pair").begin_object();
  w.key("x");
  write_vector(w, rep.worst_x);
  w.key("y");
  write_vector(w, rep.worst_y);
  w.end_object();
  w.key("certified").value(rep.certified);
  if (rep.samples_checked < 32) {
    w.key("note").value("low sample coverage; treat the result as weak");
  }
  w.end_object();
}

void write_extraction(JsonWriter& w, const extractor::ExtractionResult& res) {
  w.begin_object();
  w.key("per_column_n").value_array(res.per_column_n);
  w.key("ortho_deviation").value(res.ortho_deviation);
  w.key("converged").value(res.converged);
  w.key("raw_U");
  write_matrix(w, res.raw_U);
  w.key("U");
  write_matrix(w, res.U);
  w.end_object();
}

void write_frame(JsonWriter& w, const extractor::IsometryFrame& frame) {
  const auto dev = extractor::frame_deviations(frame);
  w.begin_object();
  w.key("U");
  write_matrix(w, frame.U);
  w.key("P");
  write_matrix(w, frame.P);
  w.key("T");
  write_matrix(w, frame.T);
  w.key("deviations").begin_object();
  w.key("p_idempotent").value(dev.p_idempotent);
  w.key("p_symmetric").value(dev.p_symmetric);
  w.key("tu_identity").value(dev.tu_identity);
  w.key("t_annihilates").value(dev.t_annihilates);
  w.key("t_op_norm").value(dev.t_op_norm);
  w.end_object();
  w.end_object();
}

void write_residual_sample(JsonWriter& w, const bounds::ResidualSample& s) {
  w.begin_object();
  w.key("x");
  write_vector(w, s.x);
  w.key("r").value(s.r);
  w.key("h_norm").value(s.h_norm);
  w.key("k_norm").value(s.k_norm);
  w.key("t_resid").value(s.t_resid);
  w.key("full_resid").value(s.full_resid);
  w.key("bound2_margin").value(s.bound2_margin);
  w.key("bound3_margin").value(s.bound3_margin);
  w.key("bound4_margin").value(s.bound4_margin);
  w.end_object();
}

void write_bound_report(JsonWriter& w, const bounds::BoundReport& rep) {
  auto worst_sample = [&](const Vector& x) -> const bounds::ResidualSample* {
    for (const auto& s : rep.samples) {
      if (s.x.size() == x.size() && s.x == x) return &s;
    }
    return nullptr;
  };
  w.begin_object();
  w.key("samples_checked")
      .value(static_cast<std::int64_t>(rep.samples.size()));
  w.key("min_margin2").value(rep.min_margin2);
  w.key("min_margin3").value(rep.min_margin3);
  w.key("min_margin4").value(rep.min_margin4);
  w.key("all_pass").value(rep.all_pass);
  w.key("worst").begin_object();
  const struct {
    const char* name;
    const Vector* x;
  } rows[] = {{"bound2", &rep.worst_x2},
              {"bound3", &rep.worst_x3},
              {"bound4", &rep.worst_x4}};
  for (const auto& row : rows) {
    w.key(row.name);
    if (const auto* s = worst_sample(*row.x)) {
      write_residual_sample(w, *s);
    } else {
      w.begin_object().end_object();
    }
  }
  w.end_object();
  w.end_object();
}

void write_search_result(JsonWriter& w, const search::SearchResult& res) {
  w.begin_object();
  w.key("A_hat").value(res.A_hat);
  w.key("A_hat_meaning")
      .value("numerical lower bound on the achievable growth constant; "
             "not a proof of sharpness");
  w.key("witness");
  write_map_spec(w, res.witness);
  w.key("witness_t").value(res.witness_t);
  w.key("certified_witness").value(res.certified_witness);
  w.key("winning_restart").value(res.winning_restart);
  w.key("history").begin_array();
  for (const auto& [sweep, score] : res.history) {
    w.begin_array().value(sweep).value(score).end_array();
  }
  w.end_array();
  w.end_object();
}

void write_cert_payload(JsonWriter& w, const gallery::MapSpec& spec,
                        const SamplerConfig& sampler,
                        const gallery::CertReport& rep) {
  w.begin_object();
  w.key("map");
  write_map_spec(w, spec);
  w.key("sampler");
  write_sampler(w, sampler);
  w.key("cert_report");
  write_cert_report(w, rep);
  w.end_object();
}

void write_extraction_payload(JsonWriter& w, const gallery::MapSpec& spec,
                              const extractor::ExtractionConfig& cfg,
                              const extractor::ExtractionResult& res,
                              const extractor::IsometryFrame& frame) {
  w.begin_object();
  w.key("map");
  write_map_spec(w, spec);
  w.key("config").begin_object();
  w.key("tol").value(cfg.tol);
  w.key("n_max").value(cfg.n_max);
  w.end_object();
  w.key("extraction");
  write_extraction(w, res);
  w.key("frame");
  write_frame(w, frame);
  w.end_object();
}

void write_bounds_payload(JsonWriter& w, const gallery::MapSpec& spec,
                          const SamplerConfig& sampler,
                          const bounds::BoundReport& rep) {
  w.begin_object();
  w.key("map");
  write_map_spec(w, spec);
  w.key("sampler");
  write_sampler(w, sampler);
  w.key("bound_report");
  write_bound_report(w, rep);
  w.end_object();
}

void write_search_payload(JsonWriter& w, const search::SearchConfig& cfg,
                          const search::SearchResult& res) {
  w.begin_object();
  w.key("config").begin_object();
  w.key("epsilon").value(cfg.epsilon);
  w.key("knot_count").value(cfg.knot_count);
  w.key("t_max").value(cfg.t_max);
  w.key("iterations").value(cfg.iterations);
  w.key("restarts").value(cfg.restarts);
  w.key("seed").value(cfg.seed);
  w.end_object();
  w.key("search_result");
  write_search_result(w, res);
  w.end_object();
}

std::string serialize_cert(const gallery::MapSpec& spec,
                           const SamplerConfig& sampler,
                           const gallery::CertReport& rep) {
  JsonWriter w;
  write_cert_payload(w, spec, sampler, rep);
  return w.take();
}

std::string serialize_extraction(const gallery::MapSpec& spec,
                                 const extractor::ExtractionConfig& cfg,
                                 const extractor::ExtractionResult& res,
                                 const extractor::IsometryFrame& frame) {
  JsonWriter w;
  write_extraction_payload(w, spec, cfg, res, frame);
  return w.take();
}

std::string serialize_bounds(const gallery::MapSpec& spec,
                             const SamplerConfig& sampler,
                             const bounds::BoundReport& rep) {
  JsonWriter w;
  write_bounds_payload(w, spec, sampler, rep);
  return w.take();
}

std::string serialize_search(const search::SearchConfig& cfg,
                             const search::SearchResult& res) {
  JsonWriter w;
  write_search_payload(w, cfg, res);
  return w.take();
}

std::string residual_csv(const bounds::BoundReport& rep) {
  std::string out;
  if (rep.samples.empty()) return out;
  const Eigen::Index dim = rep.samples.front().x.size();
  for (Eigen::Index j = 0; j < dim; ++j) {
    out += "x_" + std::to_string(j) + ",";
  }
  out +=
      "r,h_norm,k_norm,t_resid,full_resid,bound2_margin,bound3_margin,"
      "bound4_margin\n";
  for (const auto& s : rep.samples) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      out += format_double(s.x(j)) + ",";
    }
    out += format_double(s.r) + "," + format_double(s.h_norm) + "," +
           format_double(s.k_norm) + "," + format_double(s.t_resid) + "," +
           format_double(s.full_resid) + "," +
           format_double(s.bound2_margin) + "," +
           format_double(s.bound3_margin) + "," +
           format_double(s.bound4_margin) + "\n";
  }
  return out;
}

}  // namespace isostab::report
