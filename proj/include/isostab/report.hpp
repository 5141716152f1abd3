#pragma once

// Report payload serialization.  One structured JSON document per run;
// doubles carry 17 significant digits so a rerun with the same seeds is
// byte-identical and every value round-trips losslessly.

#include <string>

#include "isostab/bounds.hpp"
#include "isostab/extractor.hpp"
#include "isostab/gallery.hpp"
#include "isostab/json_writer.hpp"
#include "isostab/search.hpp"

namespace isostab::report {

void write_vector(JsonWriter& w, const Vector& v);
void write_matrix(JsonWriter& w, const Matrix& m);  // row-major data array
void write_map_spec(JsonWriter& w, const gallery::MapSpec& spec);
void write_sampler(JsonWriter& w, const SamplerConfig& sampler);

void write_cert_report(JsonWriter& w, const gallery::CertReport& rep);
void write_extraction(JsonWriter& w, const extractor::ExtractionResult& res);
void write_frame(JsonWriter& w, const extractor::IsometryFrame& frame);
void write_residual_sample(JsonWriter& w, const bounds::ResidualSample& s);
void write_bound_report(JsonWriter& w, const bounds::BoundReport& rep);
void write_search_result(JsonWriter& w, const search::SearchResult& res);

// Full command payloads (the CLI nests these under its run manifest).
void write_cert_payload(JsonWriter& w, const gallery::MapSpec& spec,
                        const SamplerConfig& sampler,
                        const gallery::CertReport& rep);
void write_extraction_payload(JsonWriter& w, const gallery::MapSpec& spec,
                              const extractor::ExtractionConfig& cfg,
                              const extractor::ExtractionResult& res,
                              const extractor::IsometryFrame& frame);
void write_bounds_payload(JsonWriter& w, const gallery::MapSpec& spec,
                          const SamplerConfig& sampler,
                          const bounds::BoundReport& rep);
void write_search_payload(JsonWriter& w, const search::SearchConfig& cfg,
                          const search::SearchResult& res);

// Standalone payload documents (used by the CLI and by determinism checks).
std::string serialize_cert(const gallery::MapSpec& spec,
                           const SamplerConfig& sampler,
                           const gallery::CertReport& rep);
std::string serialize_extraction(const gallery::MapSpec& spec,
                                 const extractor::ExtractionConfig& cfg,
                                 const extractor::ExtractionResult& res,
                                 const extractor::IsometryFrame& frame);
std::string serialize_bounds(const gallery::MapSpec& spec,
                             const SamplerConfig& sampler,
                             const bounds::BoundReport& rep);
std::string serialize_search(const search::SearchConfig& cfg,
                             const search::SearchResult& res);

/// CSV table of residual samples; margins recompute from the printed fields
/// to 1e-12.
std::string residual_csv(const bounds::BoundReport& rep);

}  // namespace isostab::report
