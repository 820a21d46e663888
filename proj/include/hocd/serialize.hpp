#ifndef HOCD_SERIALIZE_HPP
#define HOCD_SERIALIZE_HPP

#include <cstdint>
#include <string>

#include "hocd/config.hpp"
#include "hocd/eval.hpp"
#include "hocd/graph.hpp"
#include "hocd/simulate.hpp"
#include "hocd/types.hpp"

namespace hocd {

// CSV: comma separator, required header row, '.' decimal, %.17g numerics.
std::string write_csv(const Dataset& data);
Dataset read_csv(const std::string& text);
Dataset read_csv_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

/// %.17g with a fixed canonical form (used by every JSON/CSV writer).
std::string format_double(double v);

// Canonical JSON emitters: fixed key order, 17-significant-digit floats, so
// parse -> serialize round-trips are byte-identical.
std::string graph_to_json(const CausalGraph& g);
CausalGraph graph_from_json(const std::string& text);

std::string mixing_to_json(const MixingMatrix& m);

std::string truth_to_json(const ModelSpec& spec, const CausalGraph& truth,
                          const MixingMatrix& mixing);
ModelSpec truth_from_json(const std::string& text);

std::string metrics_to_json(const MetricsReport& rep);

std::string manifest_to_json(const std::string& command, const Config& cfg,
                             const std::vector<std::pair<std::string, std::string>>& input_digests,
                             const std::vector<std::string>& outputs, double wall_seconds);

/// Graphviz export: observed nodes plain, latent nodes doublecircle, solid
/// directed arrows, dashed undirected edges.
std::string graph_to_dot(const CausalGraph& g);

/// FNV-1a content hash, hex string (manifest input digests).
std::string content_digest(const std::string& content);

}  // namespace hocd

#endif
