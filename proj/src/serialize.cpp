#include "hocd/serialize.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace hocd {

namespace {

using nlohmann::json;

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (const char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            default: out += c;
        }
    }
    return out;
}

std::string jstr(const std::string& s) { return "\"" + escape(s) + "\""; }

std::string jarr_str(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        out += jstr(items[i]);
    }
    return out + "]";
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string content_digest(const std::string& content) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : content) {
        h ^= static_cast<std::uint64_t>(static_cast<unsigned char>(c));
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string write_csv(const Dataset& data) {
    std::string out;
    for (std::size_t c = 0; c < data.columns.size(); ++c) {
        if (c) out += ",";
        out += data.columns[c].label;
    }
    out += "\n";
    const std::size_t n = data.n_samples();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < data.columns.size(); ++c) {
            if (c) out += ",";
            out += format_double(data.columns[c].values[r]);
        }
        out += "\n";
    }
    return out;
}

Dataset read_csv(const std::string& text) {
    Dataset data;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw InputShapeError("csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::istringstream header(line);
        std::string cell;
        while (std::getline(header, cell, ',')) {
            Series s;
            s.label = cell;
            data.columns.push_back(std::move(s));
        }
    }
    if (data.columns.empty()) throw InputShapeError("csv: no columns in header");
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cell;
        std::size_t c = 0;
        while (std::getline(row, cell, ',')) {
            if (c >= data.columns.size())
                throw InputShapeError("csv: too many cells at line " + std::to_string(lineno));
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            if (end == cell.c_str() || *end != '\0')
                throw InputShapeError("csv: bad numeric cell at line " + std::to_string(lineno));
            data.columns[c].values.push_back(v);
            ++c;
        }
        if (c != data.columns.size())
            throw InputShapeError("csv: wrong cell count at line " + std::to_string(lineno));
    }
    return data;
}

Dataset read_csv_file(const std::string& path) { return read_csv(read_file(path)); }

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputShapeError("cannot open for writing: " + path);
    out << content;
    if (!out) throw InputShapeError("write failed: " + path);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputShapeError("cannot open: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string graph_to_json(const CausalGraph& g) {
    CausalGraph s = g;
    s.sort_canonical();
    std::string out = "{\n";
    out += "  \"observed\": " + jarr_str(s.observed) + ",\n";
    out += "  \"latents\": " + jarr_str(s.latents) + ",\n";
    out += "  \"directed_edges\": [";
    for (std::size_t i = 0; i < s.directed_edges.size(); ++i) {
        const auto& e = s.directed_edges[i];
        if (i) out += ",";
        out += "\n    {\"from\": " + jstr(e.from) + ", \"to\": " + jstr(e.to) + ", \"coef\": " +
               (e.coefficient ? format_double(*e.coefficient) : "null") + "}";
    }
    out += s.directed_edges.empty() ? "],\n" : "\n  ],\n";
    out += "  \"undirected_edges\": [";
    for (std::size_t i = 0; i < s.undirected_edges.size(); ++i) {
        if (i) out += ",";
        out += "\n    [" + jstr(s.undirected_edges[i].first) + ", " +
               jstr(s.undirected_edges[i].second) + "]";
    }
    out += s.undirected_edges.empty() ? "],\n" : "\n  ],\n";
    out += "  \"latent_edges\": [";
    for (std::size_t i = 0; i < s.latent_edges.size(); ++i) {
        const auto& e = s.latent_edges[i];
        if (i) out += ",";
        out += "\n    {\"latent\": " + jstr(e.latent) + ", \"child\": " + jstr(e.child) +
               ", \"coef\": " + (e.coefficient ? format_double(*e.coefficient) : "null") + "}";
    }
    out += s.latent_edges.empty() ? "],\n" : "\n  ],\n";
    out += "  \"warnings\": " + jarr_str(s.warnings) + "\n";
    out += "}\n";
    return out;
}

CausalGraph graph_from_json(const std::string& text) {
    const json j = json::parse(text);
    CausalGraph g;
    g.observed = j.at("observed").get<std::vector<std::string>>();
    g.latents = j.at("latents").get<std::vector<std::string>>();
    for (const auto& e : j.at("directed_edges")) {
        DirectedEdge de;
        de.from = e.at("from").get<std::string>();
        de.to = e.at("to").get<std::string>();
        if (!e.at("coef").is_null()) de.coefficient = e.at("coef").get<double>();
        g.directed_edges.push_back(std::move(de));
    }
    for (const auto& e : j.at("undirected_edges"))
        g.undirected_edges.emplace_back(e.at(0).get<std::string>(), e.at(1).get<std::string>());
    for (const auto& e : j.at("latent_edges")) {
        LatentEdge le;
        le.latent = e.at("latent").get<std::string>();
        le.child = e.at("child").get<std::string>();
        if (!e.at("coef").is_null()) le.coefficient = e.at("coef").get<double>();
        g.latent_edges.push_back(std::move(le));
    }
    if (j.contains("warnings")) g.warnings = j.at("warnings").get<std::vector<std::string>>();
    return g;
}

std::string mixing_to_json(const MixingMatrix& m) {
    std::string out = "{\n  \"rows\": " + jarr_str(m.rows) + ",\n  \"columns\": [";
    for (std::size_t c = 0; c < m.columns.size(); ++c) {
        if (c) out += ",";
        out += "\n    {\"kind\": " +
               jstr(m.columns[c].kind == ComponentDescriptor::Kind::LatentConfounder
                        ? "latent"
                        : "noise") +
               ", \"name\": " + jstr(m.columns[c].name) + "}";
    }
    out += m.columns.empty() ? "],\n" : "\n  ],\n";
    out += "  \"entries\": [";
    for (long r = 0; r < m.entries.rows(); ++r) {
        if (r) out += ",";
        out += "\n    [";
        for (long c = 0; c < m.entries.cols(); ++c) {
            if (c) out += ", ";
            out += format_double(m.entries(r, c));
        }
        out += "]";
    }
    out += m.entries.rows() == 0 ? "],\n" : "\n  ],\n";
    out += "  \"estimated_mask\": [";
    for (std::size_t r = 0; r < m.estimated_mask.size(); ++r) {
        if (r) out += ",";
        out += "\n    [";
        for (std::size_t c = 0; c < m.estimated_mask[r].size(); ++c) {
            if (c) out += ", ";
            out += m.estimated_mask[r][c] ? "true" : "false";
        }
        out += "]";
    }
    out += m.estimated_mask.empty() ? "]\n" : "\n  ]\n";
    out += "}\n";
    return out;
}

namespace {
const char* noise_kind_name(NoiseKind k) {
    switch (k) {
        case NoiseKind::CubedGaussian: return "cubed_gaussian";
        case NoiseKind::Uniform: return "uniform";
        case NoiseKind::ZeroKurtosisMixture: return "zero_kurtosis_mixture";
    }
    return "?";
}
NoiseKind noise_kind_from(const std::string& s) {
    if (s == "cubed_gaussian") return NoiseKind::CubedGaussian;
    if (s == "uniform") return NoiseKind::Uniform;
    if (s == "zero_kurtosis_mixture") return NoiseKind::ZeroKurtosisMixture;
    throw InputShapeError("unknown noise kind: " + s);
}
}  // namespace

std::string truth_to_json(const ModelSpec& spec, const CausalGraph& truth,
                          const MixingMatrix& mixing) {
    std::string out = "{\n";
    out += "  \"observed\": " + jarr_str(spec.observed) + ",\n";
    out += "  \"latents\": " + jarr_str(spec.latents) + ",\n";
    out += "  \"b\": [";
    for (long r = 0; r < spec.b.rows(); ++r) {
        if (r) out += ",";
        out += "\n    [";
        for (long c = 0; c < spec.b.cols(); ++c) {
            if (c) out += ", ";
            out += format_double(spec.b(r, c));
        }
        out += "]";
    }
    out += spec.b.rows() == 0 ? "],\n" : "\n  ],\n";
    out += "  \"lambda\": [";
    for (long r = 0; r < spec.lambda.rows(); ++r) {
        if (r) out += ",";
        out += "\n    [";
        for (long c = 0; c < spec.lambda.cols(); ++c) {
            if (c) out += ", ";
            out += format_double(spec.lambda(r, c));
        }
        out += "]";
    }
    out += spec.lambda.rows() == 0 ? "],\n" : "\n  ],\n";
    out += "  \"noise_kind\": " + jstr(noise_kind_name(spec.noise_kind)) + ",\n";
    out += "  \"standardize_noise\": " + std::string(spec.standardize_noise ? "true" : "false") +
           ",\n";
    std::string graph_json = graph_to_json(truth);
    if (!graph_json.empty() && graph_json.back() == '\n') graph_json.pop_back();
    out += "  \"graph\": " + graph_json + ",\n";
    std::string mix_json = mixing_to_json(mixing);
    if (!mix_json.empty() && mix_json.back() == '\n') mix_json.pop_back();
    out += "  \"mixing\": " + mix_json + "\n";
    out += "}\n";
    return out;
}

ModelSpec truth_from_json(const std::string& text) {
    const json j = json::parse(text);
    ModelSpec spec;
    spec.observed = j.at("observed").get<std::vector<std::string>>();
    spec.latents = j.at("latents").get<std::vector<std::string>>();
    const long p = static_cast<long>(spec.observed.size());
    const long q = static_cast<long>(spec.latents.size());
    spec.b.resize(p, p);
    spec.lambda.resize(p, q);
    for (long r = 0; r < p; ++r)
        for (long c = 0; c < p; ++c) spec.b(r, c) = j.at("b").at(r).at(c).get<double>();
    for (long r = 0; r < p; ++r)
        for (long c = 0; c < q; ++c) spec.lambda(r, c) = j.at("lambda").at(r).at(c).get<double>();
    spec.noise_kind = noise_kind_from(j.at("noise_kind").get<std::string>());
    spec.standardize_noise = j.at("standardize_noise").get<bool>();
    return spec;
}

std::string metrics_to_json(const MetricsReport& rep) {
    const auto prf = [](const PRF& p, const RelationCounts& c) {
        return "{\"precision\": " + format_double(p.precision) +
               ", \"recall\": " + format_double(p.recall) + ", \"f1\": " + format_double(p.f1) +
               ", \"counts\": {\"truth\": " + std::to_string(c.truth) +
               ", \"found\": " + std::to_string(c.found) +
               ", \"correct\": " + std::to_string(c.correct) + "}}";
    };
    std::string out = "{\n";
    out += "  \"directed\": " + prf(rep.directed, rep.directed_counts) + ",\n";
    out += "  \"nonadjacent\": " + prf(rep.nonadjacent, rep.nonadjacent_counts) + ",\n";
    out += "  \"rmse\": " + (rep.rmse ? format_double(*rep.rmse) : std::string("null")) + ",\n";
    out += "  \"latents\": {\"true\": " + std::to_string(rep.latents_true) +
           ", \"found\": " + std::to_string(rep.latents_found) +
           ", \"matched\": " + std::to_string(rep.latents_matched) + "}\n";
    out += "}\n";
    return out;
}

std::string manifest_to_json(const std::string& command, const Config& cfg,
                             const std::vector<std::pair<std::string, std::string>>& input_digests,
                             const std::vector<std::string>& outputs, double wall_seconds) {
    std::string out = "{\n";
    out += "  \"command\": " + jstr(command) + ",\n";
    out += "  \"config\": {";
    out += "\"alpha\": " + format_double(cfg.alpha);
    out += ", \"n_permutations\": " + std::to_string(cfg.n_permutations);
    out += ", \"degeneracy_multiplier\": " + format_double(cfg.degeneracy_multiplier);
    out += ", \"seed\": " + std::to_string(cfg.seed);
    out += ", \"max_rounds\": " + std::to_string(cfg.max_rounds);
    out += ", \"bonferroni\": " + (cfg.bonferroni ? std::to_string(*cfg.bonferroni) : "null");
    out += ", \"subsample_cap\": " + std::to_string(cfg.subsample_cap);
    out += ", \"rank_tolerance\": " + format_double(cfg.rank_tolerance);
    out += ", \"weak_order_floor\": " + format_double(cfg.weak_order_floor);
    out += "},\n";
    out += "  \"inputs\": [";
    for (std::size_t i = 0; i < input_digests.size(); ++i) {
        if (i) out += ",";
        out += "\n    {\"path\": " + jstr(input_digests[i].first) +
               ", \"digest\": " + jstr(input_digests[i].second) + "}";
    }
    out += input_digests.empty() ? "],\n" : "\n  ],\n";
    out += "  \"outputs\": " + jarr_str(outputs) + ",\n";
    out += "  \"wall_time\": " + format_double(wall_seconds) + ",\n";
    out += "  \"seed\": " + std::to_string(cfg.seed) + "\n";
    out += "}\n";
    return out;
}

std::string graph_to_dot(const CausalGraph& g) {
    CausalGraph s = g;
    s.sort_canonical();
    std::string out = "digraph causal {\n";
    out += "  node [shape=ellipse];\n";
    for (const auto& v : s.observed) out += "  \"" + escape(v) + "\";\n";
    for (const auto& l : s.latents)
        out += "  \"" + escape(l) + "\" [shape=doublecircle];\n";
    for (const auto& e : s.directed_edges) {
        out += "  \"" + escape(e.from) + "\" -> \"" + escape(e.to) + "\"";
        if (e.coefficient) out += " [label=\"" + format_double(*e.coefficient) + "\"]";
        out += ";\n";
    }
    for (const auto& e : s.latent_edges) {
        out += "  \"" + escape(e.latent) + "\" -> \"" + escape(e.child) + "\"";
        if (e.coefficient) out += " [label=\"" + format_double(*e.coefficient) + "\"]";
        out += ";\n";
    }
    for (const auto& [a, b] : s.undirected_edges)
        out += "  \"" + escape(a) + "\" -> \"" + escape(b) + "\" [dir=none, style=dashed];\n";
    out += "}\n";
    return out;
}

}  // namespace hocd
