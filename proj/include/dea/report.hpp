#pragma once

// Rendering (markdown / CSV) and JSON serialization of results.

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dea/dataset.hpp"
#include "dea/frontier.hpp"
#include "dea/metrics.hpp"
#include "dea/models.hpp"
#include "dea/sweep.hpp"

namespace dea {

using Json = nlohmann::ordered_json;

inline std::string fixed(double v, int decimals) {
    if (std::abs(v) < 0.5 * std::pow(10.0, -decimals)) {
        v = 0.0;  // no "-0.000"
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

inline std::string join(const std::vector<std::string>& parts, const std::string& sep) {
    std::string out;
    for (std::size_t k = 0; k < parts.size(); ++k) {
        if (k) {
            out += sep;
        }
        out += parts[k];
    }
    return out;
}

inline void to_json(Json& j, const Hyperplane& h) {
    j = Json::object();
    j["v"] = h.v;
    j["u"] = h.u;
    j["u0"] = h.u0 ? Json(*h.u0) : Json(nullptr);
    j["delta"] = h.delta;
}

inline void from_json(const Json& j, Hyperplane& h) {
    j.at("v").get_to(h.v);
    j.at("u").get_to(h.u);
    h.u0.reset();
    if (j.contains("u0") && !j.at("u0").is_null()) {
        h.u0 = j.at("u0").get<double>();
    }
    j.at("delta").get_to(h.delta);
}

inline void to_json(Json& j, const BenchmarkSolution& s) {
    j = Json::object();
    j["dmu_id"] = s.dmu_id;
    j["model_kind"] = to_string(s.model_kind);
    j["alpha"] = s.alpha;
    j["targets"] = {{"inputs", s.targets.inputs}, {"outputs", s.targets.outputs}};
    j["input_slacks"] = s.input_slacks;
    j["output_slacks"] = s.output_slacks;
    Json lam = Json::object();
    for (const auto& [id, w] : s.lambda) {
        lam[id] = w;
    }
    j["lambda"] = lam;
    j["reference_set"] = s.reference_set;
    j["hyperplane"] = s.hyperplane;
    j["d_proj"] = s.d_proj;
    j["d_H"] = s.d_H;
    j["objective"] = s.objective;
    j["status"] = s.status;
}

inline void from_json(const Json& j, BenchmarkSolution& s) {
    j.at("dmu_id").get_to(s.dmu_id);
    const auto kind = parse_model_kind(j.at("model_kind").get<std::string>());
    if (!kind) {
        throw UsageError("unknown model_kind '" + j.at("model_kind").get<std::string>() + "'");
    }
    s.model_kind = *kind;
    j.at("alpha").get_to(s.alpha);
    j.at("targets").at("inputs").get_to(s.targets.inputs);
    j.at("targets").at("outputs").get_to(s.targets.outputs);
    j.at("input_slacks").get_to(s.input_slacks);
    j.at("output_slacks").get_to(s.output_slacks);
    s.lambda.clear();
    for (const auto& [id, w] : j.at("lambda").items()) {
        s.lambda.emplace_back(id, w.get<double>());
    }
    j.at("reference_set").get_to(s.reference_set);
    j.at("hyperplane").get_to(s.hyperplane);
    j.at("d_proj").get_to(s.d_proj);
    j.at("d_H").get_to(s.d_H);
    j.at("objective").get_to(s.objective);
    j.at("status").get_to(s.status);
}

inline Json series_json(const AlphaSeries& s) {
    Json j = Json::object();
    j["dmu_id"] = s.dmu_id;
    j["model_kind"] = to_string(s.model_kind);
    j["grid"] = s.grid;
    j["change_points"] = s.change_points;
    j["solutions"] = s.solutions;
    return j;
}

// ---------------------------------------------------------------- markdown

namespace detail {

inline std::string md_row(const std::vector<std::string>& cells) { return "| " + join(cells, " | ") + " |\n"; }

inline std::string md_header(const std::vector<std::string>& cells) {
    std::string out = md_row(cells);
    std::vector<std::string> rule(cells.size(), "---");
    return out + md_row(rule);
}

inline std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        q += c;
        if (c == '"') {
            q += '"';
        }
    }
    return q + "\"";
}

inline std::string csv_row(const std::vector<std::string>& cells) {
    std::vector<std::string> q;
    for (const auto& c : cells) {
        q.push_back(csv_cell(c));
    }
    return join(q, ",") + "\n";
}

inline std::string divisor_label(double scale) {
    const double inv = 1.0 / scale;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", std::round(inv * 1000.0) / 1000.0);
    return buf;
}

}  // namespace detail

/// "A (0.933), B (0.867)": peers with their distance to the evaluated DMU.
inline std::string reference_set_label(const BenchmarkSolution& s, const Dataset& d) {
    std::vector<std::string> parts;
    const DmuRecord& o = d.at(s.dmu_id);
    for (const auto& id : s.reference_set) {
        parts.push_back(id + " (" + fixed(distance(peer_metric(s.model_kind), o, d.at(id)), 3) + ")");
    }
    return join(parts, ", ");
}

inline std::string render_classification_md(const Dataset& d, const FrontierClassification& c) {
    std::ostringstream out;
    out << detail::md_header({"DMU", "status", "additive slack"});
    for (std::size_t j = 0; j < c.ids.size(); ++j) {
        out << detail::md_row({c.ids[j], to_string(c.status[j]), fixed(c.additive_value[j], 6)});
    }
    out << "\nE (" << to_string(d.rts) << "): " << join(c.extreme, ", ") << "\n";
    return out.str();
}

inline std::string render_classification_csv(const FrontierClassification& c) {
    std::ostringstream out;
    out << detail::csv_row({"id", "status", "additive_slack", "extreme"});
    for (std::size_t j = 0; j < c.ids.size(); ++j) {
        const bool in_e = c.status[j] == EfficiencyStatus::ExtremeEfficient;
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", c.additive_value[j]);
        out << detail::csv_row({c.ids[j], to_string(c.status[j]), buf, in_e ? "1" : "0"});
    }
    return out.str();
}

inline Json classification_json(const FrontierClassification& c) {
    Json rows = Json::array();
    for (std::size_t j = 0; j < c.ids.size(); ++j) {
        rows.push_back({{"id", c.ids[j]}, {"status", to_string(c.status[j])}, {"additive_slack", c.additive_value[j]}});
    }
    return {{"dmus", rows}, {"extreme", c.extreme}};
}

inline std::string render_distances_md(const DistanceMatrix& m) {
    std::ostringstream out;
    std::vector<std::string> head{"DMU"};
    head.insert(head.end(), m.column_ids.begin(), m.column_ids.end());
    out << detail::md_header(head);
    for (std::size_t r = 0; r < m.row_ids.size(); ++r) {
        std::vector<std::string> cells{m.row_ids[r]};
        for (double v : m.entries[r]) {
            cells.push_back(fixed(v, 3));
        }
        out << detail::md_row(cells);
    }
    return out.str();
}

inline std::string render_distances_csv(const DistanceMatrix& m) {
    std::ostringstream out;
    std::vector<std::string> head{"id"};
    head.insert(head.end(), m.column_ids.begin(), m.column_ids.end());
    out << detail::csv_row(head);
    for (std::size_t r = 0; r < m.row_ids.size(); ++r) {
        std::vector<std::string> cells{m.row_ids[r]};
        for (double v : m.entries[r]) {
            cells.push_back(fixed(v, 3));
        }
        out << detail::csv_row(cells);
    }
    return out.str();
}

inline Json distances_json(const DistanceMatrix& m) {
    Json rows = Json::object();
    for (std::size_t r = 0; r < m.row_ids.size(); ++r) {
        Json row = Json::object();
        for (std::size_t c = 0; c < m.column_ids.size(); ++c) {
            row[m.column_ids[c]] = m.entries[r][c];
        }
        rows[m.row_ids[r]] = row;
    }
    return {{"kind", to_string(m.kind)}, {"columns", m.column_ids}, {"rows", rows}};
}

inline std::string render_bench_md(const BenchmarkSolution& s, const Dataset& d) {
    std::ostringstream out;
    out << "## " << s.dmu_id << " (" << to_string(s.model_kind) << ", alpha = " << SweepError::format_alpha(s.alpha)
        << ")\n\n";
    if (s.is_self_benchmark()) {
        out << s.dmu_id << ": efficient; self-benchmark\n";
        return out.str();
    }
    const DmuRecord& o = d.at(s.dmu_id);
    out << detail::md_header({"variable", "actual", "target", "slack"});
    for (std::size_t i = 0; i < d.m(); ++i) {
        out << detail::md_row({d.input_names[i], fixed(o.inputs[i], 1), fixed(s.targets.inputs[i], 1),
                               fixed(s.input_slacks[i], 3)});
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        out << detail::md_row({d.output_names[r], fixed(o.outputs[r], 1), fixed(s.targets.outputs[r], 1),
                               fixed(s.output_slacks[r], 3)});
    }
    std::vector<std::string> lam;
    for (const auto& [id, w] : s.lambda) {
        if (w > 0.0) {
            lam.push_back(id + " = " + fixed(w, 3));
        }
    }
    const auto sc = display_scales(s.model_kind, d.m(), d.s());
    out << "\nReference set: " << reference_set_label(s, d) << "\n";
    out << "lambda: " << join(lam, ", ") << "\n";
    out << "d_proj: " << fixed(s.d_proj, 3) << " (d_proj/" << detail::divisor_label(sc.projection)
        << " = " << fixed(s.d_proj * sc.projection, 3) << ")\n";
    out << "d_H: " << fixed(s.d_H, 3) << " (d_H/" << detail::divisor_label(sc.peer) << " = "
        << fixed(s.d_H * sc.peer, 3) << ")\n";
    out << "objective: " << fixed(s.objective, 6) << "\n";
    return out.str();
}

inline std::vector<std::string> solution_csv_header(const Dataset& d) {
    std::vector<std::string> h{"dmu_id", "model_kind", "alpha"};
    for (const auto& n : d.input_names) {
        h.push_back("target_" + n);
    }
    for (const auto& n : d.output_names) {
        h.push_back("target_" + n);
    }
    for (const auto& x : {"reference_set", "d_proj", "d_H", "objective", "status"}) {
        h.push_back(x);
    }
    return h;
}

inline std::vector<std::string> solution_csv_cells(const BenchmarkSolution& s) {
    auto g = [](double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", v);
        return std::string(buf);
    };
    std::vector<std::string> c{s.dmu_id, to_string(s.model_kind), g(s.alpha)};
    for (double v : s.targets.inputs) {
        c.push_back(g(v));
    }
    for (double v : s.targets.outputs) {
        c.push_back(g(v));
    }
    c.push_back(join(s.reference_set, ";"));
    c.push_back(g(s.d_proj));
    c.push_back(g(s.d_H));
    c.push_back(g(s.objective));
    c.push_back(s.status);
    return c;
}

inline std::string render_solutions_csv(const std::vector<BenchmarkSolution>& sols, const Dataset& d) {
    std::ostringstream out;
    out << detail::csv_row(solution_csv_header(d));
    for (const auto& s : sols) {
        out << detail::csv_row(solution_csv_cells(s));
    }
    return out.str();
}

/// Peer table (alpha, reference set with bracketed distances, normalized
/// d_H) followed by the target table (alpha, targets, normalized d_proj).
inline std::string render_series_md(const AlphaSeries& s, const Dataset& d) {
    const auto rows = detect_changes(s);
    const auto sc = display_scales(s.model_kind, d.m(), d.s());
    std::ostringstream out;
    out << "## " << s.dmu_id << " (" << to_string(s.model_kind) << ")\n\n";
    out << "### Benchmarking\n\n";
    out << detail::md_header({"alpha", "Reference set", "Distance (d_H/" + detail::divisor_label(sc.peer) + ")"});
    for (const auto& r : rows) {
        const auto& sol = *r.solution;
        const std::string peers = sol.is_self_benchmark() ? "efficient; self-benchmark" : reference_set_label(sol, d);
        out << detail::md_row({r.label, peers, fixed(sol.d_H * sc.peer, 3)});
    }
    out << "\n### Targets\n\n";
    std::vector<std::string> head{"alpha"};
    for (const auto& n : d.input_names) {
        head.push_back(n);
    }
    for (const auto& n : d.output_names) {
        head.push_back(n);
    }
    head.push_back("Distance (d_proj/" + detail::divisor_label(sc.projection) + ")");
    out << detail::md_header(head);
    const DmuRecord& o = d.at(s.dmu_id);
    std::vector<std::string> actual{"actual"};
    for (double v : o.inputs) {
        actual.push_back(fixed(v, 1));
    }
    for (double v : o.outputs) {
        actual.push_back(fixed(v, 1));
    }
    actual.push_back("");
    out << detail::md_row(actual);
    for (const auto& r : rows) {
        const auto& sol = *r.solution;
        std::vector<std::string> cells{r.label};
        for (double v : sol.targets.inputs) {
            cells.push_back(fixed(v, 1));
        }
        for (double v : sol.targets.outputs) {
            cells.push_back(fixed(v, 1));
        }
        cells.push_back(fixed(sol.d_proj * sc.projection, 3));
        out << detail::md_row(cells);
    }
    if (!s.change_points.empty()) {
        std::vector<std::string> cps;
        for (double a : s.change_points) {
            cps.push_back(SweepError::format_alpha(a));
        }
        out << "\nReference set changes at alpha = " << join(cps, ", ") << "\n";
    }
    return out.str();
}

}  // namespace dea
