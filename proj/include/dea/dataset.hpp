#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "dea/error.hpp"

namespace dea {

enum class Rts { Variable, Constant };

inline std::string to_string(Rts rts) { return rts == Rts::Variable ? "vrs" : "crs"; }

/// One decision-making unit. Inputs and outputs must be strictly positive.
struct DmuRecord {
    std::string id;
    std::vector<double> inputs;
    std::vector<double> outputs;
};

/// Immutable once built; every record shares the same (m, s).
struct Dataset {
    std::vector<DmuRecord> dmus;
    std::vector<std::string> input_names;
    std::vector<std::string> output_names;
    Rts rts = Rts::Variable;

    std::size_t n() const noexcept { return dmus.size(); }
    std::size_t m() const noexcept { return input_names.size(); }
    std::size_t s() const noexcept { return output_names.size(); }

    std::optional<std::size_t> index_of(std::string_view id) const {
        for (std::size_t j = 0; j < dmus.size(); ++j) {
            if (dmus[j].id == id) {
                return j;
            }
        }
        return std::nullopt;
    }

    const DmuRecord& at(std::string_view id) const {
        auto idx = index_of(id);
        if (!idx) {
            throw UsageError("unknown DMU id '" + std::string(id) + "'");
        }
        return dmus[*idx];
    }
};

/// Explicit column roles. When absent, roles come from "in:"/"out:" header
/// prefixes and the first column is the id.
struct ColumnSchema {
    std::string id_column;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

struct VariableSummary {
    std::string name;
    bool is_input = true;
    double mean = 0.0;
    double sd = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct SummaryStats {
    std::vector<VariableSummary> variables;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Splits one CSV line; double-quoted fields may contain commas and "" escapes.
inline std::vector<std::string> split_csv_line(std::string_view line, std::size_t row) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    bool was_quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    current.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                current.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
            was_quoted = true;
        } else if (c == ',') {
            fields.emplace_back(was_quoted ? current : std::string(trim(current)));
            current.clear();
            was_quoted = false;
        } else {
            current.push_back(c);
        }
    }
    if (quoted) {
        throw DataError("unterminated quoted field", row);
    }
    fields.emplace_back(was_quoted ? current : std::string(trim(current)));
    return fields;
}

inline double parse_number(const std::string& cell, std::size_t row, std::size_t col) {
    std::string_view text = trim(cell);
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError("non-numeric cell '" + cell + "'", row, col);
    }
    if (!std::isfinite(value)) {
        throw DataError("non-finite cell '" + cell + "'", row, col);
    }
    return value;
}

}  // namespace detail

/// Every invariant violation of `d`; empty when valid.
inline std::vector<std::string> validate(const Dataset& d) {
    std::vector<std::string> out;
    if (d.n() < 2) {
        out.push_back("n >= 2 required, got n = " + std::to_string(d.n()));
    }
    if (d.m() < 1) {
        out.push_back("at least one input (m >= 1) required");
    }
    if (d.s() < 1) {
        out.push_back("at least one output (s >= 1) required");
    }
    std::unordered_set<std::string> seen;
    for (std::size_t j = 0; j < d.n(); ++j) {
        const DmuRecord& r = d.dmus[j];
        const std::string who = "DMU '" + r.id + "' (row " + std::to_string(j + 1) + ")";
        if (!seen.insert(r.id).second) {
            out.push_back("duplicate id '" + r.id + "'");
        }
        if (r.inputs.size() != d.m()) {
            out.push_back(who + ": dimension mismatch, " + std::to_string(r.inputs.size()) +
                          " inputs but m = " + std::to_string(d.m()));
        }
        if (r.outputs.size() != d.s()) {
            out.push_back(who + ": dimension mismatch, " + std::to_string(r.outputs.size()) +
                          " outputs but s = " + std::to_string(d.s()));
        }
        for (double x : r.inputs) {
            if (!(x > 0.0) || !std::isfinite(x)) {
                out.push_back(who + ": inputs must be strictly positive");
                break;
            }
        }
        for (double y : r.outputs) {
            if (!(y > 0.0) || !std::isfinite(y)) {
                out.push_back(who + ": outputs must be strictly positive");
                break;
            }
        }
    }
    return out;
}

/// Parses CSV text. Rows keep file order.
inline Dataset parse_csv(std::istream& in, const std::optional<ColumnSchema>& schema = std::nullopt,
                         Rts rts = Rts::Variable) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        if (row == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
            line.erase(0, 3);
        }
        if (!detail::trim(line).empty()) {
            header = detail::split_csv_line(line, row);
            break;
        }
    }
    if (header.empty()) {
        throw DataError("no rows: file is empty");
    }

    auto find_column = [&](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < header.size(); ++c) {
            if (header[c] == name) {
                return c;
            }
        }
        throw DataError("missing column '" + name + "'", row);
    };

    std::size_t id_col = 0;
    std::vector<std::size_t> in_cols;
    std::vector<std::size_t> out_cols;
    Dataset d;
    d.rts = rts;
    if (schema) {
        id_col = find_column(schema->id_column);
        for (const auto& name : schema->inputs) {
            in_cols.push_back(find_column(name));
            d.input_names.push_back(name);
        }
        for (const auto& name : schema->outputs) {
            out_cols.push_back(find_column(name));
            d.output_names.push_back(name);
        }
    } else {
        for (std::size_t c = 1; c < header.size(); ++c) {
            const std::string& h = header[c];
            if (h.rfind("in:", 0) == 0) {
                in_cols.push_back(c);
                d.input_names.push_back(h.substr(3));
            } else if (h.rfind("out:", 0) == 0) {
                out_cols.push_back(c);
                d.output_names.push_back(h.substr(4));
            }
        }
    }
    if (in_cols.empty()) {
        throw DataError("missing column: no input columns (expected 'in:' prefix)", row);
    }
    if (out_cols.empty()) {
        throw DataError("missing column: no output columns (expected 'out:' prefix)", row);
    }

    const std::size_t header_row = row;
    std::unordered_map<std::string, std::size_t> first_row;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) {
            continue;
        }
        auto cells = detail::split_csv_line(line, row);
        if (cells.size() != header.size()) {
            throw DataError("expected " + std::to_string(header.size()) + " cells, got " +
                                std::to_string(cells.size()),
                            row);
        }
        DmuRecord rec;
        rec.id = cells[id_col];
        if (rec.id.empty()) {
            throw DataError("empty id", row, id_col + 1);
        }
        if (auto [it, inserted] = first_row.emplace(rec.id, row); !inserted) {
            throw DataError("duplicate id '" + rec.id + "' (first seen on row " +
                                std::to_string(it->second) + ")",
                            row, id_col + 1);
        }
        auto read = [&](const std::vector<std::size_t>& cols, std::vector<double>& dst) {
            for (std::size_t c : cols) {
                double v = detail::parse_number(cells[c], row, c + 1);
                if (!(v > 0.0)) {
                    throw DataError("nonpositive value " + cells[c] + " in column '" + header[c] +
                                        "' (all inputs and outputs must be > 0)",
                                    row, c + 1);
                }
                dst.push_back(v);
            }
        };
        read(in_cols, rec.inputs);
        read(out_cols, rec.outputs);
        d.dmus.push_back(std::move(rec));
    }
    if (d.dmus.empty()) {
        throw DataError("no rows: header only", header_row);
    }
    return d;
}

/// Loads a dataset from disk. The result is not checked for n >= 2; run
/// `validate` for the full invariant list.
inline Dataset load_csv(const std::string& path, const std::optional<ColumnSchema>& schema = std::nullopt,
                        Rts rts = Rts::Variable) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open '" + path + "'");
    }
    return parse_csv(in, schema, rts);
}

/// Writes the dataset back as CSV with "in:"/"out:" headers and 12 significant digits.
inline std::string export_csv(const Dataset& d) {
    auto quote = [](const std::string& s) {
        if (s.find_first_of(",\"") == std::string::npos) {
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
    };
    std::ostringstream out;
    out << std::setprecision(12);
    out << "id";
    for (const auto& name : d.input_names) {
        out << "," << quote("in:" + name);
    }
    for (const auto& name : d.output_names) {
        out << "," << quote("out:" + name);
    }
    out << "\n";
    for (const auto& r : d.dmus) {
        out << quote(r.id);
        for (double x : r.inputs) {
            out << "," << x;
        }
        for (double y : r.outputs) {
            out << "," << y;
        }
        out << "\n";
    }
    return out.str();
}

/// Per-variable mean, sample standard deviation (n - 1), min and max.
inline SummaryStats describe(const Dataset& d) {
    SummaryStats stats;
    auto summarize = [&](const std::string& name, bool is_input, auto&& value_of) {
        VariableSummary v;
        v.name = name;
        v.is_input = is_input;
        v.min = std::numeric_limits<double>::infinity();
        v.max = -std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (const auto& r : d.dmus) {
            double x = value_of(r);
            sum += x;
            v.min = std::min(v.min, x);
            v.max = std::max(v.max, x);
        }
        const double n = static_cast<double>(d.n());
        v.mean = sum / n;
        double ss = 0.0;
        for (const auto& r : d.dmus) {
            double dev = value_of(r) - v.mean;
            ss += dev * dev;
        }
        v.sd = d.n() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        // Summation order can push the mean a hair outside [min, max].
        v.mean = std::clamp(v.mean, v.min, v.max);
        stats.variables.push_back(v);
    };
    for (std::size_t i = 0; i < d.m(); ++i) {
        summarize(d.input_names[i], true, [i](const DmuRecord& r) { return r.inputs[i]; });
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        summarize(d.output_names[r], false, [r](const DmuRecord& rec) { return rec.outputs[r]; });
    }
    return stats;
}

/// Per-variable dataset maxima, used to pre-scale every model to unit magnitude.
struct ColumnScale {
    std::vector<double> input_max;
    std::vector<double> output_max;

    static ColumnScale of(const Dataset& d) {
        ColumnScale sc{std::vector<double>(d.m(), 0.0), std::vector<double>(d.s(), 0.0)};
        for (const auto& r : d.dmus) {
            for (std::size_t i = 0; i < d.m(); ++i) {
                sc.input_max[i] = std::max(sc.input_max[i], r.inputs[i]);
            }
            for (std::size_t k = 0; k < d.s(); ++k) {
                sc.output_max[k] = std::max(sc.output_max[k], r.outputs[k]);
            }
        }
        return sc;
    }
};

}  // namespace dea
