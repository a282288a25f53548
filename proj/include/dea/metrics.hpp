#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dea/dataset.hpp"
#include "dea/error.hpp"

namespace dea {

/// Weighted L1 distance normalized by the origin's own values:
/// sum |x_i0 - x_ij| / x_i0 + sum |y_r0 - y_rj| / y_r0. Not symmetric.
inline double weighted_l1(const DmuRecord& origin, const DmuRecord& other) {
    if (origin.inputs.size() != other.inputs.size() || origin.outputs.size() != other.outputs.size()) {
        throw UsageError("weighted_l1: dimension mismatch between '" + origin.id + "' and '" + other.id + "'");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < origin.inputs.size(); ++i) {
        d += std::abs(origin.inputs[i] - other.inputs[i]) / origin.inputs[i];
    }
    for (std::size_t r = 0; r < origin.outputs.size(); ++r) {
        d += std::abs(origin.outputs[r] - other.outputs[r]) / origin.outputs[r];
    }
    return d;
}

/// Hausdorff distance from a point to a finite set under weighted_l1: the
/// distance to the farthest member.
inline double hausdorff_to_set(const DmuRecord& origin, std::span<const DmuRecord> peers) {
    if (peers.empty()) {
        throw UsageError("hausdorff_to_set: peer set is empty");
    }
    double worst = 0.0;
    for (const auto& p : peers) {
        worst = std::max(worst, weighted_l1(origin, p));
    }
    return worst;
}

/// Sine of the angle between two positive vectors (mix deviation). Scale-free
/// in either argument; 0 for parallel vectors and always 0 in one dimension.
inline double mix_sine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw UsageError("mix_sine: dimension mismatch");
    }
    double ab = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    if (aa == 0.0 || bb == 0.0) {
        return 0.0;
    }
    const double cos = ab / (std::sqrt(aa) * std::sqrt(bb));
    const double sin2 = std::clamp(1.0 - cos * cos, 0.0, 1.0);
    return std::sqrt(sin2);
}

/// m^I(X_0, X_j) + m^O(Y_0, Y_j).
inline double mix_distance(const DmuRecord& origin, const DmuRecord& other) {
    return mix_sine(origin.inputs, other.inputs) + mix_sine(origin.outputs, other.outputs);
}

/// Output-side projection deviation sum (y_hat_r - y_r) / y_r.
inline double output_deviation(std::span<const double> actual, std::span<const double> target) {
    if (actual.size() != target.size()) {
        throw UsageError("output_deviation: dimension mismatch");
    }
    double d = 0.0;
    for (std::size_t r = 0; r < actual.size(); ++r) {
        d += (target[r] - actual[r]) / actual[r];
    }
    return d;
}

/// Input-side projection deviation sum (x_i - x_hat_i) / x_i.
inline double input_deviation(std::span<const double> actual, std::span<const double> target) {
    if (actual.size() != target.size()) {
        throw UsageError("input_deviation: dimension mismatch");
    }
    double d = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        d += (actual[i] - target[i]) / actual[i];
    }
    return d;
}

enum class DistanceKind { L1, Mix };

inline std::string to_string(DistanceKind k) { return k == DistanceKind::L1 ? "l1" : "mix"; }

inline double distance(DistanceKind kind, const DmuRecord& origin, const DmuRecord& other) {
    return kind == DistanceKind::L1 ? weighted_l1(origin, other) : mix_distance(origin, other);
}

struct DistanceMatrix {
    DistanceKind kind = DistanceKind::L1;
    std::vector<std::string> row_ids;
    std::vector<std::string> column_ids;
    std::vector<std::vector<double>> entries;  // [row][column]

    std::optional<std::size_t> row_index(const std::string& id) const {
        auto it = std::find(row_ids.begin(), row_ids.end(), id);
        if (it == row_ids.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - row_ids.begin());
    }
    std::optional<std::size_t> column_index(const std::string& id) const {
        auto it = std::find(column_ids.begin(), column_ids.end(), id);
        if (it == column_ids.end()) {
            return std::nullopt;
        }
        return static_cast<std::size_t>(it - column_ids.begin());
    }

    double at(const std::string& row, const std::string& column) const {
        auto r = row_index(row);
        auto c = column_index(column);
        if (!r || !c) {
            throw UsageError("distance matrix has no entry (" + row + ", " + column + ")");
        }
        return entries[*r][*c];
    }

    /// Hausdorff radius of a row against a set of columns.
    double radius(const std::string& row, std::span<const std::string> columns) const {
        if (columns.empty()) {
            throw UsageError("radius: peer set is empty");
        }
        double worst = 0.0;
        for (const auto& c : columns) {
            worst = std::max(worst, at(row, c));
        }
        return worst;
    }
};

/// Distances from each row DMU to each member of `columns` (typically E).
/// Rows default to every DMU in the dataset.
inline DistanceMatrix distance_matrix(const Dataset& d, const std::vector<std::string>& columns,
                                      DistanceKind kind,
                                      const std::optional<std::vector<std::string>>& rows = std::nullopt) {
    DistanceMatrix dm;
    dm.kind = kind;
    dm.column_ids = columns;
    if (rows) {
        dm.row_ids = *rows;
    } else {
        for (const auto& r : d.dmus) {
            dm.row_ids.push_back(r.id);
        }
    }
    for (const auto& rid : dm.row_ids) {
        const DmuRecord& origin = d.at(rid);
        std::vector<double> row;
        row.reserve(columns.size());
        for (const auto& cid : columns) {
            row.push_back(distance(kind, origin, d.at(cid)));
        }
        dm.entries.push_back(std::move(row));
    }
    return dm;
}

}  // namespace dea
