#pragma once

// Alpha-grid series of benchmark solutions and their grouping into report
// rows (one row per run of identical reference sets and targets).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <future>
#include <string>
#include <thread>
#include <vector>

#include "dea/dataset.hpp"
#include "dea/error.hpp"
#include "dea/models.hpp"

namespace dea {

/// A solver failure at one grid point.
class SweepError : public SolverError {
public:
    SweepError(double alpha, const std::string& what)
        : SolverError("alpha " + format_alpha(alpha) + ": " + what), alpha_(alpha) {}
    double alpha() const { return alpha_; }

    static std::string format_alpha(double a) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%g", a);
        return buf;
    }

private:
    double alpha_;
};

struct AlphaSeries {
    std::string dmu_id;
    ModelKind model_kind = ModelKind::Closest;
    std::vector<double> grid;                  // descending
    std::vector<BenchmarkSolution> solutions;  // solutions[k] is for grid[k]
    std::vector<double> change_points;         // alpha where RS differs from the previous point
};

/// Empty when the grid is usable; otherwise the reason.
inline std::string check_grid(const std::vector<double>& grid) {
    if (grid.empty()) {
        return "alpha grid is empty";
    }
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) {
            return "alpha " + SweepError::format_alpha(grid[k]) + " is outside [0, 1]";
        }
        if (k > 0 && !(grid[k] < grid[k - 1])) {
            return "alpha grid must be strictly descending";
        }
    }
    return {};
}

/// from, from - step, ..., down to `to` (inclusive, within step/1000).
/// Values are rounded to 12 decimals so 1 - 0.1k prints cleanly.
inline std::vector<double> make_grid(double from = 1.0, double to = 0.1, double step = 0.1) {
    if (!(step > 0.0)) {
        throw UsageError("grid step must be positive");
    }
    if (!(from >= to)) {
        throw UsageError("grid order: --from must be >= --to");
    }
    if (!(to >= 0.0 && from <= 1.0)) {
        throw UsageError("grid bounds must lie in [0, 1]");
    }
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        const double a = std::round((from - static_cast<double>(k) * step) * 1e12) / 1e12;
        if (a < to - step * 1e-3) {
            break;
        }
        grid.push_back(std::max(a, 0.0));
    }
    return grid;
}

inline std::vector<double> default_grid() { return make_grid(); }

inline std::vector<double> find_change_points(const AlphaSeries& s) {
    std::vector<double> out;
    for (std::size_t k = 1; k < s.solutions.size(); ++k) {
        auto a = s.solutions[k - 1].reference_set;
        auto b = s.solutions[k].reference_set;
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        if (a != b) {
            out.push_back(s.grid[k]);
        }
    }
    return out;
}

/// One solve per grid point, sharing the alpha-independent distances.
/// Grid points run on up to `threads` workers (0: hardware concurrency).
inline AlphaSeries alpha_series(const Dataset& d, const std::vector<std::string>& extreme, const std::string& dmu_id,
                                ModelKind kind, const std::vector<double>& grid, SolveOptions base = {},
                                unsigned threads = 1) {
    if (auto why = check_grid(grid); !why.empty()) {
        throw UsageError(why);
    }
    const ModelContext ctx = make_context(d, extreme, dmu_id);
    AlphaSeries s;
    s.dmu_id = dmu_id;
    s.model_kind = kind;
    s.grid = grid;
    s.solutions.resize(grid.size());

    auto solve_at = [&](std::size_t k) {
        SolveOptions o = base;
        o.alpha = grid[k];
        try {
            s.solutions[k] = solve_model(ctx, kind, o);
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw SweepError(grid[k], e.what());
        }
    };

    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    if (threads <= 1 || grid.size() <= 1) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            solve_at(k);
        }
    } else {
        std::vector<std::future<void>> jobs;
        std::size_t next = 0;
        while (next < grid.size() || !jobs.empty()) {
            while (next < grid.size() && jobs.size() < threads) {
                jobs.push_back(std::async(std::launch::async, solve_at, next++));
            }
            jobs.front().get();
            jobs.erase(jobs.begin());
        }
    }
    s.change_points = find_change_points(s);
    return s;
}

/// A run of consecutive grid points with the same reference set and targets.
struct SeriesRow {
    std::string label;  // "1", "0.9", "≤ 0.8", "1..0.6"
    std::size_t first = 0;
    std::size_t last = 0;  // inclusive grid indices
    const BenchmarkSolution* solution = nullptr;  // representative (first point)
};

namespace detail {

inline bool close_rel(double a, double b, double tol = 1e-6) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline bool same_row(const BenchmarkSolution& a, const BenchmarkSolution& b) {
    auto ra = a.reference_set;
    auto rb = b.reference_set;
    std::sort(ra.begin(), ra.end());
    std::sort(rb.begin(), rb.end());
    if (ra != rb) {
        return false;
    }
    for (std::size_t i = 0; i < a.targets.inputs.size(); ++i) {
        if (!close_rel(a.targets.inputs[i], b.targets.inputs[i])) {
            return false;
        }
    }
    for (std::size_t r = 0; r < a.targets.outputs.size(); ++r) {
        if (!close_rel(a.targets.outputs[r], b.targets.outputs[r])) {
            return false;
        }
    }
    return true;
}

}  // namespace detail

/// Groups the series into rows. A group running to the end of the grid is
/// labelled "≤ hi"; a single point by its alpha; other groups "hi..lo".
inline std::vector<SeriesRow> detect_changes(const AlphaSeries& s) {
    std::vector<SeriesRow> rows;
    const std::size_t n = s.solutions.size();
    std::size_t start = 0;
    while (start < n) {
        std::size_t end = start;
        while (end + 1 < n && detail::same_row(s.solutions[start], s.solutions[end + 1])) {
            ++end;
        }
        SeriesRow row;
        row.first = start;
        row.last = end;
        row.solution = &s.solutions[start];
        const std::string hi = SweepError::format_alpha(s.grid[start]);
        if (start == end) {
            row.label = hi;
        } else if (end == n - 1) {
            row.label = "\u2264 " + hi;
        } else {
            row.label = hi + ".." + SweepError::format_alpha(s.grid[end]);
        }
        rows.push_back(row);
        start = end + 1;
    }
    return rows;
}

}  // namespace dea
