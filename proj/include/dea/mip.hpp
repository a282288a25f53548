#pragma once

// Branch-and-bound over LP relaxations with binary variables and SOS1
// complementarity pairs. A pair (p, q) means p * q = 0 and is enforced by
// branching p = 0 versus q = 0, never with big-M rows.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "dea/error.hpp"
#include "dea/lp.hpp"

namespace dea::mip {

/// A variable, or its complement 1 - x when `complemented` is set. Fixing a
/// complemented literal to zero means raising the variable's lower bound to 1.
struct Literal {
    std::size_t variable = 0;
    bool complemented = false;

    double value(const std::vector<double>& x) const {
        return complemented ? 1.0 - x[variable] : x[variable];
    }
};

struct Sos1Pair {
    Literal first;
    Literal second;
};

struct MixedProgram {
    lp::LinearProgram base;
    std::vector<std::size_t> binaries;
    std::vector<Sos1Pair> sos1_pairs;

    std::vector<std::string> check() const {
        std::vector<std::string> out = base.check();
        const std::size_t n = base.num_variables();
        for (auto b : binaries) {
            if (b >= n) {
                out.push_back("binary index " + std::to_string(b) + " out of range");
            }
        }
        for (const auto& pr : sos1_pairs) {
            if (pr.first.variable >= n || pr.second.variable >= n) {
                out.push_back("sos1 pair index out of range");
            }
        }
        return out;
    }
};

enum class Status { Optimal, Infeasible };

inline const char* to_string(Status s) { return s == Status::Optimal ? "optimal" : "infeasible"; }

struct IncumbentUpdate {
    std::size_t node = 0;
    double objective = 0.0;
};

struct MipSolution {
    Status status = Status::Infeasible;
    std::vector<double> primal;
    double objective = 0.0;
    std::size_t node_count = 0;
    std::vector<IncumbentUpdate> incumbent_history;
};

struct Options {
    std::size_t node_limit = 100000;
    double integrality_tolerance = 1e-6;
    double complementarity_tolerance = 1e-6;
    /// A node is pruned when its bound is within this of the incumbent.
    double prune_tolerance = 1e-9;
    lp::Tolerances lp;
};

namespace detail {

struct Node {
    std::vector<double> lower;
    std::vector<double> upper;
    double bound = -lp::kInfinity;
    std::size_t sequence = 0;
};

// Returns false when the fixing contradicts existing bounds.
inline bool fix_zero(Node& node, const Literal& lit) {
    auto& lo = node.lower[lit.variable];
    auto& up = node.upper[lit.variable];
    if (lit.complemented) {
        if (up < 1.0) {
            return false;
        }
        lo = std::max(lo, 1.0);
    } else {
        if (lo > 0.0) {
            return false;
        }
        up = std::min(up, 0.0);
        if (lo < 0.0) {
            lo = 0.0;  // p = 0 exactly, even for free variables
        }
    }
    return lo <= up;
}

}  // namespace detail

/// Global optimum of `p` (within Options::prune_tolerance of the best bound).
/// Node exploration is deterministic: dive depth-first into the child nearest
/// the relaxation, then backtrack to the open node with the best bound.
inline MipSolution solve(const MixedProgram& p, const Options& opts = {}) {
    if (auto problems = p.check(); !problems.empty()) {
        throw UsageError("malformed mixed program: " + problems.front());
    }
    const double sign = p.base.direction == lp::Direction::Maximize ? -1.0 : 1.0;

    lp::LinearProgram work = p.base;
    detail::Node root;
    for (const auto& v : work.variables) {
        root.lower.push_back(v.lower);
        root.upper.push_back(v.upper);
    }
    for (auto b : p.binaries) {
        root.lower[b] = std::max(root.lower[b], 0.0);
        root.upper[b] = std::min(root.upper[b], 1.0);
    }

    MipSolution result;
    double incumbent = lp::kInfinity;  // in minimization sense
    std::vector<detail::Node> open;
    std::size_t sequence = 0;

    auto take_best_open = [&]() -> bool {
        // Drop dominated nodes, then pick the smallest bound (oldest on ties).
        open.erase(std::remove_if(open.begin(), open.end(),
                                  [&](const detail::Node& n) {
                                      return n.bound >= incumbent - opts.prune_tolerance;
                                  }),
                   open.end());
        if (open.empty()) {
            return false;
        }
        auto best = std::min_element(open.begin(), open.end(), [](const auto& a, const auto& b) {
            return a.bound < b.bound || (a.bound == b.bound && a.sequence < b.sequence);
        });
        root = std::move(*best);
        open.erase(best);
        return true;
    };

    bool have_node = true;
    while (have_node) {
        detail::Node& node = root;
        if (++result.node_count > opts.node_limit) {
            throw NodeLimitError("branch-and-bound node limit of " + std::to_string(opts.node_limit) +
                                 " exceeded");
        }
        for (std::size_t j = 0; j < work.variables.size(); ++j) {
            work.variables[j].lower = node.lower[j];
            work.variables[j].upper = node.upper[j];
        }
        const lp::Solution rel = lp::solve(work, opts.lp);
        if (rel.status == lp::Status::Unbounded) {
            throw SolverError("LP relaxation is unbounded; mixed program must be bounded below");
        }
        const double value = sign * rel.objective;
        if (rel.status == lp::Status::Infeasible || value >= incumbent - opts.prune_tolerance) {
            have_node = take_best_open();
            continue;
        }
        const auto& x = rel.primal;

        // Most-violated complementarity pair first.
        const Sos1Pair* branch_pair = nullptr;
        double worst = opts.complementarity_tolerance;
        for (const auto& pr : p.sos1_pairs) {
            const double viol = std::min(std::abs(pr.first.value(x)), std::abs(pr.second.value(x)));
            if (viol > worst) {
                worst = viol;
                branch_pair = &pr;
            }
        }
        std::size_t branch_binary = work.variables.size();
        if (!branch_pair) {
            double frac_best = opts.integrality_tolerance;
            for (auto b : p.binaries) {
                const double frac = std::min(x[b] - std::floor(x[b]), std::ceil(x[b]) - x[b]);
                if (frac > frac_best) {
                    frac_best = frac;
                    branch_binary = b;
                }
            }
        }

        if (!branch_pair && branch_binary == work.variables.size()) {
            incumbent = value;
            result.status = Status::Optimal;
            result.primal = x;
            result.objective = rel.objective;
            result.incumbent_history.push_back({result.node_count, rel.objective});
            have_node = take_best_open();
            continue;
        }

        detail::Node near = node;
        detail::Node far = node;
        near.bound = far.bound = value;
        bool near_ok = true;
        bool far_ok = true;
        if (branch_pair) {
            const bool first_smaller =
                std::abs(branch_pair->first.value(x)) <= std::abs(branch_pair->second.value(x));
            const Literal& a = first_smaller ? branch_pair->first : branch_pair->second;
            const Literal& b = first_smaller ? branch_pair->second : branch_pair->first;
            near_ok = detail::fix_zero(near, a);
            far_ok = detail::fix_zero(far, b);
        } else {
            const bool up_first = x[branch_binary] >= 0.5;
            auto set = [&](detail::Node& n, double v) {
                n.lower[branch_binary] = v;
                n.upper[branch_binary] = v;
            };
            set(near, up_first ? 1.0 : 0.0);
            set(far, up_first ? 0.0 : 1.0);
        }
        if (far_ok) {
            far.sequence = ++sequence;
            open.push_back(std::move(far));
        }
        if (near_ok) {
            near.sequence = ++sequence;
            root = std::move(near);
        } else {
            have_node = take_best_open();
        }
    }
    return result;
}

}  // namespace dea::mip
