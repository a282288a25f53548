#pragma once

// Benchmarking models: closest targets, and the bi-objective variants that
// also pick the most similar reference set.
//
// All models share one skeleton over the extreme efficient set E:
//
//   sum_j lambda_j x_ij + s_in_i  = x_i0          (s_in: slack or reduction t)
//   sum_j lambda_j y_rj - s_out_r = y_r0          (s_out: slack or expansion t)
//   sum_j lambda_j = 1                            (VRS only)
//   -v'X_j + u'Y_j + u0 + delta_j = 0             (u0 absent under CRS)
//   lambda_j * delta_j = 0                        (SOS1 pair)
//   lambda_j <= I_j,  dist_j * I_j <= z0          (bi-objective VRS models)
//   lambda_j * (1 - I_j) = 0                      (bi-objective CRS model)
//
// Data are divided column-wise by the dataset maximum before assembly. Slack
// ratios are scale-free, so objectives are unchanged; the v >= 1 / u >= 1
// normalization is imposed in scaled space. Reported hyperplanes are mapped
// back to data units and renormalized so the smallest bounded coefficient is 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dea/dataset.hpp"
#include "dea/error.hpp"
#include "dea/frontier.hpp"
#include "dea/lp.hpp"
#include "dea/metrics.hpp"
#include "dea/mip.hpp"

namespace dea {

enum class ModelKind { Closest, BiVrs, OrientedOutput, OrientedInput, BiCrs };

inline constexpr ModelKind kAllModelKinds[] = {ModelKind::Closest, ModelKind::BiVrs, ModelKind::OrientedOutput,
                                               ModelKind::OrientedInput, ModelKind::BiCrs};

inline const char* to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Closest: return "closest_vrs";
        case ModelKind::BiVrs: return "bi_vrs";
        case ModelKind::OrientedOutput: return "oriented_output_vrs";
        case ModelKind::OrientedInput: return "oriented_input_vrs";
        case ModelKind::BiCrs: return "bi_crs";
    }
    return "?";
}

/// Command-line spelling.
inline const char* cli_name(ModelKind k) {
    switch (k) {
        case ModelKind::Closest: return "closest";
        case ModelKind::BiVrs: return "bi-vrs";
        case ModelKind::OrientedOutput: return "oriented-out";
        case ModelKind::OrientedInput: return "oriented-in";
        case ModelKind::BiCrs: return "bi-crs";
    }
    return "?";
}

/// Accepts both the serialized and the command-line spelling.
inline std::optional<ModelKind> parse_model_kind(std::string_view text) {
    for (auto k : kAllModelKinds) {
        if (text == to_string(k) || text == cli_name(k)) {
            return k;
        }
    }
    return std::nullopt;
}

inline Rts required_rts(ModelKind k) { return k == ModelKind::BiCrs ? Rts::Constant : Rts::Variable; }

inline DistanceKind peer_metric(ModelKind k) {
    return k == ModelKind::BiCrs ? DistanceKind::Mix : DistanceKind::L1;
}

/// Weights the objective puts on the raw projection distance (times alpha)
/// and on the raw peer radius (times 1 - alpha).
struct TermScales {
    double projection = 1.0;
    double peer = 1.0;
};

inline TermScales objective_scales(ModelKind k, std::size_t m, std::size_t s) {
    const double ms = static_cast<double>(m + s);
    switch (k) {
        case ModelKind::Closest: return {1.0, 0.0};
        case ModelKind::BiVrs: return {1.0, 1.0};
        case ModelKind::OrientedOutput: return {1.0 / static_cast<double>(s), 1.0 / ms};
        case ModelKind::OrientedInput: return {1.0 / static_cast<double>(m), 1.0 / ms};
        case ModelKind::BiCrs: return {1.0 / ms, 0.5};
    }
    return {};
}

/// Divisors used for the normalized report columns (e.g. d0/3 and d_H/6).
inline TermScales display_scales(ModelKind k, std::size_t m, std::size_t s) {
    const double ms = static_cast<double>(m + s);
    if (k == ModelKind::Closest || k == ModelKind::BiVrs) {
        return {1.0 / ms, 1.0 / ms};
    }
    return objective_scales(k, m, s);
}

struct SolveOptions {
    double alpha = 1.0;
    double lambda_threshold = 1e-6;
    bool endpoint_refine = true;
    mip::Options mip;
};

struct Hyperplane {
    std::vector<double> v;
    std::vector<double> u;
    std::optional<double> u0;  // absent for the CRS model
    std::vector<double> delta;  // one per member of E, in E order
};

struct Targets {
    std::vector<double> inputs;
    std::vector<double> outputs;
};

struct BenchmarkSolution {
    std::string dmu_id;
    ModelKind model_kind = ModelKind::Closest;
    double alpha = 1.0;
    Targets targets;
    /// s- (or input reductions t for the output-oriented model).
    std::vector<double> input_slacks;
    /// s+ (or output expansions t for the input-oriented model).
    std::vector<double> output_slacks;
    /// Weight of each member of E, in E order.
    std::vector<std::pair<std::string, double>> lambda;
    std::vector<std::string> reference_set;
    Hyperplane hyperplane;
    double d_proj = 0.0;
    double d_H = 0.0;
    double objective = 0.0;
    std::string status;
    std::size_t nodes = 0;

    bool is_self_benchmark() const { return status == "self_benchmark"; }
};

/// Everything about one evaluated DMU that does not depend on alpha.
struct ModelContext {
    const Dataset* data = nullptr;
    std::vector<std::string> extreme;     // E ids
    std::vector<std::size_t> extreme_index;
    std::size_t dmu = 0;
    ColumnScale scale;
    std::vector<double> l1_distance;   // d(DMU_0, DMU_j), j in E
    std::vector<double> mix_distance;  // m^I + m^O, j in E
    std::optional<std::size_t> self_in_e;

    const DmuRecord& evaluated() const { return data->dmus[dmu]; }
    const std::vector<double>& peer_distance(ModelKind k) const {
        return peer_metric(k) == DistanceKind::Mix ? mix_distance : l1_distance;
    }
};

inline ModelContext make_context(const Dataset& d, const std::vector<std::string>& extreme,
                                 const std::string& dmu_id) {
    ModelContext ctx;
    ctx.data = &d;
    auto idx = d.index_of(dmu_id);
    if (!idx) {
        throw UsageError("unknown DMU id '" + dmu_id + "'");
    }
    if (extreme.empty()) {
        throw UsageError("extreme efficient set is empty");
    }
    ctx.dmu = *idx;
    ctx.extreme = extreme;
    ctx.scale = ColumnScale::of(d);
    const DmuRecord& origin = d.dmus[ctx.dmu];
    for (std::size_t k = 0; k < extreme.size(); ++k) {
        auto j = d.index_of(extreme[k]);
        if (!j) {
            throw UsageError("E member '" + extreme[k] + "' is not in the dataset");
        }
        ctx.extreme_index.push_back(*j);
        ctx.l1_distance.push_back(weighted_l1(origin, d.dmus[*j]));
        ctx.mix_distance.push_back(mix_distance(origin, d.dmus[*j]));
        if (*j == ctx.dmu) {
            ctx.self_in_e = k;
        }
    }
    return ctx;
}

namespace detail {

struct AssembledModel {
    ModelKind kind = ModelKind::Closest;
    mip::MixedProgram program;
    std::vector<std::size_t> lambda;
    std::vector<std::size_t> delta;
    std::vector<std::size_t> s_in;
    std::vector<std::size_t> s_out;
    std::vector<std::size_t> v;
    std::vector<std::size_t> u;
    std::optional<std::size_t> u0;
    std::vector<std::size_t> indicator;
    std::optional<std::size_t> z0;
    /// Raw projection distance as a linear function of the variables.
    std::vector<double> projection;
    TermScales scales;

    std::vector<double> scalarized(double alpha) const {
        std::vector<double> c(program.base.num_variables(), 0.0);
        const double wp = kind == ModelKind::Closest ? 1.0 : alpha * scales.projection;
        for (std::size_t j = 0; j < c.size(); ++j) {
            c[j] = wp * projection[j];
        }
        if (z0) {
            c[*z0] += (1.0 - alpha) * scales.peer;
        }
        return c;
    }

    double projection_value(const std::vector<double>& x) const {
        double d = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            d += projection[j] * x[j];
        }
        return d;
    }
};

inline AssembledModel assemble(const ModelContext& ctx, ModelKind kind) {
    const Dataset& d = *ctx.data;
    const std::size_t m = d.m();
    const std::size_t s = d.s();
    const std::size_t ne = ctx.extreme_index.size();
    const bool vrs = kind != ModelKind::BiCrs;
    const bool bi = kind != ModelKind::Closest;
    const DmuRecord& o = ctx.evaluated();
    auto xs = [&](std::size_t j, std::size_t i) { return d.dmus[j].inputs[i] / ctx.scale.input_max[i]; };
    auto ys = [&](std::size_t j, std::size_t r) { return d.dmus[j].outputs[r] / ctx.scale.output_max[r]; };

    AssembledModel a;
    a.kind = kind;
    a.scales = objective_scales(kind, m, s);
    auto& p = a.program.base;
    for (std::size_t k = 0; k < ne; ++k) {
        a.lambda.push_back(p.add_variable("lambda_" + ctx.extreme[k]));
    }
    for (std::size_t k = 0; k < ne; ++k) {
        a.delta.push_back(p.add_variable("delta_" + ctx.extreme[k]));
    }
    for (std::size_t i = 0; i < m; ++i) {
        a.s_in.push_back(p.add_variable("s_in_" + d.input_names[i]));
    }
    for (std::size_t r = 0; r < s; ++r) {
        a.s_out.push_back(p.add_variable("s_out_" + d.output_names[r]));
    }
    const double v_lower = kind == ModelKind::OrientedOutput ? 0.0 : 1.0;
    const double u_lower = kind == ModelKind::OrientedInput ? 0.0 : 1.0;
    for (std::size_t i = 0; i < m; ++i) {
        a.v.push_back(p.add_variable("v_" + d.input_names[i], v_lower));
    }
    for (std::size_t r = 0; r < s; ++r) {
        a.u.push_back(p.add_variable("u_" + d.output_names[r], u_lower));
    }
    if (vrs) {
        a.u0 = p.add_variable("u0", -lp::kInfinity, lp::kInfinity);
    }
    if (bi) {
        for (std::size_t k = 0; k < ne; ++k) {
            a.indicator.push_back(p.add_variable("I_" + ctx.extreme[k], 0.0, 1.0));
        }
        a.z0 = p.add_variable("z0");
    }

    for (std::size_t i = 0; i < m; ++i) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t k = 0; k < ne; ++k) {
            t.emplace_back(a.lambda[k], xs(ctx.extreme_index[k], i));
        }
        t.emplace_back(a.s_in[i], 1.0);
        p.add_constraint(t, lp::Sense::Equal, xs(ctx.dmu, i));
    }
    for (std::size_t r = 0; r < s; ++r) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t k = 0; k < ne; ++k) {
            t.emplace_back(a.lambda[k], ys(ctx.extreme_index[k], r));
        }
        t.emplace_back(a.s_out[r], -1.0);
        p.add_constraint(t, lp::Sense::Equal, ys(ctx.dmu, r));
    }
    if (vrs) {
        std::vector<std::pair<std::size_t, double>> t;
        for (auto l : a.lambda) {
            t.emplace_back(l, 1.0);
        }
        p.add_constraint(t, lp::Sense::Equal, 1.0);
    }
    for (std::size_t k = 0; k < ne; ++k) {
        const std::size_t j = ctx.extreme_index[k];
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t i = 0; i < m; ++i) {
            t.emplace_back(a.v[i], -xs(j, i));
        }
        for (std::size_t r = 0; r < s; ++r) {
            t.emplace_back(a.u[r], ys(j, r));
        }
        if (a.u0) {
            t.emplace_back(*a.u0, 1.0);
        }
        t.emplace_back(a.delta[k], 1.0);
        p.add_constraint(t, lp::Sense::Equal, 0.0);
    }
    if (bi) {
        const auto& dist = ctx.peer_distance(kind);
        for (std::size_t k = 0; k < ne; ++k) {
            if (vrs) {
                p.add_constraint({{a.lambda[k], 1.0}, {a.indicator[k], -1.0}}, lp::Sense::LessEqual, 0.0);
            }
            p.add_constraint({{a.indicator[k], dist[k]}, {*a.z0, -1.0}}, lp::Sense::LessEqual, 0.0);
        }
        if (vrs) {
            // Implied by the rows above (a convex combination never exceeds
            // the largest distance it uses); tightens the relaxation.
            std::vector<std::pair<std::size_t, double>> t;
            for (std::size_t k = 0; k < ne; ++k) {
                t.emplace_back(a.lambda[k], dist[k]);
            }
            t.emplace_back(*a.z0, -1.0);
            p.add_constraint(t, lp::Sense::LessEqual, 0.0);
        }
        a.program.binaries = a.indicator;
    }

    auto& pairs = a.program.sos1_pairs;
    for (std::size_t k = 0; k < ne; ++k) {
        pairs.push_back({{a.lambda[k], false}, {a.delta[k], false}});
    }
    if (kind == ModelKind::OrientedOutput) {
        for (std::size_t i = 0; i < m; ++i) {
            pairs.push_back({{a.v[i], false}, {a.s_in[i], false}});
        }
    } else if (kind == ModelKind::OrientedInput) {
        for (std::size_t r = 0; r < s; ++r) {
            pairs.push_back({{a.u[r], false}, {a.s_out[r], false}});
        }
    } else if (kind == ModelKind::BiCrs) {
        for (std::size_t k = 0; k < ne; ++k) {
            pairs.push_back({{a.lambda[k], false}, {a.indicator[k], true}});
        }
    }

    a.projection.assign(p.num_variables(), 0.0);
    if (kind != ModelKind::OrientedOutput) {
        for (std::size_t i = 0; i < m; ++i) {
            a.projection[a.s_in[i]] = 1.0 / xs(ctx.dmu, i);
        }
    }
    if (kind != ModelKind::OrientedInput) {
        for (std::size_t r = 0; r < s; ++r) {
            a.projection[a.s_out[r]] = 1.0 / ys(ctx.dmu, r);
        }
    }
    (void)o;
    return a;
}

inline void set_objective(AssembledModel& a, const std::vector<double>& c) {
    a.program.base.direction = lp::Direction::Minimize;
    a.program.base.objective = c;
}

// Fix the combinatorial structure of `x` (zero literal of every pair, rounded
// binaries) and re-solve the LP minimizing both terms; within a fixed
// structure the projection and the peer radius are independent.
inline std::optional<std::vector<double>> polish(const AssembledModel& a, const std::vector<double>& x,
                                                 const lp::Tolerances& tol) {
    lp::LinearProgram p = a.program.base;
    for (const auto& pr : a.program.sos1_pairs) {
        const mip::Literal& zero =
            std::abs(pr.first.value(x)) <= std::abs(pr.second.value(x)) ? pr.first : pr.second;
        auto& var = p.variables[zero.variable];
        if (zero.complemented) {
            var.lower = var.upper = 1.0;
        } else {
            var.lower = var.upper = 0.0;
        }
    }
    for (auto b : a.program.binaries) {
        const double r = x[b] >= 0.5 ? 1.0 : 0.0;
        p.variables[b].lower = p.variables[b].upper = r;
    }
    p.direction = lp::Direction::Minimize;
    p.objective = a.projection;
    if (a.z0) {
        p.objective[*a.z0] += 1.0;
    }
    const auto sol = lp::solve(p, tol);
    if (sol.status != lp::Status::Optimal) {
        return std::nullopt;
    }
    return sol.primal;
}

inline double dot(const std::vector<double>& c, const std::vector<double>& x) {
    double v = 0.0;
    for (std::size_t j = 0; j < c.size(); ++j) {
        v += c[j] * x[j];
    }
    return v;
}

// Second stage: minimize the neglected term (the peer radius, or the
// projection when alpha = 0) with the scalarized objective held at its optimum.
inline std::vector<double> refine_primal(const AssembledModel& stage1, double alpha, double optimum,
                                         const SolveOptions& opts, std::size_t& nodes) {
    const std::vector<double> c1 = stage1.scalarized(alpha);
    std::vector<double> best;
    for (double slack : {1e-9, 1e-7 * (1.0 + std::abs(optimum))}) {
        AssembledModel a2 = stage1;
        std::vector<std::pair<std::size_t, double>> row;
        for (std::size_t j = 0; j < c1.size(); ++j) {
            if (c1[j] != 0.0) {
                row.emplace_back(j, c1[j]);
            }
        }
        a2.program.base.add_constraint(row, lp::Sense::LessEqual, optimum + slack);
        std::vector<double> c2(c1.size(), 0.0);
        if (alpha > 0.0) {
            c2[*stage1.z0] = 1.0;
        } else {
            c2 = stage1.projection;
        }
        set_objective(a2, c2);
        const auto r2 = mip::solve(a2.program, opts.mip);
        nodes += r2.node_count;
        if (r2.status == mip::Status::Optimal) {
            best = r2.primal;
            break;
        }
    }
    if (best.empty()) {
        return best;
    }
    if (auto polished = polish(stage1, best, opts.mip.lp)) {
        // Keep the polished point only if it still attains the stage-1 optimum.
        if (dot(c1, *polished) <= optimum + 1e-7 * (1.0 + std::abs(optimum))) {
            return *polished;
        }
    }
    return best;
}

inline Hyperplane decode_hyperplane(const ModelContext& ctx, const AssembledModel& a, ModelKind kind,
                                    const std::vector<double>& x) {
    const Dataset& d = *ctx.data;
    Hyperplane h;
    for (std::size_t i = 0; i < d.m(); ++i) {
        h.v.push_back(std::max(0.0, x[a.v[i]]) / ctx.scale.input_max[i]);
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        h.u.push_back(std::max(0.0, x[a.u[r]]) / ctx.scale.output_max[r]);
    }
    if (a.u0) {
        h.u0 = x[*a.u0];
    }
    for (auto dj : a.delta) {
        h.delta.push_back(std::max(0.0, x[dj]));
    }
    // Smallest coefficient of the family bounded below by 1 becomes exactly 1.
    double smallest = lp::kInfinity;
    if (kind != ModelKind::OrientedOutput) {
        for (double c : h.v) {
            smallest = std::min(smallest, c);
        }
    }
    if (kind != ModelKind::OrientedInput) {
        for (double c : h.u) {
            smallest = std::min(smallest, c);
        }
    }
    if (smallest > 0.0 && std::isfinite(smallest)) {
        const double k = 1.0 / smallest;
        for (auto& c : h.v) {
            c *= k;
        }
        for (auto& c : h.u) {
            c *= k;
        }
        if (h.u0) {
            *h.u0 *= k;
        }
        for (auto& c : h.delta) {
            c *= k;
        }
    }
    return h;
}

inline BenchmarkSolution decode(const ModelContext& ctx, const AssembledModel& a, ModelKind kind,
                                const std::vector<double>& x, const SolveOptions& opts) {
    const Dataset& d = *ctx.data;
    const DmuRecord& o = ctx.evaluated();
    BenchmarkSolution sol;
    sol.dmu_id = o.id;
    sol.model_kind = kind;
    sol.alpha = opts.alpha;
    sol.status = "optimal";
    for (std::size_t i = 0; i < d.m(); ++i) {
        const double sl = std::max(0.0, x[a.s_in[i]]) * ctx.scale.input_max[i];
        sol.input_slacks.push_back(sl);
        sol.targets.inputs.push_back(o.inputs[i] - sl);
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        const double sl = std::max(0.0, x[a.s_out[r]]) * ctx.scale.output_max[r];
        sol.output_slacks.push_back(sl);
        sol.targets.outputs.push_back(o.outputs[r] + sl);
    }
    const auto& dist = ctx.peer_distance(kind);
    double radius = 0.0;
    for (std::size_t k = 0; k < a.lambda.size(); ++k) {
        const double w = std::max(0.0, x[a.lambda[k]]);
        sol.lambda.emplace_back(ctx.extreme[k], w);
        if (w > opts.lambda_threshold) {
            sol.reference_set.push_back(ctx.extreme[k]);
            radius = std::max(radius, dist[k]);
        }
    }
    sol.hyperplane = decode_hyperplane(ctx, a, kind, x);
    sol.d_proj = a.projection_value(x);
    sol.d_H = radius;
    sol.objective = dot(a.scalarized(opts.alpha), x);
    return sol;
}

// Supporting hyperplane through an extreme efficient DMU, for the
// self-benchmark short circuit.
inline Hyperplane self_hyperplane(const ModelContext& ctx, ModelKind kind) {
    AssembledModel a = assemble(ctx, kind);
    lp::LinearProgram p;
    const Dataset& d = *ctx.data;
    const std::size_t ne = ctx.extreme_index.size();
    // Reuse the hyperplane rows only: they are the last rows before the
    // linking rows, so rebuild them directly instead.
    std::vector<std::size_t> v;
    std::vector<std::size_t> u;
    std::vector<std::size_t> delta;
    std::optional<std::size_t> u0;
    const double v_lower = kind == ModelKind::OrientedOutput ? 0.0 : 1.0;
    const double u_lower = kind == ModelKind::OrientedInput ? 0.0 : 1.0;
    for (std::size_t i = 0; i < d.m(); ++i) {
        v.push_back(p.add_variable("v", v_lower, lp::kInfinity, 1.0));
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        u.push_back(p.add_variable("u", u_lower, lp::kInfinity, 1.0));
    }
    if (kind != ModelKind::BiCrs) {
        u0 = p.add_variable("u0", -lp::kInfinity, lp::kInfinity);
    }
    for (std::size_t k = 0; k < ne; ++k) {
        const bool self = ctx.self_in_e && *ctx.self_in_e == k;
        delta.push_back(p.add_variable("delta", 0.0, self ? 0.0 : lp::kInfinity));
    }
    for (std::size_t k = 0; k < ne; ++k) {
        const std::size_t j = ctx.extreme_index[k];
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t i = 0; i < d.m(); ++i) {
            t.emplace_back(v[i], -d.dmus[j].inputs[i] / ctx.scale.input_max[i]);
        }
        for (std::size_t r = 0; r < d.s(); ++r) {
            t.emplace_back(u[r], d.dmus[j].outputs[r] / ctx.scale.output_max[r]);
        }
        if (u0) {
            t.emplace_back(*u0, 1.0);
        }
        t.emplace_back(delta[k], 1.0);
        p.add_constraint(t, lp::Sense::Equal, 0.0);
    }
    const auto sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) {
        throw SolverError("no supporting hyperplane found through extreme efficient DMU '" +
                          ctx.evaluated().id + "'");
    }
    // Map into the assembled layout so decode_hyperplane can be shared.
    std::vector<double> x(a.program.base.num_variables(), 0.0);
    for (std::size_t i = 0; i < d.m(); ++i) {
        x[a.v[i]] = sol.primal[v[i]];
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        x[a.u[r]] = sol.primal[u[r]];
    }
    if (u0) {
        x[*a.u0] = sol.primal[*u0];
    }
    for (std::size_t k = 0; k < ne; ++k) {
        x[a.delta[k]] = sol.primal[delta[k]];
    }
    return decode_hyperplane(ctx, a, kind, x);
}

inline BenchmarkSolution self_solution(const ModelContext& ctx, ModelKind kind, const SolveOptions& opts) {
    const DmuRecord& o = ctx.evaluated();
    BenchmarkSolution sol;
    sol.dmu_id = o.id;
    sol.model_kind = kind;
    sol.alpha = opts.alpha;
    sol.status = "self_benchmark";
    sol.targets = {o.inputs, o.outputs};
    sol.input_slacks.assign(o.inputs.size(), 0.0);
    sol.output_slacks.assign(o.outputs.size(), 0.0);
    for (std::size_t k = 0; k < ctx.extreme.size(); ++k) {
        sol.lambda.emplace_back(ctx.extreme[k], k == *ctx.self_in_e ? 1.0 : 0.0);
    }
    sol.reference_set = {o.id};
    sol.hyperplane = self_hyperplane(ctx, kind);
    return sol;
}

inline void check_compatible(const Dataset& d, ModelKind kind) {
    if (d.rts != required_rts(kind)) {
        throw UsageError(std::string("model ") + cli_name(kind) + " requires --rts " +
                         to_string(required_rts(kind)) + " but the dataset is " + to_string(d.rts));
    }
}

}  // namespace detail

/// Solves `kind` for the DMU in `ctx`. Members of E short-circuit to a
/// self-benchmark without a mixed-integer solve.
inline BenchmarkSolution solve_model(const ModelContext& ctx, ModelKind kind, const SolveOptions& opts = {}) {
    const Dataset& d = *ctx.data;
    detail::check_compatible(d, kind);
    if (!(opts.alpha >= 0.0 && opts.alpha <= 1.0)) {
        throw UsageError("alpha must lie in [0, 1]");
    }
    if (ctx.self_in_e) {
        return detail::self_solution(ctx, kind, opts);
    }
    detail::AssembledModel a = detail::assemble(ctx, kind);
    detail::set_objective(a, a.scalarized(opts.alpha));
    const auto r1 = mip::solve(a.program, opts.mip);
    if (r1.status != mip::Status::Optimal) {
        throw SolverError(std::string("model ") + to_string(kind) + " is infeasible for DMU '" +
                          ctx.evaluated().id + "'");
    }
    std::size_t nodes = r1.node_count;
    std::vector<double> x = r1.primal;
    const bool refine = kind != ModelKind::Closest && (opts.endpoint_refine || opts.alpha == 0.0);
    if (refine) {
        auto refined = detail::refine_primal(a, opts.alpha, r1.objective, opts, nodes);
        if (!refined.empty()) {
            x = std::move(refined);
        }
    }
    BenchmarkSolution sol = detail::decode(ctx, a, kind, x, opts);
    sol.nodes = nodes;
    return sol;
}

inline BenchmarkSolution solve_model(const Dataset& d, const std::vector<std::string>& extreme,
                                     const std::string& dmu_id, ModelKind kind, const SolveOptions& opts = {}) {
    return solve_model(make_context(d, extreme, dmu_id), kind, opts);
}

/// Closest dominating targets on the efficient frontier (VRS); alpha is ignored.
inline BenchmarkSolution solve_closest(const Dataset& d, const std::vector<std::string>& extreme,
                                       const std::string& dmu_id, SolveOptions opts = {}) {
    opts.alpha = 1.0;
    return solve_model(d, extreme, dmu_id, ModelKind::Closest, opts);
}

inline BenchmarkSolution solve_bi_vrs(const Dataset& d, const std::vector<std::string>& extreme,
                                      const std::string& dmu_id, const SolveOptions& opts = {}) {
    return solve_model(d, extreme, dmu_id, ModelKind::BiVrs, opts);
}

inline BenchmarkSolution solve_oriented_output(const Dataset& d, const std::vector<std::string>& extreme,
                                               const std::string& dmu_id, const SolveOptions& opts = {}) {
    return solve_model(d, extreme, dmu_id, ModelKind::OrientedOutput, opts);
}

inline BenchmarkSolution solve_oriented_input(const Dataset& d, const std::vector<std::string>& extreme,
                                              const std::string& dmu_id, const SolveOptions& opts = {}) {
    return solve_model(d, extreme, dmu_id, ModelKind::OrientedInput, opts);
}

inline BenchmarkSolution solve_bi_crs(const Dataset& d, const std::vector<std::string>& extreme,
                                      const std::string& dmu_id, const SolveOptions& opts = {}) {
    return solve_model(d, extreme, dmu_id, ModelKind::BiCrs, opts);
}

/// Second stage on an existing solution: minimize the term the scalarization
/// neglects while holding the scalarized objective at `sol.objective`.
/// No-op for self-benchmarks and the closest-target model.
inline BenchmarkSolution endpoint_refine(const BenchmarkSolution& sol, const Dataset& d,
                                         const std::vector<std::string>& extreme, SolveOptions opts) {
    if (sol.is_self_benchmark() || sol.model_kind == ModelKind::Closest) {
        return sol;
    }
    opts.alpha = sol.alpha;
    const ModelContext ctx = make_context(d, extreme, sol.dmu_id);
    detail::check_compatible(d, sol.model_kind);
    detail::AssembledModel a = detail::assemble(ctx, sol.model_kind);
    std::size_t nodes = 0;
    auto x = detail::refine_primal(a, sol.alpha, sol.objective, opts, nodes);
    if (x.empty()) {
        return sol;
    }
    BenchmarkSolution out = detail::decode(ctx, a, sol.model_kind, x, opts);
    out.nodes = sol.nodes + nodes;
    return out;
}

/// Every violated invariant of `sol`; empty when the solution is valid.
/// Comparisons run on column-scaled values (data divided by the dataset
/// maximum) at tolerance 1e-6; hyperplane checks are relative to the size of
/// the terms involved.
inline std::vector<std::string> validate_solution(const BenchmarkSolution& sol, const Dataset& d,
                                                  const std::vector<std::string>& extreme) {
    constexpr double tol = 1e-6;
    std::vector<std::string> out;
    const ModelKind kind = sol.model_kind;
    if (d.rts != required_rts(kind)) {
        out.push_back("model/returns-to-scale mismatch");
        return out;
    }
    auto idx = d.index_of(sol.dmu_id);
    if (!idx) {
        out.push_back("unknown DMU '" + sol.dmu_id + "'");
        return out;
    }
    const DmuRecord& o = d.dmus[*idx];
    const auto sc = ColumnScale::of(d);
    const std::size_t m = d.m();
    const std::size_t s = d.s();
    if (sol.targets.inputs.size() != m || sol.targets.outputs.size() != s || sol.input_slacks.size() != m ||
        sol.output_slacks.size() != s || sol.lambda.size() != extreme.size() ||
        sol.hyperplane.v.size() != m || sol.hyperplane.u.size() != s ||
        sol.hyperplane.delta.size() != extreme.size()) {
        out.push_back("dimension mismatch in solution vectors");
        return out;
    }
    std::vector<const DmuRecord*> members;
    for (std::size_t k = 0; k < extreme.size(); ++k) {
        if (sol.lambda[k].first != extreme[k]) {
            out.push_back("lambda entry " + std::to_string(k) + " is '" + sol.lambda[k].first +
                          "', expected E member '" + extreme[k] + "'");
            return out;
        }
        auto j = d.index_of(extreme[k]);
        if (!j) {
            out.push_back("E member '" + extreme[k] + "' not in dataset");
            return out;
        }
        members.push_back(&d.dmus[*j]);
    }

    // Domination and slack bookkeeping.
    for (std::size_t i = 0; i < m; ++i) {
        const double M = sc.input_max[i];
        if ((o.inputs[i] - sol.targets.inputs[i]) / M < -tol) {
            out.push_back("domination: input target " + std::to_string(i) + " exceeds actual");
        }
        if (std::abs(o.inputs[i] - sol.input_slacks[i] - sol.targets.inputs[i]) / M > tol) {
            out.push_back("input target " + std::to_string(i) + " differs from actual minus slack");
        }
        if (sol.input_slacks[i] / M < -tol) {
            out.push_back("negative input slack");
        }
    }
    for (std::size_t r = 0; r < s; ++r) {
        const double M = sc.output_max[r];
        if ((sol.targets.outputs[r] - o.outputs[r]) / M < -tol) {
            out.push_back("domination: output target " + std::to_string(r) + " below actual");
        }
        if (std::abs(o.outputs[r] + sol.output_slacks[r] - sol.targets.outputs[r]) / M > tol) {
            out.push_back("output target " + std::to_string(r) + " differs from actual plus slack");
        }
        if (sol.output_slacks[r] / M < -tol) {
            out.push_back("negative output slack");
        }
    }

    // Recombination over E.
    double lambda_sum = 0.0;
    std::vector<double> comb_in(m, 0.0);
    std::vector<double> comb_out(s, 0.0);
    for (std::size_t k = 0; k < extreme.size(); ++k) {
        const double w = sol.lambda[k].second;
        if (w < -tol) {
            out.push_back("negative lambda for '" + extreme[k] + "'");
        }
        lambda_sum += w;
        for (std::size_t i = 0; i < m; ++i) {
            comb_in[i] += w * members[k]->inputs[i];
        }
        for (std::size_t r = 0; r < s; ++r) {
            comb_out[r] += w * members[k]->outputs[r];
        }
    }
    if (required_rts(kind) == Rts::Variable && std::abs(lambda_sum - 1.0) > tol) {
        out.push_back("convexity: sum of lambda is " + std::to_string(lambda_sum));
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (std::abs(comb_in[i] - sol.targets.inputs[i]) / sc.input_max[i] > tol) {
            out.push_back("recombination: input target " + std::to_string(i) + " is not sum lambda_j x_j");
        }
    }
    for (std::size_t r = 0; r < s; ++r) {
        if (std::abs(comb_out[r] - sol.targets.outputs[r]) / sc.output_max[r] > tol) {
            out.push_back("recombination: output target " + std::to_string(r) + " is not sum lambda_j y_j");
        }
    }

    // Reference set: members of E with positive weight.
    for (const auto& id : sol.reference_set) {
        auto it = std::find(extreme.begin(), extreme.end(), id);
        if (it == extreme.end()) {
            out.push_back("reference set member '" + id + "' is not extreme efficient");
            continue;
        }
        if (!(sol.lambda[static_cast<std::size_t>(it - extreme.begin())].second > 0.0)) {
            out.push_back("reference set member '" + id + "' has zero weight");
        }
    }
    if (sol.reference_set.empty()) {
        out.push_back("empty reference set");
    }

    // Hyperplane.
    const Hyperplane& h = sol.hyperplane;
    const bool v_bounded = kind != ModelKind::OrientedOutput;
    const bool u_bounded = kind != ModelKind::OrientedInput;
    for (double c : h.v) {
        if (c < (v_bounded ? 1.0 - tol : -tol)) {
            out.push_back("coefficient bound: v = " + std::to_string(c));
        }
    }
    for (double c : h.u) {
        if (c < (u_bounded ? 1.0 - tol : -tol)) {
            out.push_back("coefficient bound: u = " + std::to_string(c));
        }
    }
    if (kind == ModelKind::BiCrs && h.u0) {
        out.push_back("CRS hyperplane must not carry u0");
    }
    if (kind != ModelKind::BiCrs && !h.u0) {
        out.push_back("VRS hyperplane is missing u0");
    }
    const double u0 = h.u0.value_or(0.0);
    auto magnitude = [&](const DmuRecord& r) {
        double t = std::abs(u0);
        for (std::size_t i = 0; i < m; ++i) {
            t += std::abs(h.v[i] * r.inputs[i]);
        }
        for (std::size_t k = 0; k < s; ++k) {
            t += std::abs(h.u[k] * r.outputs[k]);
        }
        return t;
    };
    for (std::size_t k = 0; k < extreme.size(); ++k) {
        const DmuRecord& r = *members[k];
        double res = u0 + h.delta[k];
        for (std::size_t i = 0; i < m; ++i) {
            res -= h.v[i] * r.inputs[i];
        }
        for (std::size_t q = 0; q < s; ++q) {
            res += h.u[q] * r.outputs[q];
        }
        const double scale = 1.0 + magnitude(r);
        if (std::abs(res) > tol * scale) {
            out.push_back("hyperplane residual for '" + extreme[k] + "' is " + std::to_string(res));
        }
        if (h.delta[k] < -tol * scale) {
            out.push_back("negative delta for '" + extreme[k] + "'");
        }
        if (sol.lambda[k].second * h.delta[k] > tol * scale) {
            out.push_back("complementarity: lambda * delta > 0 for '" + extreme[k] + "'");
        }
    }
    const double scale0 = 1.0 + magnitude(o);
    if (kind == ModelKind::OrientedOutput) {
        for (std::size_t i = 0; i < m; ++i) {
            if (h.v[i] * sol.input_slacks[i] > tol * scale0) {
                out.push_back("complementarity: v * t > 0 for input " + std::to_string(i));
            }
        }
    }
    if (kind == ModelKind::OrientedInput) {
        for (std::size_t r = 0; r < s; ++r) {
            if (h.u[r] * sol.output_slacks[r] > tol * scale0) {
                out.push_back("complementarity: u * t > 0 for output " + std::to_string(r));
            }
        }
    }

    // Distance components.
    double radius = 0.0;
    for (const auto& id : sol.reference_set) {
        if (!d.index_of(id)) {
            continue;
        }
        const double dj = distance(peer_metric(kind), o, d.at(id));
        radius = std::max(radius, dj);
        if (sol.d_H < dj - tol) {
            out.push_back("d_H below distance to reference member '" + id + "'");
        }
    }
    if (std::abs(sol.d_H - radius) > tol) {
        out.push_back("d_H differs from the Hausdorff radius of the reference set");
    }
    double proj = 0.0;
    if (kind != ModelKind::OrientedOutput) {
        proj += input_deviation(o.inputs, sol.targets.inputs);
    }
    if (kind != ModelKind::OrientedInput) {
        proj += output_deviation(o.outputs, sol.targets.outputs);
    }
    if (std::abs(proj - sol.d_proj) > tol) {
        out.push_back("d_proj differs from the deviation between actual and target");
    }

    // Target efficiency by the additive test.
    try {
        AdditiveResult res;
        if (kind == ModelKind::OrientedOutput) {
            res = additive_slack(d, o.inputs, sol.targets.outputs, SlackSide::OutputsOnly);
        } else if (kind == ModelKind::OrientedInput) {
            res = additive_slack(d, sol.targets.inputs, o.outputs, SlackSide::InputsOnly);
        } else {
            res = additive_slack(d, sol.targets.inputs, sol.targets.outputs, SlackSide::Both);
        }
        if (res.value > tol) {
            out.push_back("on-frontier: target is not efficient (additive slack " + std::to_string(res.value) +
                          ")");
        }
    } catch (const Error&) {
        out.push_back("on-frontier: target lies outside the technology");
    }
    return out;
}

}  // namespace dea
