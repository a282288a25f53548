#pragma once

// Efficiency classification and the set E of extreme efficient DMUs.
//
// Efficiency uses the unweighted additive model on column-scaled data;
// extremity asks whether an efficient DMU can be written as a combination of
// the other DMUs. Exact duplicates: the first occurrence is extreme, later
// copies are representable by it.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "dea/dataset.hpp"
#include "dea/error.hpp"
#include "dea/lp.hpp"

namespace dea {

enum class EfficiencyStatus { Inefficient, Efficient, ExtremeEfficient, NonextremeEfficient };

inline const char* to_string(EfficiencyStatus s) {
    switch (s) {
        case EfficiencyStatus::Inefficient: return "inefficient";
        case EfficiencyStatus::Efficient: return "efficient";
        case EfficiencyStatus::ExtremeEfficient: return "extreme_efficient";
        case EfficiencyStatus::NonextremeEfficient: return "nonextreme_efficient";
    }
    return "?";
}

inline constexpr double kEfficiencyThreshold = 1e-6;

/// Which slacks the additive test may use.
enum class SlackSide { Both, OutputsOnly, InputsOnly };

struct AdditiveResult {
    double value = 0.0;               // optimum on scaled data
    std::vector<double> input_slack;  // data units
    std::vector<double> output_slack;
};

/// max sum s- + sum s+ on column-scaled data for the point (inputs, outputs)
/// against the dataset's technology. With OutputsOnly the input rows are
/// inequalities and input slack does not count (and symmetrically).
inline AdditiveResult additive_slack(const Dataset& d, const std::vector<double>& inputs,
                                     const std::vector<double>& outputs, SlackSide side = SlackSide::Both) {
    const auto sc = ColumnScale::of(d);
    lp::LinearProgram p;
    p.direction = lp::Direction::Maximize;
    std::vector<std::size_t> lam(d.n());
    for (std::size_t j = 0; j < d.n(); ++j) {
        lam[j] = p.add_variable("lambda_" + d.dmus[j].id);
    }
    std::vector<std::size_t> sin(d.m());
    std::vector<std::size_t> sout(d.s());
    for (std::size_t i = 0; i < d.m(); ++i) {
        sin[i] = p.add_variable("s_in_" + d.input_names[i], 0.0, lp::kInfinity,
                                side == SlackSide::OutputsOnly ? 0.0 : 1.0);
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        sout[r] = p.add_variable("s_out_" + d.output_names[r], 0.0, lp::kInfinity,
                                 side == SlackSide::InputsOnly ? 0.0 : 1.0);
    }
    for (std::size_t i = 0; i < d.m(); ++i) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t j = 0; j < d.n(); ++j) {
            t.emplace_back(lam[j], d.dmus[j].inputs[i] / sc.input_max[i]);
        }
        t.emplace_back(sin[i], 1.0);
        p.add_constraint(t, lp::Sense::Equal, inputs[i] / sc.input_max[i]);
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t j = 0; j < d.n(); ++j) {
            t.emplace_back(lam[j], d.dmus[j].outputs[r] / sc.output_max[r]);
        }
        t.emplace_back(sout[r], -1.0);
        p.add_constraint(t, lp::Sense::Equal, outputs[r] / sc.output_max[r]);
    }
    if (d.rts == Rts::Variable) {
        std::vector<std::pair<std::size_t, double>> t;
        for (auto j : lam) {
            t.emplace_back(j, 1.0);
        }
        p.add_constraint(t, lp::Sense::Equal, 1.0);
    }
    const auto sol = lp::solve(p);
    if (sol.status != lp::Status::Optimal) {
        throw SolverError(std::string("additive model ") + lp::to_string(sol.status) +
                          " (point outside the technology?)");
    }
    AdditiveResult res;
    res.value = sol.objective;
    for (std::size_t i = 0; i < d.m(); ++i) {
        res.input_slack.push_back(sol.primal[sin[i]] * sc.input_max[i]);
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        res.output_slack.push_back(sol.primal[sout[r]] * sc.output_max[r]);
    }
    return res;
}

struct FrontierClassification {
    std::vector<std::string> ids;
    std::vector<EfficiencyStatus> status;
    std::vector<double> additive_value;
    std::vector<std::vector<double>> input_slack;
    std::vector<std::vector<double>> output_slack;
    /// E, in dataset order. Empty until extreme_efficient_set has run.
    std::vector<std::string> extreme;

    bool is_efficient(std::size_t j) const { return status[j] != EfficiencyStatus::Inefficient; }
};

/// Efficient / inefficient labels from the additive model.
inline FrontierClassification classify_efficiency(const Dataset& d) {
    FrontierClassification c;
    for (const auto& r : d.dmus) {
        auto res = additive_slack(d, r.inputs, r.outputs);
        c.ids.push_back(r.id);
        c.additive_value.push_back(res.value);
        c.status.push_back(res.value > kEfficiencyThreshold ? EfficiencyStatus::Inefficient
                                                            : EfficiencyStatus::Efficient);
        c.input_slack.push_back(std::move(res.input_slack));
        c.output_slack.push_back(std::move(res.output_slack));
    }
    return c;
}

/// Whether DMU `k` is a combination of the other DMUs (later exact copies of
/// `k` excluded, so the first of a duplicate group stays extreme).
inline bool is_representable(const Dataset& d, std::size_t k) {
    const auto sc = ColumnScale::of(d);
    const DmuRecord& target = d.dmus[k];
    std::vector<std::size_t> generators;
    for (std::size_t j = 0; j < d.n(); ++j) {
        if (j == k) {
            continue;
        }
        const auto& o = d.dmus[j];
        const bool duplicate = o.inputs == target.inputs && o.outputs == target.outputs;
        if (duplicate && j > k) {
            continue;
        }
        generators.push_back(j);
    }
    if (generators.empty()) {
        return false;
    }
    lp::LinearProgram p;
    std::vector<std::size_t> lam;
    for (auto j : generators) {
        lam.push_back(p.add_variable("lambda_" + d.dmus[j].id));
    }
    for (std::size_t i = 0; i < d.m(); ++i) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t g = 0; g < generators.size(); ++g) {
            t.emplace_back(lam[g], d.dmus[generators[g]].inputs[i] / sc.input_max[i]);
        }
        p.add_constraint(t, lp::Sense::Equal, target.inputs[i] / sc.input_max[i]);
    }
    for (std::size_t r = 0; r < d.s(); ++r) {
        std::vector<std::pair<std::size_t, double>> t;
        for (std::size_t g = 0; g < generators.size(); ++g) {
            t.emplace_back(lam[g], d.dmus[generators[g]].outputs[r] / sc.output_max[r]);
        }
        p.add_constraint(t, lp::Sense::Equal, target.outputs[r] / sc.output_max[r]);
    }
    if (d.rts == Rts::Variable) {
        std::vector<std::pair<std::size_t, double>> t;
        for (auto l : lam) {
            t.emplace_back(l, 1.0);
        }
        p.add_constraint(t, lp::Sense::Equal, 1.0);
    }
    return lp::solve(p).status == lp::Status::Optimal;
}

/// E: efficient DMUs not representable by the others, in dataset order.
inline std::vector<std::string> extreme_efficient_set(const Dataset& d, const FrontierClassification& c) {
    std::vector<std::string> e;
    for (std::size_t j = 0; j < d.n(); ++j) {
        if (c.is_efficient(j) && !is_representable(d, j)) {
            e.push_back(d.dmus[j].id);
        }
    }
    return e;
}

/// Both steps: statuses refined to extreme / nonextreme and E filled in.
inline FrontierClassification classify(const Dataset& d) {
    FrontierClassification c = classify_efficiency(d);
    c.extreme = extreme_efficient_set(d, c);
    for (std::size_t j = 0; j < d.n(); ++j) {
        if (!c.is_efficient(j)) {
            continue;
        }
        const bool in_e = std::find(c.extreme.begin(), c.extreme.end(), d.dmus[j].id) != c.extreme.end();
        c.status[j] = in_e ? EfficiencyStatus::ExtremeEfficient : EfficiencyStatus::NonextremeEfficient;
    }
    if (c.extreme.empty()) {
        throw SolverError("no extreme efficient DMU found; the data may be degenerate");
    }
    return c;
}

}  // namespace dea
