#include <gtest/gtest.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>

#include "dea/mip.hpp"
#include "support/reference_lp.hpp"

using namespace dea;

TEST(Mip, NoIntegralityReducesToLp) {
    mip::MixedProgram p;
    auto x = p.base.add_variable("x", 0.0, lp::kInfinity, -1.0);
    auto y = p.base.add_variable("y", 0.0, lp::kInfinity, -1.0);
    p.base.add_constraint({{x, 1.0}, {y, 2.0}}, lp::Sense::LessEqual, 4.0);
    p.base.add_constraint({{x, 3.0}, {y, 1.0}}, lp::Sense::LessEqual, 6.0);
    const auto m = mip::solve(p);
    const auto l = lp::solve(p.base);
    ASSERT_EQ(m.status, mip::Status::Optimal);
    EXPECT_EQ(m.objective, l.objective);
    EXPECT_EQ(m.primal, l.primal);
    EXPECT_EQ(m.node_count, 1u);
}

TEST(Mip, ExhaustedDisjunctionIsInfeasible) {
    mip::MixedProgram p;
    auto x = p.base.add_variable("x", 0.0, lp::kInfinity, 1.0);
    auto y = p.base.add_variable("y", 0.0, lp::kInfinity, 1.0);
    p.base.add_constraint({{x, 1.0}}, lp::Sense::GreaterEqual, 0.3);
    p.base.add_constraint({{y, 1.0}}, lp::Sense::GreaterEqual, 0.3);
    p.sos1_pairs.push_back({{x, false}, {y, false}});
    EXPECT_EQ(mip::solve(p).status, mip::Status::Infeasible);
}

TEST(Mip, PairPicksCheaperSide) {
    mip::MixedProgram p;
    auto x = p.base.add_variable("x", 0.0, lp::kInfinity, 1.0);
    auto y = p.base.add_variable("y", 0.0, lp::kInfinity, 2.0);
    p.base.add_constraint({{x, 1.0}, {y, 1.0}}, lp::Sense::GreaterEqual, 1.0);
    p.base.add_constraint({{x, 1.0}, {y, -1.0}}, lp::Sense::LessEqual, 0.2);
    p.sos1_pairs.push_back({{x, false}, {y, false}});
    const auto s = mip::solve(p);
    ASSERT_EQ(s.status, mip::Status::Optimal);
    EXPECT_NEAR(s.objective, 2.0, 1e-9);
    EXPECT_NEAR(s.primal[x], 0.0, 1e-9);
}

TEST(Mip, ComplementedLiteralForcesBinaryUp) {
    // lambda * (1 - I) = 0 with a cost on I: positive lambda needs I = 1.
    mip::MixedProgram p;
    auto lam = p.base.add_variable("lambda", 0.0, lp::kInfinity, 0.0);
    auto ind = p.base.add_variable("I", 0.0, 1.0, 3.0);
    p.base.add_constraint({{lam, 1.0}}, lp::Sense::GreaterEqual, 0.5);
    p.binaries.push_back(ind);
    p.sos1_pairs.push_back({{lam, false}, {ind, true}});
    const auto s = mip::solve(p);
    ASSERT_EQ(s.status, mip::Status::Optimal);
    EXPECT_NEAR(s.primal[ind], 1.0, 1e-9);
    EXPECT_NEAR(s.objective, 3.0, 1e-9);
}

TEST(Mip, KnapsackWithBinaries) {
    mip::MixedProgram p;
    p.base.direction = lp::Direction::Maximize;
    const double value[] = {10, 13, 7, 8};
    const double weight[] = {5, 7, 4, 3};
    std::vector<std::pair<std::size_t, double>> row;
    for (int k = 0; k < 4; ++k) {
        auto v = p.base.add_variable("b", 0.0, 1.0, value[k]);
        p.binaries.push_back(v);
        row.emplace_back(v, weight[k]);
    }
    p.base.add_constraint(row, lp::Sense::LessEqual, 12.0);
    const auto s = mip::solve(p);
    ASSERT_EQ(s.status, mip::Status::Optimal);
    EXPECT_NEAR(s.objective, 25.0, 1e-9);  // items 0, 2, 3
    for (auto b : p.binaries) {
        EXPECT_NEAR(s.primal[b], std::round(s.primal[b]), 1e-6);
    }
    ASSERT_FALSE(s.incumbent_history.empty());
    EXPECT_NEAR(s.incumbent_history.back().objective, 25.0, 1e-9);
}

TEST(Mip, NodeLimitIsAHardError) {
    mip::MixedProgram p;
    std::vector<std::pair<std::size_t, double>> row;
    for (int k = 0; k < 12; ++k) {
        auto v = p.base.add_variable("b", 0.0, 1.0, -1.0);
        p.binaries.push_back(v);
        row.emplace_back(v, 2.0);
    }
    p.base.add_constraint(row, lp::Sense::Equal, 11.0);  // odd rhs: no integer point
    mip::Options o;
    o.node_limit = 20;
    EXPECT_THROW(mip::solve(p, o), NodeLimitError);
}

TEST(Mip, RejectsOutOfRangeIndices) {
    mip::MixedProgram p;
    p.base.add_variable("x");
    p.binaries.push_back(4);
    EXPECT_THROW(mip::solve(p), UsageError);
}

namespace {

// Every variable in [0, 4]; a few binaries; pairs over continuous and
// complemented-binary literals.
mip::MixedProgram random_program(unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> coef(-3.0, 3.0);
    std::uniform_real_distribution<double> cost(0.0, 3.0);
    mip::MixedProgram p;
    const int nc = 3 + static_cast<int>(rng() % 4);
    const int nb = static_cast<int>(rng() % 4);
    for (int j = 0; j < nc; ++j) {
        p.base.add_variable("x", 0.0, 4.0, cost(rng) - 1.0);
    }
    for (int j = 0; j < nb; ++j) {
        p.binaries.push_back(p.base.add_variable("b", 0.0, 1.0, cost(rng)));
    }
    const int n = nc + nb;
    const int rows = 2 + static_cast<int>(rng() % 3);
    for (int i = 0; i < rows; ++i) {
        std::vector<std::pair<std::size_t, double>> t;
        for (int j = 0; j < n; ++j) {
            t.emplace_back(j, std::round(coef(rng) * 2.0) / 2.0);
        }
        p.base.add_constraint(t, rng() % 2 ? lp::Sense::LessEqual : lp::Sense::GreaterEqual, coef(rng));
    }
    const int pairs = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < pairs; ++k) {
        const std::size_t a = rng() % nc;
        if (nb > 0 && rng() % 2) {
            p.sos1_pairs.push_back({{a, false}, {p.binaries[rng() % nb], true}});
        } else {
            std::size_t b = rng() % nc;
            if (b == a) {
                b = (a + 1) % nc;
            }
            p.sos1_pairs.push_back({{a, false}, {b, false}});
        }
    }
    return p;
}

// Minimum over every pair assignment and binary assignment, by ref::solve.
std::optional<double> enumerate(const mip::MixedProgram& p) {
    const std::size_t n = p.base.num_variables();
    const std::size_t np = p.sos1_pairs.size();
    const std::size_t nb = p.binaries.size();
    std::optional<double> best;
    for (std::uint32_t mask = 0; mask < (1u << (np + nb)); ++mask) {
        std::vector<double> lo(n), hi(n);
        for (std::size_t j = 0; j < n; ++j) {
            lo[j] = p.base.variables[j].lower;
            hi[j] = p.base.variables[j].upper;
        }
        for (std::size_t k = 0; k < np; ++k) {
            const auto& lit = (mask >> k) & 1u ? p.sos1_pairs[k].second : p.sos1_pairs[k].first;
            if (lit.complemented) {
                lo[lit.variable] = std::max(lo[lit.variable], 1.0);
            } else {
                hi[lit.variable] = std::min(hi[lit.variable], 0.0);
            }
        }
        for (std::size_t k = 0; k < nb; ++k) {
            const double v = (mask >> (np + k)) & 1u ? 1.0 : 0.0;
            lo[p.binaries[k]] = std::max(lo[p.binaries[k]], v);
            hi[p.binaries[k]] = std::min(hi[p.binaries[k]], v);
        }
        ref::Problem r(n);
        r.c = p.base.objective;
        bool empty = false;
        for (std::size_t j = 0; j < n; ++j) {
            empty = empty || lo[j] > hi[j];
            auto& u = r.add(ref::Sense::Le, hi[j]);
            u.a[j] = 1.0;
            auto& l = r.add(ref::Sense::Ge, lo[j]);
            l.a[j] = 1.0;
        }
        if (empty) {
            continue;
        }
        for (const auto& c : p.base.constraints) {
            auto& row = r.add(c.sense == lp::Sense::LessEqual      ? ref::Sense::Le
                              : c.sense == lp::Sense::GreaterEqual ? ref::Sense::Ge
                                                                   : ref::Sense::Eq,
                              c.rhs);
            row.a = c.coefficients;
        }
        const auto s = ref::solve(r);
        if (s.status == ref::Status::Optimal && (!best || s.objective < *best)) {
            best = s.objective;
        }
    }
    return best;
}

}  // namespace

TEST(MipProperty, MatchesExhaustiveEnumeration) {
    int feasible = 0;
    for (unsigned seed = 1; seed <= 300; ++seed) {
        const auto p = random_program(seed);
        const auto want = enumerate(p);
        const auto got = mip::solve(p);
        if (!want) {
            EXPECT_EQ(got.status, mip::Status::Infeasible) << seed;
            continue;
        }
        ++feasible;
        ASSERT_EQ(got.status, mip::Status::Optimal) << seed;
        EXPECT_NEAR(got.objective, *want, 1e-6) << seed;
        for (auto b : p.binaries) {
            EXPECT_NEAR(got.primal[b], std::round(got.primal[b]), 1e-6) << seed;
        }
        for (const auto& pr : p.sos1_pairs) {
            EXPECT_LE(std::min(std::abs(pr.first.value(got.primal)), std::abs(pr.second.value(got.primal))), 1e-6)
                << seed;
        }
    }
    EXPECT_GT(feasible, 100);
}

TEST(MipProperty, FixingAPairSideNeverImproves) {
    for (unsigned seed = 1; seed <= 150; ++seed) {
        const auto p = random_program(seed);
        const auto base = mip::solve(p);
        if (base.status != mip::Status::Optimal) {
            continue;
        }
        for (const auto& pr : p.sos1_pairs) {
            for (const auto* lit : {&pr.first, &pr.second}) {
                auto q = p;
                auto& v = q.base.variables[lit->variable];
                if (lit->complemented) {
                    v.lower = std::max(v.lower, 1.0);
                } else {
                    v.upper = 0.0;
                }
                if (v.lower > v.upper) {
                    continue;
                }
                const auto fixed = mip::solve(q);
                if (fixed.status == mip::Status::Optimal) {
                    EXPECT_GE(fixed.objective, base.objective - 1e-9) << seed;
                }
            }
        }
    }
}

TEST(MipProperty, DeterministicExploration) {
    for (unsigned seed = 1; seed <= 30; ++seed) {
        const auto p = random_program(seed);
        const auto a = mip::solve(p);
        const auto b = mip::solve(p);
        EXPECT_EQ(a.status, b.status);
        EXPECT_EQ(a.node_count, b.node_count);
        EXPECT_EQ(a.primal, b.primal);
    }
}
