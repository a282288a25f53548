#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "dea/frontier.hpp"
#include "dea/metrics.hpp"
#include "dea/models.hpp"
#include "support/instances.hpp"
#include "support/oracle.hpp"

using dea::ModelKind;

namespace {

const std::vector<std::string> kT1Extreme{"A", "B", "C"};
const std::vector<std::string> kT2Extreme{"A", "B"};

dea::SolveOptions at(double alpha) {
    dea::SolveOptions o;
    o.alpha = alpha;
    return o;
}

bool contains(const std::vector<std::string>& v, const std::string& needle) {
    return std::any_of(v.begin(), v.end(), [&](const std::string& s) { return s.find(needle) != std::string::npos; });
}

}  // namespace

TEST(ModelKinds, NamesRoundTrip) {
    for (auto k : dea::kAllModelKinds) {
        EXPECT_EQ(dea::parse_model_kind(dea::to_string(k)), k);
        EXPECT_EQ(dea::parse_model_kind(dea::cli_name(k)), k);
    }
    EXPECT_FALSE(dea::parse_model_kind("dea"));
    EXPECT_EQ(dea::required_rts(ModelKind::BiCrs), dea::Rts::Constant);
    EXPECT_EQ(dea::peer_metric(ModelKind::BiCrs), dea::DistanceKind::Mix);
    EXPECT_EQ(dea::peer_metric(ModelKind::BiVrs), dea::DistanceKind::L1);
}

TEST(Closest, DeskInstance) {
    const auto d = fixtures::t1();
    const auto s = dea::solve_closest(d, kT1Extreme, "D");
    EXPECT_NEAR(s.objective, 7.0 / 15.0, 1e-9);
    EXPECT_NEAR(s.targets.inputs[0], 8.0 / 3.0, 1e-9);
    EXPECT_NEAR(s.targets.outputs[0], 3.0, 1e-9);
    EXPECT_EQ(s.reference_set, (std::vector<std::string>{"A", "B"}));
    EXPECT_NEAR(s.hyperplane.v[0], 1.5, 1e-9);
    EXPECT_NEAR(s.hyperplane.u[0], 1.0, 1e-9);
    ASSERT_TRUE(s.hyperplane.u0);
    EXPECT_NEAR(*s.hyperplane.u0, 1.0, 1e-9);
    EXPECT_TRUE(dea::validate_solution(s, d, kT1Extreme).empty());
}

TEST(Closest, AlphaIsIgnored) {
    const auto d = fixtures::t1();
    EXPECT_NEAR(dea::solve_closest(d, kT1Extreme, "D", at(0.2)).objective, 7.0 / 15.0, 1e-9);
}

TEST(BiVrs, DeskInstanceAcrossAlpha) {
    const auto d = fixtures::t1();
    const auto a1 = dea::solve_bi_vrs(d, kT1Extreme, "D", at(1.0));
    EXPECT_NEAR(a1.objective, 7.0 / 15.0, 1e-9);
    EXPECT_NEAR(a1.d_proj, 7.0 / 15.0, 1e-9);
    const auto a5 = dea::solve_bi_vrs(d, kT1Extreme, "D", at(0.5));
    EXPECT_NEAR(a5.objective, 0.7, 1e-9);
    EXPECT_EQ(a5.reference_set, (std::vector<std::string>{"A", "B"}));
    EXPECT_NEAR(a5.d_H, 14.0 / 15.0, 1e-9);
    const auto a01 = dea::solve_bi_vrs(d, kT1Extreme, "D", at(0.1));
    EXPECT_NEAR(a01.objective, 13.0 / 15.0, 1e-9);
    EXPECT_EQ(a01.reference_set, (std::vector<std::string>{"B"}));
    EXPECT_NEAR(a01.targets.inputs[0], 4.0, 1e-9);
    EXPECT_NEAR(a01.targets.outputs[0], 5.0, 1e-9);
    for (const auto& s : {a1, a5, a01}) {
        EXPECT_TRUE(dea::validate_solution(s, d, kT1Extreme).empty());
    }
}

TEST(OrientedOutput, DeskInstance) {
    const auto d = fixtures::t1();
    const auto s = dea::solve_oriented_output(d, kT1Extreme, "D", at(1.0));
    EXPECT_NEAR(s.targets.outputs[0], 5.5, 1e-9);
    EXPECT_NEAR(s.targets.inputs[0], 5.0, 1e-9);
    EXPECT_EQ(s.reference_set, (std::vector<std::string>{"B", "C"}));
    EXPECT_NEAR(s.d_H, 1.2, 1e-9);
    EXPECT_NEAR(s.objective, 2.5 / 3.0, 1e-9);
    EXPECT_TRUE(dea::validate_solution(s, d, kT1Extreme).empty());
}

TEST(OrientedInput, DeskInstanceIsFlatInAlpha) {
    const auto d = fixtures::t1();
    for (double a : {1.0, 0.6, 0.1}) {
        const auto s = dea::solve_oriented_input(d, kT1Extreme, "D", at(a));
        EXPECT_NEAR(s.objective, 7.0 / 15.0, 1e-9) << a;
        EXPECT_NEAR(s.targets.inputs[0], 8.0 / 3.0, 1e-9) << a;
        EXPECT_TRUE(dea::validate_solution(s, d, kT1Extreme).empty());
    }
}

TEST(BiCrs, DeskInstance) {
    const auto d = fixtures::t2();
    const auto s = dea::solve_bi_crs(d, kT2Extreme, "D", at(0.5));
    EXPECT_NEAR(s.objective, 0.5 / 6.0 + 0.25 / std::sqrt(5.0), 1e-6);
    EXPECT_NEAR(s.targets.outputs[0], 1.5, 1e-6);
    EXPECT_NEAR(s.d_H, 1.0 / std::sqrt(5.0), 1e-6);
    EXPECT_FALSE(s.hyperplane.u0);
    EXPECT_TRUE(dea::validate_solution(s, d, kT2Extreme).empty());
}

TEST(BiCrs, NonextremeEfficientDmuIsProjected) {
    const auto d = fixtures::t2();
    const auto s = dea::solve_bi_crs(d, kT2Extreme, "C", at(0.5));
    EXPECT_FALSE(s.is_self_benchmark());
    oracle::Oracle o(d);
    EXPECT_NEAR(s.objective, o.solve(2, ModelKind::BiCrs, 0.5).objective, 1e-6);
    EXPECT_TRUE(dea::validate_solution(s, d, kT2Extreme).empty());
}

TEST(SelfBenchmark, ExtremeMembersBenchmarkThemselves) {
    const auto d = fixtures::t1();
    for (auto k : {ModelKind::Closest, ModelKind::BiVrs, ModelKind::OrientedOutput, ModelKind::OrientedInput}) {
        const auto s = dea::solve_model(d, kT1Extreme, "B", k, at(0.3));
        EXPECT_TRUE(s.is_self_benchmark());
        EXPECT_EQ(s.reference_set, (std::vector<std::string>{"B"}));
        EXPECT_DOUBLE_EQ(s.objective, 0.0);
        EXPECT_DOUBLE_EQ(s.d_H, 0.0);
        EXPECT_DOUBLE_EQ(s.targets.outputs[0], 5.0);
        EXPECT_TRUE(dea::validate_solution(s, d, kT1Extreme).empty()) << dea::to_string(k);
    }
}

TEST(Models, RejectsMismatchedReturnsToScale) {
    EXPECT_THROW(dea::solve_bi_crs(fixtures::t1(), kT1Extreme, "D"), dea::UsageError);
    EXPECT_THROW(dea::solve_bi_vrs(fixtures::t2(), kT2Extreme, "D"), dea::UsageError);
}

TEST(Models, RejectsUnknownDmuAndBadAlpha) {
    EXPECT_THROW(dea::solve_bi_vrs(fixtures::t1(), kT1Extreme, "Q"), dea::UsageError);
    EXPECT_THROW(dea::solve_bi_vrs(fixtures::t1(), kT1Extreme, "D", at(1.5)), dea::UsageError);
}

TEST(EndpointRefine, LeavesOptimalValueUnchanged) {
    const auto d = fixtures::t1();
    for (double a : {1.0, 0.5, 0.1}) {
        auto opts = at(a);
        opts.endpoint_refine = false;
        const auto raw = dea::solve_bi_vrs(d, kT1Extreme, "D", opts);
        const auto refined = dea::endpoint_refine(raw, d, kT1Extreme, opts);
        EXPECT_NEAR(refined.objective, raw.objective, 1e-9);
        EXPECT_LE(refined.d_H, raw.d_H + 1e-9);
        EXPECT_TRUE(dea::validate_solution(refined, d, kT1Extreme).empty());
    }
}

TEST(EndpointRefine, PicksSmallestPeerSpreadAtAlphaOne) {
    // At alpha = 1 the peer term carries no weight; refinement breaks ties toward the tighter group.
    const auto d = fixtures::t1();
    const auto s = dea::solve_bi_vrs(d, kT1Extreme, "D", at(1.0));
    const auto m = dea::distance_matrix(d, kT1Extreme, dea::DistanceKind::L1);
    EXPECT_NEAR(s.d_H, m.radius("D", s.reference_set), 1e-9);
}

TEST(ValidateSolution, DetectsCorruptedWeights) {
    const auto d = fixtures::t1();
    auto s = dea::solve_bi_vrs(d, kT1Extreme, "D", at(0.5));
    s.lambda[0].second += 0.2;
    EXPECT_TRUE(contains(dea::validate_solution(s, d, kT1Extreme), "recombination"));
}

TEST(ValidateSolution, DetectsOffFrontierTarget) {
    const auto d = fixtures::t1();
    auto s = dea::solve_oriented_output(d, kT1Extreme, "D", at(1.0));
    s.targets.outputs[0] -= 0.5;
    s.output_slacks[0] -= 0.5;
    EXPECT_FALSE(dea::validate_solution(s, d, kT1Extreme).empty());
}

TEST(ValidateSolution, DetectsWrongModelData) {
    const auto s = dea::solve_bi_vrs(fixtures::t1(), kT1Extreme, "D", at(0.5));
    EXPECT_FALSE(dea::validate_solution(s, fixtures::t2(), kT2Extreme).empty());
}

TEST(ModelsProperty, MatchOracleOnRandomInstances) {
    for (unsigned seed = 1; seed <= 25; ++seed) {
        for (auto rts : {dea::Rts::Variable, dea::Rts::Constant}) {
            const auto d = fixtures::random_instance(seed, rts);
            oracle::Oracle o(d);
            const auto e = dea::classify(d).extreme;
            ASSERT_EQ(e, o.extreme()) << seed;
            for (auto k : dea::kAllModelKinds) {
                if (dea::required_rts(k) != rts) {
                    continue;
                }
                for (std::size_t j = 0; j < d.n(); ++j) {
                    if (std::find(e.begin(), e.end(), d.dmus[j].id) != e.end()) {
                        continue;
                    }
                    for (double a : {1.0, 0.5, 0.2}) {
                        const auto want = o.solve(j, k, a);
                        ASSERT_TRUE(want.feasible);
                        const auto got = dea::solve_model(d, e, d.dmus[j].id, k, at(a));
                        EXPECT_NEAR(got.objective, want.objective, 1e-6)
                            << seed << " " << dea::to_string(k) << " " << d.dmus[j].id << " a=" << a;
                        const auto v = dea::validate_solution(got, d, e);
                        EXPECT_TRUE(v.empty()) << seed << " " << (v.empty() ? "" : v.front());
                    }
                }
            }
        }
    }
}

TEST(ModelsProperty, PeerDistanceIsHausdorffRadiusOfReferenceSet) {
    for (unsigned seed = 30; seed <= 45; ++seed) {
        const auto d = fixtures::random_instance(seed, dea::Rts::Variable);
        const auto e = dea::classify(d).extreme;
        const auto m = dea::distance_matrix(d, e, dea::DistanceKind::L1);
        for (const auto& r : d.dmus) {
            const auto s = dea::solve_bi_vrs(d, e, r.id, at(0.4));
            ASSERT_FALSE(s.reference_set.empty());
            EXPECT_NEAR(s.d_H, m.radius(r.id, s.reference_set), 1e-9) << seed << " " << r.id;
            double total = 0.0;
            for (const auto& [id, w] : s.lambda) {
                total += w;
            }
            EXPECT_NEAR(total, 1.0, 1e-7);
        }
    }
}

TEST(ModelsProperty, ProjectionAtAlphaOneEqualsClosestTarget) {
    for (unsigned seed = 50; seed <= 65; ++seed) {
        const auto d = fixtures::random_instance(seed, dea::Rts::Variable);
        const auto e = dea::classify(d).extreme;
        for (const auto& r : d.dmus) {
            const auto c = dea::solve_closest(d, e, r.id);
            const auto b = dea::solve_bi_vrs(d, e, r.id, at(1.0));
            EXPECT_NEAR(b.d_proj, c.objective, 1e-9) << seed << " " << r.id;
        }
    }
}
