#include <gtest/gtest.h>

#include "dea/frontier.hpp"
#include "dea/sweep.hpp"
#include "support/instances.hpp"

using dea::ModelKind;

namespace {

const std::vector<std::string> kT1Extreme{"A", "B", "C"};

}  // namespace

TEST(Grid, DefaultIsTenPointsDescending) {
    const auto g = dea::default_grid();
    ASSERT_EQ(g.size(), 10u);
    EXPECT_DOUBLE_EQ(g.front(), 1.0);
    EXPECT_DOUBLE_EQ(g[3], 0.7);
    EXPECT_DOUBLE_EQ(g.back(), 0.1);
    EXPECT_TRUE(dea::check_grid(g).empty());
}

TEST(Grid, CustomBoundsIncludeBothEnds) {
    const auto g = dea::make_grid(0.5, 0.0, 0.25);
    EXPECT_EQ(g, (std::vector<double>{0.5, 0.25, 0.0}));
}

TEST(Grid, RejectsBadArguments) {
    EXPECT_THROW(dea::make_grid(0.5, 0.6, 0.1), dea::UsageError);
    EXPECT_THROW(dea::make_grid(1.0, 0.1, 0.0), dea::UsageError);
    EXPECT_THROW(dea::make_grid(1.2, 0.1, 0.1), dea::UsageError);
    EXPECT_FALSE(dea::check_grid({0.5, 0.7}).empty());
    EXPECT_FALSE(dea::check_grid({}).empty());
    EXPECT_THROW(dea::alpha_series(fixtures::t1(), kT1Extreme, "D", ModelKind::BiVrs, {0.2, 0.4}),
                 dea::UsageError);
}

TEST(Sweep, DeskSeriesHasOneChangePoint) {
    const auto d = fixtures::t1();
    const auto s = dea::alpha_series(d, kT1Extreme, "D", ModelKind::BiVrs, dea::default_grid());
    ASSERT_EQ(s.solutions.size(), 10u);
    EXPECT_EQ(s.change_points, (std::vector<double>{0.1}));
    for (std::size_t k = 0; k + 1 < s.grid.size(); ++k) {
        EXPECT_NEAR(s.solutions[k].objective, 14.0 / 15.0 - 7.0 * s.grid[k] / 15.0, 1e-9) << s.grid[k];
    }
    EXPECT_NEAR(s.solutions.back().objective, 13.0 / 15.0, 1e-9);

    const auto rows = dea::detect_changes(s);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[0].label, "1..0.2");
    EXPECT_EQ(rows[0].first, 0u);
    EXPECT_EQ(rows[0].last, 8u);
    EXPECT_EQ(rows[1].label, "0.1");
}

TEST(Sweep, EfficientDmuGivesOneRow) {
    const auto s = dea::alpha_series(fixtures::t1(), kT1Extreme, "A", ModelKind::BiVrs, dea::default_grid());
    EXPECT_TRUE(s.change_points.empty());
    const auto rows = dea::detect_changes(s);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].label, "≤ 1");
    EXPECT_TRUE(rows[0].solution->is_self_benchmark());
}

TEST(Sweep, DistinctPointsAreNotMerged) {
    dea::AlphaSeries s;
    s.grid = {0.9, 0.5, 0.1};
    s.solutions.resize(3);
    for (std::size_t k = 0; k < 3; ++k) {
        s.solutions[k].reference_set = {std::string(1, static_cast<char>('A' + k))};
        s.solutions[k].targets.outputs = {1.0};
    }
    const auto rows = dea::detect_changes(s);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].label, "0.9");
    EXPECT_EQ(rows[2].label, "0.1");
    EXPECT_EQ(dea::find_change_points(s), (std::vector<double>{0.5, 0.1}));
}

TEST(Sweep, SameReferenceSetWithMovedTargetsStartsNewRow) {
    dea::AlphaSeries s;
    s.grid = {0.6, 0.4, 0.2};
    s.solutions.resize(3);
    for (std::size_t k = 0; k < 3; ++k) {
        s.solutions[k].reference_set = {"A"};
        s.solutions[k].targets.outputs = {k == 0 ? 2.0 : 3.0};
    }
    const auto rows = dea::detect_changes(s);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_EQ(rows[1].label, "≤ 0.4");
    EXPECT_TRUE(dea::find_change_points(s).empty());
}

TEST(Sweep, ThreadedMatchesSequential) {
    const auto d = fixtures::random_instance(7, dea::Rts::Variable);
    const auto e = dea::classify(d).extreme;
    for (const auto& r : d.dmus) {
        const auto a = dea::alpha_series(d, e, r.id, ModelKind::BiVrs, dea::default_grid(), {}, 1);
        const auto b = dea::alpha_series(d, e, r.id, ModelKind::BiVrs, dea::default_grid(), {}, 4);
        ASSERT_EQ(a.solutions.size(), b.solutions.size());
        for (std::size_t k = 0; k < a.solutions.size(); ++k) {
            EXPECT_EQ(a.solutions[k].objective, b.solutions[k].objective);
            EXPECT_EQ(a.solutions[k].reference_set, b.solutions[k].reference_set);
        }
        EXPECT_EQ(a.change_points, b.change_points);
    }
}

TEST(SweepProperty, TermsAreMonotoneInAlpha) {
    for (unsigned seed = 1; seed <= 20; ++seed) {
        for (auto rts : {dea::Rts::Variable, dea::Rts::Constant}) {
            const auto d = fixtures::random_instance(seed, rts);
            const auto e = dea::classify(d).extreme;
            for (auto k : dea::kAllModelKinds) {
                if (dea::required_rts(k) != rts || k == ModelKind::Closest) {
                    continue;
                }
                for (const auto& r : d.dmus) {
                    const auto s = dea::alpha_series(d, e, r.id, k, dea::default_grid());
                    for (std::size_t i = 1; i < s.solutions.size(); ++i) {
                        // Decreasing alpha shifts weight onto the peer term.
                        EXPECT_LE(s.solutions[i].d_H, s.solutions[i - 1].d_H + 1e-9) << seed << " " << r.id;
                        EXPECT_GE(s.solutions[i].d_proj, s.solutions[i - 1].d_proj - 1e-9) << seed << " " << r.id;
                    }
                }
            }
        }
    }
}
