#include <cmath>

#include <gtest/gtest.h>

#include "dmetrics/analysis.hpp"
#include "dmetrics/error.hpp"

namespace dmetrics {
namespace {

const Domain kDisk = Domain::ball({0.0, 0.0}, 1.0);
const Domain kHalf = Domain::half_space({0.0, 1.0}, 0.0, 4.0);
const Domain kSlit = Domain::slit_disk({0.0, 0.0}, 1.0, {0.0, 0.0}, {1.0, 0.0});

Polyline vertical(double from, double to, int steps) {
  Polyline p;
  for (int i = 0; i <= steps; ++i) p.vertices.push_back({0.0, from + (to - from) * i / steps});
  return p;
}

TEST(Sampling, DeterministicAndInside) {
  const auto a = sample_pairs(kSlit, PairPolicy::uniform, 200, 17, 1e-3);
  const auto b = sample_pairs(kSlit, PairPolicy::uniform, 200, 17, 1e-3);
  ASSERT_EQ(a.pairs.size(), 200u);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    EXPECT_EQ(a.pairs[i].first, b.pairs[i].first);
    EXPECT_EQ(a.pairs[i].second, b.pairs[i].second);
    EXPECT_GT(kSlit.dist_to_boundary(a.pairs[i].first), 1e-3);
    EXPECT_GT(kSlit.dist_to_boundary(a.pairs[i].second), 1e-3);
  }
  EXPECT_GT(min_sample_depth(kSlit, a), 1e-3);
  const auto c = sample_pairs(kSlit, PairPolicy::uniform, 200, 18, 1e-3);
  EXPECT_NE(a.pairs[0].first, c.pairs[0].first);
}

TEST(Sampling, BoundaryBiasedReachesShallowDepths) {
  const auto s = sample_pairs(kDisk, PairPolicy::boundary_biased, 500, 1, 1e-4);
  EXPECT_LT(min_sample_depth(kDisk, s), 1e-2);
  EXPECT_GE(min_sample_depth(kDisk, s), 1e-4 * (1.0 - 1e-9));
}

TEST(Sampling, AdversarialSequences) {
  const auto slit = adversarial_pairs(kSlit);
  ASSERT_FALSE(slit.pairs.empty());
  EXPECT_EQ(slit.policy, PairPolicy::adversarial);
  for (const auto& [x, y] : slit.pairs) {
    EXPECT_TRUE(kSlit.contains(x));
    EXPECT_TRUE(kSlit.contains(y));
    EXPECT_LT(x[1] * y[1], 0.0);
  }
  for (auto p : {PairPolicy::uniform, PairPolicy::boundary_biased, PairPolicy::adversarial}) {
    EXPECT_EQ(parse_pair_policy(to_string(p)), p);
  }
  EXPECT_THROW(parse_pair_policy("random"), InvalidArgument);
}

TEST(Chains, DyadicDoublingOnHalfPlane) {
  const auto path = vertical(0.1, 12.8, 1000);
  const auto chains = dyadic_chain(kHalf, path);
  EXPECT_EQ(chains.from_start.doublings(), 7u);
  EXPECT_EQ(chains.from_end.doublings(), 0u);
  for (std::size_t i = 0; i < chains.from_start.depths.size(); ++i) {
    EXPECT_NEAR(chains.from_start.depths[i], 0.1 * std::pow(2.0, i), 1e-6);
  }
}

TEST(Chains, DiagnosticsOnStraightPath) {
  const auto grid = build_grid(kHalf, 0.1, kHalf.grid_window());
  const auto diag = chain_diagnostics(kHalf, grid, vertical(0.1, 12.8, 400));
  ASSERT_TRUE(diag.finite());
  ASSERT_EQ(diag.links.size(), 7u);
  // Consecutive chain points are d apart on a convex domain.
  for (const auto& link : diag.links) {
    EXPECT_NEAR(link.b2, 1.0, 0.25);
    EXPECT_NEAR(link.b3, 1.0, 1e-9);
  }
}

TEST(Chains, SubArcEndpoints) {
  const auto path = vertical(0.0, 1.0, 4);
  const auto sub = sub_arc(path, {1, 0.5}, {0.0, 0.375}, {3, 0.5}, {0.0, 0.875});
  ASSERT_EQ(sub.vertices.front(), (Point{0.0, 0.375}));
  ASSERT_EQ(sub.vertices.back(), (Point{0.0, 0.875}));
  EXPECT_NEAR(sub.euclidean_length(), 0.5, 1e-15);
}

TEST(Ratios, ArcRatiosOfSegment) {
  Polyline p{{{-0.5, 0.0}, {0.0, 0.0}, {0.5, 0.0}}};
  const auto r = arc_ratios(kDisk, p);
  EXPECT_DOUBLE_EQ(r.length, 1.0);
  EXPECT_DOUBLE_EQ(r.diameter, 1.0);
  // Worst vertex is an end point with zero sub-arc, or the middle: 0.5 / 1.
  EXPECT_NEAR(r.length_cigar, 0.5, 1e-12);
}

TEST(Isotropy, DiskCenterIsIsotropic) {
  const auto atlas = kDisk.boundary_samples(10'000);
  const auto v = quasi_isotropy(kDisk, atlas, {0.0, 0.0}, 0.1, 32);
  EXPECT_NEAR(v.ratio, 1.0, 1e-6);
  EXPECT_GE(v.upper, v.ratio);
  const auto rows = quasi_isotropy_table(kDisk, atlas, {0.3, 0.2});
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows.front().s, 1);
  // Shrinking spheres become round in the hyperbolic metric.
  EXPECT_LT(rows.back().value.ratio, rows.front().value.ratio);
  EXPECT_LT(rows.back().value.ratio, 1.05);
}

class SmallWorkspace : public ::testing::Test {
 protected:
  SmallWorkspace() : ws_(kSlit, 0.04, 4000, 0.05) {}
  Workspace ws_;
};

TEST_F(SmallWorkspace, EvaluationBrackets) {
  const auto e = evaluate_pair(ws_, {-0.3, 0.4}, {0.2, -0.5});
  ASSERT_TRUE(e.ok()) << e.failure;
  EXPECT_TRUE(e.has_lambda && e.has_rho && e.has_alphatilde);
  for (const auto* m : {&e.alpha, &e.k, &e.lambda, &e.rho, &e.jprime, &e.alphatilde}) {
    EXPECT_LE(m->lower, m->value + 1e-12);
    EXPECT_LE(m->value, m->upper + 1e-12);
  }
  EXPECT_LE(e.j.value, e.jprime.upper + 1e-12);
  EXPECT_LE(e.jprime.lower, e.k.value + 1e-12);
  EXPECT_LE(e.alpha.lower, 2.0 * e.j.value + 1e-12);
  EXPECT_LE(e.alphatilde.lower, 2.0 * e.k.value + 1e-12);
}

TEST_F(SmallWorkspace, OptionsDisablePathMetrics) {
  EvaluationOptions o;
  o.lambda = false;
  o.rho = false;
  o.alphatilde = false;
  const auto e = evaluate_pair(ws_, {-0.3, 0.4}, {0.2, -0.5}, o);
  EXPECT_FALSE(e.has_lambda || e.has_rho || e.has_alphatilde);
  EXPECT_GT(e.k.value, 0.0);
}

TEST_F(SmallWorkspace, ReportIsDeterministic) {
  const auto sample = sample_pairs(kSlit, PairPolicy::uniform, 30, 5, 0.05);
  const auto a = evaluate_pairs(ws_, sample);
  const auto b = evaluate_pairs(ws_, sample);
  const auto ra = constants_report(ws_, sample, a, true);
  const auto rb = constants_report(ws_, sample, b, true);
  ASSERT_EQ(ra.constants.size(), rb.constants.size());
  for (std::size_t i = 0; i < ra.constants.size(); ++i) {
    EXPECT_EQ(ra.constants[i].name, rb.constants[i].name);
    EXPECT_EQ(ra.constants[i].estimate, rb.constants[i].estimate);
  }
  EXPECT_EQ(total_failures(ra.inequalities), 0u);
  for (const auto& c : ra.constants) {
    EXPECT_GE(c.estimate, 1.0) << c.name;
    if (c.status == EntryStatus::finite) {
      EXPECT_LE(c.estimate, kDivergenceThreshold) << c.name;
    }
  }
}

TEST(Ratios, NonApollonianEntriesSkipped) {
  const auto d = Domain::punctured_plane({0.0, 0.0});
  Workspace ws(d, 0.05, 2000, 0.05, false);
  const auto sample = sample_pairs(d, PairPolicy::uniform, 10, 3, 0.05);
  EvaluationOptions o;
  o.alphatilde = false;
  const auto evals = evaluate_pairs(ws, sample, o);
  bool saw_skip = false;
  for (const auto& c : ratio_constants(ws, evals)) {
    if (c.name == "K" || c.name == "L" || c.name == "mu5") {
      EXPECT_EQ(c.status, EntryStatus::skipped);
      EXPECT_EQ(c.note, "pseudometric, skipped");
      saw_skip = true;
    }
  }
  EXPECT_TRUE(saw_skip);
}

TEST(Inequalities, DetectsViolation) {
  Workspace ws(kDisk, 0.05, 2000, 0.05);
  auto e = evaluate_pair(ws, {0.0, 0.0}, {0.5, 0.0});
  e.k = MetricValue::exact(0.01);
  const auto checks = verify_inequalities(ws, {e});
  EXPECT_GT(total_failures(checks), 0u);
}

}  // namespace
}  // namespace dmetrics
