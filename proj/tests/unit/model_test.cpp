#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "dyadnet/core/rng.hpp"
#include "dyadnet/core/text.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/dataset.hpp"
#include "dyadnet/model/panel_io.hpp"
#include "dyadnet/model/simulate.hpp"
#include "dyadnet/model/statistics.hpp"

using namespace dyadnet;

namespace {

NetworkPanel erdos_renyi(int n, double p, std::uint64_t seed) {
    NetworkPanel g(n, 1);
    std::mt19937_64 gen(seed);
    std::bernoulli_distribution b(p);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) g.set_link(i, j, 0, b(gen));
    return g;
}

ModelSpec small_spec(int n, int T) {
    ModelSpec spec;
    spec.n = n;
    spec.T = T;
    spec.theta0 = Theta{{-1.0}, {1.0, 0.3}};
    spec.heterogeneity.mean = -1.0;
    spec.heterogeneity.sd = 0.5;
    spec.initial = {InitialNetworkRule::Kind::erdos_renyi, 0.1};
    return spec;
}

double link_frequency(const NetworkPanel& g, int t) {
    const auto s = g.date_slice(t);
    return static_cast<double>(std::count(s.begin(), s.end(), 1)) / static_cast<double>(s.size());
}

}  // namespace

TEST(DyadicCovariates, CoordinateWiseAbsoluteDifference) {
    NodeCovariatePanel z(2, 1, 2);
    z.at(0, 1)[0] = 1;
    z.at(0, 1)[1] = 3;
    z.at(1, 1)[0] = 4;
    z.at(1, 1)[1] = 1;
    EXPECT_EQ(dyadic_covariates(z, 0, 1, 1), (std::vector<double>{3, 2}));
    EXPECT_EQ(dyadic_covariates(z, 1, 0, 1), (std::vector<double>{3, 2}));
}

TEST(DyadicCovariates, EqualCovariatesGiveZero) {
    NodeCovariatePanel z(2, 1, 3);
    for (int k = 0; k < 3; ++k) z.at(0, 1)[k] = z.at(1, 1)[k] = 0.25 * k;
    EXPECT_EQ(dyadic_covariates(z, 0, 1, 1), (std::vector<double>{0, 0, 0}));
}

TEST(DyadicCovariates, MatchesCoordinateLoopOnRandomCovariates) {
    CovariateSpec cs;
    cs.dim = 3;
    cs.discrete = false;
    const auto z = draw_covariates(cs, 15, 4, 7);
    for (int t = 1; t <= 4; ++t)
        for (int i = 0; i < 15; ++i)
            for (int j = 0; j < 15; ++j) {
                if (i == j) continue;
                const auto d = dyadic_covariates(z, i, j, t);
                for (int k = 0; k < 3; ++k) EXPECT_EQ(d[static_cast<std::size_t>(k)], std::abs(z(i, t, k) - z(j, t, k)));
            }
}

TEST(DyadicCovariates, RejectsSelfPairAndBadDate) {
    NodeCovariatePanel z(3, 2, 1);
    EXPECT_THROW(dyadic_covariates(z, 1, 1, 1), DomainError);
    EXPECT_THROW(dyadic_covariates(z, 0, 1, 3), DomainError);
    EXPECT_THROW(dyadic_covariates(z, 0, 5, 1), DomainError);
}

TEST(Covariates, DiscreteDrawsStayOnSupport) {
    CovariateSpec cs;
    cs.dim = 2;
    cs.support = {-1, 0, 2};
    cs.persistence = 0.4;
    const auto z = draw_covariates(cs, 30, 5, 3);
    for (int i = 0; i < 30; ++i)
        for (int t = 1; t <= 5; ++t)
            for (double v : z.at(i, t)) EXPECT_TRUE(v == -1 || v == 0 || v == 2);
}

TEST(LaggedStats, EmptyNetworkGivesZeros) {
    NetworkPanel g(5, 1);
    EXPECT_EQ(lagged_stats(g, StatisticRegistry::standard(), 0, 1, 1), (std::vector<double>{0, 0}));
}

TEST(LaggedStats, TriangleHasOneCommonFriend) {
    NetworkPanel g(4, 1);
    g.set_link(0, 1, 0, true);
    g.set_link(1, 2, 0, true);
    g.set_link(0, 2, 0, true);
    EXPECT_EQ(lagged_stats(g, StatisticRegistry::standard(), 0, 1, 1), (std::vector<double>{1, 1}));
}

TEST(LaggedStats, DateZeroHasNoLag) {
    NetworkPanel g(4, 2);
    EXPECT_THROW(lagged_stats(g, StatisticRegistry::standard(), 0, 1, 0), DomainError);
}

TEST(LaggedStats, CommonFriendsMatchTripleLoop) {
    const auto g = erdos_renyi(70, 0.2, 11);
    const auto reg = StatisticRegistry::standard();
    for (int i = 0; i < 70; ++i)
        for (int j = i + 1; j < 70; ++j) {
            int brute = 0;
            for (int k = 0; k < 70; ++k)
                if (k != i && k != j && g.link(i, k, 0) && g.link(j, k, 0)) ++brute;
            const auto x = lagged_stats(g, reg, i, j, 1);
            ASSERT_EQ(x[1], brute);
            ASSERT_EQ(x[0], g.link(i, j, 0) ? 1.0 : 0.0);
        }
}

TEST(LaggedStats, FriendsOfFriendsMatchDefinition) {
    const auto g = erdos_renyi(40, 0.1, 5);
    StatisticRegistry reg;
    reg.add(BuiltinStatistic::friends_of_friends);
    for (int i = 0; i < 40; ++i)
        for (int j = i + 1; j < 40; ++j) {
            int brute = 0;
            for (int k = 0; k < 40; ++k) {
                if (k == i || k == j || g.link(i, k, 0)) continue;
                bool path = false;
                for (int m = 0; m < 40 && !path; ++m)
                    path = m != i && m != j && m != k && g.link(i, m, 0) && g.link(m, k, 0);
                brute += path ? 1 : 0;
            }
            ASSERT_EQ(lagged_stats(g, reg, i, j, 1)[0], brute);
        }
}

TEST(LaggedStats, UserStatisticUsesLaggedNetwork) {
    StatisticRegistry reg;
    reg.add("degree_sum", [](const Snapshot& s, int i, int j) { return static_cast<double>(s.degree(i) + s.degree(j)); });
    NetworkPanel g(4, 2);
    g.set_link(0, 2, 0, true);
    g.set_link(0, 3, 1, true);
    g.set_link(1, 3, 1, true);
    EXPECT_EQ(lagged_stats(g, reg, 0, 1, 1)[0], 1.0);
    EXPECT_EQ(lagged_stats(g, reg, 0, 1, 2)[0], 2.0);
}

TEST(IndexW, ZeroThetaGivesZero) {
    const std::vector<double> z{0.3, 2}, x{1, 7};
    EXPECT_EQ(index_W(Theta{{0, 0}, {0, 0}}, z, x), 0.0);
}

TEST(IndexW, Arithmetic) {
    const std::vector<double> z{0.5}, x{1, 1};
    EXPECT_DOUBLE_EQ(index_W(Theta{{2}, {1, -1}}, z, x), 1.0);
}

TEST(IndexW, MatchesNaiveDotProduct) {
    std::mt19937_64 gen(3);
    std::normal_distribution<double> nd;
    for (int rep = 0; rep < 200; ++rep) {
        Theta th{{nd(gen), nd(gen)}, {nd(gen), nd(gen), nd(gen)}};
        std::vector<double> z{nd(gen), nd(gen)}, x{nd(gen), nd(gen), nd(gen)};
        double naive = 0;
        for (int k = 0; k < 2; ++k) naive += th.alpha[k] * z[k];
        for (int k = 0; k < 3; ++k) naive += th.lambda[k] * x[k];
        EXPECT_NEAR(index_W(th, z, x), naive, 1e-14 * (1 + std::abs(naive)));
    }
}

TEST(IndexW, DimensionMismatchIsDomainError) {
    const std::vector<double> z{1, 2}, x{1};
    EXPECT_THROW(index_W(Theta{{1}, {1}}, z, x), DomainError);
}

TEST(Simulate, ZeroIndexGivesHalfLinkFrequency) {
    ModelSpec spec;
    spec.n = 200;
    spec.T = 1;
    spec.theta0 = Theta{{0.0}, {0.0, 0.0}};
    spec.heterogeneity.mean = 0;
    spec.heterogeneity.sd = 0;
    const auto sim = simulate_panel(spec, 1);
    const double f = link_frequency(sim.panel, 1);
    const double se = std::sqrt(0.25 / static_cast<double>(sim.panel.dyads()));
    EXPECT_LT(std::abs(f - 0.5), 3 * se);
}

TEST(Simulate, ConstantNodeEffectsGiveLogisticFrequency) {
    const double a = -0.6;
    ModelSpec spec;
    spec.n = 200;
    spec.T = 1;
    spec.theta0 = Theta{{0.0}, {0.0, 0.0}};
    spec.heterogeneity.nu.assign(200, a);
    const auto sim = simulate_panel(spec, 2);
    const double p = logistic_cdf(2 * a);
    const double se = std::sqrt(p * (1 - p) / static_cast<double>(sim.panel.dyads()));
    EXPECT_LT(std::abs(link_frequency(sim.panel, 1) - p), 3 * se);
}

TEST(Simulate, SameSeedIsBitIdentical) {
    const auto spec = small_spec(40, 3);
    const auto a = simulate_panel(spec, 9);
    const auto b = simulate_panel(spec, 9, {}, 3);
    EXPECT_EQ(panel_to_string(a.panel, a.covariates, 2), panel_to_string(b.panel, b.covariates, 2));
    EXPECT_EQ(a.record.shocks, b.record.shocks);
    const auto c = simulate_panel(spec, 10);
    EXPECT_NE(panel_to_string(a.panel, a.covariates, 2), panel_to_string(c.panel, c.covariates, 2));
}

TEST(Simulate, LinksAreSymmetric) {
    const auto sim = simulate_panel(small_spec(25, 2), 4);
    for (int t = 0; t <= 2; ++t)
        for (int i = 0; i < 25; ++i)
            for (int j = 0; j < 25; ++j)
                if (i != j) ASSERT_EQ(sim.panel.link(i, j, t), sim.panel.link(j, i, t));
}

TEST(Simulate, RecomputedLagsMatchSimulationRecord) {
    const auto spec = small_spec(30, 4);
    const auto sim = simulate_panel(spec, 6);
    for (int t = 1; t <= 4; ++t)
        for (int i = 0; i < 30; ++i)
            for (int j = i + 1; j < 30; ++j) {
                const auto x = lagged_stats(sim.panel, spec.registry, i, j, t);
                const auto used = sim.record.x_used(i, j, t);
                ASSERT_TRUE(std::equal(x.begin(), x.end(), used.begin(), used.end()));
            }
}

TEST(Simulate, LinksFollowTheThresholdRule) {
    const auto spec = small_spec(30, 3);
    const auto sim = simulate_panel(spec, 8);
    for (int t = 1; t <= 3; ++t)
        for (int i = 0; i < 30; ++i)
            for (int j = i + 1; j < 30; ++j) {
                const double w = index_W(spec.theta0, dyadic_covariates(sim.covariates, i, j, t), sim.record.x_used(i, j, t));
                const bool d = w + sim.record.heterogeneity.dyad_effect(i, j) - sim.record.shock(i, j, t) >= 0;
                ASSERT_EQ(d, sim.panel.link(i, j, t));
            }
}

TEST(Simulate, GrowingTLeavesEarlierDatesUntouched) {
    auto spec = small_spec(30, 2);
    const auto short_run = simulate_panel(spec, 12);
    spec.T = 4;
    const auto long_run = simulate_panel(spec, 12);
    for (int t = 0; t <= 2; ++t) {
        const auto a = short_run.panel.date_slice(t);
        const auto b = long_run.panel.date_slice(t);
        EXPECT_TRUE(std::equal(a.begin(), a.end(), b.begin()));
    }
    for (int i = 0; i < 30; ++i)
        for (int j = i + 1; j < 30; ++j)
            for (int t = 1; t <= 2; ++t) EXPECT_EQ(short_run.record.shock(i, j, t), long_run.record.shock(i, j, t));
}

TEST(Simulate, ConditionalFrequencyHoldingStateFixed) {
    // Covariates, fixed effects and the initial network are held fixed; only the shocks vary
    // across replications, so each dyad links with probability Lambda(W + A).
    auto spec = small_spec(12, 1);
    const auto base = simulate_panel(spec, 1);
    SimulationInputs in;
    in.covariates = base.covariates;
    in.heterogeneity = base.record.heterogeneity;
    in.initial = base.panel;
    const int reps = 4000;
    const std::pair<int, int> dyads[] = {{0, 1}, {2, 7}, {4, 11}};
    int hits[3] = {0, 0, 0};
    for (int r = 0; r < reps; ++r) {
        const auto sim = simulate_panel(spec, 1000 + static_cast<std::uint64_t>(r), in);
        for (int k = 0; k < 3; ++k) hits[k] += sim.panel.link(dyads[k].first, dyads[k].second, 1) ? 1 : 0;
    }
    for (int k = 0; k < 3; ++k) {
        const auto [i, j] = dyads[k];
        const double w = index_W(spec.theta0, dyadic_covariates(base.covariates, i, j, 1),
                                 lagged_stats(base.panel, spec.registry, i, j, 1));
        const double p = logistic_cdf(w + base.record.heterogeneity.dyad_effect(i, j));
        const double se = std::sqrt(p * (1 - p) / reps);
        EXPECT_LT(std::abs(hits[k] / double(reps) - p), 3 * se) << "dyad " << i << "," << j;
    }
}

TEST(Simulate, Ar1CopulaWithZeroRhoMatchesIidMarginal) {
    // Two-sample Kolmogorov-Smirnov on per-panel link frequencies over 20 seeds each.
    auto spec = small_spec(60, 2);
    spec.shocks = ShockSpec::iid(Marginal::normal());
    std::vector<double> a, b;
    for (int s = 0; s < 20; ++s) {
        a.push_back(link_frequency(simulate_panel(spec, 100 + static_cast<std::uint64_t>(s)).panel, 2));
        auto ar = spec;
        ar.shocks = ShockSpec::ar1_copula(0.0, Marginal::normal());
        b.push_back(link_frequency(simulate_panel(ar, 500 + static_cast<std::uint64_t>(s)).panel, 2));
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0;
    for (double x : a) {
        const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / 20;
        const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / 20;
        d = std::max(d, std::abs(fa - fb));
    }
    for (double x : b) {
        const double fa = static_cast<double>(std::upper_bound(a.begin(), a.end(), x) - a.begin()) / 20;
        const double fb = static_cast<double>(std::upper_bound(b.begin(), b.end(), x) - b.begin()) / 20;
        d = std::max(d, std::abs(fa - fb));
    }
    // Asymptotic 1% critical value c(0.01) * sqrt((n + m) / (n m)).
    EXPECT_LT(d, 1.628 * std::sqrt(40.0 / 400.0));
}

TEST(Simulate, Ar1CopulaShocksAreSeriallyCorrelated) {
    auto spec = small_spec(80, 2);
    spec.shocks = ShockSpec::ar1_copula(0.8, Marginal::normal());
    const auto sim = simulate_panel(spec, 3);
    double sxy = 0, sxx = 0, syy = 0;
    for (int i = 0; i < 80; ++i)
        for (int j = i + 1; j < 80; ++j) {
            const double x = sim.record.shock(i, j, 1), y = sim.record.shock(i, j, 2);
            sxy += x * y;
            sxx += x * x;
            syy += y * y;
        }
    EXPECT_NEAR(sxy / std::sqrt(sxx * syy), 0.8, 0.03);
}

TEST(Heterogeneity, LatentDistanceEffectIsExact) {
    auto spec = small_spec(20, 1);
    spec.heterogeneity.kind = HeterogeneityKind::latent_distance;
    const auto sim = simulate_panel(spec, 5);
    const auto& h = sim.record.heterogeneity;
    ASSERT_EQ(h.xi.size(), 20u);
    for (int i = 0; i < 20; ++i)
        for (int j = i + 1; j < 20; ++j)
            EXPECT_EQ(h.dyad_effect(i, j), h.nu[i] + h.nu[j] - std::abs(h.xi[i] - h.xi[j]));
}

TEST(Heterogeneity, UnrestrictedEffectsAreSymmetric) {
    auto spec = small_spec(20, 1);
    spec.heterogeneity.kind = HeterogeneityKind::unrestricted_dyad;
    const auto sim = simulate_panel(spec, 5);
    for (int i = 0; i < 20; ++i)
        for (int j = i + 1; j < 20; ++j) EXPECT_EQ(sim.record.heterogeneity.dyad_effect(i, j), sim.record.heterogeneity.dyad_effect(j, i));
}

TEST(PanelIo, RoundTripIsExact) {
    auto spec = small_spec(15, 3);
    spec.covariates.discrete = false;
    spec.covariates.dim = 2;
    spec.theta0.alpha = {0.5, -0.25};
    const auto sim = simulate_panel(spec, 21);
    const auto text = panel_to_string(sim.panel, sim.covariates, 2);
    const auto back = panel_from_string(text);
    EXPECT_EQ(back.dx, 2);
    EXPECT_EQ(panel_to_string(back.panel, back.covariates, back.dx), text);
    for (int i = 0; i < 15; ++i)
        for (int t = 1; t <= 3; ++t)
            for (int k = 0; k < 2; ++k) EXPECT_EQ(back.covariates(i, t, k), sim.covariates(i, t, k));
}

TEST(PanelIo, MalformedInputNamesTheLine) {
    const std::string bad = "dyadnet-panel 1\n3 1 1 2\nsupport 0 1\nlinks\n0 1 0 1\n0 2 0 7\n";
    try {
        panel_from_string(bad);
        FAIL() << "expected an error";
    } catch (const std::exception& e) {
        EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
    }
}

TEST(Rng, SubstreamsAreReproducibleAndDistinct) {
    auto a = substream(1, Stream::shock, 2, 3);
    auto b = substream(1, Stream::shock, 2, 3);
    auto c = substream(1, Stream::shock, 3, 2);
    const auto x = a();
    EXPECT_EQ(x, b());
    EXPECT_NE(x, c());
}

TEST(Text, DoublesRoundTrip) {
    std::mt19937_64 gen(1);
    std::normal_distribution<double> nd(0, 1e3);
    for (int k = 0; k < 1000; ++k) {
        const double v = nd(gen);
        EXPECT_EQ(parse_double(format_double(v)), v);
    }
    EXPECT_THROW(parse_double("1.5x"), DomainError);
}
