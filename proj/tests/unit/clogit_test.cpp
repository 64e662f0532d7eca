#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dyadnet/clogit/exact.hpp"
#include "dyadnet/clogit/fit.hpp"
#include "dyadnet/clogit/latent.hpp"
#include "dyadnet/clogit/rank.hpp"
#include "dyadnet/clogit/sample.hpp"
#include "dyadnet/configurations/config_text.hpp"
#include "dyadnet/configurations/enumerate.hpp"

using namespace dyadnet;

namespace {

ModelSpec logit_spec(int n, int T) {
    ModelSpec spec;
    spec.n = n;
    spec.T = T;
    spec.theta0 = Theta{{-1.0}, {1.0, 0.3}};
    spec.heterogeneity.mean = -1.0;
    spec.heterogeneity.sd = 0.5;
    spec.initial = {InitialNetworkRule::Kind::erdos_renyi, 0.1};
    return spec;
}

std::vector<WeightedConfiguration> family(Family f, int n, int T, std::size_t cap, std::uint64_t seed) {
    FamilySpec fs;
    fs.family = f;
    return enumerate(fs, n, T, cap, seed);
}

std::vector<WeightedConfiguration> balanced_mix(int n, int T, std::size_t per_family, std::uint64_t seed) {
    std::vector<WeightedConfiguration> out;
    for (Family f : {Family::within_date_tetrads, Family::intertemporal_tetrads, Family::triadic_cycles})
        for (auto& c : family(f, n, T, per_family, seed++)) out.push_back(std::move(c));
    return out;
}

ClogitSample handmade(const std::vector<std::vector<double>>& rows, const std::vector<int>& y) {
    ClogitSample s;
    s.dh = 1;
    s.dx = rows.front().size() - 1;
    s.regressors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < rows[r].size(); ++k)
            s.regressors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    s.outcome = y;
    s.config_id.resize(y.size());
    s.family.assign(y.size(), 0);
    s.family_names = {"handmade"};
    return s;
}

}  // namespace

TEST(ExactLogOdds, EqualsContrastForBalancedConfigurations) {
    auto spec = logit_spec(40, 3);
    spec.heterogeneity.sd = 2.0;
    const auto sim = simulate_panel(spec, 3);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const EtaRecord eta(sim, spec.theta0);
    for (const auto& w : balanced_mix(40, 3, 200, 7))
        EXPECT_NEAR(exact_log_odds(w, eta), delta_W(w, spec.theta0, data), 1e-11) << format_config(w);
}

TEST(ExactLogOdds, VanishesAtZeroTheta) {
    const auto spec = logit_spec(30, 2);
    const auto sim = simulate_panel(spec, 4);
    const EtaRecord eta(sim, Theta{{0.0}, {0.0, 0.0}});
    for (const auto& w : balanced_mix(30, 2, 50, 1)) EXPECT_NEAR(exact_log_odds(w, eta), 0.0, 1e-12);
}

TEST(ExactLogOdds, UnbalancedResidualIsTheNodeEffectSum) {
    const auto spec = logit_spec(20, 2);
    const auto sim = simulate_panel(spec, 5);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const EtaRecord eta(sim, spec.theta0);
    for (const char* text : {"+0,1,1 | -0,2,1", "+0,1,1;+0,2,1 | -0,1,2", "+3,4,2;+4,5,1 | -3,5,1"}) {
        const auto cfg = to_signed(parse_config(text));
        EXPECT_FALSE(is_node_balanced(cfg));
        EXPECT_THROW(exact_log_odds(cfg, eta), DomainError);
        EXPECT_NEAR(bernoulli_log_odds(cfg, eta) - delta_W(cfg, spec.theta0, data),
                    node_effect_residual(cfg, sim.record.heterogeneity.nu), 1e-11)
            << text;
    }
}

TEST(ExactLogOdds, InvariantToCommonNodeEffectShift) {
    const auto spec = logit_spec(30, 2);
    const auto sim = simulate_panel(spec, 6);
    auto shifted = sim;
    for (auto& v : shifted.record.heterogeneity.nu) v += 0.75;
    for (auto& a : shifted.record.heterogeneity.A) a += 1.5;
    const EtaRecord e1(sim, spec.theta0), e2(shifted, spec.theta0);
    for (const auto& w : balanced_mix(30, 2, 60, 3)) EXPECT_NEAR(exact_log_odds(w, e1), exact_log_odds(w, e2), 1e-11);
    const auto star = to_signed(parse_config("+0,1,1 | -0,2,1;-0,3,1"));
    // Node incidences sum to -2, so the log-odds move by -2 * 0.75.
    EXPECT_NEAR(bernoulli_log_odds(star, e2) - bernoulli_log_odds(star, e1), -1.5, 1e-11);
}

TEST(BuildSample, FullyLinkedPanelIsUninformative) {
    const int n = 8, T = 2;
    NetworkPanel g(n, T);
    for (int t = 0; t <= T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) g.set_link(i, j, t, true);
    const Dataset data(g, NodeCovariatePanel(n, T, 1), StatisticRegistry::standard());
    const auto configs = balanced_mix(n, T, 100, 2);
    const auto s = build_sample(data, configs);
    EXPECT_TRUE(s.empty());
    EXPECT_EQ(s.configurations_seen, configs.size());
}

TEST(BuildSample, InformativeRowsMatchDirectCount) {
    const auto spec = logit_spec(40, 2);
    const auto sim = simulate_panel(spec, 8);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const auto configs = balanced_mix(40, 2, 500, 4);
    std::size_t informative = 0;
    for (const auto& w : configs) {
        const auto c = to_signed(w);
        bool all_plus = true, all_minus = true;
        for (const auto& e : c.plus) {
            all_plus = all_plus && data.link(e.i, e.j, e.t);
            all_minus = all_minus && !data.link(e.i, e.j, e.t);
        }
        for (const auto& e : c.minus) {
            all_plus = all_plus && !data.link(e.i, e.j, e.t);
            all_minus = all_minus && data.link(e.i, e.j, e.t);
        }
        informative += all_plus != all_minus ? 1 : 0;
    }
    const auto s = build_sample(data, configs);
    EXPECT_EQ(s.rows(), informative);
    EXPECT_GT(informative, 0u);
    for (std::size_t r = 0; r < s.rows(); ++r) {
        const auto expect = delta_regressors(configs[s.config_id[r]], data);
        for (std::size_t k = 0; k < s.dim(); ++k)
            EXPECT_EQ(s.regressors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)), expect[k]);
    }
}

TEST(BuildSample, DuplicatesAreKeptAndUnbalancedInputRejected) {
    const auto spec = logit_spec(40, 2);
    const auto sim = simulate_panel(spec, 9);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const auto base = build_sample(data, balanced_mix(40, 2, 300, 5));
    ASSERT_FALSE(base.empty());
    const auto src = balanced_mix(40, 2, 300, 5)[base.config_id[0]];
    const auto dup = build_sample(data, std::vector<WeightedConfiguration>{src, src});
    ASSERT_EQ(dup.rows(), 2u);
    EXPECT_EQ(dup.regressors.row(0), dup.regressors.row(1));
    EXPECT_EQ(matrix_rank(dup.regressors).rank, matrix_rank(dup.regressors.topRows(1)).rank);
    EXPECT_THROW(build_sample(data, {parse_config("+0,1,1 | -0,2,1")}), DomainError);
}

TEST(BuildSample, CsvHasOneLinePerRow) {
    const auto s = handmade({{1.0, 2.0}, {-1.0, 0.5}}, {1, 0});
    std::ostringstream os;
    write_sample_csv(os, s);
    EXPECT_EQ(os.str(), "config_id,family,d1,d2,outcome\n0,handmade,1,2,1\n0,handmade,-1,0.5,0\n");
}

TEST(ClogitFit, GradientAndHessianMatchFiniteDifferences) {
    const auto spec = logit_spec(50, 2);
    const auto sim = simulate_panel(spec, 10);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const auto s = build_sample(data, balanced_mix(50, 2, 3000, 6));
    const Theta at{{-0.5}, {0.7, 0.1}};
    Eigen::VectorXd g;
    Eigen::MatrixXd H;
    clogit_loglik(s, at, &g, &H);
    const double h = 1e-5;
    const auto v = at.stacked();
    for (std::size_t k = 0; k < v.size(); ++k) {
        auto up = v, dn = v;
        up[k] += h;
        dn[k] -= h;
        const double fd = (clogit_loglik(s, Theta::from_stacked(up, 1)) - clogit_loglik(s, Theta::from_stacked(dn, 1))) / (2 * h);
        EXPECT_NEAR(g(static_cast<Eigen::Index>(k)), fd, 1e-5 * (1.0 + std::fabs(fd)));
        Eigen::VectorXd gu, gd;
        clogit_loglik(s, Theta::from_stacked(up, 1), &gu);
        clogit_loglik(s, Theta::from_stacked(dn, 1), &gd);
        const Eigen::VectorXd col = (gu - gd) / (2 * h);
        EXPECT_LT((H.col(static_cast<Eigen::Index>(k)) - col).lpNorm<Eigen::Infinity>(), 1e-4 * (1.0 + col.norm()));
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    EXPECT_LT(es.eigenvalues().maxCoeff(), 0.0);
}

TEST(ClogitFit, ConvergesToStationaryPointIndependentOfThreads) {
    const auto spec = logit_spec(80, 3);
    const auto sim = simulate_panel(spec, 11);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const auto s = build_sample(data, family(Family::within_date_tetrads, 80, 3, 20000, 1), "within_date_tetrads");
    FitOptions one, three;
    three.threads = 3;
    const auto a = fit(s, Theta{{0.0}, {0.0, 0.0}}, one);
    const auto b = fit(s, Theta{{0.0}, {0.0, 0.0}}, three);
    EXPECT_TRUE(a.converged);
    EXPECT_LT(a.gradient_norm, 1e-6);
    EXPECT_EQ(a.theta.stacked(), b.theta.stacked());
    EXPECT_EQ(a.loglik, b.loglik);
}

TEST(ClogitFit, ZeroColumnRaisesIdentificationFailureWithNullSpace) {
    const auto s = handmade({{1.0, 0.0}, {-0.5, 0.0}, {2.0, 0.0}, {0.3, 0.0}}, {1, 0, 0, 1});
    try {
        fit(s, Theta{{0.0}, {0.0}});
        FAIL() << "expected PointIdentificationFailure";
    } catch (const PointIdentificationFailure& e) {
        ASSERT_EQ(e.null_space().cols(), 1);
        EXPECT_NEAR(std::fabs(e.null_space()(1, 0)), 1.0, 1e-12);
        EXPECT_NEAR(e.null_space()(0, 0), 0.0, 1e-12);
    }
}

TEST(ClogitFit, PerfectSeparationIsReported) {
    const auto s = handmade({{1.0}, {2.0}, {0.5}, {-1.0}, {-3.0}}, {1, 1, 1, 0, 0});
    EXPECT_THROW(fit(s, Theta{{0.0}, {}}), Separation);
    EXPECT_THROW(fit(ClogitSample{}, Theta{}), DomainError);
}

TEST(RankCheck, ConstantCovariateLeavesAlphaUnidentified) {
    auto spec = logit_spec(60, 3);
    spec.covariates.support = {0.0};
    const auto sim = simulate_panel(spec, 12);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const auto s = build_sample(data, balanced_mix(60, 3, 2000, 8));
    const auto rc = rank_check(s);
    EXPECT_EQ(rc.overall.rank, 2);
    ASSERT_EQ(rc.overall.null_space.cols(), 1);
    EXPECT_NEAR(std::fabs(rc.overall.null_space(0, 0)), 1.0, 1e-10);
    EXPECT_THROW(fit(s, spec.theta0), PointIdentificationFailure);
}

TEST(RankCheck, CrossDateFamilyRestoresRankLostToDateLevelStatistic) {
    auto spec = logit_spec(60, 3);
    spec.registry = StatisticRegistry();
    spec.registry.add(BuiltinStatistic::lagged_link);
    spec.registry.add("lagged_density", [](const Snapshot& g, int, int) {
        double deg = 0.0;
        for (int m = 0; m < g.nodes(); ++m) deg += g.degree(m);
        return deg / (static_cast<double>(g.nodes()) * (g.nodes() - 1));
    });
    spec.theta0 = Theta{{-1.0}, {1.0, 0.5}};
    const auto sim = simulate_panel(spec, 13);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const std::vector<ConfigBatch> batches{
        {"within_date_tetrads", family(Family::within_date_tetrads, 60, 3, 3000, 1)},
        {"intertemporal_tetrads", family(Family::intertemporal_tetrads, 60, 3, 3000, 2)},
        {"triadic_cycles", family(Family::triadic_cycles, 60, 3, 3000, 3)}};
    // A date-level statistic cancels inside every within-date tetrad; either cross-date family
    // brings it back.
    EXPECT_EQ(matrix_rank(build_sample(data, batches[0].configs).regressors).rank, 2);
    EXPECT_EQ(matrix_rank(build_sample(data, batches[1].configs).regressors).rank, 3);
    EXPECT_EQ(matrix_rank(build_sample(data, batches[2].configs).regressors).rank, 3);
    const auto rc = rank_check(build_sample(data, batches));
    ASSERT_EQ(rc.cumulative.size(), 3u);
    EXPECT_EQ(rc.cumulative[0].rank, 2);
    EXPECT_EQ(rc.cumulative[1].rank, 3);
    EXPECT_EQ(rc.completing_family, "intertemporal_tetrads");
    EXPECT_TRUE(rc.spans());
}

TEST(LatentDiagnostic, ResidualVanishesForEqualPositions) {
    for (const auto& w : balanced_mix(10, 2, 40, 9)) EXPECT_EQ(latent_residual(to_signed(w), std::vector<double>(10, 0.3)), 0.0);
    EXPECT_EQ(latent_residual(to_signed(parse_config("+0,1,1;+2,3,1 | -0,2,1;-1,3,1")), {0, 1, 0, 1}), -2.0);
}

TEST(LatentDiagnostic, IdentityHoldsAndMissingPositionsThrow) {
    auto spec = logit_spec(60, 2);
    spec.heterogeneity.kind = HeterogeneityKind::latent_distance;
    const auto sim = simulate_panel(spec, 14);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const auto configs = family(Family::within_date_tetrads, 60, 2, 5000, 4);
    const auto d = latent_distance_diagnostic(sim, data, spec.theta0, configs);
    EXPECT_EQ(d.configurations, configs.size());
    EXPECT_LT(d.max_identity_error, 1e-10);
    EXPECT_GT(d.nonzero_residuals, 0u);
    EXPECT_LE(d.residual_min, d.residual_mean);
    EXPECT_LE(d.residual_mean, d.residual_max);
    if (d.naive_fit) EXPECT_EQ(d.naive_bias.size(), spec.theta0.dim());

    const auto plain = simulate_panel(logit_spec(20, 2), 14);
    const Dataset pdata(plain.panel, plain.covariates, spec.registry);
    EXPECT_THROW(latent_distance_diagnostic(plain, pdata, spec.theta0, configs, false), DomainError);
}

TEST(ClogitFit, CrossDateCyclesAreBiasedByLaggedOutcomeFeedback) {
    // A triadic cycle repeats a dyad at two dates, so the later cell's lagged link is the earlier
    // cell's outcome and the conditional likelihood no longer isolates theta. Within-date tetrads
    // on the same panel stay close to the truth.
    const auto spec = logit_spec(100, 3);
    const auto sim = simulate_panel(spec, 21);
    const Dataset data(sim.panel, sim.covariates, spec.registry);
    const Theta init{{0.0}, {0.0, 0.0}};
    const auto cycles = fit(build_sample(data, family(Family::triadic_cycles, 100, 3, 20000, 1)), init);
    const auto tetrads = fit(build_sample(data, family(Family::within_date_tetrads, 100, 3, 20000, 1)), init);
    EXPECT_LT(cycles.theta.lambda[0], 0.0);
    EXPECT_NEAR(tetrads.theta.lambda[0], spec.theta0.lambda[0], 0.5);
}
