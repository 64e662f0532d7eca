#pragma once

#include <cstdint>
#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/core/rng.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/heterogeneity.hpp"
#include "dyadnet/model/network.hpp"
#include "dyadnet/model/shocks.hpp"
#include "dyadnet/model/statistics.hpp"
#include "dyadnet/model/theta.hpp"

namespace dyadnet {

struct InitialNetworkRule {
    enum class Kind { empty, erdos_renyi, supplied };
    Kind kind = Kind::empty;
    double p = 0.0;
};

/// Draws the date-0 network; `supplied` networks must be passed to simulate_panel directly.
inline NetworkPanel draw_initial_network(const InitialNetworkRule& rule, int n, std::uint64_t seed) {
    NetworkPanel g(n, 0);
    if (rule.kind == InitialNetworkRule::Kind::supplied)
        throw DomainError("a supplied initial network must be passed explicitly");
    if (rule.kind == InitialNetworkRule::Kind::erdos_renyi) {
        if (rule.p < 0.0 || rule.p > 1.0) throw DomainError("Erdos-Renyi probability must lie in [0, 1]");
        auto slice = g.date_slice(0);
        for (int i = 0; i < n; ++i) {
            auto rng = substream(seed, Stream::initial_network, static_cast<std::uint64_t>(i));
            for (int j = i + 1; j < n; ++j) slice[dyad_index(n, i, j)] = rng.bernoulli(rule.p) ? 1 : 0;
        }
    }
    return g;
}

struct ModelSpec {
    int n = 0;
    int T = 0;
    Theta theta0;
    StatisticRegistry registry = StatisticRegistry::standard();
    CovariateSpec covariates;
    HeterogeneitySpec heterogeneity;
    ShockSpec shocks;
    InitialNetworkRule initial;

    void validate() const {
        if (n < 2) throw DomainError("model needs at least two nodes");
        if (T < 1) throw DomainError("model needs at least one post-initial date");
        if (theta0.alpha.size() != static_cast<std::size_t>(covariates.dim))
            throw DomainError("alpha dimension must equal the dyadic covariate dimension");
        if (theta0.lambda.size() != registry.size())
            throw DomainError("lambda dimension must equal the number of registered statistics");
        shocks.validate();
    }
};

/// Everything drawn during simulation that the observed panel does not reveal.
struct SimulationRecord {
    RealizedHeterogeneity heterogeneity;
    int n = 0;
    int T = 0;
    int dx = 0;
    std::vector<double> shocks;  ///< (dyad, t-1)
    std::vector<double> xlag;    ///< (dyad, t-1, k), the X_{ij,t-1} used to form D_{ijt}

    double shock(int i, int j, int t) const {
        const Dyad d = make_dyad(i, j);
        return shocks[dyad_index(n, d.i, d.j) * static_cast<std::size_t>(T) + static_cast<std::size_t>(t - 1)];
    }

    std::span<const double> x_used(int i, int j, int t) const {
        const Dyad d = make_dyad(i, j);
        const std::size_t off =
            (dyad_index(n, d.i, d.j) * static_cast<std::size_t>(T) + static_cast<std::size_t>(t - 1)) *
            static_cast<std::size_t>(dx);
        return {xlag.data() + off, static_cast<std::size_t>(dx)};
    }
};

struct Simulation {
    NetworkPanel panel;
    NodeCovariatePanel covariates;
    SimulationRecord record;
};

/// Components to hold fixed instead of drawing them from the seed.
struct SimulationInputs {
    std::optional<NetworkPanel> initial;  ///< date-0 network (periods() == 0 or more; date 0 is used)
    std::optional<NodeCovariatePanel> covariates;
    std::optional<RealizedHeterogeneity> heterogeneity;
};

/// Forward simulation of D_{ijt} = 1{W_{ijt}(theta0) + A_ij - U_{ijt} >= 0}, t = 1..T.
inline Simulation simulate_panel(const ModelSpec& spec, std::uint64_t seed, const SimulationInputs& inputs = {},
                                 int threads = 1) {
    spec.validate();
    const int n = spec.n;
    const int T = spec.T;
    const auto dyads = dyad_count(n);
    const auto dx = spec.registry.size();
    const auto dh = static_cast<std::size_t>(spec.covariates.dim);

    Simulation sim;
    sim.covariates = inputs.covariates ? *inputs.covariates : draw_covariates(spec.covariates, n, T, seed);
    if (sim.covariates.nodes() != n || sim.covariates.periods() < T || static_cast<std::size_t>(sim.covariates.dim()) != dh)
        throw DomainError("supplied covariates do not match the model shape");
    sim.covariates.validate();

    auto& rec = sim.record;
    rec.n = n;
    rec.T = T;
    rec.dx = static_cast<int>(dx);
    rec.heterogeneity =
        inputs.heterogeneity ? *inputs.heterogeneity : draw_heterogeneity(spec.heterogeneity, n, sim.covariates, seed);
    if (rec.heterogeneity.A.size() != dyads) throw DomainError("supplied heterogeneity does not match node count");

    rec.shocks.resize(dyads * static_cast<std::size_t>(T));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            draw_dyad_shocks(spec.shocks, seed, i, j,
                             std::span<double>(rec.shocks.data() + dyad_index(n, i, j) * static_cast<std::size_t>(T),
                                               static_cast<std::size_t>(T)));
    rec.xlag.assign(dyads * static_cast<std::size_t>(T) * dx, 0.0);

    sim.panel = NetworkPanel(n, T);
    {
        const NetworkPanel g0 = inputs.initial ? *inputs.initial : draw_initial_network(spec.initial, n, seed);
        if (g0.nodes() != n) throw DomainError("initial network has the wrong node count");
        auto dst = sim.panel.date_slice(0);
        auto src = g0.date_slice(0);
        std::copy(src.begin(), src.end(), dst.begin());
    }

    for (int t = 1; t <= T; ++t) {
        const Snapshot lagged(sim.panel, t - 1);
        auto today = sim.panel.date_slice(t);
        parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
            const int i = static_cast<int>(row);
            std::vector<double> z(dh);
            for (int j = i + 1; j < n; ++j) {
                const std::size_t d = dyad_index(n, i, j);
                const std::size_t cell = d * static_cast<std::size_t>(T) + static_cast<std::size_t>(t - 1);
                std::span<double> x(rec.xlag.data() + cell * dx, dx);
                spec.registry.evaluate(lagged, i, j, x);
                const auto zi = sim.covariates.at(i, t);
                const auto zj = sim.covariates.at(j, t);
                for (std::size_t k = 0; k < dh; ++k) z[k] = std::fabs(zi[k] - zj[k]);
                const double w = index_W(spec.theta0, z, x);
                today[d] = (w + rec.heterogeneity.A[d] - rec.shocks[cell] >= 0.0) ? 1 : 0;
            }
        });
    }
    return sim;
}

}  // namespace dyadnet
