#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/rng.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/network.hpp"

namespace dyadnet {

enum class HeterogeneityKind { unrestricted_dyad, additive_node, latent_distance };

inline HeterogeneityKind heterogeneity_from_name(const std::string& s) {
    if (s == "unrestricted_dyad") return HeterogeneityKind::unrestricted_dyad;
    if (s == "additive_node") return HeterogeneityKind::additive_node;
    if (s == "latent_distance") return HeterogeneityKind::latent_distance;
    throw DomainError("unknown heterogeneity variant '" + s + "'");
}

inline std::string to_string(HeterogeneityKind k) {
    switch (k) {
        case HeterogeneityKind::unrestricted_dyad: return "unrestricted_dyad";
        case HeterogeneityKind::additive_node: return "additive_node";
        case HeterogeneityKind::latent_distance: return "latent_distance";
    }
    return "?";
}

/// Fixed-effect generator. Node effects are nu_i = mean + sd * e_i + loading * Z_{i1,0}, so
/// they may depend on the covariate history; unrestricted dyad effects use
/// A_ij = mean + sd * e_ij + loading * |Z_{i1,0} - Z_{j1,0}|. Latent positions are
/// xi_i ~ N(0, xi_sd^2). Non-empty explicit vectors override the corresponding draws.
struct HeterogeneitySpec {
    HeterogeneityKind kind = HeterogeneityKind::additive_node;
    double mean = 0.0;
    double sd = 1.0;
    double covariate_loading = 0.0;
    double xi_sd = 1.0;
    std::vector<double> nu;
    std::vector<double> xi;
    std::vector<double> dyad_effects;  ///< dyad_index order, unrestricted variant only
};

/// Realised fixed effects; `A` is filled for every variant.
struct RealizedHeterogeneity {
    HeterogeneityKind kind = HeterogeneityKind::additive_node;
    int n = 0;
    std::vector<double> nu;
    std::vector<double> xi;
    std::vector<double> A;

    double dyad_effect(int i, int j) const {
        const Dyad d = make_dyad(i, j);
        return A[dyad_index(n, d.i, d.j)];
    }

    bool has_nodes() const { return !nu.empty(); }
    bool has_latent_positions() const { return !xi.empty(); }
};

inline double latent_distance_effect(double nu_i, double nu_j, double xi_i, double xi_j) {
    return (nu_i + nu_j) - std::fabs(xi_i - xi_j);
}

inline RealizedHeterogeneity draw_heterogeneity(const HeterogeneitySpec& spec, int n, const NodeCovariatePanel& z,
                                                std::uint64_t seed) {
    RealizedHeterogeneity h;
    h.kind = spec.kind;
    h.n = n;
    const bool has_z = z.periods() >= 1 && z.dim() >= 1;
    auto z0 = [&](int i) { return has_z ? z(i, 1, 0) : 0.0; };

    if (spec.kind == HeterogeneityKind::unrestricted_dyad) {
        if (!spec.dyad_effects.empty()) {
            if (spec.dyad_effects.size() != dyad_count(n)) throw DomainError("explicit dyad effects have wrong length");
            h.A = spec.dyad_effects;
            return h;
        }
        h.A.resize(dyad_count(n));
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                auto rng = substream(seed, Stream::heterogeneity, static_cast<std::uint64_t>(i) + 1,
                                     static_cast<std::uint64_t>(j) + 1);
                h.A[dyad_index(n, i, j)] =
                    spec.mean + spec.sd * rng.normal() + spec.covariate_loading * std::fabs(z0(i) - z0(j));
            }
        return h;
    }

    if (!spec.nu.empty()) {
        if (spec.nu.size() != static_cast<std::size_t>(n)) throw DomainError("explicit node effects have wrong length");
        h.nu = spec.nu;
    } else {
        h.nu.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            auto rng = substream(seed, Stream::heterogeneity, static_cast<std::uint64_t>(i) + 1, 0);
            h.nu[static_cast<std::size_t>(i)] = spec.mean + spec.sd * rng.normal() + spec.covariate_loading * z0(i);
        }
    }
    if (spec.kind == HeterogeneityKind::latent_distance) {
        if (!spec.xi.empty()) {
            if (spec.xi.size() != static_cast<std::size_t>(n)) throw DomainError("explicit latent positions have wrong length");
            h.xi = spec.xi;
        } else {
            h.xi.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                auto rng = substream(seed, Stream::heterogeneity, static_cast<std::uint64_t>(i) + 1, 1);
                h.xi[static_cast<std::size_t>(i)] = spec.xi_sd * rng.normal();
            }
        }
    }
    h.A.resize(dyad_count(n));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto a = h.nu[static_cast<std::size_t>(i)];
            const auto b = h.nu[static_cast<std::size_t>(j)];
            h.A[dyad_index(n, i, j)] =
                spec.kind == HeterogeneityKind::latent_distance
                    ? latent_distance_effect(a, b, h.xi[static_cast<std::size_t>(i)], h.xi[static_cast<std::size_t>(j)])
                    : a + b;
        }
    return h;
}

}  // namespace dyadnet
