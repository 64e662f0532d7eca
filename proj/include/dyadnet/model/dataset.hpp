#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/core/text.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/network.hpp"
#include "dyadnet/model/statistics.hpp"
#include "dyadnet/model/theta.hpp"

namespace dyadnet {

/// Maps continuous covariates to conditioning bins. Empty edge lists mean exact matching,
/// which is the right choice for discrete covariates.
struct CovariateBinning {
    std::vector<double> node_edges;
    std::vector<double> dyad_edges;

    static double bin(const std::vector<double>& edges, double v) {
        if (edges.empty()) return v;
        return static_cast<double>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin());
    }
};

/// Observed data with the per-cell design (Z_ijt, X_ij,t-1) precomputed, plus integer codes for
/// node histories Z_i^{1:T} and dyad histories Z_ij^{1:T} used as conditioning cells.
class Dataset {
public:
    Dataset(NetworkPanel panel, NodeCovariatePanel z, StatisticRegistry registry, int threads = 1,
            CovariateBinning binning = {})
        : panel_(std::move(panel)), z_(std::move(z)), registry_(std::move(registry)) {
        n_ = panel_.nodes();
        T_ = panel_.periods();
        if (T_ < 1) throw DomainError("dataset needs at least one post-initial date");
        if (z_.nodes() != n_ || z_.periods() < T_) throw DomainError("covariates do not cover the panel");
        z_.validate();
        dh_ = static_cast<std::size_t>(z_.dim());
        dx_ = registry_.size();
        const std::size_t cells = panel_.dyads() * static_cast<std::size_t>(T_);
        zd_.assign(cells * dh_, 0.0);
        xd_.assign(cells * dx_, 0.0);
        for (int t = 1; t <= T_; ++t) {
            const Snapshot lagged(panel_, t - 1);
            parallel_for(static_cast<std::size_t>(n_), threads, [&](std::size_t row) {
                const int i = static_cast<int>(row);
                for (int j = i + 1; j < n_; ++j) {
                    const std::size_t c = cell_index(dyad_index(n_, i, j), t);
                    registry_.evaluate(lagged, i, j, std::span<double>(xd_.data() + c * dx_, dx_));
                    const auto zi = z_.at(i, t);
                    const auto zj = z_.at(j, t);
                    for (std::size_t k = 0; k < dh_; ++k) zd_[c * dh_ + k] = std::fabs(zi[k] - zj[k]);
                }
            });
        }
        build_codes(binning);
    }

    int nodes() const noexcept { return n_; }
    int periods() const noexcept { return T_; }
    std::size_t dh() const noexcept { return dh_; }
    std::size_t dx() const noexcept { return dx_; }
    const NetworkPanel& panel() const noexcept { return panel_; }
    const NodeCovariatePanel& covariates() const noexcept { return z_; }
    const StatisticRegistry& registry() const noexcept { return registry_; }

    bool link(int i, int j, int t) const { return panel_.link(i, j, t); }

    std::span<const double> zdyad(int i, int j, int t) const {
        return {zd_.data() + checked_cell(i, j, t) * dh_, dh_};
    }

    std::span<const double> xlag(int i, int j, int t) const {
        return {xd_.data() + checked_cell(i, j, t) * dx_, dx_};
    }

    double W(const Theta& theta, int i, int j, int t) const {
        const std::size_t c = checked_cell(i, j, t);
        return index_W(theta, {zd_.data() + c * dh_, dh_}, {xd_.data() + c * dx_, dx_});
    }

    int node_code(int i) const { return node_codes_.at(static_cast<std::size_t>(i)); }
    int dyad_code(int i, int j) const {
        const Dyad d = make_dyad(i, j);
        return dyad_codes_.at(dyad_index(n_, d.i, d.j));
    }
    std::size_t node_code_count() const noexcept { return node_labels_.size(); }
    std::size_t dyad_code_count() const noexcept { return dyad_labels_.size(); }
    const std::string& node_label(int code) const { return node_labels_.at(static_cast<std::size_t>(code)); }
    const std::string& dyad_label(int code) const { return dyad_labels_.at(static_cast<std::size_t>(code)); }

private:
    std::size_t cell_index(std::size_t d, int t) const {
        return d * static_cast<std::size_t>(T_) + static_cast<std::size_t>(t - 1);
    }

    std::size_t checked_cell(int i, int j, int t) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("node index out of range");
        if (t < 1 || t > T_) throw DomainError("cell date " + std::to_string(t) + " outside 1.." + std::to_string(T_));
        const Dyad d = make_dyad(i, j);
        return cell_index(dyad_index(n_, d.i, d.j), t);
    }

    static std::string label_of(const std::vector<double>& key, std::size_t per_date) {
        std::string s;
        for (std::size_t k = 0; k < key.size(); ++k) {
            if (k > 0) s += (k % per_date == 0) ? "/" : ":";
            s += format_double(key[k]);
        }
        return s;
    }

    // Codes are assigned in order of first appearance by node (or dyad) index, so they are
    // deterministic; labels spell out the (binned) history, dates separated by '/'.
    void build_codes(const CovariateBinning& binning) {
        std::map<std::vector<double>, int> node_ids;
        node_codes_.resize(static_cast<std::size_t>(n_));
        std::vector<double> key;
        for (int i = 0; i < n_; ++i) {
            key.clear();
            for (int t = 1; t <= T_; ++t)
                for (double v : z_.at(i, t)) key.push_back(CovariateBinning::bin(binning.node_edges, v));
            auto [it, fresh] = node_ids.try_emplace(key, static_cast<int>(node_labels_.size()));
            if (fresh) node_labels_.push_back(label_of(key, dh_));
            node_codes_[static_cast<std::size_t>(i)] = it->second;
        }
        std::map<std::vector<double>, int> dyad_ids;
        dyad_codes_.resize(panel_.dyads());
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j) {
                key.clear();
                const std::size_t d = dyad_index(n_, i, j);
                for (int t = 1; t <= T_; ++t)
                    for (std::size_t k = 0; k < dh_; ++k)
                        key.push_back(CovariateBinning::bin(binning.dyad_edges, zd_[cell_index(d, t) * dh_ + k]));
                auto [it, fresh] = dyad_ids.try_emplace(key, static_cast<int>(dyad_labels_.size()));
                if (fresh) dyad_labels_.push_back(label_of(key, dh_));
                dyad_codes_[d] = it->second;
            }
    }

    NetworkPanel panel_;
    NodeCovariatePanel z_;
    StatisticRegistry registry_;
    int n_ = 0;
    int T_ = 0;
    std::size_t dh_ = 0;
    std::size_t dx_ = 0;
    std::vector<double> zd_;
    std::vector<double> xd_;
    std::vector<int> node_codes_;
    std::vector<int> dyad_codes_;
    std::vector<std::string> node_labels_;
    std::vector<std::string> dyad_labels_;
};

}  // namespace dyadnet
