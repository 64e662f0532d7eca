#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/configurations/contrast.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/text.hpp"
#include "dyadnet/model/dataset.hpp"

namespace dyadnet {

/// Informative rows (Y+ + Y- = 1) of node-balanced configurations: stacked contrast
/// (Delta Z, Delta X) and y = Y+.
struct ClogitSample {
    std::size_t dh = 0;
    std::size_t dx = 0;
    Eigen::MatrixXd regressors;        ///< rows x (dh + dx)
    std::vector<int> outcome;          ///< 1 if Y+ = 1
    std::vector<std::size_t> config_id;  ///< position of the source configuration in the input stream
    std::vector<int> family;           ///< index into family_names
    std::vector<std::string> family_names;
    std::size_t configurations_seen = 0;

    std::size_t rows() const noexcept { return outcome.size(); }
    std::size_t dim() const noexcept { return dh + dx; }
    bool empty() const noexcept { return outcome.empty(); }

    std::size_t rows_in_family(int f) const {
        std::size_t k = 0;
        for (int g : family) k += g == f ? 1 : 0;
        return k;
    }
};

/// A named stream of configurations, all of which must be completely node-balanced.
struct ConfigBatch {
    std::string family;
    std::vector<WeightedConfiguration> configs;
};

inline ClogitSample build_sample(const Dataset& data, const std::vector<ConfigBatch>& batches) {
    ClogitSample s;
    s.dh = data.dh();
    s.dx = data.dx();
    std::vector<std::vector<double>> rows;
    std::size_t id = 0;
    for (std::size_t b = 0; b < batches.size(); ++b) {
        s.family_names.push_back(batches[b].family);
        for (const auto& cfg : batches[b].configs) {
            if (!is_node_balanced(cfg))
                throw DomainError("configuration " + std::to_string(id) + " is not completely node-balanced");
            const auto y = outcome_indicators(cfg, data);
            if (y.plus != y.minus) {
                rows.push_back(delta_regressors(cfg, data));
                s.outcome.push_back(y.plus ? 1 : 0);
                s.config_id.push_back(id);
                s.family.push_back(static_cast<int>(b));
            }
            ++id;
        }
    }
    s.configurations_seen = id;
    s.regressors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(s.dim()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t k = 0; k < s.dim(); ++k)
            s.regressors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)) = rows[r][k];
    return s;
}

inline ClogitSample build_sample(const Dataset& data, const std::vector<WeightedConfiguration>& configs,
                                 const std::string& family = "configurations") {
    return build_sample(data, std::vector<ConfigBatch>{{family, configs}});
}

/// CSV export: config_id, family, d_1..d_p, outcome.
inline void write_sample_csv(std::ostream& os, const ClogitSample& s) {
    os << "config_id,family";
    for (std::size_t k = 0; k < s.dim(); ++k) os << ",d" << k + 1;
    os << ",outcome\n";
    for (std::size_t r = 0; r < s.rows(); ++r) {
        os << s.config_id[r] << ',' << s.family_names[static_cast<std::size_t>(s.family[r])];
        for (std::size_t k = 0; k < s.dim(); ++k)
            os << ',' << format_double(s.regressors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(k)));
        os << ',' << s.outcome[r] << '\n';
    }
}

}  // namespace dyadnet
