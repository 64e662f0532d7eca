#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dyadnet/clogit/fit.hpp"
#include "dyadnet/clogit/sample.hpp"

namespace dyadnet {

struct FamilyRankStep {
    std::string family;   ///< family added at this step
    std::size_t rows = 0; ///< rows contributed by that family
    int rank = 0;         ///< rank of all rows up to and including this family
};

struct RankCheck {
    RankReport overall;
    std::vector<FamilyRankStep> cumulative;
    std::string completing_family;  ///< first family at which full rank is reached ("" if never)
    bool spans() const noexcept { return overall.full_rank(); }
};

/// Rank of the stacked contrast matrix, with cumulative attribution over families in the
/// sample's family order.
inline RankCheck rank_check(const ClogitSample& s, double tol = 1e-8) {
    RankCheck out;
    out.overall = matrix_rank(s.regressors, tol);
    const Eigen::Index p = static_cast<Eigen::Index>(s.dim());
    std::vector<Eigen::Index> take;
    for (std::size_t f = 0; f < s.family_names.size(); ++f) {
        std::size_t rows = 0;
        for (std::size_t r = 0; r < s.rows(); ++r)
            if (s.family[r] == static_cast<int>(f)) {
                take.push_back(static_cast<Eigen::Index>(r));
                ++rows;
            }
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(take.size()), p);
        for (std::size_t k = 0; k < take.size(); ++k) sub.row(static_cast<Eigen::Index>(k)) = s.regressors.row(take[k]);
        const int rk = matrix_rank(sub, tol).rank;
        out.cumulative.push_back({s.family_names[f], rows, rk});
        if (out.completing_family.empty() && rk == p) out.completing_family = s.family_names[f];
    }
    return out;
}

}  // namespace dyadnet
