#pragma once

#include <span>

#include "dyadnet/configurations/instances.hpp"
#include "dyadnet/inequalities/composite_cdf.hpp"
#include "dyadnet/inequalities/envelope.hpp"
#include "dyadnet/inequalities/signed_subgraph.hpp"
#include "dyadnet/model/shocks.hpp"

namespace dyadnet {

/// Signed-subgraph moments checked against the known composite CDF F_C(c): two one-sided
/// tests per c (sup-side <= F_C(c) and F_C(c) <= inf-side) instead of a single sandwich.
/// Conditioning cells are the joint node histories of the pattern's slots.
inline BoundResult known_cdf_bounds(const Dataset& data, const Theta& theta, const PatternInstances& inst,
                                    const CompositeCdf& F, std::span<const double> c_grid = {},
                                    const BoundOptions& opt = {}) {
    require_dyad_balanced(inst.pattern);
    const auto design = known_cdf_design(data, inst);
    const auto dw = design.contrasts(theta, data, opt.threads);
    return evaluate_envelope(design, dw, c_grid, opt, [&](double c) { return F(c); });
}

inline BoundResult known_cdf_bounds(const Dataset& data, const Theta& theta, const PatternInstances& inst,
                                    const ShockSpec& shocks, std::span<const double> c_grid = {},
                                    const BoundOptions& opt = {}) {
    require_dyad_balanced(inst.pattern);
    return known_cdf_bounds(data, theta, inst, CompositeCdf::of(inst.pattern, shocks), c_grid, opt);
}

}  // namespace dyadnet
