#pragma once

#include <optional>
#include <span>

#include "dyadnet/configurations/instances.hpp"
#include "dyadnet/inequalities/composite_cdf.hpp"
#include "dyadnet/inequalities/envelope.hpp"
#include "dyadnet/model/shocks.hpp"

namespace dyadnet {

/// Weighted node-differencing envelope. Conditions on retained-node histories z_R and profiles
/// over eliminated-node histories z_0. When `known` is given the configuration must be
/// completely node-balanced, and the known convolution F_{C,omega} is used as a middle term.
inline BoundResult weighted_node_bounds(const Dataset& data, const Theta& theta, const PatternInstances& inst,
                                        std::span<const double> c_grid = {}, const BoundOptions& opt = {},
                                        const std::optional<ShockSpec>& known = std::nullopt) {
    const auto design = weighted_node_design(data, inst);
    const auto dw = design.contrasts(theta, data, opt.threads);
    if (!known) return evaluate_envelope(design, dw, c_grid, opt);
    if (!is_node_balanced(inst.pattern))
        throw DomainError("a known middle term needs a completely node-balanced weighted configuration");
    const auto F = CompositeCdf::of(inst.pattern, *known);
    auto out = evaluate_envelope(design, dw, c_grid, opt, [&](double c) { return F(c); });
    return out;
}

}  // namespace dyadnet
