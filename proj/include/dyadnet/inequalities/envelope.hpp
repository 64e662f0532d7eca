#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/configurations/contrast.hpp"
#include "dyadnet/configurations/enumerate.hpp"
#include "dyadnet/configurations/instances.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/inequalities/c_grid.hpp"
#include "dyadnet/inequalities/types.hpp"
#include "dyadnet/model/dataset.hpp"

namespace dyadnet {

// Generic envelope: observations carry a comparison object (group), a retained conditioning
// key s and a nuisance key t. For each s and c the bound compares
//   sup over (group, t) of E[Y+ 1{dW <= c} | s, t]   with   inf over (group, t) of 1 - E[Y- 1{dW >= c} | s, t].
// The theta-free parts (keys, outcomes, concrete configurations) are prepared once and reused.

class KeyTable {
public:
    int intern(const std::vector<int>& key, const std::function<std::string()>& make_label) {
        auto [it, fresh] = ids_.try_emplace(key, static_cast<int>(labels_.size()));
        if (fresh) labels_.push_back(make_label());
        return it->second;
    }
    const std::string& label(int id) const { return labels_.at(static_cast<std::size_t>(id)); }
    std::size_t size() const noexcept { return labels_.size(); }

private:
    std::map<std::vector<int>, int> ids_;
    std::vector<std::string> labels_;
};

struct EnvelopeDesign {
    std::string family;
    std::vector<std::string> group_labels;
    KeyTable retained;
    KeyTable nuisance;
    std::vector<int> group;
    std::vector<int> retained_id;
    std::vector<int> nuisance_id;
    std::vector<char> yplus;
    std::vector<char> yminus;
    std::vector<WeightedConfiguration> configs;

    std::size_t size() const noexcept { return configs.size(); }

    void add(int g, int s, int t, const WeightedConfiguration& cfg, const Dataset& data) {
        const auto y = outcome_indicators(cfg, data);
        group.push_back(g);
        retained_id.push_back(s);
        nuisance_id.push_back(t);
        yplus.push_back(y.plus ? 1 : 0);
        yminus.push_back(y.minus ? 1 : 0);
        configs.push_back(cfg);
    }

    std::vector<double> contrasts(const Theta& theta, const Dataset& data, int threads = 1) const {
        std::vector<double> dw(configs.size());
        parallel_for(dw.size(), threads, [&](std::size_t k) { dw[k] = delta_W(configs[k], theta, data); });
        return dw;
    }
};

using MiddleTerm = std::function<double(double)>;

inline BoundResult evaluate_envelope(const EnvelopeDesign& design, std::span<const double> dw,
                                     std::span<const double> c_grid, const BoundOptions& opt,
                                     const MiddleTerm& middle = {}) {
    if (dw.size() != design.size()) throw DomainError("contrast vector does not match the design");
    const std::vector<double> grid = c_grid.empty() ? quantile_grid(dw) : std::vector<double>(c_grid.begin(), c_grid.end());

    struct Sub {
        std::size_t count = 0;
        std::vector<double> plus, minus;
    };
    std::map<int, std::map<std::pair<int, int>, Sub>> cells;
    for (std::size_t k = 0; k < design.size(); ++k) {
        auto& sub = cells[design.retained_id[k]][{design.group[k], design.nuisance_id[k]}];
        ++sub.count;
        if (design.yplus[k]) sub.plus.push_back(dw[k]);
        if (design.yminus[k]) sub.minus.push_back(dw[k]);
    }

    BoundResult out;
    out.family = design.family;
    std::size_t dropped = 0;
    for (auto& [s, subs] : cells) {
        std::vector<std::pair<std::string, Sub*>> kept;
        std::size_t total = 0;
        for (auto& [gt, sub] : subs) {
            if (sub.count < opt.cell_floor) {
                ++dropped;
                continue;
            }
            std::sort(sub.plus.begin(), sub.plus.end());
            std::sort(sub.minus.begin(), sub.minus.end());
            const std::string& gl = design.group_labels.at(static_cast<std::size_t>(gt.first));
            const std::string& nl = design.nuisance.label(gt.second);
            std::string label = gl.empty() ? nl : (nl == "all" ? gl : gl + "|" + nl);
            kept.emplace_back(std::move(label), &sub);
            total += sub.count;
        }
        if (kept.empty()) {
            out.warnings.push_back("retained cell " + design.retained.label(s) + " has no sub-cell above the floor; skipped");
            continue;
        }
        for (double c : grid) {
            BoundEvaluation e;
            e.c = c;
            e.cell = design.retained.label(s);
            e.cell_count = total / design.group_labels.size();
            bool first = true;
            for (const auto& [label, sub] : kept) {
                const auto& p = sub->plus;
                const auto& m = sub->minus;
                const auto L = detail::moment_from_counts(
                    static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), c) - p.begin()), sub->count);
                const auto Q = detail::moment_from_counts(
                    static_cast<std::size_t>(m.end() - std::lower_bound(m.begin(), m.end(), c)), sub->count);
                const double U = 1.0 - Q.value;
                if (first || L.value > e.lower) {
                    e.lower = L.value;
                    e.se_lower = L.se;
                    e.lower_arg = label;
                }
                if (first || U < e.upper) {
                    e.upper = U;
                    e.se_upper = Q.se;
                    e.upper_arg = label;
                }
                first = false;
            }
            if (middle) {
                e.middle = middle(c);
                detail::middle_verdict(e, opt.slack);
            } else {
                detail::sandwich_verdict(e, opt.slack);
            }
            out.evaluations.push_back(std::move(e));
        }
    }
    if (dropped > 0)
        out.warnings.push_back(std::to_string(dropped) + " sub-cells below the floor of " + std::to_string(opt.cell_floor) +
                               " observations were dropped");
    return out;
}


/// Design for a residual-load class: every member is a signed pattern over common node labels
/// with the same residual loads. Retained key: histories of the residual dyads. Nuisance key:
/// node histories of nodes that touch no residual dyad. Members are instantiated on the same
/// node tuples; `group_labels` (optional) names the members in the output.
inline EnvelopeDesign partial_envelope_design(const Dataset& data, const std::vector<WeightedConfiguration>& cls,
                                              const InstancePolicy& policy = {},
                                              std::vector<std::string> group_labels = {}) {
    if (cls.empty()) throw DomainError("residual-load class is empty");
    auto nonzero = [](std::map<Dyad, int> m) {
        std::erase_if(m, [](const auto& kv) { return kv.second == 0; });
        return m;
    };
    for (const auto& g : cls) to_signed(g).validate();
    const auto rho = nonzero(residual_load(to_signed(cls.front())));
    for (std::size_t g = 1; g < cls.size(); ++g)
        if (nonzero(residual_load(to_signed(cls[g]))) != rho)
            throw DomainError("class mixes residual loads: member " + std::to_string(g) +
                              " differs from member 0");

    // Relabel every member through the union of their nodes so they share slots.
    WeightedConfiguration joint;
    for (const auto& g : cls) joint.cells.insert(joint.cells.end(), g.cells.begin(), g.cells.end());
    const auto nodes = config_nodes(joint);
    if (nodes.size() < 2) throw DomainError("class members need at least one dyad");
    auto slot = [&](int v) { return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin()); };
    std::vector<WeightedConfiguration> members;
    WeightedConfiguration signature;
    for (std::size_t g = 0; g < cls.size(); ++g) {
        WeightedConfiguration m;
        for (const auto& c : cls[g].cells) {
            m.cells.push_back({EdgeTimeCell(slot(c.cell.i), slot(c.cell.j), c.cell.t), c.weight});
            // Tag weights by member so deduplication only merges tuples that fix every member.
            signature.cells.push_back({m.cells.back().cell, c.weight * static_cast<double>(1 + 8 * g)});
        }
        members.push_back(std::move(m));
    }
    std::vector<std::pair<int, int>> residual;
    std::vector<char> touches(nodes.size(), 0);
    for (const auto& [d, r] : rho) {
        residual.emplace_back(slot(d.i), slot(d.j));
        touches[static_cast<std::size_t>(slot(d.i))] = touches[static_cast<std::size_t>(slot(d.j))] = 1;
    }
    const auto inst = instantiate(signature, data.nodes(), policy);

    EnvelopeDesign d;
    d.family = "partial_envelope";
    if (group_labels.empty())
        for (std::size_t g = 0; g < cls.size(); ++g) group_labels.push_back(cls.size() == 1 ? "" : "g" + std::to_string(g));
    if (group_labels.size() != cls.size()) throw DomainError("one group label per class member is required");
    d.group_labels = std::move(group_labels);
    std::vector<int> skey, tkey;
    for (const auto& tuple : inst.tuples) {
        skey.clear();
        tkey.clear();
        for (const auto& [a, b] : residual)
            skey.push_back(data.dyad_code(tuple[static_cast<std::size_t>(a)], tuple[static_cast<std::size_t>(b)]));
        for (std::size_t s = 0; s < nodes.size(); ++s)
            if (!touches[s]) tkey.push_back(data.node_code(tuple[s]));
        const int sid = d.retained.intern(skey, [&] {
            std::vector<std::string> parts;
            for (int code : skey) parts.push_back(data.dyad_label(code));
            return detail::join_labels(parts);
        });
        const int tid = d.nuisance.intern(tkey, [&] {
            std::vector<std::string> parts;
            for (int code : tkey) parts.push_back(data.node_label(code));
            return detail::join_labels(parts);
        });
        for (std::size_t g = 0; g < members.size(); ++g) d.add(static_cast<int>(g), sid, tid, apply_tuple(members[g], tuple), data);
    }
    return d;
}

/// Partial-differencing envelope within one residual-load class.
inline BoundResult partial_envelope(const Dataset& data, const Theta& theta, const EnvelopeDesign& design,
                                    std::span<const double> c_grid = {}, const BoundOptions& opt = {}) {
    const auto dw = design.contrasts(theta, data, opt.threads);
    return evaluate_envelope(design, dw, c_grid, opt);
}

/// The one-cell class {+(0,1,t)}: t = 1..T, whose envelope is the dyad-panel bound.
inline std::vector<WeightedConfiguration> one_cell_class(int T) {
    std::vector<WeightedConfiguration> cls;
    for (int t = 1; t <= T; ++t) cls.push_back({{{EdgeTimeCell(0, 1, t), 1.0}}});
    return cls;
}

inline std::vector<std::string> date_labels(int T) {
    std::vector<std::string> out;
    for (int t = 1; t <= T; ++t) out.push_back("t=" + std::to_string(t));
    return out;
}

/// Weighted node-differencing design: retained key = node histories of nodes with sigma != 0,
/// nuisance key = node histories of nodes with sigma == 0, both in slot order.
inline EnvelopeDesign weighted_node_design(const Dataset& data, const PatternInstances& inst) {
    inst.pattern.validate();
    if (!inst.pattern.has_both_signs()) throw DomainError("weighted configuration needs both positive and negative cells");
    const auto sigma = node_incidence(inst.pattern);
    EnvelopeDesign d;
    d.family = "weighted_node";
    d.group_labels.push_back("");
    std::vector<int> skey, tkey;
    for (std::size_t k = 0; k < inst.tuples.size(); ++k) {
        skey.clear();
        tkey.clear();
        for (const auto& [slot, s] : sigma)
            (s != 0.0 ? skey : tkey).push_back(data.node_code(inst.tuples[k][static_cast<std::size_t>(slot)]));
        const int sid = d.retained.intern(skey, [&] {
            std::vector<std::string> parts;
            for (int code : skey) parts.push_back(data.node_label(code));
            return detail::join_labels(parts);
        });
        const int tid = d.nuisance.intern(tkey, [&] {
            std::vector<std::string> parts;
            for (int code : tkey) parts.push_back(data.node_label(code));
            return detail::join_labels(parts);
        });
        d.add(0, sid, tid, inst.configs[k], data);
    }
    return d;
}

/// Design used by the known-CDF family: unconditional middle term, node-history nuisance cells.
inline EnvelopeDesign known_cdf_design(const Dataset& data, const PatternInstances& inst) {
    EnvelopeDesign d;
    d.family = "known_cdf";
    d.group_labels.push_back("");
    std::vector<int> tkey;
    const int s0 = d.retained.intern({}, [] { return std::string("all"); });
    for (std::size_t k = 0; k < inst.tuples.size(); ++k) {
        tkey.clear();
        for (int s = 0; s < inst.slots; ++s) tkey.push_back(data.node_code(inst.tuples[k][static_cast<std::size_t>(s)]));
        const int tid = d.nuisance.intern(tkey, [&] {
            std::vector<std::string> parts;
            for (int code : tkey) parts.push_back(data.node_label(code));
            return detail::join_labels(parts);
        });
        d.add(0, s0, tid, inst.configs[k], data);
    }
    return d;
}

}  // namespace dyadnet
