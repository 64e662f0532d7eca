#pragma once

#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/configurations/config_text.hpp"
#include "dyadnet/configurations/instances.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/core/text.hpp"
#include "dyadnet/inequalities/dyad_panel.hpp"
#include "dyadnet/inequalities/envelope.hpp"
#include "dyadnet/inequalities/known_cdf.hpp"
#include "dyadnet/inequalities/signed_subgraph.hpp"
#include "dyadnet/inequalities/weighted_node.hpp"

namespace dyadnet {

/// One restriction in the menu: a family name, a configuration id and an evaluator. The
/// evaluator receives theta and an optional explicit c-grid (empty = quantile grid at theta)
/// and must be safe to call concurrently.
struct Restriction {
    std::string family;
    std::string config_id;
    std::function<BoundResult(const Theta&, std::span<const double>, const BoundOptions&)> evaluate;
};

inline Restriction dyad_panel_restriction(std::shared_ptr<const Dataset> data) {
    return {"dyad_panel", "one-cell",
            [data](const Theta& th, std::span<const double> c, const BoundOptions& o) { return dyad_panel_bounds(*data, th, c, o); }};
}

inline Restriction signed_subgraph_restriction(std::shared_ptr<const Dataset> data, const SignedConfiguration& pattern,
                                               const InstancePolicy& policy = {}) {
    require_dyad_balanced(WeightedConfiguration::from_signed(pattern));
    auto inst = std::make_shared<const PatternInstances>(instantiate(pattern, data->nodes(), policy));
    return {"signed_subgraph", format_config(pattern),
            [data, inst](const Theta& th, std::span<const double> c, const BoundOptions& o) {
                return signed_subgraph_bounds(*data, th, *inst, c, o);
            }};
}

inline Restriction partial_envelope_restriction(std::shared_ptr<const Dataset> data,
                                                const std::vector<WeightedConfiguration>& cls,
                                                const InstancePolicy& policy = {}) {
    auto design = std::make_shared<const EnvelopeDesign>(partial_envelope_design(*data, cls, policy));
    std::string id;
    for (const auto& g : cls) id += (id.empty() ? "" : " || ") + format_config(g);
    return {"partial_envelope", id, [data, design](const Theta& th, std::span<const double> c, const BoundOptions& o) {
                return evaluate_envelope(*design, design->contrasts(th, *data, o.threads), c, o);
            }};
}

inline Restriction known_cdf_restriction(std::shared_ptr<const Dataset> data, const SignedConfiguration& pattern,
                                         const ShockSpec& shocks, const InstancePolicy& policy = {}) {
    const auto w = WeightedConfiguration::from_signed(pattern);
    require_dyad_balanced(w);
    auto inst = std::make_shared<const PatternInstances>(instantiate(w, data->nodes(), policy));
    auto F = std::make_shared<const CompositeCdf>(CompositeCdf::of(inst->pattern, shocks));
    return {"known_cdf", format_config(pattern),
            [data, inst, F](const Theta& th, std::span<const double> c, const BoundOptions& o) {
                return known_cdf_bounds(*data, th, *inst, *F, c, o);
            }};
}

inline Restriction weighted_node_restriction(std::shared_ptr<const Dataset> data, const WeightedConfiguration& pattern,
                                             const InstancePolicy& policy = {}) {
    auto design = std::make_shared<const EnvelopeDesign>(
        weighted_node_design(*data, instantiate(pattern, data->nodes(), policy)));
    return {"weighted_node", format_config(pattern),
            [data, design](const Theta& th, std::span<const double> c, const BoundOptions& o) {
                return evaluate_envelope(*design, design->contrasts(th, *data, o.threads), c, o);
            }};
}

/// A finite list of parameter values to screen, with a human-readable description.
struct ThetaGrid {
    std::string description;
    std::vector<Theta> points;

    /// Cartesian product of per-coordinate value lists over the stacked (alpha, lambda) vector;
    /// the last coordinate varies fastest.
    static ThetaGrid product(const std::vector<std::vector<double>>& axes, std::size_t dh) {
        ThetaGrid g;
        g.description = "product grid over " + std::to_string(axes.size()) + " coordinates";
        if (axes.empty()) return g;
        for (const auto& a : axes)
            if (a.empty()) return g;
        std::vector<std::size_t> idx(axes.size(), 0);
        std::vector<double> v(axes.size());
        while (true) {
            for (std::size_t k = 0; k < axes.size(); ++k) v[k] = axes[k][idx[k]];
            g.points.push_back(Theta::from_stacked(v, dh));
            std::size_t k = axes.size();
            while (k > 0) {
                --k;
                if (++idx[k] < axes[k].size()) break;
                idx[k] = 0;
                if (k == 0) return g;
            }
        }
    }

    /// theta0 with stacked coordinate `coord` replaced by each value in turn.
    static ThetaGrid slice(const Theta& theta0, std::size_t coord, const std::vector<double>& values) {
        if (coord >= theta0.dim()) throw DomainError("slice coordinate out of range");
        ThetaGrid g;
        g.description = "slice along coordinate " + std::to_string(coord);
        for (double v : values) {
            auto s = theta0.stacked();
            s[coord] = v;
            g.points.push_back(Theta::from_stacked(s, theta0.alpha.size()));
        }
        return g;
    }

    /// Evenly spaced values lo, ..., hi (inclusive).
    static std::vector<double> linspace(double lo, double hi, std::size_t count) {
        std::vector<double> out;
        if (count == 1) return {lo};
        for (std::size_t k = 0; k < count; ++k)
            out.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
        return out;
    }
};

struct Violation {
    std::string family;
    std::string config_id;
    std::string cell;
    double c = 0.0;
    double margin = 0.0;
};

struct ThetaVerdict {
    std::size_t theta_id = 0;
    Theta theta;
    std::map<std::string, bool> family_pass;
    bool pass = true;
    std::vector<Violation> violations;
    /// Full evaluations in menu order, kept when requested.
    std::vector<std::pair<std::size_t, BoundResult>> results;
};

struct IdentifiedSetReport {
    std::string grid_description;
    double slack = 3.0;
    std::vector<std::string> families;
    std::vector<ThetaVerdict> verdicts;

    std::size_t passing() const {
        std::size_t k = 0;
        for (const auto& v : verdicts) k += v.pass ? 1 : 0;
        return k;
    }
};

struct IdentifiedSetOptions {
    BoundOptions bounds;
    int threads = 1;          ///< workers over theta points
    bool keep_results = false;
    double grid_scale = 1.0;  ///< explicit grids are multiplied by this factor
    std::vector<std::vector<double>> explicit_grids;  ///< one per restriction, or empty for quantile grids
};

/// Screens every theta in the grid against every restriction in the menu. A theta belongs to
/// the reported intersection when every family passes.
inline IdentifiedSetReport identified_set(const ThetaGrid& grid, const std::vector<Restriction>& menu,
                                          const IdentifiedSetOptions& opt = {}) {
    if (grid.points.empty()) throw DomainError("theta grid is empty");
    if (menu.empty()) throw DomainError("restriction menu is empty");
    if (!opt.explicit_grids.empty() && opt.explicit_grids.size() != menu.size())
        throw DomainError("explicit c-grids must be given for every restriction or none");
    IdentifiedSetReport report;
    report.grid_description = grid.description;
    report.slack = opt.bounds.slack;
    for (const auto& r : menu)
        if (std::find(report.families.begin(), report.families.end(), r.family) == report.families.end())
            report.families.push_back(r.family);
    report.verdicts.resize(grid.points.size());
    BoundOptions inner = opt.bounds;
    inner.threads = 1;
    parallel_for(grid.points.size(), opt.threads, [&](std::size_t id) {
        ThetaVerdict v;
        v.theta_id = id;
        v.theta = grid.points[id];
        for (const auto& f : report.families) v.family_pass[f] = true;
        for (std::size_t r = 0; r < menu.size(); ++r) {
            std::vector<double> cg;
            if (!opt.explicit_grids.empty()) cg = scaled_grid(opt.explicit_grids[r], opt.grid_scale);
            auto res = menu[r].evaluate(v.theta, cg, inner);
            for (const auto& e : res.evaluations)
                if (!e.pass) {
                    v.family_pass[menu[r].family] = false;
                    v.pass = false;
                    v.violations.push_back({menu[r].family, menu[r].config_id, e.cell, e.c, e.margin});
                }
            if (opt.keep_results) v.results.emplace_back(r, std::move(res));
        }
        report.verdicts[id] = std::move(v);
    });
    return report;
}

/// Quantile c-grids of every restriction at theta, for use as explicit grids.
inline std::vector<std::vector<double>> grids_at(const Theta& theta, const std::vector<Restriction>& menu,
                                                 const BoundOptions& opt = {}) {
    std::vector<std::vector<double>> out;
    for (const auto& r : menu) {
        const auto res = r.evaluate(theta, {}, opt);
        std::vector<double> g;
        for (const auto& e : res.evaluations) g.push_back(e.c);
        std::sort(g.begin(), g.end());
        g.erase(std::unique(g.begin(), g.end()), g.end());
        out.push_back(std::move(g));
    }
    return out;
}

inline const char* kBoundsCsvHeader = "theta_id,family,config_id,cell_id,c,lower,upper,se_lower,se_upper,verdict";

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline void write_bounds_rows(std::ostream& os, std::size_t theta_id, const std::string& config_id,
                              const BoundResult& r) {
    for (const auto& e : r.evaluations)
        os << theta_id << ',' << csv_field(r.family) << ',' << csv_field(config_id) << ',' << csv_field(e.cell) << ','
           << format_double(e.c) << ',' << format_double(e.lower) << ',' << format_double(e.upper) << ','
           << format_double(e.se_lower) << ',' << format_double(e.se_upper) << ',' << (e.pass ? "pass" : "fail")
           << '\n';
}

/// Structured text report: grid, slack, per-theta verdicts and violations.
inline void write_idset_report(std::ostream& os, const IdentifiedSetReport& rep) {
    os << "identified_set {\n  grid: \"" << rep.grid_description << "\"\n  slack: " << format_double(rep.slack)
       << "\n  points: " << rep.verdicts.size() << "\n  passing: " << rep.passing() << "\n  families: [";
    for (std::size_t k = 0; k < rep.families.size(); ++k) os << (k ? ", " : "") << rep.families[k];
    os << "]\n  verdicts: [\n";
    for (const auto& v : rep.verdicts) {
        os << "    { theta_id: " << v.theta_id << ", theta: [";
        const auto s = v.theta.stacked();
        for (std::size_t k = 0; k < s.size(); ++k) os << (k ? ", " : "") << format_double(s[k]);
        os << "], pass: " << (v.pass ? "true" : "false") << ", families: {";
        bool first = true;
        for (const auto& [f, p] : v.family_pass) {
            os << (first ? "" : ", ") << f << ": " << (p ? "pass" : "fail");
            first = false;
        }
        os << "}, violations: " << v.violations.size();
        if (!v.violations.empty()) {
            double worst = v.violations.front().margin;
            for (const auto& x : v.violations) worst = std::max(worst, x.margin);
            os << ", worst_margin: " << format_double(worst);
        }
        os << " }\n";
    }
    os << "  ]\n}\n";
}

}  // namespace dyadnet
