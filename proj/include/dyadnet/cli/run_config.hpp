#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "dyadnet/configurations/config_text.hpp"
#include "dyadnet/configurations/enumerate.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/inequalities/types.hpp"
#include "dyadnet/model/simulate.hpp"

namespace dyadnet::cli {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kToolVersion = "dyadnet 1.0.0";

struct ThetaGridSpec {
    std::string kind = "slice";  ///< slice | product
    std::size_t coordinate = 0;
    std::vector<double> values;              ///< slice values
    std::vector<std::vector<double>> axes;   ///< product axes
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string output = "results";
    std::string task = "verify-all";

    ModelSpec model;
    std::optional<std::string> initial_file;
    int model_T_line = 0;

    std::vector<std::string> families{"dyad_panel", "signed_subgraph", "partial_envelope", "known_cdf", "weighted_node"};
    std::vector<WeightedConfiguration> signed_patterns;
    std::vector<WeightedConfiguration> weighted_patterns;
    std::vector<std::vector<WeightedConfiguration>> classes;
    BoundOptions bound_options;
    std::size_t instance_cap = 200000;
    std::vector<double> c_grid;  ///< empty: quantile grid at each theta

    ThetaGridSpec theta_grid;

    std::vector<Family> clogit_families{Family::within_date_tetrads};
    std::size_t clogit_budget = 20000;

    std::string source;  ///< raw configuration text, hashed into the manifest
};

namespace detail {

inline int line_of(const YAML::Node& n) { return n.Mark().line >= 0 ? n.Mark().line + 1 : 0; }

[[noreturn]] inline void fail(const YAML::Node& n, const std::string& msg) { throw ConfigError(msg, line_of(n)); }

inline void check_keys(const YAML::Node& map, const std::set<std::string>& allowed, const std::string& where) {
    if (!map.IsMap()) fail(map, where + " must be a mapping");
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!allowed.count(key)) fail(kv.first, "unknown key '" + key + "' in " + where);
    }
}

template <class T>
T scalar(const YAML::Node& n, const std::string& what) {
    if (!n.IsScalar()) fail(n, what + " must be a scalar");
    try {
        return n.as<T>();
    } catch (const YAML::Exception&) {
        fail(n, what + " has an invalid value '" + n.Scalar() + "'");
    }
}

template <class T>
std::vector<T> list(const YAML::Node& n, const std::string& what) {
    if (!n.IsSequence()) fail(n, what + " must be a list");
    std::vector<T> out;
    for (const auto& e : n) out.push_back(scalar<T>(e, what + " entry"));
    return out;
}

inline WeightedConfiguration config_at(const YAML::Node& n, const std::string& what) {
    const auto text = scalar<std::string>(n, what);
    try {
        return parse_config(text);
    } catch (const DomainError& e) {
        fail(n, what + ": " + e.what());
    }
}

/// {from, to, count} or an explicit list.
inline std::vector<double> values_at(const YAML::Node& n, const std::string& what) {
    if (n.IsSequence()) return list<double>(n, what);
    check_keys(n, {"from", "to", "count"}, what);
    for (const char* k : {"from", "to", "count"})
        if (!n[k]) fail(n, what + " needs '" + k + "'");
    const double lo = scalar<double>(n["from"], what + ".from");
    const double hi = scalar<double>(n["to"], what + ".to");
    const int count = scalar<int>(n["count"], what + ".count");
    if (count < 1) fail(n["count"], what + ".count must be positive");
    std::vector<double> out;
    for (int k = 0; k < count; ++k)
        out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(count - 1));
    return out;
}

inline void parse_model(const YAML::Node& m, RunConfig& rc) {
    check_keys(m, {"n", "T", "theta0", "statistics", "covariates", "heterogeneity", "shocks", "initial"}, "model");
    for (const char* k : {"n", "T", "theta0"})
        if (!m[k]) fail(m, std::string("model needs '") + k + "'");
    auto& spec = rc.model;
    spec.n = scalar<int>(m["n"], "model.n");
    spec.T = scalar<int>(m["T"], "model.T");
    rc.model_T_line = line_of(m["T"]);
    if (spec.n < 4) fail(m["n"], "model.n must be at least 4");
    if (spec.T < 1) fail(m["T"], "model.T must be at least 1");

    const auto th = m["theta0"];
    check_keys(th, {"alpha", "lambda"}, "model.theta0");
    if (!th["alpha"] || !th["lambda"]) fail(th, "model.theta0 needs 'alpha' and 'lambda'");
    spec.theta0.alpha = list<double>(th["alpha"], "model.theta0.alpha");
    spec.theta0.lambda = list<double>(th["lambda"], "model.theta0.lambda");

    if (m["statistics"]) {
        spec.registry = StatisticRegistry();
        for (const auto& s : m["statistics"]) {
            try {
                spec.registry.add(StatisticRegistry::builtin_from_name(scalar<std::string>(s, "statistic")));
            } catch (const DomainError& e) {
                fail(s, e.what());
            }
        }
    }
    if (const auto c = m["covariates"]) {
        check_keys(c, {"dim", "discrete", "support", "persistence"}, "model.covariates");
        if (c["dim"]) spec.covariates.dim = scalar<int>(c["dim"], "model.covariates.dim");
        if (c["discrete"]) spec.covariates.discrete = scalar<bool>(c["discrete"], "model.covariates.discrete");
        if (c["support"]) spec.covariates.support = list<double>(c["support"], "model.covariates.support");
        if (c["persistence"]) spec.covariates.persistence = scalar<double>(c["persistence"], "model.covariates.persistence");
        if (spec.covariates.dim < 1) fail(c, "model.covariates.dim must be at least 1");
        if (spec.covariates.persistence < 0 || spec.covariates.persistence > 1)
            fail(c["persistence"], "model.covariates.persistence must lie in [0, 1]");
    }
    if (const auto h = m["heterogeneity"]) {
        check_keys(h, {"variant", "mean", "sd", "covariate_loading", "xi_sd"}, "model.heterogeneity");
        auto& hs = spec.heterogeneity;
        if (h["variant"]) {
            try {
                hs.kind = heterogeneity_from_name(scalar<std::string>(h["variant"], "model.heterogeneity.variant"));
            } catch (const DomainError& e) {
                fail(h["variant"], e.what());
            }
        }
        if (h["mean"]) hs.mean = scalar<double>(h["mean"], "model.heterogeneity.mean");
        if (h["sd"]) hs.sd = scalar<double>(h["sd"], "model.heterogeneity.sd");
        if (h["covariate_loading"]) hs.covariate_loading = scalar<double>(h["covariate_loading"], "model.heterogeneity.covariate_loading");
        if (h["xi_sd"]) hs.xi_sd = scalar<double>(h["xi_sd"], "model.heterogeneity.xi_sd");
        if (hs.sd < 0 || hs.xi_sd < 0) fail(h, "heterogeneity standard deviations must be non-negative");
    }
    if (const auto s = m["shocks"]) {
        check_keys(s, {"variant", "marginal", "scale", "rho"}, "model.shocks");
        auto& sh = spec.shocks;
        try {
            if (s["variant"]) sh.kind = ShockSpec::kind_from_name(scalar<std::string>(s["variant"], "model.shocks.variant"));
            const auto name = s["marginal"] ? scalar<std::string>(s["marginal"], "model.shocks.marginal") : std::string("logistic");
            const double scale = s["scale"] ? scalar<double>(s["scale"], "model.shocks.scale") : 1.0;
            sh.marginal = Marginal::from_name(name, scale);
            if (s["rho"]) sh.rho = scalar<double>(s["rho"], "model.shocks.rho");
            sh.validate();
        } catch (const DomainError& e) {
            fail(s, e.what());
        }
    }
    if (const auto i = m["initial"]) {
        check_keys(i, {"rule", "p", "file"}, "model.initial");
        const auto rule = i["rule"] ? scalar<std::string>(i["rule"], "model.initial.rule") : std::string("empty");
        if (rule == "empty") {
            spec.initial.kind = InitialNetworkRule::Kind::empty;
        } else if (rule == "erdos_renyi") {
            spec.initial.kind = InitialNetworkRule::Kind::erdos_renyi;
            if (!i["p"]) fail(i, "erdos_renyi initial network needs 'p'");
            spec.initial.p = scalar<double>(i["p"], "model.initial.p");
            if (spec.initial.p < 0 || spec.initial.p > 1) fail(i["p"], "model.initial.p must lie in [0, 1]");
        } else if (rule == "file") {
            spec.initial.kind = InitialNetworkRule::Kind::supplied;
            if (!i["file"]) fail(i, "file initial network needs 'file'");
            rc.initial_file = scalar<std::string>(i["file"], "model.initial.file");
        } else {
            fail(i["rule"], "unknown initial-network rule '" + rule + "' (empty, erdos_renyi, file)");
        }
    }
    if (spec.theta0.alpha.size() != static_cast<std::size_t>(spec.covariates.dim))
        fail(th["alpha"], "theta0.alpha has " + std::to_string(spec.theta0.alpha.size()) +
                              " entries but covariates.dim is " + std::to_string(spec.covariates.dim));
    if (spec.theta0.lambda.size() != spec.registry.size())
        fail(th["lambda"], "theta0.lambda has " + std::to_string(spec.theta0.lambda.size()) + " entries but " +
                               std::to_string(spec.registry.size()) + " statistics are registered");
}

inline void parse_bounds(const YAML::Node& b, RunConfig& rc) {
    check_keys(b, {"families", "configurations", "weighted", "classes", "slack", "cell_floor", "c_grid", "instance_cap"},
               "bounds");
    static const std::set<std::string> known{"dyad_panel", "signed_subgraph", "partial_envelope", "known_cdf", "weighted_node"};
    if (b["families"]) {
        rc.families.clear();
        for (const auto& f : b["families"]) {
            const auto name = scalar<std::string>(f, "bounds.families entry");
            if (!known.count(name)) fail(f, "unknown restriction family '" + name + "'");
            rc.families.push_back(name);
        }
    }
    if (const auto c = b["configurations"]) {
        if (!c.IsSequence()) fail(c, "bounds.configurations must be a list");
        for (const auto& e : c) rc.signed_patterns.push_back(config_at(e, "bounds.configurations entry"));
    }
    if (const auto c = b["weighted"]) {
        if (!c.IsSequence()) fail(c, "bounds.weighted must be a list");
        for (const auto& e : c) rc.weighted_patterns.push_back(config_at(e, "bounds.weighted entry"));
    }
    if (const auto c = b["classes"]) {
        if (!c.IsSequence()) fail(c, "bounds.classes must be a list of lists");
        for (const auto& cls : c) {
            if (!cls.IsSequence()) fail(cls, "each class must be a list of configurations");
            std::vector<WeightedConfiguration> members;
            for (const auto& e : cls) members.push_back(config_at(e, "class member"));
            rc.classes.push_back(std::move(members));
        }
    }
    if (b["slack"]) rc.bound_options.slack = scalar<double>(b["slack"], "bounds.slack");
    if (b["cell_floor"]) rc.bound_options.cell_floor = scalar<std::size_t>(b["cell_floor"], "bounds.cell_floor");
    if (b["instance_cap"]) rc.instance_cap = scalar<std::size_t>(b["instance_cap"], "bounds.instance_cap");
    if (const auto g = b["c_grid"]) {
        if (g.IsScalar()) {
            if (g.Scalar() != "quantile") fail(g, "bounds.c_grid must be 'quantile' or a list of thresholds");
        } else {
            rc.c_grid = list<double>(g, "bounds.c_grid");
        }
    }
    if (rc.bound_options.slack < 0) fail(b["slack"], "bounds.slack must be non-negative");
    if (rc.instance_cap == 0) fail(b["instance_cap"], "bounds.instance_cap must be positive");
}

}  // namespace detail

/// Parses and validates a run configuration. Errors carry the offending line.
/// Rejects a task the configured model cannot support, anchored at the line of model.T.
inline void check_task(const RunConfig& rc, const std::string& task) {
    const bool needs_panel_bounds = task == "bounds" || task == "idset" || task == "verify-all";
    auto has = [&](const char* f) { return std::find(rc.families.begin(), rc.families.end(), f) != rc.families.end(); };
    const bool uses_dates = has("dyad_panel") || has("signed_subgraph") || has("known_cdf");
    if (needs_panel_bounds && uses_dates && rc.model.T < 2)
        throw ConfigError("task '" + task + "' needs at least two dates (T >= 2); model.T is " +
                              std::to_string(rc.model.T),
                          rc.model_T_line);
}

inline RunConfig parse_run_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::ParserException& e) {
        throw ConfigError(e.msg, e.mark.line >= 0 ? e.mark.line + 1 : 0);
    }
    using detail::fail;
    using detail::scalar;
    if (!root.IsMap()) throw ConfigError("configuration must be a mapping", 1);
    detail::check_keys(root, {"schema_version", "seed", "threads", "output", "task", "model", "bounds", "idset", "clogit"},
                       "configuration");
    RunConfig rc;
    rc.source = text;
    if (!root["schema_version"]) throw ConfigError("missing 'schema_version'", 1);
    rc.schema_version = scalar<int>(root["schema_version"], "schema_version");
    if (rc.schema_version != kSchemaVersion)
        fail(root["schema_version"], "unsupported schema_version " + std::to_string(rc.schema_version) + " (expected " +
                                         std::to_string(kSchemaVersion) + ")");
    if (!root["seed"]) throw ConfigError("missing 'seed' (a root seed is mandatory)", 1);
    rc.seed = scalar<std::uint64_t>(root["seed"], "seed");
    if (root["threads"]) rc.threads = scalar<int>(root["threads"], "threads");
    if (rc.threads < 1) fail(root["threads"], "threads must be at least 1");
    if (root["output"]) rc.output = scalar<std::string>(root["output"], "output");
    if (root["task"]) {
        rc.task = scalar<std::string>(root["task"], "task");
        static const std::set<std::string> tasks{"simulate", "bounds", "idset", "clogit", "verify-all"};
        if (!tasks.count(rc.task)) fail(root["task"], "unknown task '" + rc.task + "'");
    }
    if (!root["model"]) throw ConfigError("missing 'model' block", 1);
    detail::parse_model(root["model"], rc);
    if (root["bounds"]) detail::parse_bounds(root["bounds"], rc);

    if (const auto g = root["idset"]) {
        detail::check_keys(g, {"grid"}, "idset");
        if (const auto gr = g["grid"]) {
            detail::check_keys(gr, {"kind", "coordinate", "values", "axes"}, "idset.grid");
            if (gr["kind"]) rc.theta_grid.kind = scalar<std::string>(gr["kind"], "idset.grid.kind");
            if (rc.theta_grid.kind == "slice") {
                if (gr["coordinate"]) rc.theta_grid.coordinate = scalar<std::size_t>(gr["coordinate"], "idset.grid.coordinate");
                if (rc.theta_grid.coordinate >= rc.model.theta0.dim())
                    fail(gr["coordinate"], "idset.grid.coordinate is out of range");
                if (!gr["values"]) fail(gr, "slice grid needs 'values'");
                rc.theta_grid.values = detail::values_at(gr["values"], "idset.grid.values");
            } else if (rc.theta_grid.kind == "product") {
                if (!gr["axes"] || !gr["axes"].IsSequence()) fail(gr, "product grid needs a list of 'axes'");
                for (const auto& a : gr["axes"]) rc.theta_grid.axes.push_back(detail::values_at(a, "idset.grid.axes entry"));
                if (rc.theta_grid.axes.size() != rc.model.theta0.dim())
                    fail(gr["axes"], "product grid needs one axis per theta coordinate");
            } else {
                fail(gr["kind"], "idset.grid.kind must be 'slice' or 'product'");
            }
        }
    }
    if (const auto c = root["clogit"]) {
        detail::check_keys(c, {"families", "budget"}, "clogit");
        if (c["families"]) {
            rc.clogit_families.clear();
            for (const auto& f : c["families"]) {
                try {
                    const auto fam = family_from_name(scalar<std::string>(f, "clogit.families entry"));
                    if (fam == Family::dyad_transitions || fam == Family::balanced_signed_subgraphs ||
                        fam == Family::node_balanced_weighted)
                        fail(f, "clogit needs completely node-balanced signed families "
                                "(within_date_tetrads, intertemporal_tetrads, triadic_cycles)");
                    rc.clogit_families.push_back(fam);
                } catch (const DomainError& e) {
                    fail(f, e.what());
                }
            }
        }
        if (c["budget"]) rc.clogit_budget = scalar<std::size_t>(c["budget"], "clogit.budget");
        if (rc.clogit_budget == 0) fail(c["budget"], "clogit.budget must be positive");
    }

    check_task(rc, rc.task);
    return rc;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open configuration file '" + path + "'", 0);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_run_config(ss.str());
}

}  // namespace dyadnet::cli
