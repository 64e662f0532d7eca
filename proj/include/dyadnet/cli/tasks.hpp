#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dyadnet/cli/artifacts.hpp"
#include "dyadnet/cli/run_config.hpp"
#include "dyadnet/clogit/exact.hpp"
#include "dyadnet/clogit/fit.hpp"
#include "dyadnet/clogit/rank.hpp"
#include "dyadnet/clogit/sample.hpp"
#include "dyadnet/configurations/config_text.hpp"
#include "dyadnet/configurations/enumerate.hpp"
#include "dyadnet/core/text.hpp"
#include "dyadnet/inequalities/identified_set.hpp"
#include "dyadnet/model/dataset.hpp"
#include "dyadnet/model/panel_io.hpp"
#include "dyadnet/model/simulate.hpp"

namespace dyadnet::cli {

/// Command-line overrides applied on top of the configuration file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::optional<double> slack;
    std::optional<std::string> out;
};

inline void apply(RunConfig& rc, const Overrides& o) {
    if (o.seed) rc.seed = *o.seed;
    if (o.threads) {
        if (*o.threads < 1) throw ConfigError("--threads must be at least 1", 0);
        rc.threads = *o.threads;
    }
    if (o.slack) {
        if (*o.slack < 0) throw ConfigError("--slack must be non-negative", 0);
        rc.bound_options.slack = *o.slack;
    }
    if (o.out) rc.output = *o.out;
    rc.bound_options.threads = rc.threads;
}

/// Default patterns used when the configuration names none.
inline std::vector<WeightedConfiguration> default_signed_patterns() {
    return {parse_config("+0,1,1 | -0,1,2"), parse_config("+0,1,1;+0,2,2 | -0,1,2;-0,2,1")};
}

inline std::vector<WeightedConfiguration> default_weighted_patterns() {
    return {parse_config("+0,1,1;+0,2,1 | -1,2,1"), parse_config("+0,1,1*2;+2,3,1 | -0,2,1*2;-1,3,1")};
}

/// Two configurations with one canceled dyad (0,1) and one loaded dyad (0,2); swapping the two
/// dates maps one onto the other, so their composite errors share a distribution.
inline std::vector<std::vector<WeightedConfiguration>> default_classes() {
    return {{parse_config("+0,1,1;+0,2,1 | -0,1,2"), parse_config("+0,1,2;+0,2,1 | -0,1,1")}};
}

struct Study {
    Simulation sim;
    std::shared_ptr<const Dataset> data;
};

inline Study simulate_study(const RunConfig& rc) {
    SimulationInputs inputs;
    if (rc.initial_file) {
        std::ifstream in(*rc.initial_file);
        if (!in) throw DomainError("cannot open initial network file '" + *rc.initial_file + "'");
        auto pf = read_panel(in);
        if (pf.panel.nodes() != rc.model.n) throw DomainError("initial network has a different node count");
        inputs.initial = std::move(pf.panel);
    }
    Study s{simulate_panel(rc.model, rc.seed, inputs, rc.threads), nullptr};
    s.data = std::make_shared<const Dataset>(s.sim.panel, s.sim.covariates, rc.model.registry, rc.threads);
    return s;
}

struct MenuEntry {
    Restriction restriction;
    bool asserted = true;  ///< false when the DGP does not meet the family's preconditions
    std::string note;
};

/// Restriction menu for the configured families on one dataset.
inline std::vector<MenuEntry> build_menu(const RunConfig& rc, const std::shared_ptr<const Dataset>& data) {
    const InstancePolicy policy{rc.instance_cap, rc.seed};
    const auto signed_patterns = rc.signed_patterns.empty() ? default_signed_patterns() : rc.signed_patterns;
    const auto weighted = rc.weighted_patterns.empty() ? default_weighted_patterns() : rc.weighted_patterns;
    const auto classes = rc.classes.empty() ? default_classes() : rc.classes;
    const int T = data->periods();
    auto fits = [&](const WeightedConfiguration& c) {
        for (const auto& cell : c.cells)
            if (cell.cell.t > T) return false;
        return static_cast<int>(config_nodes(c).size()) <= data->nodes();
    };
    std::vector<MenuEntry> menu;
    for (const auto& f : rc.families) {
        if (f == "dyad_panel") {
            menu.push_back({dyad_panel_restriction(data), true, ""});
        } else if (f == "signed_subgraph") {
            for (const auto& p : signed_patterns)
                if (fits(p)) menu.push_back({signed_subgraph_restriction(data, to_signed(p), policy), true, ""});
        } else if (f == "partial_envelope") {
            for (const auto& cls : classes) {
                bool ok = true;
                for (const auto& g : cls) ok = ok && fits(g);
                if (ok) menu.push_back({partial_envelope_restriction(data, cls, policy), true, ""});
            }
        } else if (f == "known_cdf") {
            for (const auto& p : signed_patterns) {
                if (!fits(p)) continue;
                if (!rc.model.shocks.serially_independent()) {
                    // The composite CDF is not defined; the family is skipped rather than asserted.
                    continue;
                }
                menu.push_back({known_cdf_restriction(data, to_signed(p), rc.model.shocks, policy), true, ""});
            }
        } else if (f == "weighted_node") {
            const bool additive = rc.model.heterogeneity.kind == HeterogeneityKind::additive_node;
            for (const auto& p : weighted)
                if (fits(p))
                    menu.push_back({weighted_node_restriction(data, p, policy), additive,
                                    additive ? "" : "exploratory: DGP heterogeneity is not additive"});
        }
    }
    return menu;
}

inline std::string theta_text(const Theta& th) {
    std::string s;
    const auto v = th.stacked();
    for (std::size_t k = 0; k < v.size(); ++k) s += (k ? ";" : "") + format_double(v[k]);
    return s;
}

inline std::string family_file(const std::string& family) { return "bounds_" + family + ".csv"; }

/// Evaluates the menu at theta and writes one CSV per family.
inline std::vector<std::pair<MenuEntry, BoundResult>> write_bounds(Artifacts& out, const RunConfig& rc,
                                                                   const std::vector<MenuEntry>& menu, const Theta& theta,
                                                                   std::size_t theta_id = 0) {
    std::vector<std::pair<MenuEntry, BoundResult>> results;
    std::map<std::string, bool> opened;
    for (const auto& entry : menu) {
        auto res = entry.restriction.evaluate(theta, rc.c_grid, rc.bound_options);
        auto& os = out.open(family_file(entry.restriction.family));
        if (!opened[entry.restriction.family]) {
            os << kBoundsCsvHeader << '\n';
            opened[entry.restriction.family] = true;
        }
        write_bounds_rows(os, theta_id, entry.restriction.config_id, res);
        results.emplace_back(entry, std::move(res));
    }
    return results;
}

inline void write_manifest(const std::filesystem::path& dir, const RunConfig& rc, const std::string& task,
                           std::chrono::system_clock::time_point start, std::chrono::system_clock::time_point end,
                           const std::vector<std::string>& outputs, const std::string& status) {
    std::ofstream m(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
    m << "tool_version: " << kToolVersion << "\nschema_version: " << rc.schema_version << "\ntask: " << task
      << "\nconfig_hash: fnv1a64:" << hex64(fnv1a64(rc.source)) << "\nseed: " << rc.seed << "\nthreads: " << rc.threads
      << "\nslack: " << format_double(rc.bound_options.slack) << "\nstatus: " << status << "\noutputs:";
    for (const auto& o : outputs) m << ' ' << o;
    m << "\nstarted_utc: " << utc_timestamp(start) << "\nfinished_utc: " << utc_timestamp(end)
      << "\nwall_clock_seconds: " << format_double(std::chrono::duration<double>(end - start).count()) << '\n';
}

// ---------------------------------------------------------------------------------------------
// Tasks

inline void task_simulate(const RunConfig& rc, Artifacts& out, std::ostream& log) {
    const auto study = simulate_study(rc);
    write_panel(out.open("panel.txt"), study.sim.panel, study.sim.covariates, static_cast<int>(rc.model.registry.size()));
    auto& s = out.open("simulation_summary.csv");
    s << "t,density\n";
    for (int t = 0; t <= rc.model.T; ++t) s << t << ',' << format_double(study.sim.panel.density(t)) << '\n';
    log << "simulated n=" << rc.model.n << " T=" << rc.model.T << "\n";
}

inline void task_bounds(const RunConfig& rc, Artifacts& out, std::ostream& log) {
    const auto study = simulate_study(rc);
    const auto menu = build_menu(rc, study.data);
    const auto results = write_bounds(out, rc, menu, rc.model.theta0);
    auto& w = out.open("warnings.txt");
    for (const auto& [entry, res] : results) {
        log << entry.restriction.family << " " << entry.restriction.config_id << ": " << res.evaluations.size()
            << " evaluations, " << res.violations() << " violations\n";
        for (const auto& msg : res.warnings) w << entry.restriction.family << ": " << msg << '\n';
    }
}

inline ThetaGrid grid_from(const RunConfig& rc) {
    if (rc.theta_grid.kind == "product") return ThetaGrid::product(rc.theta_grid.axes, rc.model.theta0.alpha.size());
    auto values = rc.theta_grid.values;
    if (values.empty()) values = ThetaGrid::linspace(-2.0, 2.0, 21);
    return ThetaGrid::slice(rc.model.theta0, rc.theta_grid.coordinate, values);
}

inline void task_idset(const RunConfig& rc, Artifacts& out, std::ostream& log) {
    const auto study = simulate_study(rc);
    const auto menu = build_menu(rc, study.data);
    std::vector<Restriction> rs;
    for (const auto& m : menu) rs.push_back(m.restriction);
    IdentifiedSetOptions opt;
    opt.bounds = rc.bound_options;
    opt.threads = rc.threads;
    if (!rc.c_grid.empty()) opt.explicit_grids.assign(rs.size(), rc.c_grid);
    const auto grid = grid_from(rc);
    const auto rep = identified_set(grid, rs, opt);
    write_idset_report(out.open("idset_report.txt"), rep);
    auto& csv = out.open("idset.csv");
    csv << "theta_id";
    for (std::size_t k = 0; k < rc.model.theta0.alpha.size(); ++k) csv << ",alpha_" << k + 1;
    for (std::size_t k = 0; k < rc.model.theta0.lambda.size(); ++k) csv << ",lambda_" << k + 1;
    for (const auto& f : rep.families) csv << ',' << f;
    csv << ",verdict,violations\n";
    for (const auto& v : rep.verdicts) {
        csv << v.theta_id;
        for (double x : v.theta.stacked()) csv << ',' << format_double(x);
        for (const auto& f : rep.families) csv << ',' << (v.family_pass.at(f) ? "pass" : "fail");
        csv << ',' << (v.pass ? "pass" : "fail") << ',' << v.violations.size() << '\n';
    }
    log << "identified set: " << rep.passing() << " of " << rep.verdicts.size() << " grid points pass\n";
}

struct ClogitOutcome {
    ClogitSample sample;
    RankCheck rank;
    std::optional<FitResult> fit;
    std::string error;
};

inline ClogitOutcome run_clogit(const RunConfig& rc, const Dataset& data) {
    std::vector<ConfigBatch> batches;
    std::uint64_t tag = 0;
    for (auto fam : rc.clogit_families) {
        FamilySpec fs;
        fs.family = fam;
        batches.push_back({to_string(fam), enumerate(fs, data.nodes(), data.periods(), rc.clogit_budget,
                                                     hash_combine(rc.seed, ++tag))});
    }
    ClogitOutcome o;
    o.sample = build_sample(data, batches);
    o.rank = rank_check(o.sample);
    if (o.sample.empty()) {
        o.error = "no informative rows";
        return o;
    }
    try {
        Theta init{std::vector<double>(data.dh(), 0.0), std::vector<double>(data.dx(), 0.0)};
        FitOptions fo;
        fo.threads = rc.threads;
        o.fit = fit(o.sample, init, fo);
    } catch (const PointIdentificationFailure& e) {
        o.error = e.what();
    } catch (const Separation& e) {
        o.error = e.what();
    }
    return o;
}

inline void write_clogit_report(std::ostream& os, const ClogitOutcome& o, const Theta& theta0) {
    os << "clogit {\n  rows: " << o.sample.rows() << "\n  configurations: " << o.sample.configurations_seen
       << "\n  rank: " << o.rank.overall.rank << " of " << o.rank.overall.dim << "\n  families: [\n";
    for (std::size_t f = 0; f < o.rank.cumulative.size(); ++f)
        os << "    { family: " << o.rank.cumulative[f].family << ", rows: " << o.rank.cumulative[f].rows
           << ", cumulative_rank: " << o.rank.cumulative[f].rank << " }\n";
    os << "  ]\n";
    if (!o.rank.completing_family.empty()) os << "  full_rank_reached_at: " << o.rank.completing_family << "\n";
    if (o.fit) {
        os << "  theta_hat: [" << theta_text(o.fit->theta) << "]\n  theta0: [" << theta_text(theta0)
           << "]\n  loglik: " << format_double(o.fit->loglik) << "\n  gradient_norm: " << format_double(o.fit->gradient_norm)
           << "\n  converged: " << (o.fit->converged ? "true" : "false") << "\n  iterations: " << o.fit->iterations << "\n";
    } else {
        os << "  error: \"" << o.error << "\"\n";
    }
    os << "  note: \"information matrix is not a valid covariance under configuration overlap\"\n}\n";
}

inline void task_clogit(const RunConfig& rc, Artifacts& out, std::ostream& log) {
    const auto study = simulate_study(rc);
    const auto o = run_clogit(rc, *study.data);
    write_sample_csv(out.open("clogit_sample.csv"), o.sample);
    write_clogit_report(out.open("clogit_report.txt"), o, rc.model.theta0);
    if (o.fit)
        log << "theta_hat = [" << theta_text(o.fit->theta) << "], rank " << o.rank.overall.rank << "\n";
    else
        throw DomainError("conditional-logit fit failed: " + o.error);
}

struct SummaryRow {
    std::string check;
    std::string family;
    std::string verdict;  ///< pass | fail | exploratory | skipped
    std::string measure;
    std::string detail;
};

inline void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows) {
    os << "check,family,verdict,measure,detail\n";
    for (const auto& r : rows)
        os << csv_field(r.check) << ',' << csv_field(r.family) << ',' << r.verdict << ',' << csv_field(r.measure) << ','
           << csv_field(r.detail) << '\n';
}

/// Simulates at the configured truth and checks every restriction family at theta0, the exact
/// conditional-logit identity and the conditional-logit fit.
inline bool task_verify_all(const RunConfig& rc, Artifacts& out, std::ostream& log) {
    const auto study = simulate_study(rc);
    const auto menu = build_menu(rc, study.data);
    const auto results = write_bounds(out, rc, menu, rc.model.theta0);
    static const std::map<std::string, std::string> check_name{{"dyad_panel", "dyad-panel envelope"},
                                                               {"signed_subgraph", "signed-subgraph bounds"},
                                                               {"partial_envelope", "partial-differencing envelope"},
                                                               {"known_cdf", "known composite CDF"},
                                                               {"weighted_node", "weighted node-differencing"}};
    std::vector<SummaryRow> rows;
    bool ok = true;
    for (const auto& [entry, res] : results) {
        std::string verdict = res.evaluations.empty() ? "skipped" : (res.pass() ? "pass" : "fail");
        if (!entry.asserted && verdict != "skipped") verdict = "exploratory";
        if (verdict == "fail") ok = false;
        const double worst = res.evaluations.empty() ? 0.0 : res.worst_margin();
        rows.push_back({check_name.at(entry.restriction.family), entry.restriction.family, verdict,
                        "worst_margin_se=" + format_double(worst),
                        entry.restriction.config_id + (entry.note.empty() ? "" : " (" + entry.note + ")") + "; " +
                            std::to_string(res.evaluations.size()) + " evaluations, " + std::to_string(res.violations()) +
                            " violations"});
    }
    if (!rc.model.shocks.serially_independent())
        rows.push_back({check_name.at("known_cdf"), "known_cdf", "skipped", "",
                        "requires serially independent shocks"});

    const auto law = rc.model.shocks.marginal_law();
    const bool logit = rc.model.shocks.serially_independent() && law.family() == Marginal::Family::logistic &&
                       law.scale() == 1.0;
    const bool additive = rc.model.heterogeneity.kind == HeterogeneityKind::additive_node;
    {
        // Exact identity on node-balanced configurations from every clogit family.
        const EtaRecord eta(study.sim, rc.model.theta0);
        double worst = 0.0;
        std::size_t count = 0;
        std::uint64_t tag = 100;
        for (auto fam : rc.clogit_families) {
            FamilySpec fs;
            fs.family = fam;
            for (const auto& c : enumerate(fs, rc.model.n, rc.model.T, 1000, hash_combine(rc.seed, ++tag))) {
                worst = std::max(worst, std::fabs(exact_log_odds(c, eta) - delta_W(c, rc.model.theta0, *study.data)));
                ++count;
            }
        }
        std::string verdict = worst < 1e-10 ? "pass" : "fail";
        if (!(logit && additive)) verdict = "exploratory";
        if (verdict == "fail") ok = false;
        rows.push_back({"exact conditional-logit identity", "clogit", verdict, "max_abs_error=" + format_double(worst),
                        std::to_string(count) + " node-balanced configurations"});
    }
    {
        const auto o = run_clogit(rc, *study.data);
        write_clogit_report(out.open("clogit_report.txt"), o, rc.model.theta0);
        std::string verdict = o.fit && o.fit->converged && o.rank.spans() ? "pass" : "fail";
        if (!(logit && additive)) verdict = "exploratory";
        if (verdict == "fail") ok = false;
        std::string measure;
        if (o.fit) {
            const auto a = o.fit->theta.stacked();
            const auto b = rc.model.theta0.stacked();
            double dev = 0.0;
            for (std::size_t k = 0; k < a.size(); ++k) dev = std::max(dev, std::fabs(a[k] - b[k]));
            measure = "max_abs_deviation=" + format_double(dev);
        }
        rows.push_back({"conditional-logit fit", "clogit", verdict, measure,
                        "rank " + std::to_string(o.rank.overall.rank) + " of " + std::to_string(o.rank.overall.dim) +
                            "; " + std::to_string(o.sample.rows()) + " informative rows" +
                            (o.fit ? "; theta_hat=" + theta_text(o.fit->theta) : "; " + o.error)});
    }
    write_summary(out.open("verify_summary.csv"), rows);
    for (const auto& r : rows) log << r.verdict << "  " << r.check << "  [" << r.family << "]  " << r.measure << "\n";
    return ok;
}

// ---------------------------------------------------------------------------------------------
// report

inline std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> fields;
        std::string cur;
        bool quoted = false;
        for (std::size_t k = 0; k < line.size(); ++k) {
            const char ch = line[k];
            if (quoted) {
                if (ch == '"' && k + 1 < line.size() && line[k + 1] == '"') {
                    cur += '"';
                    ++k;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    cur += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                fields.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        fields.push_back(cur);
        rows.push_back(std::move(fields));
    }
    return rows;
}

/// Consolidates a results directory into plot-ready tables; returns the files written.
inline std::vector<std::string> report(const std::filesystem::path& dir, std::ostream& log) {
    if (!std::filesystem::exists(dir / "manifest.txt"))
        throw DomainError("no manifest.txt in '" + dir.string() + "'; not a results directory");
    std::vector<std::string> written;
    if (std::filesystem::exists(dir / "verify_summary.csv")) {
        const auto rows = read_csv(dir / "verify_summary.csv");
        std::ofstream os(dir / "report_verdicts.csv", std::ios::binary | std::ios::trunc);
        os << "check,family,verdict,measure\n";
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() < 4) continue;
            os << csv_field(rows[r][0]) << ',' << csv_field(rows[r][1]) << ',' << rows[r][2] << ','
               << csv_field(rows[r][3]) << '\n';
            log << rows[r][2] << "  " << rows[r][0] << "  " << rows[r][3] << "\n";
        }
        written.push_back("report_verdicts.csv");
    }
    if (std::filesystem::exists(dir / "idset.csv")) {
        const auto rows = read_csv(dir / "idset.csv");
        std::ofstream os(dir / "report_idset.csv", std::ios::binary | std::ios::trunc);
        if (!rows.empty()) {
            const auto& head = rows[0];
            std::vector<std::size_t> coords;
            std::size_t verdict = head.size();
            for (std::size_t k = 0; k < head.size(); ++k) {
                if (head[k].rfind("alpha_", 0) == 0 || head[k].rfind("lambda_", 0) == 0) coords.push_back(k);
                if (head[k] == "verdict") verdict = k;
            }
            for (std::size_t r = 0; r < rows.size(); ++r) {
                for (std::size_t k = 0; k < coords.size(); ++k) os << (k ? "," : "") << rows[r][coords[k]];
                os << ',' << (verdict < rows[r].size() ? rows[r][verdict] : "") << '\n';
            }
        }
        written.push_back("report_idset.csv");
    }
    std::vector<std::filesystem::path> bound_files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("bounds_", 0) == 0 && e.path().extension() == ".csv") bound_files.push_back(e.path());
    }
    std::sort(bound_files.begin(), bound_files.end());
    if (!bound_files.empty()) {
        std::ofstream os(dir / "report_bounds.csv", std::ios::binary | std::ios::trunc);
        os << "family,config_id,evaluations,violations\n";
        for (const auto& p : bound_files) {
            const auto rows = read_csv(p);
            std::map<std::pair<std::string, std::string>, std::pair<std::size_t, std::size_t>> agg;
            std::vector<std::pair<std::string, std::string>> order;
            for (std::size_t r = 1; r < rows.size(); ++r) {
                if (rows[r].size() < 10) continue;
                const auto key = std::make_pair(rows[r][1], rows[r][2]);
                if (!agg.count(key)) order.push_back(key);
                auto& a = agg[key];
                ++a.first;
                if (rows[r][9] == "fail") ++a.second;
            }
            for (const auto& k : order)
                os << csv_field(k.first) << ',' << csv_field(k.second) << ',' << agg[k].first << ',' << agg[k].second << '\n';
        }
        written.push_back("report_bounds.csv");
    }
    if (written.empty()) throw DomainError("results directory '" + dir.string() + "' has no task outputs to report");
    return written;
}

/// Runs the configured task; returns the process exit status.
inline int run_task(RunConfig rc, const std::string& task, std::ostream& log) {
    const auto start = std::chrono::system_clock::now();
    Artifacts out(rc.output);
    bool ok = true;
    try {
        if (task == "simulate")
            task_simulate(rc, out, log);
        else if (task == "bounds")
            task_bounds(rc, out, log);
        else if (task == "idset")
            task_idset(rc, out, log);
        else if (task == "clogit")
            task_clogit(rc, out, log);
        else if (task == "verify-all")
            ok = task_verify_all(rc, out, log);
        else
            throw ConfigError("unknown task '" + task + "'", 0);
        out.commit();
    } catch (...) {
        out.abandon();
        write_manifest(out.dir(), rc, task, start, std::chrono::system_clock::now(), out.names(), "failed");
        throw;
    }
    write_manifest(out.dir(), rc, task, start, std::chrono::system_clock::now(), out.names(), ok ? "ok" : "violations");
    return ok ? 0 : 2;
}

}  // namespace dyadnet::cli
