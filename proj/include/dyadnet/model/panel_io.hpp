#pragma once

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/text.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/network.hpp"

namespace dyadnet {

// Columnar text format:
//
//   dyadnet-panel 1
//   <n> <T> <d_z> <d_x>
//   support <v1> <v2> ...        (empty list for continuous covariates)
//   links
//   <i> <j> <t> <D>              one row per dyad i<j and date 0..T
//   covariates
//   <i> <t> <Z_1> ... <Z_dz>     one row per node and date 1..T
//
// Doubles are written in shortest round-trip form, so read(write(x)) == x exactly.

struct PanelFile {
    NetworkPanel panel;
    NodeCovariatePanel covariates;
    int dx = 0;
};

inline void write_panel(std::ostream& os, const NetworkPanel& panel, const NodeCovariatePanel& z, int dx) {
    const int n = panel.nodes();
    const int T = panel.periods();
    os << "dyadnet-panel 1\n" << n << ' ' << T << ' ' << z.dim() << ' ' << dx << "\nsupport";
    for (double v : z.support()) os << ' ' << format_double(v);
    os << "\nlinks\n";
    for (int t = 0; t <= T; ++t)
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) os << i << ' ' << j << ' ' << t << ' ' << (panel.link(i, j, t) ? 1 : 0) << '\n';
    os << "covariates\n";
    for (int i = 0; i < n; ++i)
        for (int t = 1; t <= z.periods(); ++t) {
            os << i << ' ' << t;
            for (double v : z.at(i, t)) os << ' ' << format_double(v);
            os << '\n';
        }
}

inline PanelFile read_panel(std::istream& is) {
    std::string line;
    int lineno = 0;
    auto next = [&]() -> std::vector<std::string_view> {
        while (std::getline(is, line)) {
            ++lineno;
            const auto body = trim(line);
            if (body.empty() || body.front() == '#') continue;
            std::vector<std::string_view> out;
            for (auto tok : split(body, ' '))
                if (!trim(tok).empty()) out.push_back(trim(tok));
            return out;
        }
        throw DomainError("panel file ended early after line " + std::to_string(lineno));
    };
    auto fail = [&](const std::string& what) -> DomainError {
        return DomainError("panel file line " + std::to_string(lineno) + ": " + what);
    };
    auto as_int = [&](std::string_view s) {
        try {
            return static_cast<int>(parse_int(s));
        } catch (const DomainError& e) {
            throw fail(e.what());
        }
    };
    auto as_double = [&](std::string_view s) {
        try {
            return parse_double(s);
        } catch (const DomainError& e) {
            throw fail(e.what());
        }
    };

    auto magic = next();
    if (magic.size() != 2 || magic[0] != "dyadnet-panel" || magic[1] != "1") throw fail("expected 'dyadnet-panel 1'");
    auto shape = next();
    if (shape.size() != 4) throw fail("expected header 'n T d_z d_x'");
    const int n = as_int(shape[0]);
    const int T = as_int(shape[1]);
    const int dz = as_int(shape[2]);
    PanelFile out;
    out.dx = as_int(shape[3]);
    out.panel = NetworkPanel(n, T);
    out.covariates = NodeCovariatePanel(n, T, dz);

    auto sup = next();
    if (sup.empty() || sup[0] != "support") throw fail("expected 'support' line");
    std::vector<double> support;
    for (std::size_t k = 1; k < sup.size(); ++k) support.push_back(as_double(sup[k]));
    out.covariates.set_support(std::move(support));

    if (auto tag = next(); tag.size() != 1 || tag[0] != "links") throw fail("expected 'links'");
    const std::size_t link_rows = out.panel.dyads() * static_cast<std::size_t>(T + 1);
    for (std::size_t r = 0; r < link_rows; ++r) {
        auto row = next();
        if (row.size() != 4) throw fail("link rows have four columns");
        const int i = as_int(row[0]), j = as_int(row[1]), t = as_int(row[2]), d = as_int(row[3]);
        if (d != 0 && d != 1) throw fail("link indicator must be 0 or 1");
        try {
            out.panel.set_link(i, j, t, d == 1);
        } catch (const DomainError& e) {
            throw fail(e.what());
        }
    }
    if (auto tag = next(); tag.size() != 1 || tag[0] != "covariates") throw fail("expected 'covariates'");
    for (int r = 0; r < n * T; ++r) {
        auto row = next();
        if (row.size() != static_cast<std::size_t>(2 + dz)) throw fail("covariate row has the wrong width");
        const int i = as_int(row[0]), t = as_int(row[1]);
        std::vector<double> values;
        for (int k = 0; k < dz; ++k) values.push_back(as_double(row[static_cast<std::size_t>(2 + k)]));
        try {
            auto dst = out.covariates.at(i, t);
            std::copy(values.begin(), values.end(), dst.begin());
        } catch (const DomainError& e) {
            throw fail(e.what());
        }
    }
    out.covariates.validate();
    return out;
}

inline std::string panel_to_string(const NetworkPanel& panel, const NodeCovariatePanel& z, int dx) {
    std::ostringstream os;
    write_panel(os, panel, z, dx);
    return os.str();
}

inline PanelFile panel_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_panel(is);
}

}  // namespace dyadnet
