#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <string_view>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/text.hpp"

namespace dyadnet {

// One configuration per line: "+i,j,t;+i,j,t | -i,j,t;-i,j,t". A cell may carry a magnitude
// suffix "*w" (weight +w on the plus side, -w on the minus side); unit weights are written bare.

namespace detail {

inline std::string format_cell(const WeightedCell& c) {
    std::string s = (c.weight > 0 ? "+" : "-") + std::to_string(c.cell.i) + "," + std::to_string(c.cell.j) + "," +
                    std::to_string(c.cell.t);
    const double mag = std::fabs(c.weight);
    if (mag != 1.0) s += "*" + format_double(mag);
    return s;
}

}  // namespace detail

/// Positive cells first, then negative, each in stored order.
inline WeightedConfiguration sign_partitioned(WeightedConfiguration cfg) {
    std::stable_partition(cfg.cells.begin(), cfg.cells.end(), [](const WeightedCell& c) { return c.weight > 0; });
    return cfg;
}

inline std::string format_config(const WeightedConfiguration& cfg) {
    std::string plus, minus;
    for (const auto& c : cfg.cells) {
        std::string& side = c.weight > 0 ? plus : minus;
        if (!side.empty()) side += ";";
        side += detail::format_cell(c);
    }
    return plus + " | " + minus;
}

inline std::string format_config(const SignedConfiguration& cfg) {
    return format_config(WeightedConfiguration::from_signed(cfg));
}

inline WeightedConfiguration parse_config(std::string_view line) {
    const auto sides = split(line, '|');
    if (sides.size() != 2) throw DomainError("configuration needs exactly one '|': '" + std::string(line) + "'");
    WeightedConfiguration cfg;
    for (int side = 0; side < 2; ++side) {
        const char expected = side == 0 ? '+' : '-';
        for (auto tok : split(trim(sides[static_cast<std::size_t>(side)]), ';')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            if (tok.front() != expected)
                throw DomainError("cell '" + std::string(tok) + "' must start with '" + expected + "'");
            tok.remove_prefix(1);
            double mag = 1.0;
            if (const auto star = tok.find('*'); star != std::string_view::npos) {
                mag = parse_double(trim(tok.substr(star + 1)));
                if (!(mag > 0.0) || !std::isfinite(mag)) throw DomainError("weight magnitude must be positive");
                tok = tok.substr(0, star);
            }
            const auto parts = split(tok, ',');
            if (parts.size() != 3) throw DomainError("cell needs three fields i,j,t: '" + std::string(tok) + "'");
            const EdgeTimeCell cell(static_cast<int>(parse_int(trim(parts[0]))), static_cast<int>(parse_int(trim(parts[1]))),
                                    static_cast<int>(parse_int(trim(parts[2]))));
            cfg.cells.push_back({cell, side == 0 ? mag : -mag});
        }
    }
    return cfg;
}

inline std::vector<WeightedConfiguration> parse_config_lines(std::string_view text) {
    std::vector<WeightedConfiguration> out;
    for (auto line : split(text, '\n')) {
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        out.push_back(parse_config(line));
    }
    return out;
}

}  // namespace dyadnet
