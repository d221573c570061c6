#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rde/construction.hpp"
#include "rde/io.hpp"
#include "rde/region.hpp"
#include "rde/source_model.hpp"

namespace rde {

// Bad or inconsistent run configuration; mapped to exit code 2 by the CLI.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline const std::vector<std::string>& known_config_keys() {
    static const std::vector<std::string> keys = {
        "source", "source.p", "source.a", "source.nx", "source.ny",
        "q", "n", "beta", "mode", "rate_target", "marg_threshold",
        "num_samples", "seed", "threads", "out_dir", "spec_file",
        "distortion",
        "channel", "channel.eps", "channel.noise", "channel.D_max", "channel.Delta_min",
        "region.grid_res", "region.refine_iters", "region.budget",
        "trials", "frozen_policy", "frozen_values", "emit_trials",
        "oracle.mode",
        "timeshare.limit", "timeshare.epsilon", "timeshare.d_target", "timeshare.delta_target",
    };
    return keys;
}

// Matrix blocks appear as numbered rows: source.row.0, channel.row.3, ...
inline bool is_row_key(const std::string& key) {
    for (const char* prefix : {"source.row.", "channel.row.", "distortion.row."}) {
        const std::string p = prefix;
        if (key.size() > p.size() && key.compare(0, p.size(), p) == 0) {
            bool digits = true;
            for (std::size_t i = p.size(); i < key.size(); ++i)
                if (!std::isdigit((unsigned char)key[i])) digits = false;
            if (digits) return true;
        }
    }
    return false;
}

}  // namespace detail

// Flat key=value run description. '#' lines are comments; keys are unique and
// must come from the known set (matrix rows as <block>.row.<index>).
struct RunConfig {
    std::map<std::string, std::string> kv;
    std::string origin = "<config>";

    static RunConfig parse_text(const std::string& text, const std::string& origin) {
        RunConfig cfg;
        cfg.origin = origin;
        std::size_t line_no = 0, pos = 0;
        while (pos <= text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string::npos) eol = text.size();
            std::string line = trim(text.substr(pos, eol - pos));
            pos = eol + 1;
            ++line_no;
            if (line.empty() || line[0] == '#') continue;
            const std::size_t eq = line.find('=');
            const std::string where = origin + ":" + std::to_string(line_no);
            if (eq == std::string::npos)
                throw config_error(where + ": expected key=value, got '" + line + "'");
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            if (key.empty()) throw config_error(where + ": empty key");
            const auto& known = detail::known_config_keys();
            const bool ok = detail::is_row_key(key) ||
                            std::find(known.begin(), known.end(), key) != known.end();
            if (!ok) throw config_error(where + ": unknown key '" + key + "'");
            if (!cfg.kv.emplace(key, value).second)
                throw config_error(where + ": duplicate key '" + key + "'");
        }
        return cfg;
    }

    static RunConfig parse_file(const std::string& path) {
        std::string text;
        try {
            text = read_text_file(path);
        } catch (const std::exception& e) {
            throw config_error(e.what());
        }
        return parse_text(text, path);
    }

    bool has(const std::string& key) const { return kv.count(key) != 0; }

    const std::string& str(const std::string& key) const {
        auto it = kv.find(key);
        if (it == kv.end()) throw config_error(origin + ": missing required key '" + key + "'");
        return it->second;
    }
    std::string str_or(const std::string& key, const std::string& fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : it->second;
    }

    double num(const std::string& key) const { return parse_num(key, str(key)); }
    double num_or(const std::string& key, double fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_num(key, it->second);
    }
    long long integer(const std::string& key) const { return parse_integer(key, str(key)); }
    long long integer_or(const std::string& key, long long fallback) const {
        auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_integer(key, it->second);
    }
    std::uint64_t uid_or(const std::string& key, std::uint64_t fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            return parse_uint_strict(it->second);
        } catch (const std::exception&) {
            throw config_error(origin + ": key '" + key + "': bad unsigned value '" +
                               it->second + "'");
        }
    }
    bool flag_or(const std::string& key, bool fallback) const {
        auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        const std::string& v = it->second;
        if (v == "1" || v == "true") return true;
        if (v == "0" || v == "false") return false;
        throw config_error(origin + ": key '" + key + "': expected 0/1/true/false, got '" + v +
                           "'");
    }

    std::vector<double> row(const std::string& key, std::size_t want) const {
        std::vector<double> vals;
        for (const std::string& tok : split_ws(str(key))) vals.push_back(parse_num(key, tok));
        if (vals.size() != want)
            throw config_error(origin + ": key '" + key + "': expected " + std::to_string(want) +
                               " values, got " + std::to_string(vals.size()));
        return vals;
    }

   private:
    double parse_num(const std::string& key, const std::string& value) const {
        try {
            return parse_double_strict(value);
        } catch (const std::exception&) {
            throw config_error(origin + ": key '" + key + "': bad number '" + value + "'");
        }
    }
    long long parse_integer(const std::string& key, const std::string& value) const {
        try {
            return parse_int_strict(value);
        } catch (const std::exception&) {
            throw config_error(origin + ": key '" + key + "': bad integer '" + value + "'");
        }
    }
};

inline JointSource make_source(const RunConfig& cfg) {
    const std::string kind = cfg.str("source");
    try {
        if (kind == "dsbs") return dsbs_source(cfg.num_or("source.p", 0.1));
        if (kind == "zchannel") return zchannel_source(cfg.num_or("source.a", 0.3));
        if (kind == "custom") {
            const int nx = int(cfg.integer("source.nx"));
            const int ny = int(cfg.integer("source.ny"));
            if (nx <= 0 || ny <= 0) throw config_error("source.nx/source.ny must be positive");
            std::vector<double> Q;
            for (int x = 0; x < nx; ++x) {
                auto r = cfg.row("source.row." + std::to_string(x), std::size_t(ny));
                Q.insert(Q.end(), r.begin(), r.end());
            }
            return JointSource(nx, ny, std::move(Q));
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(cfg.origin + ": source: " + e.what());
    }
    throw config_error(cfg.origin + ": source must be dsbs, zchannel, or custom, got '" + kind +
                       "'");
}

inline DistortionMetric make_metric(const RunConfig& cfg, const JointSource& src, int q) {
    const std::string kind = cfg.str_or("distortion", "hamming");
    try {
        if (kind == "hamming") return DistortionMetric::hamming(src.nx, q);
        if (kind == "matrix") {
            std::vector<double> vals;
            for (int x = 0; x < src.nx; ++x) {
                auto r = cfg.row("distortion.row." + std::to_string(x), std::size_t(q));
                vals.insert(vals.end(), r.begin(), r.end());
            }
            return DistortionMetric(src.nx, q, std::move(vals));
        }
    } catch (const config_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(cfg.origin + ": distortion: " + e.what());
    }
    throw config_error(cfg.origin + ": distortion must be hamming or matrix, got '" + kind + "'");
}

// Test channel resolved from the config: explicit rows, a preset, or a region
// query (minimum-rate channel meeting channel.D_max / channel.Delta_min).
struct ChannelChoice {
    TestChannel ch;
    std::optional<FrontierPoint> query;  // set when channel=region
};

inline ChannelChoice make_channel(const RunConfig& cfg, const JointSource& src,
                                  const DistortionMetric& dist, int q) {
    const std::string kind = cfg.str("channel");
    try {
        if (kind == "bsc") {
            if (q != 2) throw config_error("channel=bsc requires q=2");
            return {bsc_test_channel(src, cfg.num("channel.eps")), std::nullopt};
        }
        if (kind == "additive") {
            auto noise = cfg.row("channel.noise", std::size_t(q));
            return {additive_noise_test_channel(src, q, noise), std::nullopt};
        }
        if (kind == "custom") {
            std::vector<double> rows;
            for (int x = 0; x < src.nx; ++x)
                for (int y = 0; y < src.ny; ++y) {
                    auto r = cfg.row("channel.row." + std::to_string(x * src.ny + y),
                                     std::size_t(q));
                    rows.insert(rows.end(), r.begin(), r.end());
                }
            return {TestChannel(src.nx, src.ny, q, std::move(rows)), std::nullopt};
        }
        if (kind == "region") {
            const double d_max = cfg.num("channel.D_max");
            const double delta_min = cfg.num("channel.Delta_min");
            const int grid_res = int(cfg.integer_or("region.grid_res", 20));
            const int refine_iters = int(cfg.integer_or("region.refine_iters", 12));
            const long long budget = cfg.integer_or("region.budget", 2000000);
            const int threads = int(cfg.integer_or("threads", 0));
            RegionFrontier frontier =
                sweep_region(src, dist, q, grid_res, refine_iters, budget, threads);
            FrontierPoint best = min_rate_at(src, dist, d_max, delta_min, frontier, refine_iters);
            return {best.channel, best};
        }
    } catch (const config_error&) {
        throw;
    } catch (const infeasible_request&) {
        throw;
    } catch (const no_feasible_point&) {
        throw;
    } catch (const limit_error&) {
        throw;
    } catch (const std::exception& e) {
        throw config_error(cfg.origin + ": channel: " + e.what());
    }
    throw config_error(cfg.origin + ": channel must be bsc, additive, custom, or region, got '" +
                       kind + "'");
}

inline SelectParams make_select_params(const RunConfig& cfg) {
    SelectParams params;
    params.mode = cfg.str_or("mode", "threshold");
    if (params.mode != "threshold" && params.mode != "rank")
        throw config_error(cfg.origin + ": mode must be threshold or rank, got '" + params.mode +
                           "'");
    params.beta = cfg.num_or("beta", 0.3);
    params.rate_target = cfg.num_or("rate_target", 0.5);
    params.marg_threshold = cfg.num_or("marg_threshold", -1.0);
    return params;
}

inline SymbolVector parse_symbols(const RunConfig& cfg, const std::string& key, int q) {
    SymbolVector out;
    for (const std::string& tok : split_ws(cfg.str(key))) {
        long long v;
        try {
            v = parse_int_strict(tok);
        } catch (const std::exception&) {
            throw config_error(cfg.origin + ": key '" + key + "': bad symbol '" + tok + "'");
        }
        if (v < 0 || v >= q)
            throw config_error(cfg.origin + ": key '" + key + "': symbol " + tok +
                               " out of range for q=" + std::to_string(q));
        out.push_back(Symbol(v));
    }
    return out;
}

}  // namespace rde
