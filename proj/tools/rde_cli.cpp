// Command-line front end: region | construct | simulate | oracle | timeshare.
// Every run is a pure function of (config, seed): primary outputs are written
// with fixed names and are byte-identical across reruns; timestamps live only
// in the <command>.meta.json sidecar.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "rde/codec.hpp"
#include "rde/config.hpp"
#include "rde/construction.hpp"
#include "rde/io.hpp"
#include "rde/oracle.hpp"
#include "rde/region.hpp"
#include "rde/source_model.hpp"
#include "rde/timeshare.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
    std::string config_path;
    std::string out_dir_flag;
    std::string spec_flag;
    unsigned long long seed_flag = 0;
    int threads_flag = 0;
    bool seed_set = false, threads_set = false;
};

struct Resolved {
    rde::RunConfig cfg;
    std::string out_dir;
    unsigned long long seed = 1;
    int threads = 0;
};

Resolved resolve(const CommonArgs& args) {
    Resolved r;
    r.cfg = rde::RunConfig::parse_file(args.config_path);
    if (!args.out_dir_flag.empty())
        r.out_dir = args.out_dir_flag;
    else if (r.cfg.has("out_dir"))
        r.out_dir = r.cfg.str("out_dir");
    else if (const char* env = std::getenv("RDE_OUT_DIR"); env && *env)
        r.out_dir = env;
    else
        r.out_dir = ".";
    r.seed = args.seed_set ? args.seed_flag : r.cfg.uid_or("seed", 1);
    r.threads = args.threads_set ? args.threads_flag : int(r.cfg.integer_or("threads", 0));
    return r;
}

std::string out_path(const Resolved& r, const std::string& name) {
    return (std::filesystem::path(r.out_dir) / name).string();
}

void write_meta(const Resolved& r, const std::string& command,
                const std::vector<std::string>& outputs) {
    json meta;
    meta["command"] = command;
    meta["config"] = r.cfg.origin;
    meta["seed"] = r.seed;
    meta["threads"] = r.threads;
    meta["outputs"] = outputs;
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[32];
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    meta["timestamp_utc"] = stamp;
    rde::atomic_write_file(out_path(r, command + ".meta.json"), meta.dump(2) + "\n");
}

json point_json(const rde::OperatingPoint& op) {
    return json{{"R", op.R_star}, {"D", op.D_star}, {"Delta", op.Delta_star}};
}

// Load an existing code description or construct one from the config.
rde::PolarSpec obtain_spec(const Resolved& r, const std::string& spec_flag,
                           const rde::JointSource& src, const rde::TestChannel& ch) {
    std::string path = spec_flag.empty() ? r.cfg.str_or("spec_file", "") : spec_flag;
    rde::PolarSpec spec;
    if (!path.empty()) {
        std::string text;
        try {
            text = rde::read_text_file(path);
        } catch (const std::exception& e) {
            throw rde::config_error(e.what());
        }
        try {
            spec = rde::parse_polar_spec(text);
        } catch (const std::exception& e) {
            throw rde::config_error(path + ": " + e.what());
        }
        if (spec.q != ch.q)
            throw rde::config_error(path + ": alphabet size disagrees with the channel");
        if (r.cfg.has("n") && r.cfg.integer("n") != spec.n)
            throw rde::config_error(path + ": blocklength disagrees with the config");
    } else {
        const int n = int(r.cfg.integer("n"));
        const auto params = rde::make_select_params(r.cfg);
        const long long samples = r.cfg.integer_or("num_samples", 10000);
        spec = rde::construct_sets(src, ch, n, params, samples, r.seed, r.threads);
    }
    if (r.cfg.has("frozen_values")) {
        rde::SymbolVector uf = rde::parse_symbols(r.cfg, "frozen_values", spec.q);
        if (uf.size() != spec.F.size())
            throw rde::config_error(r.cfg.origin + ": frozen_values length " +
                                    std::to_string(uf.size()) + " != |F| = " +
                                    std::to_string(spec.F.size()));
        spec.u_F = std::move(uf);
    }
    return spec;
}

int cmd_region(const CommonArgs& args) {
    Resolved r = resolve(args);
    const rde::JointSource src = rde::make_source(r.cfg);
    const int q = int(r.cfg.integer("q"));
    const rde::DistortionMetric dist = rde::make_metric(r.cfg, src, q);
    const int grid_res = int(r.cfg.integer_or("region.grid_res", 20));
    const int refine_iters = int(r.cfg.integer_or("region.refine_iters", 12));
    const long long budget = r.cfg.integer_or("region.budget", 2000000);

    rde::RegionFrontier frontier =
        rde::sweep_region(src, dist, q, grid_res, refine_iters, budget, r.threads);

    // Self-check: every emitted row must re-validate from its channel alone.
    for (const auto& p : frontier.points) {
        const rde::OperatingPoint op = rde::target_point(src, p.channel, dist);
        if (std::abs(op.R_star - p.op.R_star) > 1e-9 || std::abs(op.D_star - p.op.D_star) > 1e-9 ||
            std::abs(op.Delta_star - p.op.Delta_star) > 1e-9)
            throw std::logic_error("region: frontier row failed re-validation");
    }

    std::filesystem::create_directories(r.out_dir);
    std::vector<std::string> outputs;
    rde::atomic_write_file(out_path(r, "frontier.csv"), rde::frontier_csv(frontier));
    outputs.push_back("frontier.csv");

    if (r.cfg.has("channel.D_max") && r.cfg.has("channel.Delta_min")) {
        const rde::FrontierPoint best =
            rde::min_rate_at(src, dist, r.cfg.num("channel.D_max"), r.cfg.num("channel.Delta_min"),
                             frontier, refine_iters);
        json jq;
        jq["point"] = point_json(best.op);
        jq["channel_rows"] = best.channel.rows;
        rde::atomic_write_file(out_path(r, "query_point.json"), jq.dump(2) + "\n");
        outputs.push_back("query_point.json");
        std::printf("query: R=%.6f D=%.6f Delta=%.6f\n", best.op.R_star, best.op.D_star,
                    best.op.Delta_star);
    }
    write_meta(r, "region", outputs);
    std::printf("region: %zu frontier points, self-check PASS\n", frontier.points.size());
    return 0;
}

int cmd_construct(const CommonArgs& args) {
    Resolved r = resolve(args);
    const rde::JointSource src = rde::make_source(r.cfg);
    const int q = int(r.cfg.integer("q"));
    const rde::DistortionMetric dist = rde::make_metric(r.cfg, src, q);
    const rde::ChannelChoice choice = rde::make_channel(r.cfg, src, dist, q);
    const int n = int(r.cfg.integer("n"));
    const auto params = rde::make_select_params(r.cfg);
    const long long samples = r.cfg.integer_or("num_samples", 10000);

    rde::PolarSpec spec = rde::construct_sets(src, choice.ch, n, params, samples, r.seed, r.threads);
    if (r.cfg.has("frozen_values")) {
        rde::SymbolVector uf = rde::parse_symbols(r.cfg, "frozen_values", spec.q);
        if (uf.size() != spec.F.size())
            throw rde::config_error(r.cfg.origin + ": frozen_values length != |F|");
        spec.u_F = std::move(uf);
    }

    std::filesystem::create_directories(r.out_dir);
    rde::atomic_write_file(out_path(r, "polar.spec"), rde::serialize_polar_spec(spec));
    std::ostringstream csv;
    csv << "index,z_cond,z_marg\r\n";
    for (const auto& row : rde::polarization_spectrum(spec))
        csv << row.index << ',' << rde::fmt17g(row.z_cond) << ',' << rde::fmt17g(row.z_marg)
            << "\r\n";
    rde::atomic_write_file(out_path(r, "spectrum.csv"), csv.str());
    write_meta(r, "construct", {"polar.spec", "spectrum.csv"});
    std::printf("construct: n=%d q=%d |I|=%zu |F|=%zu |D|=%zu rate=%.6f\n", spec.n, spec.q,
                spec.I.size(), spec.F.size(), spec.D.size(), spec.rate());
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    Resolved r = resolve(args);
    const rde::JointSource src = rde::make_source(r.cfg);
    const int q = int(r.cfg.integer("q"));
    const rde::DistortionMetric dist = rde::make_metric(r.cfg, src, q);
    const rde::ChannelChoice choice = rde::make_channel(r.cfg, src, dist, q);
    const rde::PolarSpec spec = obtain_spec(r, args.spec_flag, src, choice.ch);
    const long long trials = r.cfg.integer_or("trials", 1000);
    rde::FrozenPolicy policy;
    try {
        policy = rde::frozen_policy_from_string(r.cfg.str_or("frozen_policy", "fixed"));
    } catch (const std::exception& e) {
        throw rde::config_error(r.cfg.origin + ": " + e.what());
    }
    const bool emit_trials = r.cfg.flag_or("emit_trials", false);

    const rde::ExperimentReport rep = rde::run_trials(spec, src, choice.ch, dist, policy, spec.u_F,
                                                      trials, r.seed, r.threads, emit_trials);

    json jr;
    jr["n"] = rep.n;
    jr["q"] = rep.q;
    jr["rate"] = rep.rate;
    jr["trials"] = rep.trials;
    jr["seed"] = rep.seed;
    jr["frozen_policy"] = rep.frozen_policy;
    jr["distortion_mean"] = rep.distortion_mean;
    jr["distortion_half_width"] = rep.distortion_half_width;
    jr["pe_hat"] = rep.pe_hat;
    jr["pe_half_width"] = rep.pe_half_width;
    jr["equivocation_proxy"] = rep.equivocation_proxy;
    if (choice.query) jr["region_query"] = point_json(choice.query->op);

    std::filesystem::create_directories(r.out_dir);
    std::vector<std::string> outputs = {"report.json"};
    rde::atomic_write_file(out_path(r, "report.json"), jr.dump(2) + "\n");
    if (emit_trials) {
        std::ostringstream csv;
        csv << "trial,seed,distortion,mismatch\r\n";
        for (const auto& t : rep.records)
            csv << t.index << ',' << t.seed << ',' << rde::fmt17g(t.distortion) << ','
                << (t.mismatch ? 1 : 0) << "\r\n";
        rde::atomic_write_file(out_path(r, "trials.csv"), csv.str());
        outputs.push_back("trials.csv");
    }
    write_meta(r, "simulate", outputs);
    std::printf("simulate: trials=%lld D_hat=%.6f (+-%.6f) pe_hat=%.6f Delta_proxy=%.6f\n",
                rep.trials, rep.distortion_mean, rep.distortion_half_width, rep.pe_hat,
                rep.equivocation_proxy);
    return 0;
}

int cmd_oracle(const CommonArgs& args) {
    Resolved r = resolve(args);
    const rde::JointSource src = rde::make_source(r.cfg);
    const int q = int(r.cfg.integer("q"));
    const rde::DistortionMetric dist = rde::make_metric(r.cfg, src, q);
    const rde::ChannelChoice choice = rde::make_channel(r.cfg, src, dist, q);
    const rde::PolarSpec spec = obtain_spec(r, args.spec_flag, src, choice.ch);

    rde::SweepOptions opt;
    const std::string mode = r.cfg.str_or("oracle.mode", "averaged");
    if (mode == "averaged")
        opt.mode = rde::FrozenMode::averaged;
    else if (mode == "fixed")
        opt.mode = rde::FrozenMode::fixed;
    else
        throw rde::config_error(r.cfg.origin + ": oracle.mode must be averaged or fixed");
    opt.threads = r.threads;
    opt.metric = dist;

    const rde::OracleReport rep = rde::exact_sweep(src, choice.ch, spec, opt);
    const rde::OperatingPoint op = rde::target_point(src, choice.ch, dist);
    const double decomposition_rhs =
        op.D_star + dist.d_max / double(rep.n) * (rep.pe + rep.tv);
    const double chain_lhs = std::abs(rep.h_y_given_xhat_p - rep.h_y_given_xhat_e);
    const double chain_rhs =
        std::abs(rep.h_yxhat_p - rep.h_yxhat_e) + std::abs(rep.h_xhat_p - rep.h_xhat_e);
    const double lote_gap = std::abs(
        rep.distortion_decoded -
        (rep.distortion_decoded_error_part + rep.distortion_decoded_noerror_part));

    struct Check {
        const char* name;
        double lhs, rhs;
        bool pass;
    };
    const std::vector<Check> checks = {
        {"tv<=tv_bound", rep.tv, rep.tv_bound, rep.tv <= rep.tv_bound + 1e-12},
        {"pe<=pe_bound", rep.pe, rep.pe_bound, rep.pe <= rep.pe_bound + 1e-12},
        {"distortion<=target+penalty", rep.distortion_decoded, decomposition_rhs,
         rep.distortion_decoded <= decomposition_rhs + 1e-12},
        {"secrecy_entropy_chain", chain_lhs, chain_rhs, chain_lhs <= chain_rhs + 1e-12},
        {"distortion_total_expectation", lote_gap, 1e-12, lote_gap <= 1e-12},
        {"mass_conservation", std::max(std::abs(rep.total_p - 1), std::abs(rep.total_e - 1)),
         1e-9, std::abs(rep.total_p - 1) <= 1e-9 && std::abs(rep.total_e - 1) <= 1e-9},
    };

    json jr;
    jr["n"] = rep.n;
    jr["q"] = rep.q;
    jr["Z_cond"] = rep.Z_cond;
    jr["Z_marg"] = rep.Z_marg;
    jr["H_cond"] = rep.H_cond;
    jr["tv"] = rep.tv;
    jr["tv_bound"] = rep.tv_bound;
    jr["pe"] = rep.pe;
    jr["pe_bound"] = rep.pe_bound;
    jr["distortion_target"] = rep.distortion_target;
    jr["distortion_encoder"] = rep.distortion_encoder;
    jr["distortion_decoded"] = rep.distortion_decoded;
    jr["equivocation"] = rep.equivocation;
    jr["h_y_given_xhat_p"] = rep.h_y_given_xhat_p;
    jr["h_y_given_xhat_e"] = rep.h_y_given_xhat_e;
    jr["target_point"] = point_json(op);
    json jc = json::array();
    bool all_pass = true;
    for (const auto& c : checks) {
        jc.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"pass", c.pass}});
        all_pass = all_pass && c.pass;
    }
    jr["checks"] = jc;

    std::filesystem::create_directories(r.out_dir);
    rde::atomic_write_file(out_path(r, "oracle_report.json"), jr.dump(2) + "\n");
    write_meta(r, "oracle", {"oracle_report.json"});
    for (const auto& c : checks)
        std::printf("[%s] %s (%.12g vs %.12g)\n", c.pass ? "PASS" : "FAIL", c.name, c.lhs, c.rhs);
    if (!all_pass) throw std::logic_error("oracle: inequality check failed");
    return 0;
}

int cmd_timeshare(const CommonArgs& args) {
    Resolved r = resolve(args);
    const rde::JointSource src = rde::make_source(r.cfg);
    const int q = int(r.cfg.integer("q"));
    const rde::DistortionMetric dist = rde::make_metric(r.cfg, src, q);
    const rde::ChannelChoice choice = rde::make_channel(r.cfg, src, dist, q);
    const rde::PolarSpec spec = obtain_spec(r, args.spec_flag, src, choice.ch);
    const long long limit = r.cfg.integer_or("timeshare.limit", 4096);
    const double eps = r.cfg.num_or("timeshare.epsilon", 1e-3);
    const rde::OperatingPoint op = rde::target_point(src, choice.ch, dist);
    const double d_target = r.cfg.num_or("timeshare.d_target", op.D_star + eps);
    const double delta_target = r.cfg.num_or("timeshare.delta_target", op.Delta_star - eps);

    const std::vector<rde::FrozenPoint> points =
        rde::evaluate_frozen_ensemble(src, choice.ch, spec, limit, r.threads);
    const rde::TimeSharePlan plan = rde::select_plan(points, d_target, delta_target);

    json jp;
    jp["is_pair"] = plan.is_pair;
    jp["u_F1"] = plan.u_F1;
    jp["u_F2"] = plan.u_F2;
    jp["alpha"] = plan.alpha;
    jp["d_combined"] = plan.d_combined;
    jp["delta_combined"] = plan.delta_combined;
    jp["d_target"] = d_target;
    jp["delta_target"] = delta_target;

    std::filesystem::create_directories(r.out_dir);
    rde::atomic_write_file(out_path(r, "ensemble.csv"), rde::ensemble_csv(points));
    rde::atomic_write_file(out_path(r, "hull.csv"), rde::ensemble_csv(rde::ensemble_hull(points)));
    rde::atomic_write_file(out_path(r, "plan.json"), jp.dump(2) + "\n");
    write_meta(r, "timeshare", {"ensemble.csv", "hull.csv", "plan.json"});
    if (plan.is_pair)
        std::printf("timeshare: pair alpha=%.6f D=%.6f Delta=%.6f\n", plan.alpha, plan.d_combined,
                    plan.delta_combined);
    else
        std::printf("timeshare: single D=%.6f Delta=%.6f\n", plan.d_combined,
                    plan.delta_combined);
    return 0;
}

void add_common(CLI::App* sub, CommonArgs& args) {
    sub->add_option("--config", args.config_path, "run configuration file")->required();
    sub->add_option("--out-dir", args.out_dir_flag, "output directory (overrides config and env)");
    auto* seed = sub->add_option("--seed", args.seed_flag, "seed override");
    auto* threads = sub->add_option("--threads", args.threads_flag, "worker thread cap override");
    sub->parse_complete_callback([&args, seed, threads] {
        args.seed_set = seed->count() > 0;
        args.threads_set = threads->count() > 0;
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"privacy-constrained lossy source coding toolkit"};
    app.require_subcommand(1);
    CommonArgs region_args, construct_args, simulate_args, oracle_args, timeshare_args;

    auto* region = app.add_subcommand("region", "sweep the achievable (R, D, Delta) frontier");
    add_common(region, region_args);
    auto* construct = app.add_subcommand("construct", "build a code and write its description");
    add_common(construct, construct_args);
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo encode/decode trials");
    add_common(simulate, simulate_args);
    simulate->add_option("--spec", simulate_args.spec_flag, "code description file");
    auto* oracle = app.add_subcommand("oracle", "exact small-blocklength evaluation");
    add_common(oracle, oracle_args);
    oracle->add_option("--spec", oracle_args.spec_flag, "code description file");
    auto* timeshare = app.add_subcommand("timeshare", "derandomize the frozen-vector ensemble");
    add_common(timeshare, timeshare_args);
    timeshare->add_option("--spec", timeshare_args.spec_flag, "code description file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (region->parsed()) return cmd_region(region_args);
        if (construct->parsed()) return cmd_construct(construct_args);
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (oracle->parsed()) return cmd_oracle(oracle_args);
        if (timeshare->parsed()) return cmd_timeshare(timeshare_args);
        std::fprintf(stderr, "error: no subcommand\n");
        return 2;
    } catch (const rde::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rde::precondition_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rde::infeasible_request& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rde::limit_error& e) {
        std::fprintf(stderr, "limit error: %s\n", e.what());
        return 3;
    } catch (const rde::no_feasible_point& e) {
        std::fprintf(stderr, "limit error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 4;
    }
}
