#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "relaycode/markov.hpp"
#include "relaycode/simulator.hpp"
#include "relaycode/systematic.hpp"

using json = nlohmann::ordered_json;
using namespace relaycode;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitModel = 3;

std::string fmt6(double v) {
    if (std::isinf(v)) return "inf";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

// Round through the printed representation so JSON output also carries six
// significant digits.
json num6(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return "inf";
    return std::strtod(fmt6(v).c_str(), nullptr);
}

struct Options {
    unsigned m = 8;
    double p1 = 0.2, p2 = 0.2, p3 = 0.2;
    std::string relay = "systematic";
    std::string field = "inf";
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    bool relay_lag = false;
    std::string output = "json";
    std::string out_file;

    // sweep-only
    std::string vary = "p1";
    double from = 0.0, to = 1.0, step = 0.05;
    std::vector<std::string> fields;
    std::uint64_t sweep_trials = 0;  // 0 = analytic only
};

RelayPolicy parse_policy(const std::string& s) {
    if (s == "systematic") return RelayPolicy::systematic;
    if (s == "non-systematic" || s == "non_systematic") return RelayPolicy::non_systematic;
    throw CLI::ValidationError("--relay", "expected systematic or non-systematic");
}

std::string policy_name(RelayPolicy p) {
    return p == RelayPolicy::systematic ? "systematic" : "non-systematic";
}

FieldMode parse_field(const std::string& s) {
    if (s == "inf" || s == "infinite") return FieldMode::infinite_field();
    unsigned m = 0;
    if (std::sscanf(s.c_str(), "2^%u", &m) == 1 && m >= 1 && m <= 16) return FieldMode::finite(m);
    throw CLI::ValidationError("--field", "expected inf or 2^m with 1 <= m <= 16");
}

// JSON config file; explicit command-line flags override its values.
void load_config(const std::string& path, Options& opt) {
    std::ifstream in(path);
    if (!in) throw CLI::ValidationError("--config", "cannot open " + path);
    json cfg = json::parse(in);
    if (cfg.contains("m")) opt.m = cfg["m"].get<unsigned>();
    if (cfg.contains("p1")) opt.p1 = cfg["p1"].get<double>();
    if (cfg.contains("p2")) opt.p2 = cfg["p2"].get<double>();
    if (cfg.contains("p3")) opt.p3 = cfg["p3"].get<double>();
    if (cfg.contains("relay_policy")) opt.relay = cfg["relay_policy"].get<std::string>();
    if (cfg.contains("field")) opt.field = cfg["field"].get<std::string>();
    if (cfg.contains("trials")) opt.trials = cfg["trials"].get<std::uint64_t>();
    if (cfg.contains("seed")) opt.seed = cfg["seed"].get<std::uint64_t>();
    if (cfg.contains("relay_lag")) opt.relay_lag = cfg["relay_lag"].get<bool>();
}

void emit(const Options& opt, const std::string& text) {
    if (opt.out_file.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(opt.out_file, std::ios::binary);
    if (!out) throw CLI::ValidationError("--out", "cannot open " + opt.out_file);
    out << text;
}

std::string report_to_text(const json& report, const std::string& output) {
    if (output == "json") return report.dump(2) + "\n";
    // Single-record CSV: header plus one row.
    std::ostringstream header, row;
    bool first = true;
    for (const auto& [key, value] : report.items()) {
        if (!first) {
            header << ",";
            row << ",";
        }
        first = false;
        header << key;
        if (value.is_null())
            ;
        else if (value.is_string())
            row << value.get<std::string>();
        else if (value.is_number_float())
            row << fmt6(value.get<double>());
        else
            row << value.dump();
    }
    return header.str() + "\n" + row.str() + "\n";
}

int cmd_analyze(const Options& opt) {
    const ChannelParams params{opt.p1, opt.p2, opt.p3, opt.m};
    const RelayPolicy policy = parse_policy(opt.relay);
    const double t_mean = policy == RelayPolicy::systematic ? t_sys(params) : t_non_sys(params);
    const UncodedGain gain = expected_uncoded_gain(params);

    json report;
    report["report"] = "analyze";
    report["m"] = opt.m;
    report["p1"] = num6(opt.p1);
    report["p2"] = num6(opt.p2);
    report["p3"] = num6(opt.p3);
    report["relay"] = policy_name(policy);
    report["t_mean"] = num6(t_mean);
    report["t_per_packet"] = num6(t_mean / opt.m);
    report["uncoded_gain"] = num6(gain.expected_gain);
    report["uncoded_fraction"] = num6(gain.fraction);
    emit(opt, report_to_text(report, opt.output));
    return 0;
}

int cmd_simulate(const Options& opt) {
    SimConfig config;
    config.params = {opt.p1, opt.p2, opt.p3, opt.m};
    config.relay_policy = parse_policy(opt.relay);
    config.field_mode = parse_field(opt.field);
    config.relay_lag = opt.relay_lag;
    config.trials = opt.trials;
    config.master_seed = opt.seed;

    // Analytical guard: fail fast instead of spinning trials to the slot cap.
    std::optional<double> analytic;
    const double exact = config.relay_policy == RelayPolicy::systematic ? t_sys(config.params)
                                                                        : t_non_sys(config.params);
    if (config.field_mode.infinite) analytic = exact;

    const BatchResult batch = run_batch(config);

    json report;
    report["report"] = "simulate";
    report["m"] = opt.m;
    report["p1"] = num6(opt.p1);
    report["p2"] = num6(opt.p2);
    report["p3"] = num6(opt.p3);
    report["relay"] = policy_name(config.relay_policy);
    report["field"] = opt.field;
    report["relay_lag"] = opt.relay_lag;
    report["trials"] = opt.trials;
    report["seed"] = opt.seed;
    report["mean_completion"] = num6(batch.mean_completion);
    report["stderr_completion"] = num6(batch.stderr_completion);
    report["mean_u"] = num6(batch.mean_u);
    report["stderr_u"] = num6(batch.stderr_u);
    report["t_analytic"] = analytic ? num6(*analytic) : json(nullptr);
    emit(opt, report_to_text(report, opt.output));
    return 0;
}

int cmd_compare(const Options& opt) {
    SimConfig sys_config;
    sys_config.params = {opt.p1, opt.p2, opt.p3, opt.m};
    sys_config.relay_policy = RelayPolicy::systematic;
    sys_config.field_mode = parse_field(opt.field);
    sys_config.relay_lag = opt.relay_lag;
    sys_config.trials = opt.trials;
    sys_config.master_seed = opt.seed;
    SimConfig non_config = sys_config;
    non_config.relay_policy = RelayPolicy::non_systematic;

    const double t_sys_exact = t_sys(sys_config.params);
    const double t_non_exact = t_non_sys(sys_config.params);

    const BatchResult sys_batch = run_batch(sys_config);
    const BatchResult non_batch = run_batch(non_config);
    const UncodedGain gain = expected_uncoded_gain(sys_config.params);

    json report;
    report["report"] = "compare";
    report["m"] = opt.m;
    report["p1"] = num6(opt.p1);
    report["p2"] = num6(opt.p2);
    report["p3"] = num6(opt.p3);
    report["field"] = opt.field;
    report["relay_lag"] = opt.relay_lag;
    report["trials"] = opt.trials;
    report["seed"] = opt.seed;
    report["u_gap_mc"] = num6(sys_batch.mean_u - non_batch.mean_u);
    report["u_gap_analytic"] = num6(gain.expected_gain);
    report["t_sys_mc"] = num6(sys_batch.mean_completion);
    report["t_non_sys_mc"] = num6(non_batch.mean_completion);
    report["t_sys_analytic"] =
        sys_config.field_mode.infinite ? num6(t_sys_exact) : json(nullptr);
    report["t_non_sys_analytic"] =
        sys_config.field_mode.infinite ? num6(t_non_exact) : json(nullptr);
    emit(opt, report_to_text(report, opt.output));
    return 0;
}

unsigned worker_count(std::size_t tasks) {
    unsigned n = std::thread::hardware_concurrency();
    if (n == 0) n = 1;
    if (const char* env = std::getenv("RELAYCODE_THREADS")) {
        const long cap = std::strtol(env, nullptr, 10);
        if (cap >= 1 && static_cast<unsigned long>(cap) < n) n = static_cast<unsigned>(cap);
    }
    return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(tasks, 1)));
}

struct SweepRow {
    double p1, p2, p3;
    unsigned m;
    std::string relay;
    std::string field;
    std::string t_analytic, t_mc_mean, t_mc_stderr, u_gain_analytic, u_gain_mc;
};

int cmd_sweep(const Options& opt) {
    if (opt.from < 0 || opt.to > 1 || opt.from > opt.to || opt.step <= 0)
        throw CLI::ValidationError("--from/--to/--step", "need 0 <= from <= to <= 1 and step > 0");
    if (opt.vary != "p1" && opt.vary != "p2" && opt.vary != "p3")
        throw CLI::ValidationError("--vary", "expected p1, p2 or p3");

    std::vector<RelayPolicy> policies;
    if (opt.relay == "both")
        policies = {RelayPolicy::non_systematic, RelayPolicy::systematic};
    else
        policies = {parse_policy(opt.relay)};

    std::vector<std::string> field_names = opt.fields.empty()
                                               ? std::vector<std::string>{"inf"}
                                               : opt.fields;
    std::vector<FieldMode> field_modes;
    for (const auto& f : field_names) field_modes.push_back(parse_field(f));

    std::vector<double> grid;
    const std::size_t steps = static_cast<std::size_t>((opt.to - opt.from) / opt.step + 1e-9);
    for (std::size_t s = 0; s <= steps; ++s) grid.push_back(opt.from + static_cast<double>(s) * opt.step);

    struct PointResult {
        std::vector<SweepRow> rows;
    };
    std::vector<PointResult> results(grid.size());

    auto run_point = [&](std::size_t index) {
        const double v = grid[index];
        ChannelParams params{opt.p1, opt.p2, opt.p3, opt.m};
        if (opt.vary == "p1") params.p1 = v;
        if (opt.vary == "p2") params.p2 = v;
        if (opt.vary == "p3") params.p3 = v;

        std::optional<double> exact_sys, exact_non;
        bool stuck = false;
        try {
            exact_non = t_non_sys(params);
            exact_sys = t_sys(params);
        } catch (const NeverCompletesError&) {
            stuck = true;
        }
        const UncodedGain gain = expected_uncoded_gain(params);

        for (std::size_t f = 0; f < field_modes.size(); ++f) {
            // Same seed for both policies: common random numbers on the links.
            const std::uint64_t seed =
                derive_seed(opt.seed, static_cast<std::uint64_t>(index), static_cast<std::uint64_t>(f) + 2);
            std::optional<BatchResult> batches[2];
            if (opt.sweep_trials > 0 && !stuck) {
                for (RelayPolicy policy : policies) {
                    SimConfig config;
                    config.params = params;
                    config.relay_policy = policy;
                    config.field_mode = field_modes[f];
                    config.relay_lag = opt.relay_lag;
                    config.trials = opt.sweep_trials;
                    config.master_seed = seed;
                    batches[policy == RelayPolicy::systematic] = run_batch(config);
                }
            }
            std::string u_gain_mc;
            if (batches[0] && batches[1])
                u_gain_mc = fmt6(batches[1]->mean_u - batches[0]->mean_u);

            for (RelayPolicy policy : policies) {
                SweepRow row;
                row.p1 = params.p1;
                row.p2 = params.p2;
                row.p3 = params.p3;
                row.m = opt.m;
                row.relay = policy_name(policy);
                row.field = field_names[f];
                const bool infinite = field_modes[f].infinite;
                if (infinite) {
                    if (stuck)
                        row.t_analytic = "inf";
                    else
                        row.t_analytic = fmt6(policy == RelayPolicy::systematic ? *exact_sys
                                                                                : *exact_non);
                    row.u_gain_analytic = fmt6(gain.expected_gain);
                }
                if (stuck && opt.sweep_trials > 0) row.t_mc_mean = "inf";
                const auto& batch = batches[policy == RelayPolicy::systematic];
                if (batch) {
                    row.t_mc_mean = fmt6(batch->mean_completion);
                    row.t_mc_stderr = fmt6(batch->stderr_completion);
                    row.u_gain_mc = u_gain_mc;
                }
                results[index].rows.push_back(std::move(row));
            }
        }
    };

    const unsigned workers = worker_count(grid.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) run_point(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                    run_point(i);
            });
        for (auto& t : pool) t.join();
    }

    std::ostringstream out;
    if (opt.output == "json") {
        json rows = json::array();
        for (const auto& point : results)
            for (const auto& r : point.rows) {
                json row;
                row["p1"] = num6(r.p1);
                row["p2"] = num6(r.p2);
                row["p3"] = num6(r.p3);
                row["m"] = r.m;
                row["relay"] = r.relay;
                row["field"] = r.field;
                row["t_analytic"] = r.t_analytic.empty() ? json(nullptr) : json(r.t_analytic);
                row["t_mc_mean"] = r.t_mc_mean.empty() ? json(nullptr) : json(r.t_mc_mean);
                row["t_mc_stderr"] = r.t_mc_stderr.empty() ? json(nullptr) : json(r.t_mc_stderr);
                row["u_gain_analytic"] =
                    r.u_gain_analytic.empty() ? json(nullptr) : json(r.u_gain_analytic);
                row["u_gain_mc"] = r.u_gain_mc.empty() ? json(nullptr) : json(r.u_gain_mc);
                rows.push_back(std::move(row));
            }
        out << rows.dump(2) << "\n";
    } else {
        out << "p1,p2,p3,m,relay,field,t_analytic,t_mc_mean,t_mc_stderr,u_gain_analytic,u_gain_mc\n";
        for (const auto& point : results)
            for (const auto& r : point.rows)
                out << fmt6(r.p1) << "," << fmt6(r.p2) << "," << fmt6(r.p3) << "," << r.m << ","
                    << r.relay << "," << r.field << "," << r.t_analytic << "," << r.t_mc_mean << ","
                    << r.t_mc_stderr << "," << r.u_gain_analytic << "," << r.u_gain_mc << "\n";
    }
    emit(opt, out.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    Options opt;

    // First pass: a config file supplies defaults that flags then override.
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                load_config(argv[i + 1], opt);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return kExitUsage;
            }
            break;
        }
    }

    CLI::App app{"Exact analysis and Monte-Carlo simulation of systematic vs "
                 "non-systematic relaying in a network-coded erasure relay channel"};
    app.require_subcommand(1);
    std::string config_path;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--packets,-M", opt.m, "number of data packets M")->capture_default_str();
        cmd->add_option("--p1", opt.p1, "erasure probability source->receiver")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--p2", opt.p2, "erasure probability source->relay")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--p3", opt.p3, "erasure probability relay->receiver")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        cmd->add_option("--config", config_path, "JSON config file (flags override it)");
        cmd->add_option("--output", opt.output, "output format: json or csv")
            ->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", opt.out_file, "output file (default stdout)");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "exact completion time and uncoded gain");
    add_common(analyze);
    analyze->add_option("--relay", opt.relay, "relay policy: systematic or non-systematic")
        ->capture_default_str();

    CLI::App* simulate = app.add_subcommand("simulate", "Monte-Carlo batch for one parameter point");
    add_common(simulate);
    simulate->add_option("--relay", opt.relay, "relay policy")->capture_default_str();
    simulate->add_option("--trials", opt.trials, "number of trials")->capture_default_str();
    simulate->add_option("--seed", opt.seed, "master seed")->capture_default_str();
    simulate->add_option("--field", opt.field, "field mode: inf or 2^m")->capture_default_str();
    simulate->add_flag("--relay-lag", opt.relay_lag, "one-slot relay transmission lag");

    CLI::App* compare =
        app.add_subcommand("compare", "matched systematic vs non-systematic batches");
    add_common(compare);
    compare->add_option("--trials", opt.trials, "number of trials")->capture_default_str();
    compare->add_option("--seed", opt.seed, "master seed")->capture_default_str();
    compare->add_option("--field", opt.field, "field mode: inf or 2^m")->capture_default_str();
    compare->add_flag("--relay-lag", opt.relay_lag, "one-slot relay transmission lag");

    CLI::App* sweep = app.add_subcommand("sweep", "CSV sweep over one erasure probability");
    add_common(sweep);
    sweep->add_option("--vary", opt.vary, "parameter to vary: p1, p2 or p3")
        ->capture_default_str();
    sweep->add_option("--from", opt.from, "grid start")->capture_default_str();
    sweep->add_option("--to", opt.to, "grid end")->capture_default_str();
    sweep->add_option("--step", opt.step, "grid step")->capture_default_str();
    sweep->add_option("--relay", opt.relay, "policy: systematic, non-systematic or both")
        ->default_val("both");
    sweep->add_option("--field", opt.fields, "field modes to include (repeatable)");
    sweep->add_option("--trials", opt.sweep_trials, "Monte-Carlo trials per row (0 = analytic only)")
        ->capture_default_str();
    sweep->add_option("--seed", opt.seed, "master seed")->capture_default_str();
    sweep->add_flag("--relay-lag", opt.relay_lag, "one-slot relay transmission lag");
    sweep->preparse_callback([&](std::size_t) { opt.output = "csv"; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (analyze->parsed()) return cmd_analyze(opt);
        if (simulate->parsed()) return cmd_simulate(opt);
        if (compare->parsed()) return cmd_compare(opt);
        if (sweep->parsed()) return cmd_sweep(opt);
    } catch (const NeverCompletesError& e) {
        std::cerr << "model error: transmission never completes: " << e.what() << "\n";
        return kExitModel;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
