// clrlab command-line front end. Talks to the library only through the C API.

#include <algorithm>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "clrlab/clrlab.h"

namespace {

struct Options {
    std::string config;
    std::string out_dir;
    std::vector<std::string> sets;
    std::vector<unsigned long long> seeds;
    long long seed = -1;
    unsigned jobs = 1;
    std::string net1, net2;
    bool print_config = false;
};

int report(clr_status status) {
    if (status != CLR_OK) {
        std::cerr << "clrlab: " << clr_status_name(status) << ": " << clr_last_error() << '\n';
    }
    return static_cast<int>(status);
}

struct ConfigHandle {
    clr_config* ptr = nullptr;
    ~ConfigHandle() { clr_config_free(ptr); }
};

clr_status apply_overrides(clr_config* cfg, const std::string& kind, const Options& opt) {
    clr_status st = clr_config_set(cfg, "experiment.kind", kind.c_str());
    for (const auto& kv : opt.sets) {
        if (st != CLR_OK) return st;
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::cerr << "clrlab: config error: --set expects section.key=value, got '" << kv << "'\n";
            return CLR_ERR_CONFIG;
        }
        st = clr_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    }
    const char* seed_key = kind == "interpolate" ? "dataset.seed" : "train.seed";
    if (st == CLR_OK && opt.seed >= 0) st = clr_config_set(cfg, seed_key, std::to_string(opt.seed).c_str());
    if (st == CLR_OK && !opt.out_dir.empty()) st = clr_config_set(cfg, "experiment.out_dir", opt.out_dir.c_str());
    if (st == CLR_OK && !opt.net1.empty()) st = clr_config_set(cfg, "probe.net1", opt.net1.c_str());
    if (st == CLR_OK && !opt.net2.empty()) st = clr_config_set(cfg, "probe.net2", opt.net2.c_str());
    return st;
}

int run_single(clr_config* cfg) {
    std::string summary(1 << 14, '\0');
    size_t needed = 0;
    clr_status st = clr_experiment_run(cfg, summary.data(), summary.size(), &needed);
    if (st != CLR_OK) return report(st);
    summary.resize(std::min(needed, summary.size()) - 1);
    std::cout << summary;
    return 0;
}

int run_sweep(clr_config* base, const Options& opt) {
    if (opt.out_dir.empty()) {
        std::cerr << "clrlab: config error: --seeds requires --out-dir\n";
        return CLR_ERR_CONFIG;
    }
    std::vector<ConfigHandle> configs(opt.seeds.size());
    for (std::size_t i = 0; i < opt.seeds.size(); ++i) {
        clr_status st = clr_config_clone(base, &configs[i].ptr);
        const std::string seed = std::to_string(opt.seeds[i]);
        const std::string dir = opt.out_dir + "/seed_" + seed;
        if (st == CLR_OK) st = clr_config_set(configs[i].ptr, "train.seed", seed.c_str());
        if (st == CLR_OK) st = clr_config_set(configs[i].ptr, "experiment.out_dir", dir.c_str());
        if (st != CLR_OK) return report(st);
    }

    std::vector<clr_status> status(configs.size(), CLR_OK);
    std::vector<std::string> errors(configs.size());
    const unsigned workers = std::max(1u, std::min<unsigned>(opt.jobs, configs.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < workers; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t i = t; i < configs.size(); i += workers) {
                    status[i] = clr_experiment_run(configs[i].ptr, nullptr, 0, nullptr);
                    if (status[i] != CLR_OK) errors[i] = clr_last_error();
                }
            });
        }
    }
    int rc = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        std::cout << "seed " << opt.seeds[i] << ": " << clr_status_name(status[i]) << '\n';
        if (status[i] != CLR_OK) {
            std::cerr << "clrlab: seed " << opt.seeds[i] << ": " << clr_status_name(status[i]) << ": "
                      << errors[i] << '\n';
            if (rc == 0) rc = static_cast<int>(status[i]);
        }
    }
    return rc;
}

int dispatch(const std::string& kind, const Options& opt) {
    ConfigHandle cfg;
    clr_status st = clr_config_load(opt.config.c_str(), &cfg.ptr);
    if (st != CLR_OK) return report(st);
    st = apply_overrides(cfg.ptr, kind, opt);
    if (st != CLR_OK) return report(st);

    if (opt.print_config) {
        size_t needed = 0;
        st = clr_config_resolved(cfg.ptr, nullptr, 0, &needed);
        if (st != CLR_OK) return report(st);
        std::string text(needed, '\0');
        clr_config_resolved(cfg.ptr, text.data(), text.size(), &needed);
        text.pop_back();
        std::cout << text;
        return 0;
    }
    if (!opt.seeds.empty()) {
        if (kind == "interpolate") {
            std::cerr << "clrlab: config error: --seeds does not apply to interpolate\n";
            return CLR_ERR_CONFIG;
        }
        return run_sweep(cfg.ptr, opt);
    }
    return run_single(cfg.ptr);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"clrlab: cyclical learning-rate training and loss-landscape probing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(clr_version()));
    app.footer(
        "Exit codes:\n"
        "  0  success\n"
        "  1  internal error\n"
        "  2  config error (bad file, unknown key, invalid value, bad flags)\n"
        "  3  data error (malformed IDX or snapshot file)\n"
        "  4  numeric error (NaN during interpolation)\n"
        "  5  I/O error (unreadable input, unwritable output)\n"
        "\n"
        "Precedence: command-line flags > config file > built-in defaults.");

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("-c,--config", opt.config, "Experiment config file (INI)")->required();
        sub->add_option("--out-dir", opt.out_dir, "Output directory (overrides experiment.out_dir)");
        sub->add_option("--seed", opt.seed, "Seed override (train.seed; dataset.seed for interpolate)")
            ->check(CLI::NonNegativeNumber);
        sub->add_option("--set", opt.sets, "Override any config key: section.key=value");
        sub->add_flag("--print-config", opt.print_config, "Print the resolved config and exit");
    };
    auto add_sweep = [&](CLI::App* sub) {
        sub->add_option("--seeds", opt.seeds, "Run one experiment per seed into <out-dir>/seed_<s>")
            ->delimiter(',');
        sub->add_option("--jobs", opt.jobs, "Parallel runs for --seeds")->check(CLI::PositiveNumber);
    };

    auto* train = app.add_subcommand("train", "Train a network and record metrics and snapshots");
    add_common(train);
    add_sweep(train);
    auto* range = app.add_subcommand("range-test", "Learning-rate range test with dip/plateau analysis");
    add_common(range);
    add_sweep(range);
    auto* interp = app.add_subcommand("interpolate", "Interpolate between two snapshots and classify the pair");
    add_common(interp);
    interp->add_option("--net1", opt.net1, "First snapshot (alpha = 1)");
    interp->add_option("--net2", opt.net2, "Second snapshot (alpha = 0)");
    auto* compare = app.add_subcommand("compare", "Cyclical vs baseline schedule comparison");
    add_common(compare);
    add_sweep(compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return CLR_ERR_CONFIG;
    }

    for (auto* sub : {train, range, interp, compare}) {
        if (sub->parsed()) return dispatch(sub->get_name(), opt);
    }
    return CLR_ERR_CONFIG;
}
