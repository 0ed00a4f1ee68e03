// Command-line front end over the subdiff C API.
//
//   subdiff verify <target> [options]    run an acceptance-style check
//   subdiff price <direct|decomposition> [options]
//   subdiff simulate <subordinator|bm|timechange> [options]
//
// Exit codes: 0 success/pass, 2 check rejected, 1 usage or runtime error.

#include <cstdio>
#include <cstdlib>
#include <map>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "subdiff.h"

namespace {

struct ExperimentDeleter {
    void operator()(sd_experiment* e) const { sd_experiment_free(e); }
};
using ExperimentPtr = std::unique_ptr<sd_experiment, ExperimentDeleter>;

int fail(const char* what) {
    std::fprintf(stderr, "error: %s\n", what);
    return 1;
}

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
    // flat flags mapped onto the dotted config keys
    std::map<std::string, std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "config file ([section] key = value)");
    cmd->add_option("--out", opts.out_path, "output path (default: stdout)");
    cmd->add_option("--format", opts.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    static const std::pair<const char*, const char*> kFlagKeys[] = {
        {"--c", "levy.c"},
        {"--beta", "levy.beta"},
        {"--kappa", "levy.kappa"},
        {"--levy-kind", "levy.kind"},
        {"--x", "pricing.x"},
        {"--sigma", "pricing.sigma"},
        {"--L", "pricing.L"},
        {"--D", "pricing.D"},
        {"--T", "pricing.T"},
        {"--payoff-lo", "pricing.payoff_lo"},
        {"--payoff-hi", "pricing.payoff_hi"},
        {"--alpha", "rayknight.alpha"},
        {"--paths", "mc.paths"},
        {"--inner-step", "mc.inner_step"},
        {"--horizon", "mc.horizon"},
        {"--order", "transforms.gs_order"},
        {"--pool", "transforms.pool"},
        {"--workers", "harness.workers"},
    };
    for (const auto& [flag, key] : kFlagKeys) {
        const std::string key_copy = key;
        cmd->add_option_function<std::string>(
            flag, [&opts, key_copy](const std::string& v) { opts.overrides[key_copy] = v; },
            std::string("sets ") + key_copy);
    }
    cmd->add_option_function<std::string>(
        "--seed", [&opts](const std::string& v) { opts.overrides["harness.seed"] = v; },
        "sets harness.seed")
        ->envname("SUBDIFF_SEED");
    cmd->add_option_function<std::string>(
        "--set",
        [&opts](const std::string& v) {
            const auto eq = v.find('=');
            if (eq == std::string::npos) throw CLI::ValidationError("--set expects key=value");
            opts.overrides[v.substr(0, eq)] = v.substr(eq + 1);
        },
        "extra dotted config override, key=value")
        ->take_all();
}

int run_task(const std::string& task, const CommonOpts& opts) {
    sd_experiment* raw = nullptr;
    if (sd_experiment_new(&raw) != SD_OK) return fail(sd_last_error());
    ExperimentPtr exp(raw);
    if (!opts.config_path.empty() &&
        sd_experiment_load_config(exp.get(), opts.config_path.c_str()) != SD_OK)
        return fail(sd_last_error());
    for (const auto& [k, v] : opts.overrides)
        if (sd_experiment_set(exp.get(), k.c_str(), v.c_str()) != SD_OK)
            return fail(sd_last_error());

    char* report = nullptr;
    int passed = 1;
    const sd_status st =
        sd_experiment_run(exp.get(), task.c_str(), opts.format.c_str(), &report, &passed);
    if (st != SD_OK) return fail(sd_last_error());

    if (opts.out_path.empty()) {
        std::fputs(report, stdout);
    } else {
        std::FILE* f = std::fopen(opts.out_path.c_str(), "wb");
        if (!f) {
            sd_string_free(report);
            return fail("cannot open output path");
        }
        std::fputs(report, f);
        std::fclose(f);
    }
    sd_string_free(report);
    return passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"subdiffusive processes: simulation, transforms, Parisian pricing"};
    app.require_subcommand(1);

    CommonOpts verify_opts, price_opts, sim_opts;
    std::string verify_target, price_method, sim_kind;

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("target", verify_target,
                       "pd | occupation | mlt | rayknight | fracpde | laplace | subordinator | "
                       "tail | pricing | repro")
        ->required();
    add_common(verify, verify_opts);

    auto* price = app.add_subcommand("price", "price a down-and-in Parisian option");
    price->add_option("method", price_method, "direct | decomposition")
        ->required()
        ->check(CLI::IsMember({"direct", "decomposition"}));
    add_common(price, price_opts);

    auto* simulate = app.add_subcommand("simulate", "emit a sample path");
    simulate->add_option("kind", sim_kind, "subordinator | bm | timechange")
        ->required()
        ->check(CLI::IsMember({"subordinator", "bm", "timechange"}));
    add_common(simulate, sim_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (verify->parsed()) return run_task("verify:" + verify_target, verify_opts);
        if (price->parsed()) return run_task("price:" + price_method, price_opts);
        if (simulate->parsed()) return run_task("simulate:" + sim_kind, sim_opts);
    } catch (const std::exception& e) {
        return fail(e.what());
    }
    return 1;
}
