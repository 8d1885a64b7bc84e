// Command-line front end: builds a merged configuration from defaults, flags,
// and an optional JSON config file (the file wins), runs the named pipeline,
// and prints where the manifest landed.  Exit codes: 0 success, 2 invalid
// configuration, 3 runtime failure.

#include <cstdio>
#include <exception>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "freent/errors.hpp"
#include "freent/experiment.hpp"

using nlohmann::json;

namespace {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_runtime = 3;

struct CommandSetup {
    CLI::App* app = nullptr;
    // Collects only the options the user actually set, so that the
    // defaults < flags < file precedence holds.
    std::vector<std::function<void(json&)>> collectors;
};

void add_opt_u64(CommandSetup& c, const std::string& flag, const std::string& key,
                 std::uint64_t& slot, const std::string& help) {
    CLI::Option* o = c.app->add_option(flag, slot, help);
    c.collectors.push_back([o, key, &slot](json& j) {
        if (o->count()) j[key] = slot;
    });
}

void add_opt_size(CommandSetup& c, const std::string& flag, const std::string& key,
                  std::size_t& slot, const std::string& help) {
    CLI::Option* o = c.app->add_option(flag, slot, help);
    c.collectors.push_back([o, key, &slot](json& j) {
        if (o->count()) j[key] = slot;
    });
}

void add_opt_double(CommandSetup& c, const std::string& flag, const std::string& key,
                    double& slot, const std::string& help) {
    CLI::Option* o = c.app->add_option(flag, slot, help);
    c.collectors.push_back([o, key, &slot](json& j) {
        if (o->count()) j[key] = slot;
    });
}

void add_opt_string(CommandSetup& c, const std::string& flag, const std::string& key,
                    std::string& slot, const std::string& help) {
    CLI::Option* o = c.app->add_option(flag, slot, help);
    c.collectors.push_back([o, key, &slot](json& j) {
        if (o->count()) j[key] = slot;
    });
}

void add_opt_size_list(CommandSetup& c, const std::string& flag, const std::string& key,
                       std::vector<std::size_t>& slot, const std::string& help) {
    CLI::Option* o = c.app->add_option(flag, slot, help)->delimiter(',');
    c.collectors.push_back([o, key, &slot](json& j) {
        if (o->count()) j[key] = slot;
    });
}

void add_opt_double_list(CommandSetup& c, const std::string& flag, const std::string& key,
                         std::vector<double>& slot, const std::string& help) {
    CLI::Option* o = c.app->add_option(flag, slot, help)->delimiter(',');
    c.collectors.push_back([o, key, &slot](json& j) {
        if (o->count()) j[key] = slot;
    });
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for matricial volumes, capacities, and "
                 "covering dimensions"};
    app.require_subcommand(1);

    std::string config_path;
    std::string outdir = freent::default_outdir();
    bool print_manifest = false;
    app.add_option("--config", config_path,
                   "JSON config file; overrides flags on conflict");
    app.add_option("--outdir", outdir,
                   "output directory (default: FREENT_OUTDIR or ./out)");
    app.add_flag("--print-manifest", print_manifest,
                 "echo the manifest JSON to stdout");

    // Per-command storage. Values persist until run; only set flags are
    // forwarded.
    std::string intervals, poly, preset, spec_path, estimator, metric;
    std::uint64_t seed = 0;
    std::size_t grid = 0, n = 0, k = 0, trials = 0, samples = 0, workers = 0,
                degree = 0;
    double eps = 0, radius = 0, spec_eps = 0;
    std::vector<std::size_t> dims, k_grid;
    std::vector<double> eps_list, eps_grid;

    std::vector<CommandSetup> setups;
    auto command = [&](const char* name, const char* help) -> CommandSetup& {
        CLI::App* sub = app.add_subcommand(name, help);
        sub->fallthrough();  // lets --outdir / --config follow the command
        setups.push_back({sub, {}});
        return setups.back();
    };

    {
        auto& c = command("capacity", "logarithmic capacity and the entropy "
                                      "constants of a compact set");
        add_opt_string(c, "--intervals", "intervals", intervals,
                       "closed intervals, e.g. \"[-1,1]\" or \"[0,1];[2,3]\"");
        add_opt_size(c, "--grid", "grid", grid, "grid cells (50..8192)");
        add_opt_u64(c, "--seed", "seed", seed, "recorded seed");
    }
    {
        auto& c = command("eqmeasure", "equilibrium measure of a compact set");
        add_opt_string(c, "--intervals", "intervals", intervals,
                       "closed intervals, e.g. \"[-1,1]\"");
        add_opt_size(c, "--grid", "grid", grid, "grid cells (50..8192)");
        add_opt_u64(c, "--seed", "seed", seed, "recorded seed");
    }
    {
        auto& c = command("gue-norms", "operator norm scan of single GUE matrices");
        add_opt_size_list(c, "--dims", "dims", dims, "matrix sizes, e.g. 50,100,200");
        add_opt_size(c, "--trials", "trials", trials, "trials per size");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }
    {
        auto& c = command("ht-check", "norm convergence of a polynomial in "
                                      "independent GUE matrices");
        add_opt_size(c, "--n", "n", n, "number of matrix variables");
        add_opt_string(c, "--poly", "poly", poly, "polynomial, e.g. \"X1+X2\"");
        add_opt_size_list(c, "--dims", "dims", dims, "matrix sizes");
        add_opt_size(c, "--trials", "trials", trials, "trials per size");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }
    {
        auto& c = command("gamma-measure", "Gaussian measure of a constraint set");
        add_opt_string(c, "--preset", "preset", preset,
                       "semicircular | vacuous | interval:a,b");
        add_opt_string(c, "--spec", "spec_path", spec_path, "constraint spec file");
        add_opt_size(c, "--n", "n", n, "variables (presets)");
        add_opt_double(c, "--eps", "eps", eps, "constraint window");
        add_opt_size(c, "--degree", "degree", degree, "interval preset degree");
        add_opt_size(c, "--k", "k", k, "matrix size");
        add_opt_size(c, "--samples", "samples", samples, "sample count");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }
    {
        auto& c = command("volume", "normalized log-volume of a constraint set");
        add_opt_string(c, "--preset", "preset", preset,
                       "semicircular | vacuous | interval:a,b");
        add_opt_string(c, "--spec", "spec_path", spec_path, "constraint spec file");
        add_opt_size(c, "--n", "n", n, "variables (presets)");
        add_opt_double(c, "--eps", "eps", eps, "constraint window");
        add_opt_size(c, "--degree", "degree", degree, "interval preset degree");
        add_opt_size(c, "--k", "k", k, "matrix size (<= 12)");
        add_opt_double(c, "--radius", "radius", radius,
                       "sampling ball radius (0 = derived from the spec)");
        add_opt_size(c, "--samples", "samples", samples, "sample count");
        add_opt_string(c, "--estimator", "estimator", estimator,
                       "ball | gaussian | both");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }
    {
        auto& c = command("covering", "net growth on a sampled operator-norm ball");
        add_opt_size(c, "--k", "k", k, "matrix size (<= 12)");
        add_opt_double(c, "--radius", "radius", radius, "ball radius");
        add_opt_double_list(c, "--eps", "eps", eps_list, "net radii, e.g. 0.5,0.2,0.1");
        add_opt_size(c, "--samples", "samples", samples, "ball samples");
        add_opt_string(c, "--metric", "metric", metric, "uniform | hs");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }
    {
        auto& c = command("dimension", "covering-dimension slope of a constraint "
                                       "family");
        add_opt_string(c, "--preset", "preset", preset,
                       "vacuous | semicircular | interval:a,b");
        add_opt_size(c, "--n", "n", n, "variables (presets)");
        add_opt_double(c, "--spec-eps", "spec_eps", spec_eps, "constraint window");
        add_opt_size(c, "--degree", "degree", degree, "interval preset degree");
        add_opt_size_list(c, "--k-grid", "k_grid", k_grid, "matrix sizes, e.g. 1,2,3");
        add_opt_double_list(c, "--eps-grid", "eps_grid", eps_grid,
                            "decreasing net radii, e.g. 0.4,0.2,0.1");
        add_opt_double(c, "--radius", "radius", radius, "sampling ball radius");
        add_opt_size(c, "--samples", "samples", samples, "samples per matrix size");
        add_opt_string(c, "--metric", "metric", metric, "uniform | hs");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }
    {
        auto& c = command("trace-pinning", "second-moment concentration inside "
                                           "the semicircular window");
        add_opt_size(c, "--k", "k", k, "matrix size");
        add_opt_double(c, "--eps", "eps", eps, "constraint window");
        add_opt_size(c, "--samples", "samples", samples, "sample count");
        add_opt_u64(c, "--seed", "seed", seed, "sampling seed");
        add_opt_size(c, "--workers", "workers", workers, "worker threads");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_validation;
    }

    const CommandSetup* chosen = nullptr;
    for (const auto& c : setups)
        if (c.app->parsed()) chosen = &c;
    if (!chosen) {
        std::cerr << "error: no command given\n";
        return exit_validation;
    }

    json flag_params = json::object();
    for (const auto& collect : chosen->collectors) collect(flag_params);

    try {
        const freent::ExperimentConfig cfg = freent::make_config(
            chosen->app->get_name(), flag_params, config_path);
        const freent::ResultManifest rm = freent::run_experiment(cfg, outdir);
        std::cout << "wrote " << rm.run_dir << "/manifest.json ("
                  << rm.data_files.size() << " data file"
                  << (rm.data_files.size() == 1 ? "" : "s") << ", backend "
                  << rm.kernels << ")\n";
        for (const auto& w : rm.warnings) std::cout << "warning: " << w << "\n";
        if (print_manifest) std::cout << rm.to_json().dump(2) << "\n";
        return exit_ok;
    } catch (const freent::ValidationError& e) {
        std::cerr << "invalid configuration: " << e.what() << "\n";
        return exit_validation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_runtime;
    }
}
