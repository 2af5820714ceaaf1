// mapcma: run CMA-ES / MAP-CMA benchmark experiments.
//
//   mapcma run --function sphere --dim 10 --variant cma-es --trials 100 --seed 42 --out results.csv
//   mapcma run ... --trace --out trace.json
//   mapcma sweep --config presets/benchmark.toml --out results/
//
// Exit status: 0 on success, 2 on a configuration error, 1 on anything else.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mapcma/config.hpp"
#include "mapcma/harness.hpp"
#include "mapcma/kernels.hpp"
#include "mapcma/report.hpp"

namespace
{
    constexpr int config_error_status = 2;

    struct CommonOptions
    {
        std::optional<std::size_t> trials;
        std::optional<std::uint64_t> seed;
        std::optional<std::size_t> threads;
        bool trace = false;
        std::string out;
    };

    struct RunOptions
    {
        std::string config;
        std::optional<std::string> function;
        std::optional<std::size_t> dim;
        std::optional<std::string> variant;
        std::optional<std::string> r;
        std::optional<std::size_t> lambda;
        std::optional<double> target;
        std::optional<std::uint64_t> max_evals_factor;
        bool h_sigma = false;
    };

    void add_common(CLI::App* cmd, CommonOptions& o)
    {
        cmd->add_option("--trials", o.trials, "Number of independent trials");
        cmd->add_option("--seed", o.seed, "Base seed; trial i uses a splitmix-derived seed");
        cmd->add_option("--threads", o.threads, "Worker threads (default: MAPCMA_THREADS or all cores)");
        cmd->add_flag("--trace", o.trace, "Record per-trial (evaluations, best_f) traces as JSON");
    }

    std::size_t parallelism(const CommonOptions& o)
    {
        return o.threads.value_or(mapcma::default_parallelism());
    }

    void write_file(const std::filesystem::path& path, const std::string& text)
    {
        if (path.has_parent_path())
            std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
        out << text;
    }

    std::string summary_csv(const mapcma::SummaryRow& row)
    {
        return std::string(mapcma::summary_csv_header()) + "\n" + mapcma::format_summary_row(row) + "\n";
    }

    int run_command(const RunOptions& ro, const CommonOptions& co)
    {
        mapcma::ExperimentSpec spec;
        if (!ro.config.empty())
            mapcma::apply_config(mapcma::FlatConfig::load(ro.config), spec);

        if (ro.function)
        {
            const auto f = mapcma::parse_function(*ro.function);
            if (!f)
                throw mapcma::InvalidConfig("unknown function '" + *ro.function + "'");
            spec.trial.function = *f;
        }
        if (ro.dim)
            spec.trial.dim = *ro.dim;
        if (ro.variant)
        {
            const auto v = mapcma::parse_variant(*ro.variant);
            if (!v)
                throw mapcma::InvalidConfig("unknown variant '" + *ro.variant + "'");
            spec.trial.variant = *v;
        }
        if (ro.r)
        {
            const auto r = mapcma::RSetting::parse(*ro.r);
            if (!r)
                throw mapcma::InvalidConfig("invalid r '" + *ro.r + "'");
            spec.trial.r = *r;
        }
        if (ro.lambda)
            spec.trial.lambda = *ro.lambda;
        if (ro.target)
            spec.trial.target_f = *ro.target;
        if (ro.max_evals_factor)
            spec.max_evals_factor = *ro.max_evals_factor;
        if (ro.h_sigma)
            spec.trial.use_h_sigma = true;
        if (co.trials)
            spec.trials = *co.trials;
        if (co.seed)
            spec.base_seed = *co.seed;
        spec.trial.record_trace = co.trace;

        const mapcma::TrialConfig trial = spec.resolved_trial();
        trial.validate();
        const auto summary = mapcma::run_experiment(trial, spec.trials, spec.base_seed, parallelism(co));
        const auto row = mapcma::make_summary_row(spec, summary);

        if (co.trace)
        {
            const std::string json = mapcma::traces_json(spec, summary).dump(1) + "\n";
            if (co.out.empty())
                std::cout << json;
            else
                write_file(co.out, json);
            std::cerr << summary_csv(row);
        }
        else if (co.out.empty())
            std::cout << summary_csv(row);
        else
        {
            write_file(co.out, summary_csv(row));
            std::cout << summary_csv(row);
        }
        return 0;
    }

    int sweep_command(const std::string& config_path, const CommonOptions& co)
    {
        auto cells = mapcma::expand_sweep(mapcma::FlatConfig::load(config_path));
        for (auto& cell : cells)
        {
            if (co.trials)
                cell.trials = *co.trials;
            if (co.seed)
                cell.base_seed = *co.seed;
            cell.trial.record_trace = co.trace;
            cell.resolved_trial().validate();
        }

        const std::filesystem::path out_dir = co.out.empty() ? std::filesystem::path(".") : std::filesystem::path(co.out);
        std::filesystem::create_directories(out_dir);
        std::ofstream csv(out_dir / "summary.csv");
        if (!csv)
            throw std::runtime_error("cannot write " + (out_dir / "summary.csv").string());
        csv << mapcma::summary_csv_header() << "\n";
        std::cout << mapcma::summary_csv_header() << "\n";
        std::cerr << fmt::format("{} cells, {} kernels\n", cells.size(),
                                 mapcma::kernels::isa_name(mapcma::kernels::active_isa()));

        for (std::size_t i = 0; i < cells.size(); ++i)
        {
            const auto& cell = cells[i];
            const auto start = std::chrono::steady_clock::now();
            const auto summary = mapcma::run_experiment(cell.resolved_trial(), cell.trials, cell.base_seed,
                                                        parallelism(co));
            const auto row = mapcma::make_summary_row(cell, summary);
            const std::string line = mapcma::format_summary_row(row);
            csv << line << "\n" << std::flush;
            std::cout << line << "\n" << std::flush;
            if (co.trace)
            {
                const std::string name = fmt::format("{}_{}_{}{}.json", row.function, row.dim, row.variant,
                                                     row.r == "-" ? "" : "_r" + row.r);
                write_file(out_dir / name, mapcma::traces_json(cell, summary).dump(1) + "\n");
            }
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            std::cerr << fmt::format("[{}/{}] {} {} {} r={} done in {:.1f}s\n", i + 1, cells.size(), row.function,
                                     row.dim, row.variant, row.r, seconds);
        }
        return 0;
    }
}

int main(int argc, char** argv)
{
    CLI::App app{"CMA-ES / MAP-CMA benchmark harness"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "mapcma 0.1.0");

    CommonOptions run_common;
    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run one experiment and write a summary row (or traces)");
    run->add_option("--config", run_opts.config, "Flat key/value config file; flags override its values");
    run->add_option("--function", run_opts.function, "sphere|ellipsoid|cigar|rosenbrock|ackley|rastrigin");
    run->add_option("--dim", run_opts.dim, "Search-space dimension (>= 2)");
    run->add_option("--variant", run_opts.variant, "cma-es|pure-rank-mu|map-cma");
    run->add_option("--r", run_opts.r, "Momentum radius for map-cma: 1, sqrt-n, n or a number");
    run->add_option("--lambda", run_opts.lambda, "Population size (default 4 + floor(3 ln N))");
    run->add_option("--target", run_opts.target, "Success threshold on best f (default 1e-10)");
    run->add_option("--max-evals-factor", run_opts.max_evals_factor, "Budget = factor * dim (default 1e6)");
    run->add_flag("--h-sigma", run_opts.h_sigma, "Enable the h_sigma stall indicator");
    run->add_option("--out", run_common.out, "Output file (CSV, or JSON with --trace)");
    add_common(run, run_common);

    CommonOptions sweep_common;
    std::string sweep_config;
    auto* sweep = app.add_subcommand("sweep", "Run every cell of a sweep config");
    sweep->add_option("--config", sweep_config, "Sweep config file")->required();
    sweep->add_option("--out", sweep_common.out, "Output directory (summary.csv plus traces)");
    add_common(sweep, sweep_common);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::CallForHelp& e)
    {
        return app.exit(e);
    }
    catch (const CLI::CallForVersion& e)
    {
        return app.exit(e);
    }
    catch (const CLI::ParseError& e)
    {
        app.exit(e);
        return config_error_status;
    }

    try
    {
        if (*run)
            return run_command(run_opts, run_common);
        return sweep_command(sweep_config, sweep_common);
    }
    catch (const mapcma::InvalidConfig& e)
    {
        std::cerr << "config error: " << e.what() << "\n";
        return config_error_status;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
