//
// slrd command line tool
//
// denoise   read a CSV matrix, run the full pipeline, write the estimate
// rank      screening, noise-scale, and rank selection report as JSON
// simulate  draw a synthetic instance from a generator spec
// bench     run the table1 / table2 replication sweeps
//

#include "slrd/csv.hpp"
#include "slrd/denoiser.hpp"
#include "slrd/experiments.hpp"
#include "slrd/initialization.hpp"
#include "slrd/rng.hpp"
#include "slrd/types.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>

namespace {

using nlohmann::ordered_json;

std::optional<double> parse_sigma(const std::string& text)
{
    if (text == "auto")
        return std::nullopt;
    const double value = std::stod(text);
    if (!(value > 0.0))
        throw slrd::InvalidInput("--sigma must be positive or 'auto'");
    return value;
}

std::optional<slrd::Index> parse_rank(const std::string& text)
{
    if (text == "auto")
        return std::nullopt;
    const long long value = std::stoll(text);
    if (value < 1)
        throw slrd::InvalidInput("--rank must be a positive integer or 'auto'");
    return static_cast<slrd::Index>(value);
}

ordered_json support_to_json(const slrd::IndexSet& support)
{
    ordered_json out = ordered_json::array();
    for (slrd::Index index : support)
        out.push_back(index);
    return out;
}

void write_json_file(const std::string& path, const ordered_json& doc)
{
    std::ofstream out(path);
    if (!out)
        throw slrd::InvalidInput("cannot open '" + path + "' for writing");
    out << doc.dump(2) << '\n';
}

struct DenoiseArgs {
    std::string input;
    std::string output;
    std::string rank = "auto";
    std::string sigma = "auto";
    double alpha = 4.0;
    double beta = 4.0;
    std::string threshold = "hard";
    double scad_a = 3.7;
    double mcp_b = 3.0;
    double eps = 1e-10;
    int max_iterations = 1000;
    std::string report;
};

int run_denoise(const DenoiseArgs& args)
{
    const slrd::Matrix X = slrd::read_csv_matrix_file(args.input);

    slrd::PipelineOptions options;
    options.sigma = parse_sigma(args.sigma);
    options.rank = parse_rank(args.rank);
    options.alpha = args.alpha;
    options.beta = args.beta;
    options.threshold.rule = slrd::parse_threshold_rule(args.threshold);
    options.threshold.scad_a = args.scad_a;
    options.threshold.mcp_b = args.mcp_b;
    options.eps = args.eps;
    options.max_iterations = args.max_iterations;

    const slrd::PipelineResult result = slrd::auto_denoise(X, options);
    slrd::write_csv_matrix_file(args.output, result.denoised.estimate);

    for (const std::string& warning : result.warnings)
        std::cerr << "warning: " << warning << '\n';

    if (!args.report.empty()) {
        ordered_json doc;
        doc["rows"] = X.rows();
        doc["cols"] = X.cols();
        doc["transposed"] = result.transposed;
        doc["sigma_used"] = result.sigma_used;
        doc["sigma_estimated"] = result.sigma_estimated;
        doc["r_hat"] = result.init.r_hat;
        doc["rank_used"] = result.rank_used;
        doc["gamma"] = result.gamma;
        doc["t_hat"] = result.budget.steps;
        doc["t_hat_low_signal"] = result.budget.low_signal;
        doc["iterations_run"] = result.denoised.iterations_run;
        doc["tolerance_met"] = result.denoised.tolerance_met;
        doc["hit_iteration_cap"] = result.denoised.hit_iteration_cap;
        doc["max_gram_error"] = result.denoised.max_gram_error;
        doc["i0_size"] = result.init.i0.size();
        doc["j0_size"] = result.init.j0.size();
        doc["row_support"] = support_to_json(result.denoised.row_support);
        doc["col_support"] = support_to_json(result.denoised.col_support);
        ordered_json iterations = ordered_json::array();
        for (const slrd::IterationRecord& record : result.denoised.trace) {
            ordered_json step;
            step["step"] = record.step;
            step["u_subspace_delta"] = record.u_subspace_delta;
            step["v_subspace_delta"] = record.v_subspace_delta;
            step["u_rows_kept"] = record.u_rows_kept;
            step["v_rows_kept"] = record.v_rows_kept;
            step["u_gram_error"] = record.u_gram_error;
            step["v_gram_error"] = record.v_gram_error;
            iterations.push_back(step);
        }
        doc["iterations"] = iterations;
        doc["warnings"] = result.warnings;
        write_json_file(args.report, doc);
    }

    std::cout << "wrote " << result.denoised.estimate.rows() << " x "
              << result.denoised.estimate.cols() << " estimate to " << args.output
              << " (rank " << result.rank_used << ", "
              << result.denoised.iterations_run << " sweeps)" << '\n';
    return 0;
}

struct RankArgs {
    std::string input;
    std::string sigma = "auto";
    double alpha = 4.0;
};

int run_rank(const RankArgs& args)
{
    const slrd::Matrix loaded = slrd::read_csv_matrix_file(args.input);
    const bool transposed = loaded.rows() < loaded.cols();
    const slrd::Matrix X = transposed ? slrd::Matrix(loaded.transpose()) : loaded;

    double sigma = 0.0;
    const std::optional<double> given = parse_sigma(args.sigma);
    if (given) {
        sigma = *given;
    } else {
        const slrd::SigmaEstimate estimate = slrd::estimate_sigma(X);
        if (estimate.degenerate)
            throw slrd::InvalidInput("noise-scale estimate degenerated to zero; pass --sigma");
        sigma = estimate.value;
    }

    const slrd::ScreeningSets sets = slrd::select_screening_sets(X, sigma, args.alpha);
    const slrd::Index r_hat = slrd::select_rank(X, sets.rows, sets.cols, sigma);
    const bool screened = !sets.rows.empty() && !sets.cols.empty();
    const double cutoff =
        screened ? sigma * slrd::rank_cutoff_delta(static_cast<slrd::Index>(sets.rows.size()),
                                                   static_cast<slrd::Index>(sets.cols.size()),
                                                   X.rows(), X.cols())
                 : 0.0;

    ordered_json doc;
    doc["rows"] = loaded.rows();
    doc["cols"] = loaded.cols();
    doc["transposed"] = transposed;
    doc["sigma_hat"] = sigma;
    doc["sigma_estimated"] = !given.has_value();
    doc["r_hat"] = r_hat;
    doc["i0_size"] = transposed ? sets.cols.size() : sets.rows.size();
    doc["j0_size"] = transposed ? sets.rows.size() : sets.cols.size();
    doc["delta_cutoff"] = cutoff;
    std::cout << doc.dump(2) << std::endl;
    return 0;
}

struct SimulateArgs {
    std::string spec;
    std::string out;
    std::string truth;
    std::optional<std::uint64_t> seed;
};

int run_simulate(const SimulateArgs& args)
{
    slrd::GeneratorSpec spec = slrd::read_generator_spec_json_file(args.spec);
    if (args.seed)
        spec.seed = *args.seed;

    const slrd::Instance instance = slrd::generate_instance(spec);
    slrd::write_csv_matrix_file(args.out, instance.observed);
    if (!args.truth.empty())
        slrd::write_csv_matrix_file(args.truth, slrd::compose_signal(instance.factors));

    std::cout << "wrote " << spec.m << " x " << spec.n << " observation to " << args.out
              << " (seed " << spec.seed << ")" << '\n';
    return 0;
}

struct BenchArgs {
    std::string table;
    std::string scale = "full";
    int replications = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::string csv;
    int threads = 0;
};

int run_bench(const BenchArgs& args)
{
    const slrd::BenchScale scale =
        args.scale == "desk" ? slrd::BenchScale::Desk : slrd::BenchScale::Full;
    const auto settings = args.table == "table1" ? slrd::table1_settings(scale)
                                                 : slrd::table2_settings(scale);

    slrd::LabeledReports reports;
    std::size_t index = 0;
    for (const auto& [label, spec] : settings) {
        slrd::ExperimentConfig config;
        config.replications = args.replications;
        config.base_seed = slrd::derive_seed(args.seed, index++);
        config.workers = args.threads;
        reports.emplace_back(label, slrd::run_experiment(spec, config));
        const slrd::ExperimentReport& report = reports.back().second;
        std::cout << label << ": mean L2 = " << report.mean_L2
                  << ", mean L1 = " << report.mean_L1 << " (" << report.replications
                  << " reps, " << report.failures << " failures)" << std::endl;
    }

    {
        std::ofstream out(args.out);
        if (!out)
            throw slrd::InvalidInput("cannot open '" + args.out + "' for writing");
        slrd::write_reports_json(out, args.table, reports);
    }
    if (!args.csv.empty()) {
        std::ofstream out(args.csv);
        if (!out)
            throw slrd::InvalidInput("cannot open '" + args.csv + "' for writing");
        slrd::write_reports_csv(out, reports);
    }
    std::cout << "wrote report to " << args.out << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"denoiser for simultaneously sparse and low-rank matrices"};
    app.require_subcommand(1);

    DenoiseArgs denoise;
    CLI::App* denoise_cmd = app.add_subcommand("denoise", "run the full pipeline on a CSV matrix");
    denoise_cmd->add_option("--input", denoise.input, "observation matrix, CSV")
        ->required()
        ->check(CLI::ExistingFile);
    denoise_cmd->add_option("--output", denoise.output, "estimate destination, CSV")->required();
    denoise_cmd->add_option("--rank", denoise.rank, "factor rank, or 'auto' to select from data");
    denoise_cmd->add_option("--sigma", denoise.sigma, "noise level, or 'auto' to estimate");
    denoise_cmd->add_option("--alpha", denoise.alpha, "screening constant");
    denoise_cmd->add_option("--beta", denoise.beta, "threshold-level constant");
    denoise_cmd->add_option("--threshold", denoise.threshold, "hard, soft, scad, or mcp");
    denoise_cmd->add_option("--scad-a", denoise.scad_a, "SCAD taper width");
    denoise_cmd->add_option("--mcp-b", denoise.mcp_b, "MCP taper width");
    denoise_cmd->add_option("--eps", denoise.eps, "subspace-movement tolerance");
    denoise_cmd->add_option("--max-iter", denoise.max_iterations, "iteration cap");
    denoise_cmd->add_option("--report", denoise.report, "diagnostic report destination, JSON");

    RankArgs rank;
    CLI::App* rank_cmd =
        app.add_subcommand("rank", "report screening and rank selection for a CSV matrix");
    rank_cmd->add_option("--input", rank.input, "observation matrix, CSV")
        ->required()
        ->check(CLI::ExistingFile);
    rank_cmd->add_option("--sigma", rank.sigma, "noise level, or 'auto' to estimate");
    rank_cmd->add_option("--alpha", rank.alpha, "screening constant");

    SimulateArgs simulate;
    CLI::App* simulate_cmd =
        app.add_subcommand("simulate", "draw a synthetic instance from a generator spec");
    simulate_cmd->add_option("--spec", simulate.spec, "generator spec, JSON")
        ->required()
        ->check(CLI::ExistingFile);
    simulate_cmd->add_option("--out", simulate.out, "observation destination, CSV")->required();
    simulate_cmd->add_option("--truth", simulate.truth, "noiseless signal destination, CSV");
    std::uint64_t seed_override = 0;
    CLI::Option* seed_option =
        simulate_cmd->add_option("--seed", seed_override, "override the seed in the spec file");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "run a replication sweep");
    bench_cmd->add_option("table", bench.table, "which sweep to run")
        ->required()
        ->check(CLI::IsMember({"table1", "table2"}));
    bench_cmd->add_option("--scale", bench.scale, "full or desk")
        ->check(CLI::IsMember({"full", "desk"}));
    bench_cmd->add_option("--reps", bench.replications, "replications per setting")
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--seed", bench.seed, "base seed for the sweep");
    bench_cmd->add_option("--out", bench.out, "report destination, JSON")->required();
    bench_cmd->add_option("--csv", bench.csv, "aggregate table destination, CSV");
    bench_cmd->add_option("--threads", bench.threads, "worker count, 0 for hardware concurrency");

    CLI11_PARSE(app, argc, argv);

    try {
        if (denoise_cmd->parsed())
            return run_denoise(denoise);
        if (rank_cmd->parsed())
            return run_rank(rank);
        if (simulate_cmd->parsed()) {
            if (seed_option->count() > 0)
                simulate.seed = seed_override;
            return run_simulate(simulate);
        }
        if (bench_cmd->parsed())
            return run_bench(bench);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << '\n';
        return 1;
    }
    return 0;
}
