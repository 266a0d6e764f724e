#include "slrd/experiments.hpp"

#include "slrd/rng.hpp"
#include "slrd/spectral.hpp"

#include <json.hpp>

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <thread>

namespace slrd {

void validate(const GeneratorSpec& spec)
{
    ParamSpaceSpec dims{spec.m, spec.n, spec.k, spec.l, spec.r};
    validate(dims);
    if (spec.singular_values.size() != spec.r)
        throw InvalidInput("generator needs exactly r singular values");
    for (Index s = 0; s < spec.r; ++s) {
        if (!(spec.singular_values(s) > 0.0))
            throw InvalidInput("generator singular values must be positive");
        if (s > 0 && spec.singular_values(s) > spec.singular_values(s - 1))
            throw InvalidInput("generator singular values must be non-increasing");
    }
    if (!(spec.sigma >= 0.0))
        throw InvalidInput("generator noise level must be non-negative");
}

namespace {

using json = nlohmann::ordered_json;

// sorted k-subset of {0, ..., n-1} via a partial Fisher-Yates shuffle
IndexSet sample_sorted_subset(Index n, Index k, Rng& rng)
{
    std::vector<Index> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), Index{0});
    for (Index i = 0; i < k; ++i) {
        const Index j = i + static_cast<Index>(rng.uniform_below(static_cast<std::uint64_t>(n - i)));
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
    }
    IndexSet out(pool.begin(), pool.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

// orthonormal m x r factor supported on `support`: the p-th support row
// of the Gaussian seed has standard deviation (p+1)^2
Matrix draw_support_factor(Index m, Index r, const IndexSet& support, Rng& rng)
{
    Matrix seed = Matrix::Zero(m, r);
    for (Index s = 0; s < r; ++s)
        for (std::size_t p = 0; p < support.size(); ++p) {
            const double scale = static_cast<double>(p + 1) * static_cast<double>(p + 1);
            seed(support[p], s) = scale * rng.normal();
        }

    Matrix factor = orthonormalize_keeping_zero_rows(seed);
    canonicalize_column_signs(factor);
    return factor;
}

} // namespace

Instance generate_instance(const GeneratorSpec& spec)
{
    validate(spec);

    Rng row_rng = Rng::child(spec.seed, 3);
    Rng col_rng = Rng::child(spec.seed, 4);
    IndexSet row_support(static_cast<std::size_t>(spec.k));
    IndexSet col_support(static_cast<std::size_t>(spec.l));
    if (spec.permute_supports) {
        row_support = sample_sorted_subset(spec.m, spec.k, row_rng);
        col_support = sample_sorted_subset(spec.n, spec.l, col_rng);
    } else {
        std::iota(row_support.begin(), row_support.end(), Index{0});
        std::iota(col_support.begin(), col_support.end(), Index{0});
    }

    Rng u_rng = Rng::child(spec.seed, 0);
    Rng v_rng = Rng::child(spec.seed, 1);

    Instance out;
    out.factors.U = draw_support_factor(spec.m, spec.r, row_support, u_rng);
    out.factors.V = draw_support_factor(spec.n, spec.r, col_support, v_rng);
    out.factors.d = spec.singular_values;
    out.factors.row_support = std::move(row_support);
    out.factors.col_support = std::move(col_support);
    out.observed = add_noise(compose_signal(out.factors), spec.sigma, derive_seed(spec.seed, 2));
    return out;
}

std::pair<double, double> evaluate_losses(const SignalFactors& truth, const Matrix& U,
                                          const Matrix& core, const Matrix& V)
{
    const Index r_est = U.cols();
    const Index r_true = truth.d.size();
    if (U.rows() != truth.U.rows() || V.rows() != truth.V.rows())
        throw InvalidInput("estimate and truth live on different dimensions");
    if (core.rows() != r_est || core.cols() != r_est || V.cols() != r_est)
        throw InvalidInput("estimate factors have inconsistent shapes");

    // a zero estimate loses exactly the truth's spectrum
    if (r_est == 0) {
        const double l1_root = truth.d.sum();
        return {l1_root * l1_root, truth.d.squaredNorm()};
    }

    // U core V^T - U_true diag(d) V_true^T has rank at most r_est +
    // r_true; QR-compress the stacked factors so only a small core needs
    // an SVD
    const Index c = r_est + r_true;
    Matrix A(U.rows(), c);
    A << U, truth.U;
    Matrix B(V.rows(), c);
    B << V, truth.V;
    const Vector negated = -truth.d;
    Matrix S = Matrix::Zero(c, c);
    S.topLeftCorner(r_est, r_est) = core;
    S.bottomRightCorner(r_true, r_true) = negated.asDiagonal();

    Eigen::HouseholderQR<Matrix> qr_a(A);
    Eigen::HouseholderQR<Matrix> qr_b(B);
    const Index ra = std::min(A.rows(), c);
    const Index rb = std::min(B.rows(), c);
    const Matrix Ra = qr_a.matrixQR().topRows(ra).triangularView<Eigen::Upper>();
    const Matrix Rb = qr_b.matrixQR().topRows(rb).triangularView<Eigen::Upper>();

    const Vector sv = Eigen::BDCSVD<Matrix>(Ra * S * Rb.transpose()).singularValues();
    const double l1_root = sv.sum();
    return {l1_root * l1_root, sv.squaredNorm()};
}

ReplicationRecord run_replication(const GeneratorSpec& spec, const ReplicationOptions& options,
                                  std::uint64_t seed)
{
    ReplicationRecord record;
    record.seed = seed;
    try {
        GeneratorSpec seeded = spec;
        seeded.seed = seed;
        const Instance instance = generate_instance(seeded);

        PipelineOptions pipeline;
        pipeline.alpha = options.alpha;
        pipeline.beta = options.beta;
        pipeline.threshold = options.threshold;
        pipeline.stop = StoppingPolicy::Mode::Tolerance;
        pipeline.eps = options.eps;
        pipeline.max_iterations = options.max_iterations;

        const PipelineResult result = auto_denoise(instance.observed, pipeline);

        record.sigma_hat = result.sigma_used;
        record.r_hat = result.init.r_hat;
        record.i0_size = static_cast<Index>(result.init.i0.size());
        record.j0_size = static_cast<Index>(result.init.j0.size());
        record.iterations = result.denoised.iterations_run;
        record.t_hat = result.budget.steps;
        record.t_hat_low_signal = result.budget.low_signal;

        if (result.rank_used >= 1) {
            const double tau = result.sigma_used * result.gamma;
            const IterationBudget oracle = compute_T_oracle(
                instance.factors.d(spec.r - 1), spec.k, spec.l, tau, tau, spec.m);
            record.t_oracle = oracle.steps;
            record.t_oracle_low_signal = oracle.low_signal;
            if (result.init.V0.cols() == instance.factors.V.cols())
                record.sin_theta_v0 = sin_theta(result.init.V0, instance.factors.V).op;
        }

        const auto [l1, l2] = evaluate_losses(instance.factors, result.denoised.U,
                                              result.denoised.core, result.denoised.V);
        record.L1 = l1;
        record.L2 = l2;
    } catch (const std::exception& failure) {
        record.failed = true;
        record.error = failure.what();
    }
    return record;
}

ExperimentReport run_experiment(const GeneratorSpec& spec, const ExperimentConfig& config)
{
    validate(spec);
    if (config.replications < 1)
        throw InvalidInput("experiment needs at least one replication");

    ExperimentReport report;
    report.spec = spec;
    report.replications = config.replications;
    report.base_seed = config.base_seed;
    report.per_rep.resize(static_cast<std::size_t>(config.replications));

    int workers = config.workers;
    if (workers <= 0)
        workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, config.replications);

    std::atomic<int> next{0};
    auto drain = [&] {
        for (int i = next.fetch_add(1); i < config.replications; i = next.fetch_add(1))
            report.per_rep[static_cast<std::size_t>(i)] =
                run_replication(spec, config.options, derive_seed(config.base_seed,
                                                                  static_cast<std::uint64_t>(i)));
    };
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w)
        pool.emplace_back(drain);
    drain();
    for (std::thread& worker : pool)
        worker.join();

    // aggregate in replication order so the result never depends on
    // worker scheduling
    std::vector<double> l1s, l2s;
    int recovered = 0;
    int bracketed = 0;
    for (const ReplicationRecord& record : report.per_rep) {
        if (record.failed) {
            ++report.failures;
            continue;
        }
        l1s.push_back(record.L1);
        l2s.push_back(record.L2);
        if (record.r_hat == spec.r)
            ++recovered;
        if (!record.t_hat_low_signal && !record.t_oracle_low_signal &&
            record.t_oracle <= record.t_hat && record.t_hat <= 3 * record.t_oracle)
            ++bracketed;
    }

    const auto mean_of = [](const std::vector<double>& xs) {
        return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) /
                                      static_cast<double>(xs.size());
    };
    const auto se_of = [](const std::vector<double>& xs, double mean) {
        if (xs.size() < 2)
            return 0.0;
        double ss = 0.0;
        for (double x : xs)
            ss += (x - mean) * (x - mean);
        const double n = static_cast<double>(xs.size());
        return std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    };

    report.mean_L1 = mean_of(l1s);
    report.mean_L2 = mean_of(l2s);
    report.se_L1 = se_of(l1s, report.mean_L1);
    report.se_L2 = se_of(l2s, report.mean_L2);

    const double md = static_cast<double>(spec.m);
    const double rd = static_cast<double>(spec.r);
    const double kd = static_cast<double>(spec.k);
    const double ld = static_cast<double>(spec.l);
    if (!l1s.empty()) {
        report.rescaled_L1 = report.mean_L1 / table2_rescale(1.0, rd, md, kd, ld);
        report.rescaled_L2 = report.mean_L2 / table2_rescale(2.0, rd, md, kd, ld);
        const double n_ok = static_cast<double>(l1s.size());
        report.rank_recovery_rate = static_cast<double>(recovered) / n_ok;
        report.budget_bracket_rate = static_cast<double>(bracketed) / n_ok;
    }
    return report;
}

namespace {

json spec_to_json(const GeneratorSpec& spec)
{
    json j;
    j["m"] = spec.m;
    j["n"] = spec.n;
    j["k"] = spec.k;
    j["l"] = spec.l;
    j["r"] = spec.r;
    j["singular_values"] = std::vector<double>(spec.singular_values.data(),
                                               spec.singular_values.data() +
                                                   spec.singular_values.size());
    j["sigma"] = spec.sigma;
    j["permute_supports"] = spec.permute_supports;
    j["seed"] = spec.seed;
    return j;
}

json record_to_json(const ReplicationRecord& record)
{
    json j;
    j["seed"] = record.seed;
    j["failed"] = record.failed;
    if (record.failed) {
        j["error"] = record.error;
        return j;
    }
    j["L1"] = record.L1;
    j["L2"] = record.L2;
    j["r_hat"] = record.r_hat;
    j["iterations"] = record.iterations;
    j["t_hat"] = record.t_hat;
    j["t_hat_low_signal"] = record.t_hat_low_signal;
    j["t_oracle"] = record.t_oracle;
    j["t_oracle_low_signal"] = record.t_oracle_low_signal;
    j["sigma_hat"] = record.sigma_hat;
    j["sin_theta_v0"] = record.sin_theta_v0;
    j["i0_size"] = record.i0_size;
    j["j0_size"] = record.j0_size;
    return j;
}

std::string format_double(double value)
{
    char buffer[64];
    const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ptr);
}

} // namespace

GeneratorSpec read_generator_spec_json(std::istream& in)
{
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& failure) {
        throw InvalidInput(std::string("generator spec is not valid JSON: ") + failure.what());
    }

    GeneratorSpec spec;
    try {
        spec.m = j.at("m").get<Index>();
        spec.n = j.at("n").get<Index>();
        spec.k = j.at("k").get<Index>();
        spec.l = j.at("l").get<Index>();
        spec.r = j.at("r").get<Index>();
        const auto values = j.at("singular_values").get<std::vector<double>>();
        spec.singular_values = Eigen::Map<const Vector>(values.data(),
                                                        static_cast<Index>(values.size()));
        spec.sigma = j.value("sigma", 1.0);
        spec.permute_supports = j.value("permute_supports", false);
        spec.seed = j.value("seed", std::uint64_t{0});
    } catch (const json::exception& failure) {
        throw InvalidInput(std::string("generator spec is missing fields: ") + failure.what());
    }
    validate(spec);
    return spec;
}

GeneratorSpec read_generator_spec_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidInput("cannot open '" + path + "' for reading");
    return read_generator_spec_json(in);
}

void write_generator_spec_json(std::ostream& out, const GeneratorSpec& spec)
{
    out << spec_to_json(spec).dump(2) << '\n';
}

void write_reports_json(std::ostream& out, const std::string& name,
                        const LabeledReports& reports)
{
    json doc;
    doc["name"] = name;
    doc["settings"] = json::array();
    for (const auto& [label, report] : reports) {
        json setting;
        setting["label"] = label;
        setting["spec"] = spec_to_json(report.spec);
        setting["replications"] = report.replications;
        setting["base_seed"] = report.base_seed;
        setting["failures"] = report.failures;

        json aggregates;
        aggregates["mean_L2"] = report.mean_L2;
        aggregates["se_L2"] = report.se_L2;
        aggregates["mean_L1"] = report.mean_L1;
        aggregates["se_L1"] = report.se_L1;
        aggregates["rescaled_L2"] = report.rescaled_L2;
        aggregates["rescaled_L1"] = report.rescaled_L1;
        aggregates["rank_recovery_rate"] = report.rank_recovery_rate;
        aggregates["budget_bracket_rate"] = report.budget_bracket_rate;
        setting["aggregates"] = aggregates;

        setting["per_rep"] = json::array();
        for (const ReplicationRecord& record : report.per_rep)
            setting["per_rep"].push_back(record_to_json(record));
        doc["settings"].push_back(std::move(setting));
    }
    out << doc.dump(2) << '\n';
}

void write_reports_csv(std::ostream& out, const LabeledReports& reports)
{
    out << "metric";
    for (const auto& [label, report] : reports)
        out << ',' << label;
    out << '\n';

    const auto row = [&](const char* metric, auto getter) {
        out << metric;
        for (const auto& [label, report] : reports)
            out << ',' << format_double(getter(report));
        out << '\n';
    };
    row("mean_L2", [](const ExperimentReport& r) { return r.mean_L2; });
    row("se_L2", [](const ExperimentReport& r) { return r.se_L2; });
    row("mean_L1", [](const ExperimentReport& r) { return r.mean_L1; });
    row("se_L1", [](const ExperimentReport& r) { return r.se_L1; });
    row("rescaled_L2", [](const ExperimentReport& r) { return r.rescaled_L2; });
    row("rescaled_L1", [](const ExperimentReport& r) { return r.rescaled_L1; });
    row("rank_recovery_rate", [](const ExperimentReport& r) { return r.rank_recovery_rate; });
    row("budget_bracket_rate", [](const ExperimentReport& r) { return r.budget_bracket_rate; });
    row("failures", [](const ExperimentReport& r) { return static_cast<double>(r.failures); });
}

GeneratorSpec bench_base_spec(BenchScale scale)
{
    GeneratorSpec spec;
    if (scale == BenchScale::Full) {
        spec.m = 2000;
        spec.n = 1000;
        spec.k = 50;
        spec.l = 50;
        spec.r = 10;
        spec.singular_values = Vector::LinSpaced(10, 200.0, 110.0);
    } else {
        spec.m = 400;
        spec.n = 200;
        spec.k = 20;
        spec.l = 20;
        spec.r = 5;
        spec.singular_values = Vector::LinSpaced(5, 80.0, 60.0);
    }
    return spec;
}

std::vector<std::pair<std::string, GeneratorSpec>> table1_settings(BenchScale scale)
{
    const GeneratorSpec base = bench_base_spec(scale);
    std::vector<std::pair<std::string, GeneratorSpec>> out;
    for (const auto& [label, a] : std::initializer_list<std::pair<const char*, double>>{
             {"a=0.5", 0.5}, {"a=1", 1.0}, {"a=5", 5.0}, {"a=10", 10.0}, {"a=20", 20.0}}) {
        GeneratorSpec spec = base;
        spec.singular_values *= a;
        out.emplace_back(label, std::move(spec));
    }
    return out;
}

std::vector<std::pair<std::string, GeneratorSpec>> table2_settings(BenchScale scale)
{
    const GeneratorSpec base = bench_base_spec(scale);
    std::vector<std::pair<Index, Index>> pairs;
    if (scale == BenchScale::Full)
        pairs = {{50, 50}, {50, 200}, {100, 200}, {100, 50}};
    else
        pairs = {{10, 10}, {10, 40}, {20, 40}, {20, 10}};

    std::vector<std::pair<std::string, GeneratorSpec>> out;
    for (const auto& [k, l] : pairs) {
        GeneratorSpec spec = base;
        spec.k = k;
        spec.l = l;
        out.emplace_back("k=" + std::to_string(k) + " l=" + std::to_string(l), std::move(spec));
    }
    return out;
}

} // namespace slrd
