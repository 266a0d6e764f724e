#ifndef SLRD_EXPERIMENTS_HPP
#define SLRD_EXPERIMENTS_HPP

//
// Monte-Carlo harness: synthetic instance generation, single
// replications of the full observable pipeline, seeded multi-worker
// experiment runs, and report persistence (JSON with per-replication
// detail, CSV with the aggregate table)
//

#include "slrd/denoiser.hpp"
#include "slrd/model.hpp"
#include "slrd/types.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace slrd {

struct GeneratorSpec {
    Index m = 2000;
    Index n = 1000;
    Index k = 50;
    Index l = 50;
    Index r = 10;
    Vector singular_values;  // r positive values, non-increasing
    double sigma = 1.0;
    // signal rows sit on the first k indices (and columns on the first
    // l) unless supports are permuted to a random sorted subset
    bool permute_supports = false;
    std::uint64_t seed = 0;
};

void validate(const GeneratorSpec& spec);

// JSON round trip for generator specs ({"m":..., "singular_values":[...], ...})
GeneratorSpec read_generator_spec_json(std::istream& in);
GeneratorSpec read_generator_spec_json_file(const std::string& path);
void write_generator_spec_json(std::ostream& out, const GeneratorSpec& spec);

struct Instance {
    SignalFactors factors;
    Matrix observed;
};

// draws the signal factors and the noisy observation; the left factor
// orthonormalizes a k x r block whose i-th row is i.i.d. N(0, i^4),
// i = 1..k, the right factor likewise with (l, n); all randomness comes
// from child streams of spec.seed
Instance generate_instance(const GeneratorSpec& spec);

struct ReplicationOptions {
    // defaults follow the simulation protocol: estimated sigma,
    // data-selected rank, hard thresholding, beta = 3, stop on tolerance
    double alpha = 4.0;
    double beta = 3.0;
    ThresholdSpec threshold;
    double eps = 1e-10;
    int max_iterations = 1000;
};

struct ReplicationRecord {
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    double L1 = 0.0;  // squared Schatten-1 loss against the truth
    double L2 = 0.0;  // squared Frobenius loss against the truth
    Index r_hat = 0;
    int iterations = 0;
    int t_hat = 0;            // data-driven sweep budget
    bool t_hat_low_signal = false;
    int t_oracle = 0;         // budget from the true spectrum and supports
    bool t_oracle_low_signal = false;
    double sigma_hat = 0.0;
    double sin_theta_v0 = 0.0;  // largest principal angle sine between V0 and the truth
    Index i0_size = 0;
    Index j0_size = 0;
};

// exact squared Schatten-1/2 losses of a factored estimate
// U core V^T against the truth, via a QR-compressed difference; returns
// {L1, L2}
std::pair<double, double> evaluate_losses(const SignalFactors& truth, const Matrix& U,
                                          const Matrix& core, const Matrix& V);

// one seeded replication: generate, run the pipeline on the observation
// alone, score against the truth; failures are recorded, not thrown
ReplicationRecord run_replication(const GeneratorSpec& spec, const ReplicationOptions& options,
                                  std::uint64_t seed);

struct ExperimentConfig {
    int replications = 100;
    std::uint64_t base_seed = 0;
    int workers = 0;  // 0 picks the hardware concurrency
    ReplicationOptions options;
};

struct ExperimentReport {
    GeneratorSpec spec;
    int replications = 0;
    std::uint64_t base_seed = 0;
    std::vector<ReplicationRecord> per_rep;
    int failures = 0;
    // moments over successful replications
    double mean_L1 = 0.0;
    double mean_L2 = 0.0;
    double se_L1 = 0.0;
    double se_L2 = 0.0;
    // means divided by table2_rescale at q = 1 and q = 2
    double rescaled_L1 = 0.0;
    double rescaled_L2 = 0.0;
    double rank_recovery_rate = 0.0;   // fraction with r_hat == spec.r
    double budget_bracket_rate = 0.0;  // fraction with t_oracle <= t_hat <= 3 t_oracle
};

// replication i uses the child seed of (base_seed, i); output is
// bit-identical for any worker count
ExperimentReport run_experiment(const GeneratorSpec& spec, const ExperimentConfig& config);

// labeled per-setting reports, e.g. {"a=0.5", report}
using LabeledReports = std::vector<std::pair<std::string, ExperimentReport>>;

void write_reports_json(std::ostream& out, const std::string& name,
                        const LabeledReports& reports);

// aggregate table with one column per setting and one row per metric,
// mirroring the simulation tables
void write_reports_csv(std::ostream& out, const LabeledReports& reports);

//
// benchmark presets
//

enum class BenchScale { Full, Desk };

// the common simulation base: full scale is 2000 x 1000, k = l = 50,
// r = 10, singular values 200, 190, ..., 110; desk scale is 400 x 200,
// k = l = 20, r = 5, singular values 80, 75, ..., 60
GeneratorSpec bench_base_spec(BenchScale scale);

// singular-value sweep a in {0.5, 1, 5, 10, 20} scaling the base values
std::vector<std::pair<std::string, GeneratorSpec>> table1_settings(BenchScale scale);

// sparsity sweep over four (k, l) pairs at the base singular values
std::vector<std::pair<std::string, GeneratorSpec>> table2_settings(BenchScale scale);

} // namespace slrd

#endif
