#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "latdet/mlp.hpp"

namespace latdet {

enum class Detector { Mld, Sdirs, Dlsd, Mmse };

std::string detector_name(Detector d);
Detector detector_from_name(const std::string& name);

struct TrainSettings {
    int num_examples = 20000; // N = B * M with B = 1000, M = 20
    int batch = 20;
    int epochs = 30;
    double eta = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    std::vector<int> hidden = {128};
};

/* Flat key = value config document; unknown keys are rejected. */
struct ExperimentConfig {
    int version = 1;
    int n = 4, m = 4;
    int constellation_order = 16;
    std::vector<double> snr_grid_db = {8, 10, 12, 14, 16, 18, 20, 22, 24, 26};
    int q = 10;
    std::int64_t trials = 100000;
    std::uint64_t seed = 1;
    std::vector<Detector> detectors = {Detector::Sdirs, Detector::Dlsd};
    TrainSettings train;
    std::string model_dir = "models";
    std::string data_dir = "data";
    std::string out_dir = "out";
    int threads = 0; // 0 = hardware concurrency
    int sdirs_max_rounds = 1000;
    std::int64_t mc_budget = 1 << 20;
    int complexity_samples = 1000; // importance samples for the analytic curve
};

ExperimentConfig parse_config_file(const std::string& path);

/* Throws ConfigError on inconsistent settings, BudgetError when mld is
 * requested beyond the exhaustive-search budget. */
void validate_config(const ExperimentConfig& cfg);

std::string dataset_path(const ExperimentConfig& cfg, double snr_db);
std::string model_path(const ExperimentConfig& cfg, double snr_db, int q);
std::string train_log_path(const ExperimentConfig& cfg, double snr_db, int q);

/* One output row per (snr, detector). avg_time/max_time are wall-clock
 * seconds and are the only non-deterministic columns. */
struct ResultRow {
    double snr_db = 0.0;
    std::string detector;
    double ber = 0.0;
    double avg_flops = 0.0;
    double max_flops = 0.0;
    double avg_time = 0.0;
    double max_time = 0.0;
    std::optional<double> avg_points_in_sphere; // filled by cmd_complexity
    std::optional<double> fallback_rate;        // dlsd only
    double e_c = 0.0;
};

std::string result_csv(const std::vector<ResultRow>& rows);

struct ComplexityCurveRow {
    double snr_db = 0.0;
    double analytic_c = 0.0;
    double empirical_flops = 0.0;
    double e_c_analytic = 0.0;
    double e_c_empirical = 0.0;
};

std::string complexity_curve_csv(const std::vector<ComplexityCurveRow>& rows);

/* Monte Carlo over cfg.trials with common random numbers: every detector
 * sees the identical (H, s, w) sequence derived from (seed, trial).
 * models, when given, bypasses model files (keyed by snr_db). */
std::vector<ResultRow> run_detection_experiment(
    const ExperimentConfig& cfg, bool with_points,
    const std::map<double, RadiusModel>* models = nullptr);

/* Post-processed radius vectors predicted by the model on fresh draws,
 * for the sample-mean complexity of the learned-radius pipeline. */
std::vector<std::vector<double>> sample_predicted_radii(
    const ExperimentConfig& cfg, const RadiusModel& model, double snr_db,
    int num_samples);

std::vector<ComplexityCurveRow> analytic_complexity_curve(
    const ExperimentConfig& cfg, const std::vector<ResultRow>& empirical,
    const std::map<double, RadiusModel>* models = nullptr);

void cmd_gen_data(const ExperimentConfig& cfg);
void cmd_train(const ExperimentConfig& cfg);
void cmd_ber(const ExperimentConfig& cfg);
void cmd_complexity(const ExperimentConfig& cfg);
void cmd_decode(const std::string& model_file, const std::string& obs_file,
                std::ostream& out);

/* Exit codes: 0 success, 2 config error, 3 budget/scale error, 4 I/O. */
int run_cli(int argc, const char* const* argv);

} // namespace latdet
