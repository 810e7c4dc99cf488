#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "latdet/constellation.hpp"
#include "latdet/mimo.hpp"
#include "latdet/rng.hpp"

namespace latdet {

/* Per-feature standardization statistics of the training inputs. */
struct NormStats {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev; // floored at 1e-12
};

/* Fully connected network weights: W[l] is n_l x n_(l-1). Hidden layers
 * use the clipped ReLU, the output layer is linear. */
struct MlpParams {
    std::vector<int> layer_dims; // [n0, ..., nL]
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
};

/* Same shapes as MlpParams; used for gradients and Adam moments. */
struct ParamTensors {
    std::vector<Eigen::MatrixXd> W;
    std::vector<Eigen::VectorXd> b;
};

ParamTensors zeros_like(const MlpParams& params);

/* Adam accumulators; delta entries stay >= 0, t advances one per step. */
struct AdamState {
    std::int64_t t = 0;
    double eta = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    ParamTensors alpha; // first-moment accumulator
    ParamTensors delta; // second-moment accumulator
};

AdamState make_adam_state(const MlpParams& params, double eta = 0.001,
                          double beta1 = 0.9, double beta2 = 0.999,
                          double eps = 1e-8);

struct TrainExample {
    Eigen::VectorXd x; // stacked observation, length 2n(m+1)
    Eigen::VectorXd r; // q ascending oracle radii (unscaled)
};

struct Dataset {
    int n = 0, m = 0, constellation_order = 0, q = 0;
    double snr_db = 0.0;
    NormStats norm;
    double radius_scale = 1.0; // max radius over the dataset
    std::vector<TrainExample> examples;
};

/* Trained model plus everything needed to run it on raw inputs. */
struct RadiusModel {
    int version = 1;
    MlpParams params;
    NormStats norm;
    double radius_scale = 1.0;
    double snr_db = 0.0;
    int q = 0, n = 0, m = 0, constellation_order = 0;
};

double clipped_relu(double u);

/* Standardizes x, runs the network, multiplies by radius_scale. Raw
 * regression output: no ordering is enforced here. */
Eigen::VectorXd forward(const RadiusModel& model, const Eigen::VectorXd& x);

/* Network pass on already-standardized columns, outputs in scaled-target
 * units. preacts, when given, receives each layer's pre-activation. */
Eigen::MatrixXd forward_scaled(const MlpParams& params,
                               const Eigen::MatrixXd& z,
                               std::vector<Eigen::MatrixXd>* preacts = nullptr);

/* Mean over the batch of ||r/scale - net(x)||^2 (scaled-target units). */
double mse_minibatch_loss(const MlpParams& params,
                          const std::vector<TrainExample>& batch,
                          const NormStats& norm, double radius_scale);

/* Exact backpropagated gradient of mse_minibatch_loss; the clipped-ReLU
 * subgradient at the kinks u in {0,1} is taken as 0. */
ParamTensors gradient(const MlpParams& params,
                      const std::vector<TrainExample>& batch,
                      const NormStats& norm, double radius_scale);

/* One Adam update with bias-corrected moment estimates. */
void adam_step(MlpParams& params, AdamState& state, const ParamTensors& grads);

/* N independent examples: draw H, s, w; label with the exact q-closest
 * distance oracle; compute per-feature standardization and the dataset
 * radius scale. */
Dataset gen_training_set(int n, int m, const Constellation& cst,
                         double snr_db, int num_examples, int q, Rng rng,
                         std::size_t oracle_budget = 1 << 22);

struct TrainConfig {
    double eta = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    int batch = 20;  // M; B = N / M batches per epoch, tail dropped
    int epochs = 30;
    int q = 0; // 0: use dataset q; otherwise train on the first q radii
    std::vector<int> hidden = {128};
    std::uint64_t init_seed = 1;
};

struct TrainResult {
    MlpParams params;
    std::vector<double> batch_loss; // one entry per processed batch
};

/* Seeded uniform init in +-sqrt(6/(n_l + n_(l-1))), zero biases. */
MlpParams init_params(const std::vector<int>& layer_dims, Rng rng);

/* Mini-batch Adam over the dataset; deterministic for a fixed config
 * (fixed batch order, no shuffling). */
TrainResult train(const Dataset& data, const TrainConfig& cfg);

/* train() plus packaging into a RadiusModel. */
RadiusModel train_model(const Dataset& data, const TrainConfig& cfg,
                        std::vector<double>* batch_loss = nullptr);

/* Versioned JSON model file; round-trips bit exactly. */
void save_model(const RadiusModel& model, const std::string& path);
RadiusModel load_model(const std::string& path);

void save_dataset(const Dataset& data, const std::string& path);
Dataset load_dataset(const std::string& path);

} // namespace latdet
