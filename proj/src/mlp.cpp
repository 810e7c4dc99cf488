#include "latdet/mlp.hpp"

#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "latdet/error.hpp"
#include "latdet/sphere.hpp"

namespace latdet {

using json = nlohmann::json;

double clipped_relu(double u) {
    if (u < 0.0) return 0.0;
    if (u < 1.0) return u;
    return 1.0;
}

ParamTensors zeros_like(const MlpParams& params) {
    ParamTensors t;
    for (const auto& w : params.W) t.W.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    for (const auto& b : params.b) t.b.push_back(Eigen::VectorXd::Zero(b.size()));
    return t;
}

AdamState make_adam_state(const MlpParams& params, double eta, double beta1,
                          double beta2, double eps) {
    AdamState st;
    st.eta = eta;
    st.beta1 = beta1;
    st.beta2 = beta2;
    st.eps = eps;
    st.alpha = zeros_like(params);
    st.delta = zeros_like(params);
    return st;
}

Eigen::MatrixXd forward_scaled(const MlpParams& params, const Eigen::MatrixXd& z,
                               std::vector<Eigen::MatrixXd>* preacts) {
    const std::size_t layers = params.W.size();
    if (z.rows() != params.layer_dims.front())
        throw DimensionError("forward: input dimension mismatch");
    Eigen::MatrixXd a = z;
    if (preacts) preacts->clear();
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd u = (params.W[l] * a).colwise() + params.b[l];
        if (preacts) preacts->push_back(u);
        if (l + 1 < layers)
            a = u.unaryExpr([](double v) { return clipped_relu(v); });
        else
            a = std::move(u); // linear output layer
    }
    return a;
}

namespace {

Eigen::VectorXd standardize(const NormStats& norm, const Eigen::VectorXd& x) {
    if (x.size() != norm.mean.size())
        throw DimensionError("standardize: feature dimension mismatch");
    return (x - norm.mean).cwiseQuotient(norm.stddev);
}

/* batch -> standardized inputs Z and scaled targets T, column major */
void batch_matrices(const std::vector<TrainExample>& batch,
                    const NormStats& norm, double radius_scale, int q,
                    Eigen::MatrixXd& z, Eigen::MatrixXd& t) {
    const auto cols = static_cast<Eigen::Index>(batch.size());
    z.resize(norm.mean.size(), cols);
    t.resize(q, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const auto& ex = batch[static_cast<std::size_t>(j)];
        z.col(j) = standardize(norm, ex.x);
        t.col(j) = ex.r.head(q) / radius_scale;
    }
}

} // namespace

Eigen::VectorXd forward(const RadiusModel& model, const Eigen::VectorXd& x) {
    Eigen::MatrixXd out =
        forward_scaled(model.params, standardize(model.norm, x));
    return out.col(0) * model.radius_scale;
}

double mse_minibatch_loss(const MlpParams& params,
                          const std::vector<TrainExample>& batch,
                          const NormStats& norm, double radius_scale) {
    if (batch.empty()) throw DimensionError("mse_minibatch_loss: empty batch");
    const int q = params.layer_dims.back();
    Eigen::MatrixXd z, t;
    batch_matrices(batch, norm, radius_scale, q, z, t);
    Eigen::MatrixXd out = forward_scaled(params, z);
    return (out - t).squaredNorm() / double(batch.size());
}

ParamTensors gradient(const MlpParams& params,
                      const std::vector<TrainExample>& batch,
                      const NormStats& norm, double radius_scale) {
    if (batch.empty()) throw DimensionError("gradient: empty batch");
    const int q = params.layer_dims.back();
    const std::size_t layers = params.W.size();
    Eigen::MatrixXd z, t;
    batch_matrices(batch, norm, radius_scale, q, z, t);

    // forward with cached activations
    std::vector<Eigen::MatrixXd> acts; // acts[l] = input of layer l
    acts.reserve(layers + 1);
    acts.push_back(z);
    std::vector<Eigen::MatrixXd> preacts;
    preacts.reserve(layers);
    for (std::size_t l = 0; l < layers; ++l) {
        Eigen::MatrixXd u = (params.W[l] * acts.back()).colwise() + params.b[l];
        preacts.push_back(u);
        if (l + 1 < layers)
            acts.push_back(u.unaryExpr([](double v) { return clipped_relu(v); }));
        else
            acts.push_back(std::move(u));
    }

    ParamTensors grads = zeros_like(params);
    // d loss / d output = (2/M) (out - t)
    Eigen::MatrixXd delta = (acts.back() - t) * (2.0 / double(batch.size()));
    for (std::size_t l = layers; l-- > 0;) {
        grads.W[l] = delta * acts[l].transpose();
        grads.b[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd back = params.W[l].transpose() * delta;
            // clipped-ReLU derivative: 1 on (0,1), 0 elsewhere and at kinks
            delta = back.cwiseProduct(preacts[l - 1].unaryExpr(
                [](double u) { return (u > 0.0 && u < 1.0) ? 1.0 : 0.0; }));
        }
    }
    return grads;
}

void adam_step(MlpParams& params, AdamState& state, const ParamTensors& grads) {
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, double(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, double(state.t));
    auto update = [&]<typename T>(T& theta, T& alpha, T& delta, const T& g) {
        alpha = state.beta1 * alpha + (1.0 - state.beta1) * g;
        delta.array() =
            state.beta2 * delta.array() + (1.0 - state.beta2) * g.array().square();
        theta.array() -= state.eta * (alpha.array() / bc1) /
                         ((delta.array() / bc2).sqrt() + state.eps);
    };
    for (std::size_t l = 0; l < params.W.size(); ++l) {
        update(params.W[l], state.alpha.W[l], state.delta.W[l], grads.W[l]);
        update(params.b[l], state.alpha.b[l], state.delta.b[l], grads.b[l]);
    }
}

Dataset gen_training_set(int n, int m, const Constellation& cst, double snr_db,
                         int num_examples, int q, Rng rng,
                         std::size_t oracle_budget) {
    if (num_examples < 1) throw DimensionError("gen_training_set: N >= 1");
    Dataset data;
    data.n = n;
    data.m = m;
    data.constellation_order = cst.order();
    data.q = q;
    data.snr_db = snr_db;
    const double sigma_w2 = snr_to_sigma(snr_db, m, cst.avg_power());

    data.examples.reserve(static_cast<std::size_t>(num_examples));
    for (int i = 0; i < num_examples; ++i) {
        Rng ex = rng.derive(static_cast<std::uint64_t>(i));
        Eigen::MatrixXcd H = gen_channel(ex, n, m);
        Eigen::VectorXcd s = draw_symbols(ex, cst, m);
        Observation obs = observe(H, s, ex, sigma_w2);
        TrainExample t;
        t.x = stack_input(obs);
        RadiusVector rv = q_closest_distances(obs, cst, q, oracle_budget);
        t.r = Eigen::Map<const Eigen::VectorXd>(rv.radii.data(), q);
        data.examples.push_back(std::move(t));
    }

    const auto dim = data.examples.front().x.size();
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
    for (const auto& ex : data.examples) mean += ex.x;
    mean /= double(num_examples);
    Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
    for (const auto& ex : data.examples)
        var += (ex.x - mean).cwiseAbs2();
    var /= double(num_examples);
    data.norm.mean = mean;
    data.norm.stddev = var.cwiseSqrt().cwiseMax(1e-12);

    double rmax = 0.0;
    for (const auto& ex : data.examples) rmax = std::max(rmax, ex.r.maxCoeff());
    data.radius_scale = (rmax > 0.0) ? rmax : 1.0;
    return data;
}

MlpParams init_params(const std::vector<int>& layer_dims, Rng rng) {
    if (layer_dims.size() < 2) throw DimensionError("init_params: need >= 2 layers");
    MlpParams p;
    p.layer_dims = layer_dims;
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const int rows = layer_dims[l + 1], cols = layer_dims[l];
        const double a = std::sqrt(6.0 / double(rows + cols));
        Eigen::MatrixXd w(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) w(i, j) = a * (2.0 * rng.uniform() - 1.0);
        p.W.push_back(std::move(w));
        p.b.push_back(Eigen::VectorXd::Zero(rows));
    }
    return p;
}

TrainResult train(const Dataset& data, const TrainConfig& cfg) {
    if (data.examples.empty()) throw DimensionError("train: empty dataset");
    const int q = (cfg.q > 0) ? cfg.q : data.q;
    if (q > data.q) throw DimensionError("train: q exceeds dataset labels");
    const int n0 = static_cast<int>(data.examples.front().x.size());

    std::vector<int> dims;
    dims.push_back(n0);
    for (int h : cfg.hidden) dims.push_back(h);
    dims.push_back(q);

    TrainResult res;
    res.params = init_params(dims, Rng(cfg.init_seed));
    AdamState state =
        make_adam_state(res.params, cfg.eta, cfg.beta1, cfg.beta2, cfg.eps);

    const int batches =
        static_cast<int>(data.examples.size()) / cfg.batch; // tail dropped
    std::vector<TrainExample> batch;
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int bi = 0; bi < batches; ++bi) {
            batch.assign(
                data.examples.begin() + static_cast<std::ptrdiff_t>(bi) * cfg.batch,
                data.examples.begin() +
                    static_cast<std::ptrdiff_t>(bi + 1) * cfg.batch);
            res.batch_loss.push_back(mse_minibatch_loss(
                res.params, batch, data.norm, data.radius_scale));
            ParamTensors grads =
                gradient(res.params, batch, data.norm, data.radius_scale);
            adam_step(res.params, state, grads);
        }
    }
    return res;
}

RadiusModel train_model(const Dataset& data, const TrainConfig& cfg,
                        std::vector<double>* batch_loss) {
    TrainResult tr = train(data, cfg);
    if (batch_loss) *batch_loss = tr.batch_loss;
    RadiusModel model;
    model.params = std::move(tr.params);
    model.norm = data.norm;
    model.radius_scale = data.radius_scale;
    model.snr_db = data.snr_db;
    model.q = model.params.layer_dims.back();
    model.n = data.n;
    model.m = data.m;
    model.constellation_order = data.constellation_order;
    return model;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
    return v;
}

json mat_to_json(const Eigen::MatrixXd& m) { // row-major flat
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
    return a;
}

Eigen::MatrixXd mat_from_json(const json& a, Eigen::Index rows,
                              Eigen::Index cols) {
    if (static_cast<Eigen::Index>(a.size()) != rows * cols)
        throw IoError("model file: weight matrix has wrong element count");
    Eigen::MatrixXd m(rows, cols);
    std::size_t p = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = a[p++].get<double>();
    return m;
}

json read_json_file(const std::string& path, const char* what) {
    std::ifstream in(path);
    if (!in) throw IoError(std::string(what) + ": cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw IoError(std::string(what) + ": " + path + ": " + e.what());
    }
    return j;
}

void write_text_file(const std::string& path, const std::string& text,
                     const char* what) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError(std::string(what) + ": cannot write " + path);
    out << text;
    if (!out) throw IoError(std::string(what) + ": write failed for " + path);
}

} // namespace

void save_model(const RadiusModel& model, const std::string& path) {
    json j;
    j["version"] = model.version;
    j["layer_dims"] = model.params.layer_dims;
    json ws = json::array(), bs = json::array();
    for (const auto& w : model.params.W) ws.push_back(mat_to_json(w));
    for (const auto& b : model.params.b) bs.push_back(vec_to_json(b));
    j["weights"] = std::move(ws);
    j["biases"] = std::move(bs);
    j["norm_stats"] = {{"mean", vec_to_json(model.norm.mean)},
                       {"std", vec_to_json(model.norm.stddev)}};
    j["radius_scale"] = model.radius_scale;
    j["snr_db"] = model.snr_db;
    j["q"] = model.q;
    j["n"] = model.n;
    j["m"] = model.m;
    j["constellation_order"] = model.constellation_order;
    write_text_file(path, j.dump(), "save_model");
}

RadiusModel load_model(const std::string& path) {
    json j = read_json_file(path, "load_model");
    RadiusModel model;
    try {
        model.version = j.at("version").get<int>();
        model.params.layer_dims = j.at("layer_dims").get<std::vector<int>>();
        const auto& dims = model.params.layer_dims;
        const auto& ws = j.at("weights");
        const auto& bs = j.at("biases");
        if (ws.size() + 1 != dims.size() || bs.size() + 1 != dims.size())
            throw IoError("load_model: layer count mismatch");
        for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
            model.params.W.push_back(
                mat_from_json(ws[l], dims[l + 1], dims[l]));
            model.params.b.push_back(vec_from_json(bs[l]));
        }
        model.norm.mean = vec_from_json(j.at("norm_stats").at("mean"));
        model.norm.stddev = vec_from_json(j.at("norm_stats").at("std"));
        model.radius_scale = j.at("radius_scale").get<double>();
        model.snr_db = j.at("snr_db").get<double>();
        model.q = j.at("q").get<int>();
        model.n = j.at("n").get<int>();
        model.m = j.at("m").get<int>();
        model.constellation_order = j.at("constellation_order").get<int>();
    } catch (const json::exception& e) {
        throw IoError("load_model: " + path + ": " + e.what());
    }
    return model;
}

void save_dataset(const Dataset& data, const std::string& path) {
    json j;
    j["version"] = 1;
    j["n"] = data.n;
    j["m"] = data.m;
    j["constellation_order"] = data.constellation_order;
    j["q"] = data.q;
    j["snr_db"] = data.snr_db;
    j["norm_stats"] = {{"mean", vec_to_json(data.norm.mean)},
                       {"std", vec_to_json(data.norm.stddev)}};
    j["radius_scale"] = data.radius_scale;
    json exs = json::array();
    for (const auto& ex : data.examples)
        exs.push_back({{"x", vec_to_json(ex.x)}, {"r", vec_to_json(ex.r)}});
    j["examples"] = std::move(exs);
    write_text_file(path, j.dump(), "save_dataset");
}

Dataset load_dataset(const std::string& path) {
    json j = read_json_file(path, "load_dataset");
    Dataset data;
    try {
        data.n = j.at("n").get<int>();
        data.m = j.at("m").get<int>();
        data.constellation_order = j.at("constellation_order").get<int>();
        data.q = j.at("q").get<int>();
        data.snr_db = j.at("snr_db").get<double>();
        data.norm.mean = vec_from_json(j.at("norm_stats").at("mean"));
        data.norm.stddev = vec_from_json(j.at("norm_stats").at("std"));
        data.radius_scale = j.at("radius_scale").get<double>();
        for (const auto& e : j.at("examples")) {
            TrainExample ex;
            ex.x = vec_from_json(e.at("x"));
            ex.r = vec_from_json(e.at("r"));
            data.examples.push_back(std::move(ex));
        }
    } catch (const json::exception& e) {
        throw IoError("load_dataset: " + path + ": " + e.what());
    }
    return data;
}

} // namespace latdet
