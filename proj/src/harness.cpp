#include "latdet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "latdet/complexity.hpp"
#include "latdet/error.hpp"
#include "latdet/pipeline.hpp"

namespace latdet {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

// substream tags for the experiment phases
constexpr std::uint64_t kTagTrial = 0x747269616cULL;
constexpr std::uint64_t kTagGenData = 0x67656e64617461ULL;
constexpr std::uint64_t kTagTrainInit = 0x696e6974ULL;
constexpr std::uint64_t kTagAnalytic = 0x616e61ULL;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_tag(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

std::string detector_name(Detector d) {
    switch (d) {
        case Detector::Mld: return "mld";
        case Detector::Sdirs: return "sdirs";
        case Detector::Dlsd: return "dlsd";
        case Detector::Mmse: return "mmse";
    }
    return "?";
}

Detector detector_from_name(const std::string& name) {
    if (name == "mld") return Detector::Mld;
    if (name == "sdirs") return Detector::Sdirs;
    if (name == "dlsd") return Detector::Dlsd;
    if (name == "mmse") return Detector::Mmse;
    throw ConfigError("unknown detector '" + name + "'");
}

// ---------------------------------------------------------------------------
// config file

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    auto e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double x;
    try {
        x = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad number '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': bad number '" + v + "'");
    return x;
}

std::int64_t parse_int(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    std::int64_t x;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
    }
    if (pos != v.size())
        throw ConfigError("config key '" + key + "': bad integer '" + v + "'");
    return x;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
    std::vector<double> out;
    for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& v) {
    std::vector<int> out;
    for (const auto& s : split_list(v))
        out.push_back(static_cast<int>(parse_int(key, s)));
    if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
    return out;
}

} // namespace

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path);
    ExperimentConfig cfg;
    bool saw_version = false;
    std::vector<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) +
                              ": expected 'key = value'");
        std::string key = trim(t.substr(0, eq));
        std::string val = trim(t.substr(eq + 1));
        if (std::find(seen.begin(), seen.end(), key) != seen.end())
            throw ConfigError(path + ": duplicate config key '" + key + "'");
        seen.push_back(key);

        if (key == "config_version") {
            cfg.version = static_cast<int>(parse_int(key, val));
            saw_version = true;
        } else if (key == "n") {
            cfg.n = static_cast<int>(parse_int(key, val));
        } else if (key == "m") {
            cfg.m = static_cast<int>(parse_int(key, val));
        } else if (key == "constellation_order") {
            cfg.constellation_order = static_cast<int>(parse_int(key, val));
        } else if (key == "snr_grid_db") {
            cfg.snr_grid_db = parse_double_list(key, val);
        } else if (key == "q") {
            cfg.q = static_cast<int>(parse_int(key, val));
        } else if (key == "trials") {
            cfg.trials = parse_int(key, val);
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(parse_int(key, val));
        } else if (key == "detectors") {
            cfg.detectors.clear();
            for (const auto& name : split_list(val))
                cfg.detectors.push_back(detector_from_name(name));
        } else if (key == "threads") {
            cfg.threads = static_cast<int>(parse_int(key, val));
        } else if (key == "sdirs_max_rounds") {
            cfg.sdirs_max_rounds = static_cast<int>(parse_int(key, val));
        } else if (key == "mc_budget") {
            cfg.mc_budget = parse_int(key, val);
        } else if (key == "complexity_samples") {
            cfg.complexity_samples = static_cast<int>(parse_int(key, val));
        } else if (key == "train_n") {
            cfg.train.num_examples = static_cast<int>(parse_int(key, val));
        } else if (key == "train_batch") {
            cfg.train.batch = static_cast<int>(parse_int(key, val));
        } else if (key == "train_epochs") {
            cfg.train.epochs = static_cast<int>(parse_int(key, val));
        } else if (key == "train_eta") {
            cfg.train.eta = parse_double(key, val);
        } else if (key == "train_beta1") {
            cfg.train.beta1 = parse_double(key, val);
        } else if (key == "train_beta2") {
            cfg.train.beta2 = parse_double(key, val);
        } else if (key == "train_eps") {
            cfg.train.eps = parse_double(key, val);
        } else if (key == "hidden_dims") {
            cfg.train.hidden = parse_int_list(key, val);
        } else if (key == "model_dir") {
            cfg.model_dir = val;
        } else if (key == "data_dir") {
            cfg.data_dir = val;
        } else if (key == "out_dir") {
            cfg.out_dir = val;
        } else {
            throw ConfigError(path + ": unknown config key '" + key + "'");
        }
    }
    if (!saw_version) throw ConfigError(path + ": missing config_version");
    if (cfg.version != 1)
        throw ConfigError(path + ": unsupported config_version " +
                          std::to_string(cfg.version));
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    if (cfg.m < 1 || cfg.n < cfg.m)
        throw ConfigError("config requires n >= m >= 1");
    if (cfg.constellation_order != 4 && cfg.constellation_order != 16 &&
        cfg.constellation_order != 64)
        throw ConfigError("constellation_order must be 4, 16 or 64");
    if (cfg.snr_grid_db.empty()) throw ConfigError("snr_grid_db is empty");
    if (cfg.q < 1) throw ConfigError("q must be >= 1");
    if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
    if (cfg.detectors.empty()) throw ConfigError("detector set is empty");
    if (cfg.train.batch < 1 || cfg.train.num_examples < 1 ||
        cfg.train.epochs < 0)
        throw ConfigError("bad training settings");
    if (cfg.train.num_examples < cfg.train.batch)
        throw ConfigError("train_n is smaller than one mini-batch");
    if (cfg.sdirs_max_rounds < 1) throw ConfigError("sdirs_max_rounds >= 1");
    if (cfg.complexity_samples < 1) throw ConfigError("complexity_samples >= 1");
    for (Detector d : cfg.detectors)
        if (d == Detector::Mld) {
            std::int64_t total = 1;
            for (int j = 0; j < cfg.m; ++j) {
                total *= cfg.constellation_order;
                if (total > cfg.mc_budget)
                    throw BudgetError(
                        "mld detector: order^m exceeds the exhaustive-search "
                        "budget");
            }
        }
}

std::string dataset_path(const ExperimentConfig& cfg, double snr_db) {
    std::ostringstream ss;
    ss << cfg.data_dir << "/dataset_" << cfg.constellation_order << "qam_"
       << cfg.n << "x" << cfg.m << "_snr" << fmt_tag(snr_db) << "db_q" << cfg.q
       << ".json";
    return ss.str();
}

std::string model_path(const ExperimentConfig& cfg, double snr_db, int q) {
    std::ostringstream ss;
    ss << cfg.model_dir << "/model_" << cfg.constellation_order << "qam_"
       << cfg.n << "x" << cfg.m << "_snr" << fmt_tag(snr_db) << "db_q" << q
       << ".json";
    return ss.str();
}

std::string train_log_path(const ExperimentConfig& cfg, double snr_db, int q) {
    std::ostringstream ss;
    ss << cfg.model_dir << "/trainlog_" << cfg.constellation_order << "qam_"
       << cfg.n << "x" << cfg.m << "_snr" << fmt_tag(snr_db) << "db_q" << q
       << ".csv";
    return ss.str();
}

// ---------------------------------------------------------------------------
// CSV emission

std::string result_csv(const std::vector<ResultRow>& rows) {
    std::ostringstream ss;
    ss << "snr_db,detector,ber,avg_flops,max_flops,avg_time,max_time,"
          "avg_points_in_sphere,fallback_rate,e_c\n";
    for (const auto& r : rows) {
        ss << fmt17(r.snr_db) << ',' << r.detector << ',' << fmt17(r.ber) << ','
           << fmt17(r.avg_flops) << ',' << fmt17(r.max_flops) << ','
           << fmt17(r.avg_time) << ',' << fmt17(r.max_time) << ',';
        if (r.avg_points_in_sphere) ss << fmt17(*r.avg_points_in_sphere);
        ss << ',';
        if (r.fallback_rate) ss << fmt17(*r.fallback_rate);
        ss << ',' << fmt17(r.e_c) << '\n';
    }
    return ss.str();
}

std::string complexity_curve_csv(const std::vector<ComplexityCurveRow>& rows) {
    std::ostringstream ss;
    ss << "snr_db,analytic_C,empirical_flops,e_c_analytic,e_c_empirical\n";
    for (const auto& r : rows)
        ss << fmt17(r.snr_db) << ',' << fmt17(r.analytic_c) << ','
           << fmt17(r.empirical_flops) << ',' << fmt17(r.e_c_analytic) << ','
           << fmt17(r.e_c_empirical) << '\n';
    return ss.str();
}

namespace {

void write_file(const std::string& path, const std::string& text) {
    fs::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(p.parent_path(), ec);
        if (ec) throw IoError("cannot create directory " + p.parent_path().string());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path);
    out << text;
    if (!out) throw IoError("write failed for " + path);
}

} // namespace

// ---------------------------------------------------------------------------
// Monte Carlo experiments

namespace {

struct DetAccum {
    std::int64_t trials = 0;
    std::int64_t err_bits = 0;
    std::int64_t total_bits = 0;
    std::int64_t flops_sum = 0;
    std::int64_t max_flops = 0;
    double time_sum = 0.0;
    double time_max = 0.0;
    std::int64_t fallbacks = 0;
    std::int64_t points_sum = 0;

    void merge(const DetAccum& o) {
        trials += o.trials;
        err_bits += o.err_bits;
        total_bits += o.total_bits;
        flops_sum += o.flops_sum;
        max_flops = std::max(max_flops, o.max_flops);
        time_sum += o.time_sum;
        time_max = std::max(time_max, o.time_max);
        fallbacks += o.fallbacks;
        points_sum += o.points_sum;
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

/* direct-evaluation cost of one exhaustive candidate, reporting unit for
 * the mld rows */
std::int64_t mld_candidate_flops(int n, int m) { return 8LL * n * m + 4LL * n; }

} // namespace

std::vector<ResultRow> run_detection_experiment(
    const ExperimentConfig& cfg, bool with_points,
    const std::map<double, RadiusModel>* models) {
    validate_config(cfg);
    const Constellation cst = Constellation::qam(cfg.constellation_order);
    const Rng base(cfg.seed);
    const int threads = cfg.threads > 0
                            ? cfg.threads
                            : std::max(1u, std::thread::hardware_concurrency());

    const bool wants_dlsd =
        std::find(cfg.detectors.begin(), cfg.detectors.end(), Detector::Dlsd) !=
        cfg.detectors.end();

    std::map<double, RadiusModel> loaded;
    if (wants_dlsd && !models) {
        for (double snr : cfg.snr_grid_db)
            loaded.emplace(snr, load_model(model_path(cfg, snr, cfg.q)));
        models = &loaded;
    }
    if (wants_dlsd)
        for (double snr : cfg.snr_grid_db) {
            auto it = models->find(snr);
            if (it == models->end())
                throw ConfigError("no model available for snr " + fmt_tag(snr));
            const RadiusModel& mod = it->second;
            if (mod.n != cfg.n || mod.m != cfg.m ||
                mod.constellation_order != cfg.constellation_order ||
                mod.q != cfg.q)
                throw ConfigError("model at snr " + fmt_tag(snr) +
                                  " does not match the configured system");
        }

    std::vector<ResultRow> rows;
    for (double snr : cfg.snr_grid_db) {
        const double sigma_w2 = snr_to_sigma(snr, cfg.m, cst.avg_power());
        const RadiusModel* model = wants_dlsd ? &models->at(snr) : nullptr;
        const std::int64_t net_flops =
            model ? f_dn(model->params.layer_dims) : 0;
        const std::int64_t fb_flops = f_sb(cfg.m, cfg.n);
        const std::int64_t mld_flops =
            [&] {
                std::int64_t total = 1;
                for (int j = 0; j < cfg.m; ++j) total *= cst.order();
                return total * mld_candidate_flops(cfg.n, cfg.m);
            }();

        std::vector<std::vector<DetAccum>> per_thread(
            static_cast<std::size_t>(threads),
            std::vector<DetAccum>(cfg.detectors.size()));
        std::exception_ptr worker_error;
        std::mutex worker_error_mutex;

        auto worker = [&](int tid) {
            auto& accs = per_thread[static_cast<std::size_t>(tid)];
            for (std::int64_t t = tid; t < cfg.trials; t += threads) {
                Rng ex = base.derive(kTagTrial, static_cast<std::uint64_t>(t));
                Eigen::MatrixXcd H = gen_channel(ex, cfg.n, cfg.m);
                Eigen::VectorXcd s = draw_symbols(ex, cst, cfg.m);
                Observation obs = observe(H, s, ex, sigma_w2);

                for (std::size_t di = 0; di < cfg.detectors.size(); ++di) {
                    DetAccum& acc = accs[di];
                    Eigen::VectorXcd sol;
                    std::int64_t flops = 0;
                    std::int64_t points = 0;
                    auto t0 = std::chrono::steady_clock::now();
                    switch (cfg.detectors[di]) {
                        case Detector::Mld: {
                            sol = brute_force_mld(obs, cst, cfg.mc_budget).first;
                            flops = mld_flops;
                            break;
                        }
                        case Detector::Mmse: {
                            double snr_lin =
                                cfg.m * cst.avg_power() / sigma_w2;
                            sol = mmse_detect(obs, cst, snr_lin);
                            flops = fb_flops;
                            break;
                        }
                        case Detector::Sdirs: {
                            SdirsResult r =
                                sdirs_decode(obs, cst, cfg.sdirs_max_rounds);
                            sol = r.solution;
                            flops = r.flops + (r.used_babai_round ? fb_flops : 0);
                            if (with_points)
                                points = count_points_in_sphere(
                                    obs, cst, r.accept_radius);
                            break;
                        }
                        case Detector::Dlsd: {
                            PipelineResult r =
                                dl_sphere_decode(obs, cst, *model, cfg.q);
                            sol = r.solution;
                            flops = r.sphere_flops + net_flops +
                                    (r.path == DecodePath::Fallback ? fb_flops
                                                                    : 0);
                            if (r.path == DecodePath::Fallback) ++acc.fallbacks;
                            if (with_points && r.path == DecodePath::Sphere)
                                points = count_points_in_sphere(
                                    obs, cst, r.accept_radius);
                            break;
                        }
                    }
                    double dt = seconds_since(t0);
                    acc.trials += 1;
                    acc.flops_sum += flops;
                    acc.max_flops = std::max(acc.max_flops, flops);
                    acc.time_sum += dt;
                    acc.time_max = std::max(acc.time_max, dt);
                    acc.points_sum += points;
                    for (int j = 0; j < cfg.m; ++j)
                        acc.err_bits += cst.bit_errors(sol(j), s(j));
                    acc.total_bits +=
                        std::int64_t(cfg.m) * cst.bits_per_symbol();
                }
            }
        };

        auto guarded = [&](int tid) {
            try {
                worker(tid);
            } catch (...) {
                std::lock_guard<std::mutex> lock(worker_error_mutex);
                if (!worker_error) worker_error = std::current_exception();
            }
        };
        if (threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < threads; ++t) pool.emplace_back(guarded, t);
            for (auto& th : pool) th.join();
            if (worker_error) std::rethrow_exception(worker_error);
        }

        for (std::size_t di = 0; di < cfg.detectors.size(); ++di) {
            DetAccum total;
            for (int t = 0; t < threads; ++t)
                total.merge(per_thread[static_cast<std::size_t>(t)][di]);
            ResultRow row;
            row.snr_db = snr;
            row.detector = detector_name(cfg.detectors[di]);
            row.ber = double(total.err_bits) / double(total.total_bits);
            row.avg_flops = double(total.flops_sum) / double(total.trials);
            row.max_flops = double(total.max_flops);
            row.avg_time = total.time_sum / double(total.trials);
            row.max_time = total.time_max;
            if (with_points &&
                (cfg.detectors[di] == Detector::Sdirs ||
                 cfg.detectors[di] == Detector::Dlsd))
                row.avg_points_in_sphere =
                    double(total.points_sum) / double(total.trials);
            if (cfg.detectors[di] == Detector::Dlsd)
                row.fallback_rate =
                    double(total.fallbacks) / double(total.trials);
            row.e_c = (cfg.m >= 2 && row.avg_flops > 0.0)
                          ? complexity_exponent(row.avg_flops, cfg.m)
                          : std::nan("");
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<std::vector<double>> sample_predicted_radii(
    const ExperimentConfig& cfg, const RadiusModel& model, double snr_db,
    int num_samples) {
    const Constellation cst = Constellation::qam(cfg.constellation_order);
    const double sigma_w2 = snr_to_sigma(snr_db, cfg.m, cst.avg_power());
    const Rng base(cfg.seed);
    std::vector<std::vector<double>> out;
    out.reserve(static_cast<std::size_t>(num_samples));
    for (int u = 0; u < num_samples; ++u) {
        Rng ex = base.derive(kTagAnalytic, static_cast<std::uint64_t>(u));
        Eigen::MatrixXcd H = gen_channel(ex, cfg.n, cfg.m);
        Eigen::VectorXcd s = draw_symbols(ex, cst, cfg.m);
        Observation obs = observe(H, s, ex, sigma_w2);
        out.push_back(dl_radii(obs, cst, model).radii);
    }
    return out;
}

std::vector<ComplexityCurveRow> analytic_complexity_curve(
    const ExperimentConfig& cfg, const std::vector<ResultRow>& empirical,
    const std::map<double, RadiusModel>* models) {
    const Constellation cst = Constellation::qam(cfg.constellation_order);
    std::map<double, RadiusModel> loaded;
    if (!models) {
        for (double snr : cfg.snr_grid_db)
            loaded.emplace(snr, load_model(model_path(cfg, snr, cfg.q)));
        models = &loaded;
    }
    std::vector<ComplexityCurveRow> rows;
    for (double snr : cfg.snr_grid_db) {
        const RadiusModel& model = models->at(snr);
        const double sigma_w2 = snr_to_sigma(snr, cfg.m, cst.avg_power());
        auto samples =
            sample_predicted_radii(cfg, model, snr, cfg.complexity_samples);
        ComplexityCurveRow row;
        row.snr_db = snr;
        row.analytic_c = expected_complexity_dl(samples, cfg.m, cfg.n, sigma_w2,
                                                cst, model.params.layer_dims);
        for (const auto& r : empirical)
            if (r.snr_db == snr && r.detector == "dlsd")
                row.empirical_flops = r.avg_flops;
        row.e_c_analytic = complexity_exponent(row.analytic_c, cfg.m);
        row.e_c_empirical = row.empirical_flops > 0.0
                                ? complexity_exponent(row.empirical_flops, cfg.m)
                                : std::nan("");
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// commands

void cmd_gen_data(const ExperimentConfig& cfg) {
    validate_config(cfg);
    const Constellation cst = Constellation::qam(cfg.constellation_order);
    const Rng base(cfg.seed);
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        double snr = cfg.snr_grid_db[i];
        Rng rng = base.derive(kTagGenData, static_cast<std::uint64_t>(i));
        Dataset data = gen_training_set(cfg.n, cfg.m, cst, snr,
                                        cfg.train.num_examples, cfg.q, rng);
        std::string path = dataset_path(cfg, snr);
        fs::path p(path);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        save_dataset(data, path);
        std::clog << "wrote " << path << " (" << data.examples.size()
                  << " examples)\n";
    }
}

void cmd_train(const ExperimentConfig& cfg) {
    validate_config(cfg);
    for (std::size_t i = 0; i < cfg.snr_grid_db.size(); ++i) {
        double snr = cfg.snr_grid_db[i];
        Dataset data = load_dataset(dataset_path(cfg, snr));
        if (data.n != cfg.n || data.m != cfg.m ||
            data.constellation_order != cfg.constellation_order)
            throw ConfigError("dataset at snr " + fmt_tag(snr) +
                              " does not match the configured system");
        TrainConfig tc;
        tc.eta = cfg.train.eta;
        tc.beta1 = cfg.train.beta1;
        tc.beta2 = cfg.train.beta2;
        tc.eps = cfg.train.eps;
        tc.batch = cfg.train.batch;
        tc.epochs = cfg.train.epochs;
        tc.q = cfg.q;
        tc.hidden = cfg.train.hidden;
        tc.init_seed = mix64(cfg.seed ^ mix64(kTagTrainInit + i));
        std::vector<double> losses;
        RadiusModel model = train_model(data, tc, &losses);
        std::string mpath = model_path(cfg, snr, cfg.q);
        fs::path p(mpath);
        if (p.has_parent_path()) fs::create_directories(p.parent_path());
        save_model(model, mpath);
        std::ostringstream log;
        log << "batch,loss\n";
        for (std::size_t b = 0; b < losses.size(); ++b)
            log << b << ',' << fmt17(losses[b]) << '\n';
        write_file(train_log_path(cfg, snr, cfg.q), log.str());
        std::clog << "wrote " << mpath << " (final batch loss "
                  << (losses.empty() ? 0.0 : losses.back()) << ")\n";
    }
}

void cmd_ber(const ExperimentConfig& cfg) {
    auto rows = run_detection_experiment(cfg, false);
    write_file(cfg.out_dir + "/ber.csv", result_csv(rows));
    std::clog << "wrote " << cfg.out_dir << "/ber.csv (" << rows.size()
              << " rows)\n";
}

void cmd_complexity(const ExperimentConfig& cfg) {
    ExperimentConfig run = cfg;
    run.detectors = {Detector::Sdirs, Detector::Dlsd};
    auto rows = run_detection_experiment(run, true);
    write_file(cfg.out_dir + "/complexity_detail.csv", result_csv(rows));
    auto curves = analytic_complexity_curve(run, rows);
    write_file(cfg.out_dir + "/complexity_curves.csv",
               complexity_curve_csv(curves));
    std::clog << "wrote " << cfg.out_dir << "/complexity_detail.csv and "
              << cfg.out_dir << "/complexity_curves.csv\n";
}

// ---------------------------------------------------------------------------
// single-shot decode

namespace {

std::complex<double> complex_from_json(const json& j, const char* field) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ConfigError(std::string("observation file: field '") + field +
                          "' must hold [re, im] pairs");
    return {j[0].get<double>(), j[1].get<double>()};
}

} // namespace

void cmd_decode(const std::string& model_file, const std::string& obs_file,
                std::ostream& out) {
    RadiusModel model = load_model(model_file);

    std::ifstream in(obs_file);
    if (!in) throw IoError("cannot open observation file " + obs_file);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError("observation file " + obs_file + ": " + e.what());
    }

    auto require = [&](const char* field) -> const json& {
        if (!j.contains(field))
            throw ConfigError("observation file: missing field '" +
                              std::string(field) + "'");
        return j.at(field);
    };

    Observation obs;
    int n, m, order;
    try {
        n = require("n").get<int>();
        m = require("m").get<int>();
        order = require("constellation_order").get<int>();
        obs.sigma_w2 = require("sigma_w2").get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("observation file: ") + e.what());
    }
    const json& hj = require("H");
    const json& yj = require("y");
    if (!hj.is_array() || static_cast<int>(hj.size()) != n)
        throw ConfigError("observation file: field 'H' must have n rows");
    if (!yj.is_array() || static_cast<int>(yj.size()) != n)
        throw ConfigError("observation file: field 'y' must have n entries");
    obs.H.resize(n, m);
    for (int u = 0; u < n; ++u) {
        if (!hj[static_cast<std::size_t>(u)].is_array() ||
            static_cast<int>(hj[static_cast<std::size_t>(u)].size()) != m)
            throw ConfigError("observation file: field 'H' must have m columns");
        for (int v = 0; v < m; ++v)
            obs.H(u, v) =
                complex_from_json(hj[static_cast<std::size_t>(u)]
                                    [static_cast<std::size_t>(v)], "H");
    }
    obs.y.resize(n);
    for (int u = 0; u < n; ++u)
        obs.y(u) = complex_from_json(yj[static_cast<std::size_t>(u)], "y");
    if (j.contains("truth")) {
        const json& tj = j.at("truth");
        if (!tj.is_array() || static_cast<int>(tj.size()) != m)
            throw ConfigError("observation file: field 'truth' must have m entries");
        Eigen::VectorXcd t(m);
        for (int v = 0; v < m; ++v)
            t(v) = complex_from_json(tj[static_cast<std::size_t>(v)], "truth");
        obs.truth = std::move(t);
    }

    const Constellation cst = Constellation::qam(order);
    PipelineResult res = dl_sphere_decode(obs, cst, model, model.q);

    json rec;
    json sol = json::array();
    for (int v = 0; v < m; ++v)
        sol.push_back({res.solution(v).real(), res.solution(v).imag()});
    rec["solution"] = std::move(sol);
    rec["path"] = (res.path == DecodePath::Sphere) ? "sphere" : "fallback";
    rec["round"] = res.round;
    rec["radii"] = res.radii_used.radii;
    rec["visited"] = res.visited;
    rec["flops"] = res.sphere_flops;
    out << rec.dump() << '\n';
}

// ---------------------------------------------------------------------------
// CLI

namespace {

struct CliOverrides {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::string> snr;
    std::optional<int> q;
    std::optional<std::int64_t> trials;
    std::optional<int> threads;
};

void add_common(CLI::App* sub, CliOverrides& ov, bool config_required = true) {
    auto* opt = sub->add_option("--config", ov.config_path, "config file path");
    if (config_required) opt->required();
    sub->add_option("--seed", ov.seed, "override config seed");
    sub->add_option("--out", ov.out, "override the command's output directory");
    sub->add_option("--snr", ov.snr, "override snr grid, comma separated dB");
    sub->add_option("--q", ov.q, "override radius count q");
    sub->add_option("--trials", ov.trials, "override Monte Carlo trials");
    sub->add_option("--threads", ov.threads, "worker threads (0 = auto)");
}

ExperimentConfig load_with_overrides(const CliOverrides& ov,
                                     const std::string& out_target) {
    ExperimentConfig cfg = parse_config_file(ov.config_path);
    if (ov.seed) cfg.seed = *ov.seed;
    if (ov.snr) cfg.snr_grid_db = parse_double_list("--snr", *ov.snr);
    if (ov.q) cfg.q = *ov.q;
    if (ov.trials) cfg.trials = *ov.trials;
    if (ov.threads) cfg.threads = *ov.threads;
    if (ov.out) {
        if (out_target == "data")
            cfg.data_dir = *ov.out;
        else if (out_target == "model")
            cfg.model_dir = *ov.out;
        else
            cfg.out_dir = *ov.out;
    }
    validate_config(cfg);
    return cfg;
}

} // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"learned-radius sphere decoding toolkit"};
    app.require_subcommand(1);

    CliOverrides ov;
    auto* gen = app.add_subcommand("gen-data", "generate oracle-labeled training data");
    add_common(gen, ov);
    auto* train = app.add_subcommand("train", "train radius networks per SNR");
    add_common(train, ov);
    auto* ber = app.add_subcommand("ber", "Monte Carlo BER comparison");
    add_common(ber, ov);
    auto* cplx = app.add_subcommand("complexity", "empirical and analytic complexity");
    add_common(cplx, ov);

    auto* dec = app.add_subcommand("decode", "decode one observation file");
    std::string model_file, obs_file;
    dec->add_option("model", model_file, "model file")->required();
    dec->add_option("observation", obs_file, "observation file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (gen->parsed()) {
            cmd_gen_data(load_with_overrides(ov, "data"));
        } else if (train->parsed()) {
            cmd_train(load_with_overrides(ov, "model"));
        } else if (ber->parsed()) {
            cmd_ber(load_with_overrides(ov, "out"));
        } else if (cplx->parsed()) {
            cmd_complexity(load_with_overrides(ov, "out"));
        } else if (dec->parsed()) {
            cmd_decode(model_file, obs_file, std::cout);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const BudgetError& e) {
        std::cerr << "budget error: " << e.what() << '\n';
        return 3;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace latdet
