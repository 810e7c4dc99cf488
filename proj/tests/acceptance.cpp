// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Optional argv: criterion numbers to run (default: all).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "latdet/complexity.hpp"
#include "latdet/harness.hpp"
#include "latdet/pipeline.hpp"

using namespace latdet;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20260811ULL;
constexpr double kTrainingSnrDb = 16.0; // designated model for criteria 6-7

int hw_threads() {
    return std::max(1u, std::thread::hardware_concurrency());
}

bool same_symbols(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
    return a.size() == b.size() && (a - b).norm() == 0.0;
}

Observation random_obs(Rng& rng, const Constellation& cst, int n, int m,
                       double sigma_w2) {
    auto H = gen_channel(rng, n, m);
    auto s = draw_symbols(rng, cst, m);
    return observe(H, s, rng, sigma_w2);
}

double binom_se(double p, double bits) {
    return std::sqrt(std::max(p * (1.0 - p), 0.0) / bits);
}

// ---------------------------------------------------------------------------
// criterion 1: oracle equivalence

bool criterion1(std::ostream& log) {
    struct Profile {
        int n, m, order;
    };
    const Profile profiles[] = {{2, 2, 4}, {3, 3, 4}, {2, 2, 16}};
    bool ok = true;
    for (const auto& p : profiles) {
        auto cst = Constellation::qam(p.order);
        double sigma_w2 = snr_to_sigma(8.0, p.m, cst.avg_power());
        Rng base(kSeed);
        int mismatches = 0;
        for (int i = 0; i < 1000; ++i) {
            Rng ex = base.derive(0xC1, static_cast<std::uint64_t>(
                                           i + 100000 * p.order + p.m));
            auto obs = random_obs(ex, cst, p.n, p.m, sigma_w2);
            auto [bs, bd] = brute_force_mld(obs, cst);
            SphereSearch ctx(obs, cst);
            double radius =
                std::max(10.0 * obs.y.norm(), ctx.guaranteed_radius());
            auto sp = ctx.decode(radius);
            auto sd = sdirs_decode(obs, cst);
            if (!sp.solution || !same_symbols(*sp.solution, bs) ||
                !same_symbols(sd.solution, bs))
                ++mismatches;
        }
        log << "    " << p.n << "x" << p.m << " " << p.order
            << "-QAM: " << mismatches << "/1000 mismatches\n";
        ok = ok && mismatches == 0;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 2: expected-complexity validation

/* test-side oracle: accumulate squared half-difference counts by walking
 * the 2k dimensions and enumerating every ordered level pair in each */
std::map<int, BigInt> psi_counts_by_enumeration(const std::vector<int>& levels,
                                                int k) {
    std::map<int, BigInt> acc;
    acc[0] = 1;
    for (int dim = 0; dim < 2 * k; ++dim) {
        std::map<int, BigInt> next;
        for (const auto& [v, count] : acc)
            for (int a : levels)
                for (int b : levels) {
                    int e = (a - b) / 2;
                    next[v + e * e] += count;
                }
        acc = std::move(next);
    }
    return acc;
}

bool criterion2(std::ostream& log) {
    bool ok = true;

    // exact difference-count tables for all orders, k <= 3
    for (int order : {4, 16, 64}) {
        PsiTable table(order);
        int M = (order == 4) ? 2 : (order == 16) ? 4 : 8;
        std::vector<int> levels(static_cast<std::size_t>(M));
        for (int i = 0; i < M; ++i) levels[std::size_t(i)] = 2 * i - (M - 1);
        bool exact = true;
        for (int k = 1; k <= 3; ++k) {
            auto counts = psi_counts_by_enumeration(levels, k);
            BigInt denom = 1;
            for (int d = 0; d < 2 * k; ++d) denom *= M;
            for (int v = 0; v <= table.support_max(k) + 3; ++v) {
                BigInt want = counts.count(v) ? counts[v] : BigInt(0);
                if (table.numerator(k, v) * denom != want * table.denom(k))
                    exact = false;
            }
        }
        log << "    psi tables " << order << "-QAM k<=3: "
            << (exact ? "exact" : "MISMATCH") << "\n";
        ok = ok && exact;
    }

    // fixed-radius expected complexity vs plain enumeration, 4-QAM 4x4
    auto cst = Constellation::qam(4);
    const int n = 4, m = 4;
    const std::int64_t trials = 100000;
    const int threads = hw_threads();
    for (double snr : {8.0, 12.0, 16.0}) {
        double sigma_w2 = snr_to_sigma(snr, m, cst.avg_power());
        double d = std::sqrt(sigma_w2 * inv_reg_lower_gamma(0.99, n));
        double analytic =
            expected_complexity_fixed_radius(m, n, sigma_w2, d, cst).value;

        std::vector<std::int64_t> sums(static_cast<std::size_t>(threads), 0);
        auto worker = [&](int tid) {
            Rng base(kSeed);
            std::int64_t acc = 0;
            for (std::int64_t t = tid; t < trials; t += threads) {
                Rng ex = base.derive(0xC2, static_cast<std::uint64_t>(t));
                auto obs = random_obs(ex, cst, n, m, sigma_w2);
                acc += sphere_decode(obs, cst, d, EnumMode::FinckePohst).flops;
            }
            sums[static_cast<std::size_t>(tid)] = acc;
        };
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();
        double empirical =
            double(std::accumulate(sums.begin(), sums.end(), std::int64_t(0))) /
            double(trials);

        double rel = std::abs(empirical - analytic) / analytic;
        log << "    " << snr << " dB: analytic " << analytic << ", empirical "
            << empirical << ", rel dev " << rel << "\n";
        ok = ok && rel <= 0.25;
    }
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 3: incomplete gamma

bool criterion3(std::ostream& log) {
    double worst_closed = 0.0, worst_rec = 0.0, worst_inv = 0.0;
    for (int i = 1; i <= 100; ++i) {
        double x = 0.3 * i;
        worst_closed = std::max(
            worst_closed, std::abs(reg_lower_gamma(x, 1) - (1.0 - std::exp(-x))));
        for (int nn = 1; nn <= 8; ++nn) {
            double rhs = reg_lower_gamma(x, nn) -
                         std::exp(nn * std::log(x) - x - std::lgamma(nn + 1.0));
            worst_rec =
                std::max(worst_rec, std::abs(reg_lower_gamma(x, nn + 1) - rhs));
        }
    }
    Rng rng(kSeed);
    for (int i = 0; i < 100; ++i) {
        double p = 0.9999 * rng.uniform();
        int nn = 1 + int(rng.uniform_int(12));
        double x = inv_reg_lower_gamma(p, nn);
        worst_inv = std::max(worst_inv, std::abs(reg_lower_gamma(x, nn) - p));
    }
    log << "    closed form dev " << worst_closed << ", recurrence dev "
        << worst_rec << ", inverse round-trip dev " << worst_inv << "\n";
    return worst_closed < 1e-10 && worst_rec < 1e-10 && worst_inv < 1e-9;
}

// ---------------------------------------------------------------------------
// criterion 4: training health

bool criterion4(std::ostream& log) {
    bool ok = true;

    // gradient vs central finite differences on small random nets
    double worst_rel = 0.0;
    int nets_checked = 0;
    for (std::uint64_t seed = 1; seed <= 40 && nets_checked < 3; ++seed) {
        auto params = init_params({6, 9, 5, 2}, Rng(seed));
        Rng rng(500 + seed);
        std::vector<TrainExample> batch;
        for (int i = 0; i < 5; ++i) {
            TrainExample ex;
            ex.x.resize(6);
            ex.r.resize(2);
            for (int j = 0; j < 6; ++j) ex.x(j) = 2.0 * rng.gaussian();
            for (int j = 0; j < 2; ++j) ex.r(j) = rng.gaussian();
            batch.push_back(std::move(ex));
        }
        NormStats norm;
        norm.mean = Eigen::VectorXd::Zero(6);
        norm.stddev = Eigen::VectorXd::Ones(6);

        // only use configurations clear of the activation kinks
        std::vector<Eigen::MatrixXd> pre;
        Eigen::MatrixXd z(6, batch.size());
        for (std::size_t j = 0; j < batch.size(); ++j)
            z.col(Eigen::Index(j)) = batch[j].x;
        forward_scaled(params, z, &pre);
        double gap = 1.0;
        for (const auto& u : pre)
            for (Eigen::Index i = 0; i < u.size(); ++i)
                gap = std::min({gap, std::abs(u(i)), std::abs(u(i) - 1.0)});
        if (gap <= 1e-3) continue;
        ++nets_checked;

        auto g = gradient(params, batch, norm, 1.0);
        const double h = 1e-5;
        for (std::size_t l = 0; l < params.W.size(); ++l)
            for (Eigen::Index i = 0; i < params.W[l].rows(); ++i)
                for (Eigen::Index jj = 0; jj < params.W[l].cols(); ++jj) {
                    double saved = params.W[l](i, jj);
                    params.W[l](i, jj) = saved + h;
                    double up = mse_minibatch_loss(params, batch, norm, 1.0);
                    params.W[l](i, jj) = saved - h;
                    double dn = mse_minibatch_loss(params, batch, norm, 1.0);
                    params.W[l](i, jj) = saved;
                    double fd = (up - dn) / (2.0 * h);
                    double rel = std::abs(fd - g.W[l](i, jj)) /
                                 std::max({1.0, std::abs(fd)});
                    worst_rel = std::max(worst_rel, rel);
                }
    }
    log << "    finite-difference check on " << nets_checked
        << " nets, worst rel dev " << worst_rel << "\n";
    ok = ok && nets_checked >= 3 && worst_rel < 1e-5;

    // held-out loss halves from initialization (default hyperparameters)
    auto cst = Constellation::qam(4);
    auto data =
        gen_training_set(2, 2, cst, 12.0, 20000, 3, Rng(kSeed).derive(0xC4, 1));
    auto eval =
        gen_training_set(2, 2, cst, 12.0, 2000, 3, Rng(kSeed).derive(0xC4, 2));
    TrainConfig tc; // eta 0.001, beta1 0.9, beta2 0.999, eps 1e-8, M = 20
    tc.epochs = 30;
    tc.init_seed = 7;
    auto init = init_params({12, 128, 3}, Rng(tc.init_seed));
    auto trained = train(data, tc);
    auto held_out = [&](const MlpParams& p) {
        return mse_minibatch_loss(p, eval.examples, data.norm,
                                  data.radius_scale);
    };
    double before = held_out(init);
    double after = held_out(trained.params);
    log << "    held-out MSE: init " << before << " -> trained " << after
        << " (ratio " << after / before << ")\n";
    ok = ok && after <= 0.5 * before;
    return ok;
}

// ---------------------------------------------------------------------------
// criteria 5-8: the 4x4 16-QAM campaign

struct CampaignResults {
    bool ran = false;
    ExperimentConfig cfg;
    std::vector<ResultRow> rows_q10; // sdirs + dlsd, with points
    std::vector<ResultRow> rows_q3;  // dlsd only
};

const ResultRow& find_row(const std::vector<ResultRow>& rows, double snr,
                          const std::string& det) {
    for (const auto& r : rows)
        if (r.snr_db == snr && r.detector == det) return r;
    throw std::logic_error("campaign row missing");
}

CampaignResults run_campaign(std::ostream& log) {
    CampaignResults c;
    c.cfg.n = 4;
    c.cfg.m = 4;
    c.cfg.constellation_order = 16;
    c.cfg.snr_grid_db = {8, 10, 12, 14, 16, 18, 20, 22, 24, 26};
    c.cfg.trials = 100000;
    c.cfg.seed = kSeed;
    c.cfg.threads = hw_threads();
    c.cfg.q = 10;
    c.cfg.detectors = {Detector::Sdirs, Detector::Dlsd};

    auto cst = Constellation::qam(16);
    std::map<double, RadiusModel> models10, models3;
    Rng base(kSeed);
    auto t0 = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < c.cfg.snr_grid_db.size(); ++i) {
        double snr = c.cfg.snr_grid_db[i];
        Rng rng = base.derive(0xDA7A, static_cast<std::uint64_t>(i));
        Dataset data = gen_training_set(4, 4, cst, snr, 20000, 10, rng);
        TrainConfig tc;
        tc.epochs = 30;
        tc.q = 10;
        tc.init_seed = mix64(kSeed ^ (2 * i));
        models10.emplace(snr, train_model(data, tc));
        tc.q = 3;
        tc.init_seed = mix64(kSeed ^ (2 * i + 1));
        models3.emplace(snr, train_model(data, tc));
    }
    log << "    trained 20 models in "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
               .count()
        << " s\n";

    t0 = std::chrono::steady_clock::now();
    c.rows_q10 = run_detection_experiment(c.cfg, true, &models10);
    ExperimentConfig cfg3 = c.cfg;
    cfg3.q = 3;
    cfg3.detectors = {Detector::Dlsd};
    c.rows_q3 = run_detection_experiment(cfg3, false, &models3);
    log << "    ran 10^5-trial experiments in "
        << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
               .count()
        << " s\n";

    log << "    snr  mld_ber      dl10_ber     dl3_ber      fb10      "
           "pts10    pts_sdirs flops10/flops_sdirs\n";
    double min_ratio = 1e300, min_ratio_snr = 0.0;
    for (double snr : c.cfg.snr_grid_db) {
        const auto& sd = find_row(c.rows_q10, snr, "sdirs");
        const auto& d10 = find_row(c.rows_q10, snr, "dlsd");
        const auto& d3 = find_row(c.rows_q3, snr, "dlsd");
        double ratio = d10.avg_flops / sd.avg_flops;
        if (ratio < min_ratio) {
            min_ratio = ratio;
            min_ratio_snr = snr;
        }
        char buf[200];
        std::snprintf(
            buf, sizeof buf,
            "    %4.0f %-12.4g %-12.4g %-12.4g %-9.4g %-8.3f %-9.3f %.3f",
            snr, sd.ber, d10.ber, d3.ber, *d10.fallback_rate,
            *d10.avg_points_in_sphere, *sd.avg_points_in_sphere, ratio);
        log << buf << "\n";
    }
    log << "    lowest dlsd/sdirs mean-flop ratio: " << min_ratio << " at "
        << min_ratio_snr << " dB\n";
    c.ran = true;
    return c;
}

bool criterion5(const CampaignResults& c, std::ostream& log) {
    const double bits = double(c.cfg.trials) * c.cfg.m * 4; // 16-QAM: 4 bits
    bool ok = true;
    int in_band = 0;
    for (double snr : c.cfg.snr_grid_db) {
        double mld = find_row(c.rows_q10, snr, "sdirs").ber;
        if (mld < 1e-3 || mld > 1e-1) continue;
        ++in_band;
        double dl = find_row(c.rows_q10, snr, "dlsd").ber;
        double slack = 2.0 * std::sqrt(std::pow(binom_se(dl, bits), 2) +
                                       std::pow(1.5 * binom_se(mld, bits), 2));
        bool pass = dl <= 1.5 * mld + slack;
        log << "    " << snr << " dB: mld " << mld << ", dlsd " << dl
            << " (ratio " << dl / mld << ") " << (pass ? "ok" : "FAIL") << "\n";
        ok = ok && pass;
    }
    log << "    " << in_band << " SNR points in the [1e-3, 1e-1] band\n";
    return ok && in_band > 0;
}

bool criterion6(const CampaignResults& c, std::ostream& log) {
    double fb = *find_row(c.rows_q10, kTrainingSnrDb, "dlsd").fallback_rate;
    log << "    fallback rate at " << kTrainingSnrDb << " dB: " << fb << "\n";
    return fb < 0.01;
}

bool criterion7(const CampaignResults& c, std::ostream& log) {
    bool ordering = true;
    for (double snr : c.cfg.snr_grid_db) {
        double dl = *find_row(c.rows_q10, snr, "dlsd").avg_points_in_sphere;
        double sd = *find_row(c.rows_q10, snr, "sdirs").avg_points_in_sphere;
        if (!(dl < sd)) {
            log << "    " << snr << " dB: dlsd " << dl << " >= sdirs " << sd
                << "\n";
            ordering = false;
        }
    }
    double at_train =
        *find_row(c.rows_q10, kTrainingSnrDb, "dlsd").avg_points_in_sphere;
    bool bound = at_train < 5.0;
    log << "    dlsd mean points in sphere at " << kTrainingSnrDb
        << " dB: " << at_train << " (< 5 bound " << (bound ? "ok" : "FAIL")
        << ")\n";
    if (!ordering)
        log << "    ordering does not transfer to this scale: the increasing\n"
               "    radius schedule p(i) = 1 - 0.99^i grows in ~1% steps, so\n"
               "    its accepting sphere holds only the first nonempty shell\n"
               "    (~1.0-1.3 points here), a floor below any learned radius\n"
               "    (~1.5 points, matching the value reported at full scale).\n"
               "    At 10x10 scale one schedule step can admit many points at\n"
               "    once, which is what makes the full-scale ordering hold.\n";
    return ordering && bound;
}

bool criterion8(const CampaignResults& c, std::ostream& log) {
    const double bits = double(c.cfg.trials) * c.cfg.m * 4;
    bool ok = true;
    for (double snr : c.cfg.snr_grid_db) {
        double b10 = find_row(c.rows_q10, snr, "dlsd").ber;
        double b3 = find_row(c.rows_q3, snr, "dlsd").ber;
        double slack = 2.0 * std::sqrt(std::pow(binom_se(b10, bits), 2) +
                                       std::pow(binom_se(b3, bits), 2));
        if (!(b10 <= b3 + slack)) {
            log << "    " << snr << " dB: q=10 ber " << b10 << " > q=3 ber "
                << b3 << " + slack " << slack << "\n";
            ok = false;
        }
    }
    if (ok) log << "    ber(q=10) <= ber(q=3) + 2se at every SNR\n";
    return ok;
}

// ---------------------------------------------------------------------------
// criterion 9: determinism

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_time_columns(const std::string& csv) {
    std::stringstream in(csv), out;
    std::string line;
    while (std::getline(in, line)) {
        std::stringstream ls(line);
        std::string cell;
        int idx = 0;
        bool first = true;
        while (std::getline(ls, cell, ',')) {
            if (idx != 5 && idx != 6) {
                if (!first) out << ',';
                out << cell;
                first = false;
            }
            ++idx;
        }
        out << '\n';
    }
    return out.str();
}

bool criterion9(std::ostream& log) {
    auto root = fs::temp_directory_path() / "latdet_acceptance_det";
    fs::remove_all(root);

    auto make_cfg = [&](const fs::path& dir) {
        ExperimentConfig cfg;
        cfg.n = 2;
        cfg.m = 2;
        cfg.constellation_order = 4;
        cfg.snr_grid_db = {8, 12};
        cfg.q = 2;
        cfg.trials = 3000;
        cfg.seed = 777;
        cfg.detectors = {Detector::Mld, Detector::Sdirs, Detector::Dlsd,
                         Detector::Mmse};
        cfg.threads = hw_threads();
        cfg.train.num_examples = 1200;
        cfg.train.epochs = 4;
        cfg.train.hidden = {32};
        cfg.complexity_samples = 150;
        cfg.model_dir = (dir / "models").string();
        cfg.data_dir = (dir / "data").string();
        cfg.out_dir = (dir / "out").string();
        return cfg;
    };

    auto run_all = [&](const fs::path& dir) {
        auto cfg = make_cfg(dir);
        cmd_gen_data(cfg);
        cmd_train(cfg);
        cmd_ber(cfg);
        cmd_complexity(cfg);
        // single-shot decode record
        Rng rng(31337);
        auto cst = Constellation::qam(4);
        auto obs = random_obs(rng, cst, 2, 2,
                              snr_to_sigma(12.0, 2, cst.avg_power()));
        std::ostringstream obs_json;
        obs_json << "{\"n\":2,\"m\":2,\"constellation_order\":4,\"sigma_w2\":"
                 << obs.sigma_w2 << ",\"H\":[";
        for (int u = 0; u < 2; ++u) {
            obs_json << (u ? ",[" : "[");
            for (int v = 0; v < 2; ++v)
                obs_json << (v ? ",[" : "[") << obs.H(u, v).real() << ","
                         << obs.H(u, v).imag() << "]";
            obs_json << "]";
        }
        obs_json << "],\"y\":[";
        for (int u = 0; u < 2; ++u)
            obs_json << (u ? ",[" : "[") << obs.y(u).real() << ","
                     << obs.y(u).imag() << "]";
        obs_json << "]}";
        std::ofstream(dir / "obs.json") << obs_json.str();
        std::ostringstream rec;
        cmd_decode(model_path(cfg, 12.0, cfg.q), (dir / "obs.json").string(),
                   rec);
        std::ofstream(dir / "out" / "decode_record.json") << rec.str();
        return cfg;
    };

    auto cfg_a = run_all(root / "a");
    auto cfg_b = run_all(root / "b");

    bool ok = true;
    auto compare = [&](const std::string& what, const std::string& a,
                       const std::string& b) {
        bool same = a == b;
        if (!same) log << "    MISMATCH: " << what << "\n";
        ok = ok && same;
    };
    for (double snr : cfg_a.snr_grid_db) {
        compare("dataset " + std::to_string(snr),
                read_text(dataset_path(cfg_a, snr)),
                read_text(dataset_path(cfg_b, snr)));
        compare("model " + std::to_string(snr),
                read_text(model_path(cfg_a, snr, cfg_a.q)),
                read_text(model_path(cfg_b, snr, cfg_b.q)));
        compare("trainlog " + std::to_string(snr),
                read_text(train_log_path(cfg_a, snr, cfg_a.q)),
                read_text(train_log_path(cfg_b, snr, cfg_b.q)));
    }
    compare("ber.csv (time columns excluded)",
            strip_time_columns(read_text(fs::path(cfg_a.out_dir) / "ber.csv")),
            strip_time_columns(read_text(fs::path(cfg_b.out_dir) / "ber.csv")));
    compare("complexity_detail.csv (time columns excluded)",
            strip_time_columns(
                read_text(fs::path(cfg_a.out_dir) / "complexity_detail.csv")),
            strip_time_columns(
                read_text(fs::path(cfg_b.out_dir) / "complexity_detail.csv")));
    compare("complexity_curves.csv",
            read_text(fs::path(cfg_a.out_dir) / "complexity_curves.csv"),
            read_text(fs::path(cfg_b.out_dir) / "complexity_curves.csv"));
    compare("decode record",
            read_text(fs::path(cfg_a.out_dir) / "decode_record.json"),
            read_text(fs::path(cfg_b.out_dir) / "decode_record.json"));
    if (ok) log << "    gen-data, train, ber, complexity, decode all repeat "
                   "byte-identically\n";
    fs::remove_all(root);
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    std::set<int> filter;
    for (int i = 1; i < argc; ++i) filter.insert(std::atoi(argv[i]));
    auto selected = [&](int id) { return filter.empty() || filter.count(id); };

    struct Entry {
        int id;
        const char* name;
    };
    const Entry entries[] = {
        {1, "oracle equivalence of sphere, sdirs and exhaustive search"},
        {2, "analytic expected-complexity validation"},
        {3, "regularized incomplete gamma correctness"},
        {4, "training health (gradient check, held-out loss)"},
        {5, "near-MLD BER for DL-SD with q=10"},
        {6, "fallback rarity at the training SNR"},
        {7, "sphere occupancy: DL-SD below SDIRS"},
        {8, "q-monotonicity of BER"},
        {9, "byte-identical reruns of every command"},
    };

    CampaignResults campaign;
    bool need_campaign = selected(5) || selected(6) || selected(7) || selected(8);

    int failures = 0;
    for (const auto& e : entries) {
        if (!selected(e.id)) continue;
        std::ostringstream log;
        bool pass = false;
        try {
            switch (e.id) {
                case 1: pass = criterion1(log); break;
                case 2: pass = criterion2(log); break;
                case 3: pass = criterion3(log); break;
                case 4: pass = criterion4(log); break;
                case 5:
                case 6:
                case 7:
                case 8:
                    if (need_campaign && !campaign.ran)
                        campaign = run_campaign(log);
                    if (e.id == 5) pass = criterion5(campaign, log);
                    if (e.id == 6) pass = criterion6(campaign, log);
                    if (e.id == 7) pass = criterion7(campaign, log);
                    if (e.id == 8) pass = criterion8(campaign, log);
                    break;
                case 9: pass = criterion9(log); break;
            }
        } catch (const std::exception& ex) {
            log << "    exception: " << ex.what() << "\n";
            pass = false;
        }
        std::cout << (pass ? "[PASS]" : "[FAIL]") << " criterion " << e.id
                  << ": " << e.name << "\n"
                  << log.str();
        std::cout.flush();
        if (!pass) ++failures;
    }
    if (failures == 0)
        std::cout << "all selected criteria passed\n";
    else
        std::cout << failures << " criteria FAILED\n";
    return failures == 0 ? 0 : 1;
}
