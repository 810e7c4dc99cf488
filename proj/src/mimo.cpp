#include "latdet/mimo.hpp"

#include <cmath>

#include "latdet/error.hpp"

namespace latdet {

Eigen::MatrixXcd gen_channel(Rng& rng, int n, int m) {
    if (m < 1 || n < m) throw DimensionError("gen_channel requires n >= m >= 1");
    Eigen::MatrixXcd H(n, m);
    const double s = std::sqrt(0.5);
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < m; ++v) {
            double re = s * rng.gaussian();
            double im = s * rng.gaussian();
            H(u, v) = {re, im};
        }
    return H;
}

double snr_to_sigma(double snr_db, int m, double avg_power) {
    if (m < 1 || avg_power <= 0.0)
        throw DimensionError("snr_to_sigma requires m >= 1 and avg_power > 0");
    return m * avg_power / std::pow(10.0, snr_db / 10.0);
}

double sigma_to_snr(double sigma_w2, int m, double avg_power) {
    if (m < 1 || avg_power <= 0.0 || sigma_w2 <= 0.0)
        throw DimensionError("sigma_to_snr requires positive arguments");
    return 10.0 * std::log10(m * avg_power / sigma_w2);
}

Observation observe(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& s,
                    Rng& rng, double sigma_w2) {
    if (s.size() != H.cols()) throw DimensionError("observe: H and s disagree");
    if (sigma_w2 < 0.0) throw DimensionError("observe: sigma_w2 must be >= 0");
    Observation obs;
    obs.H = H;
    obs.sigma_w2 = sigma_w2;
    obs.y = H * s;
    const double sw = std::sqrt(sigma_w2 / 2.0);
    for (Eigen::Index i = 0; i < obs.y.size(); ++i) {
        double re = sw * rng.gaussian();
        double im = sw * rng.gaussian();
        obs.y(i) += std::complex<double>(re, im);
    }
    obs.truth = s;
    return obs;
}

RealEmbedding real_embedding(const Observation& obs) {
    const int n = obs.n(), m = obs.m();
    if (obs.y.size() != n) throw DimensionError("real_embedding: y/H mismatch");
    RealEmbedding e;
    e.y_r.resize(2 * n);
    e.y_r.head(n) = obs.y.real();
    e.y_r.tail(n) = obs.y.imag();
    e.H_r.resize(2 * n, 2 * m);
    e.H_r.topLeftCorner(n, m) = obs.H.real();
    e.H_r.topRightCorner(n, m) = -obs.H.imag();
    e.H_r.bottomLeftCorner(n, m) = obs.H.imag();
    e.H_r.bottomRightCorner(n, m) = obs.H.real();
    return e;
}

Eigen::VectorXd stack_input(const Observation& obs) {
    const int n = obs.n(), m = obs.m();
    Eigen::VectorXd x(2 * n * (m + 1));
    x.head(n) = obs.y.real();
    x.segment(n, n) = obs.y.imag();
    Eigen::Index p = 2 * n;
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < m; ++v) {
            x(p++) = obs.H(u, v).real();
            x(p++) = obs.H(u, v).imag();
        }
    return x;
}

Eigen::VectorXcd draw_symbols(Rng& rng, const Constellation& cst, int m) {
    Eigen::VectorXcd s(m);
    for (int j = 0; j < m; ++j)
        s(j) = cst.point(static_cast<int>(rng.uniform_int(
            static_cast<std::uint32_t>(cst.order()))));
    return s;
}

} // namespace latdet
