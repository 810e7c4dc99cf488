#pragma once

#include <Eigen/Dense>
#include <optional>

#include "latdet/constellation.hpp"
#include "latdet/rng.hpp"

namespace latdet {

/* One decoding instance: y = H s + w with noise variance sigma_w2 per
 * complex dimension. truth carries the transmitted s when known. */
struct Observation {
    Eigen::MatrixXcd H;       // n x m channel
    Eigen::VectorXcd y;       // n received symbols
    double sigma_w2 = 0.0;    // noise variance per complex dimension
    std::optional<Eigen::VectorXcd> truth;

    int n() const { return static_cast<int>(H.rows()); }
    int m() const { return static_cast<int>(H.cols()); }
};

/* Real-valued stacking of the complex model. Preserves distances:
 * ||y_r - H_r s_r||^2 == ||y - H s||^2 for s_r = [Re s; Im s]. */
struct RealEmbedding {
    Eigen::VectorXd y_r;      // 2n
    Eigen::MatrixXd H_r;      // 2n x 2m
};

/* i.i.d. CN(0,1) channel entries (real/imag parts each variance 1/2),
 * filled row major so a given seed always yields the same matrix. */
Eigen::MatrixXcd gen_channel(Rng& rng, int n, int m);

/* Noise variance from the average SNR definition
 * snr_db = 10 log10(m sigma_s^2 / sigma_w^2). */
double snr_to_sigma(double snr_db, int m, double avg_power);

/* Inverse of snr_to_sigma. */
double sigma_to_snr(double sigma_w2, int m, double avg_power);

/* y = H s + w with w ~ CN(0, sigma_w2 I); truth is set to s. */
Observation observe(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& s,
                    Rng& rng, double sigma_w2);

RealEmbedding real_embedding(const Observation& obs);

/* Network input layout: [Re y (n), Im y (n), Re h11, Im h11, ...,
 * Re hnm, Im hnm], H flattened row major. Length 2n(m+1). */
Eigen::VectorXd stack_input(const Observation& obs);

/* Uniformly drawn constellation vector of length m. */
Eigen::VectorXcd draw_symbols(Rng& rng, const Constellation& cst, int m);

} // namespace latdet
