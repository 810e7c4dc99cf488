#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <memory>
#include <vector>

#include "latdet/constellation.hpp"

namespace latdet {

using BigInt = boost::multiprecision::cpp_int;

/* Regularized lower incomplete gamma P(n, x) = int_0^x t^(n-1) e^-t dt / G(n).
 * Series for x < n+1, continued fraction otherwise; absolute error < 1e-10. */
double reg_lower_gamma(double x, double n);

/* x such that reg_lower_gamma(x, n) = p, by bracketed bisection to 1e-9. */
double inv_reg_lower_gamma(double p, double n);

/* Counts of squared-difference representations for one QAM order.
 *
 * psi(k, v) is the expected number of depth-k complex candidate
 * subvectors whose half-difference from the transmitted one has squared
 * norm v. Coefficients are exact rationals: numerator(k, v) over
 * denom(k) = {1, 2^2k, 4^2k} for 4/16/64-QAM. Sum_v psi(k, v) = M^2k.
 *
 * Built once per (order, k) from the generating polynomials by exact
 * integer arithmetic; build-once, read-many (thread safe).
 */
class PsiTable {
public:
    explicit PsiTable(int constellation_order);

    int order() const { return order_; }

    double psi(int k, int v) const;
    const BigInt& numerator(int k, int v) const; // 0 for v outside support
    BigInt denom(int k) const;

    /* row of psi(k, v) values indexed by v; the reference stays valid for
     * the table's lifetime, so hot loops can read it without locking */
    const std::vector<double>& psi_row_values(int k) const;

    /* largest v with psi(k, v) > 0: 2k * {1, 9, 49} */
    int support_max(int k) const;

private:
    struct Row {
        std::vector<BigInt> numer;
        BigInt denom;
        std::vector<double> values;
    };
    const Row& row(int k) const;

    int order_;
    mutable std::vector<std::unique_ptr<Row>> rows_; // rows_[k-1], lazy
};

/* Convenience wrapper over a process-wide memoized table. */
double psi(int constellation_order, int k, int v);

/* Elementary operations per visited node at complex depth k for an
 * M^2-QAM constellation (M = levels per real dimension). */
std::int64_t f_sp(int k, int m_levels);

/* Elementary operations of the MMSE fallback detector. */
std::int64_t f_sb(int m, int n);

/* Elementary operations of one network forward pass. */
std::int64_t f_dn(const std::vector<int>& layer_dims);

struct FixedRadiusComplexity {
    double value = 0.0;       // expected elementary operations
    double tail_bound = 0.0;  // bound on the truncated v-tail (0 if exact)
};

/* Expected complexity of one fixed-radius sphere decoding run.
 *
 * sigma_w2 and d are in simulation units (odd-integer levels). The
 * difference-count table indexes squared half-differences, so squared
 * radii and the noise variance are divided by 4 internally before
 * entering the gamma factors. v_max < 0 sums the full finite support.
 */
FixedRadiusComplexity expected_complexity_fixed_radius(
    int m, int n, double sigma_w2, double d, const Constellation& cst,
    int v_max = -1);

/* Expected complexity of sphere decoding with the increasing radius
 * schedule r[0] < r[1] < ... (simulation units). */
double expected_complexity_spi(int m, int n, double sigma_w2,
                               const std::vector<double>& radii,
                               const Constellation& cst);

/* Sample-mean expected complexity of the learned-radius pipeline:
 * per-sample SPI-style sums over the predicted radius vectors, plus the
 * fallback term weighted by the mean miss probability, plus the network
 * cost. samples holds one ascending radius vector per draw. */
double expected_complexity_dl(const std::vector<std::vector<double>>& samples,
                              int m, int n, double sigma_w2,
                              const Constellation& cst,
                              const std::vector<int>& layer_dims);

/* e_c = log C / log m */
double complexity_exponent(double c, int m);

/* Radius of the round-i sphere of the increasing-radius schedule
 * p(i) = 1 - 0.99^i: solves reg_lower_gamma(r^2 / sigma_w2, n) = p(i).
 * Cached per (n, i); floored at 1e-9. */
double spi_schedule_radius(int i, int n, double sigma_w2);

/* Noise-normalized schedule values x(i) with reg_lower_gamma(x, n) =
 * 1 - 0.99^i for i = 1..min_size; shared immutable snapshot so callers
 * can index it without further locking. */
std::shared_ptr<const std::vector<double>> spi_schedule_x(int n, int min_size);

} // namespace latdet
