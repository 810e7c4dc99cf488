#include "latdet/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "latdet/error.hpp"

namespace latdet {

// ---------------------------------------------------------------------------
// regularized lower incomplete gamma

namespace {

/* series representation, converges fast for x < n+1 */
double gamma_p_series(double x, double n) {
    double ap = n;
    double sum = 1.0 / n;
    double term = sum;
    for (int it = 0; it < 500; ++it) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + n * std::log(x) - std::lgamma(n));
}

/* modified Lentz continued fraction for Q(n, x), x >= n+1 */
double gamma_q_contfrac(double x, double n) {
    const double tiny = 1e-300;
    double b = x + 1.0 - n;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -double(i) * (double(i) - n);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + n * std::log(x) - std::lgamma(n));
}

} // namespace

double reg_lower_gamma(double x, double n) {
    if (x < 0.0) throw DimensionError("reg_lower_gamma: x must be >= 0");
    if (n <= 0.0) throw DimensionError("reg_lower_gamma: n must be > 0");
    if (x == 0.0) return 0.0;
    if (x < n + 1.0) return gamma_p_series(x, n);
    return 1.0 - gamma_q_contfrac(x, n);
}

double inv_reg_lower_gamma(double p, double n) {
    if (p < 0.0 || p >= 1.0)
        throw DimensionError("inv_reg_lower_gamma: p must lie in [0, 1)");
    if (p == 0.0) return 0.0;
    double lo = 0.0;
    double hi = n + 10.0 * std::sqrt(n) + 10.0;
    while (reg_lower_gamma(hi, n) < p) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (reg_lower_gamma(mid, n) < p)
            lo = mid;
        else
            hi = mid;
        if (hi - lo < 1e-13 * (1.0 + hi)) break;
    }
    return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Psi tables via exact generating-polynomial arithmetic

namespace {

using Poly = std::vector<BigInt>; // coefficient of lambda^i at index i

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly r(a.size() + b.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0) continue;
        for (std::size_t j = 0; j < b.size(); ++j) {
            if (b[j] == 0) continue;
            r[i + j] += a[i] * b[j];
        }
    }
    return r;
}

void poly_axpy(Poly& acc, const BigInt& s, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), BigInt(0));
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += s * p[i];
}

/* powers[j] = base^j for j = 0..max_pow */
std::vector<Poly> poly_powers(const Poly& base, int max_pow) {
    std::vector<Poly> pw(static_cast<std::size_t>(max_pow) + 1);
    pw[0] = Poly{BigInt(1)};
    for (int j = 1; j <= max_pow; ++j)
        pw[static_cast<std::size_t>(j)] =
            poly_mul(pw[static_cast<std::size_t>(j - 1)], base);
    return pw;
}

Poly monomials(std::initializer_list<std::pair<int, int>> terms) {
    int deg = 0;
    for (auto& t : terms) deg = std::max(deg, t.first);
    Poly p(static_cast<std::size_t>(deg) + 1, BigInt(0));
    for (auto& t : terms) p[static_cast<std::size_t>(t.first)] += t.second;
    return p;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) {
        r *= n - k + i;
        r /= i;
    }
    return r;
}

BigInt factorial(int n) {
    BigInt r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

/* 16-QAM per-dimension polynomials: edge symbols (levels +-3) and inner
 * symbols (levels +-1); exponents are squared half-differences. */
const Poly kEdge16 = monomials({{0, 1}, {1, 1}, {4, 1}, {9, 1}});
const Poly kInner16 = monomials({{0, 1}, {1, 2}, {4, 1}});

/* 64-QAM per-symbol-class polynomials, one per |level| in {7,5,3,1}. */
Poly poly64_class0() { // sum_{e=0}^{7} l^(e^2)
    Poly p;
    for (int e = 0; e <= 7; ++e) poly_axpy(p, 1, monomials({{e * e, 1}}));
    return p;
}
Poly poly64_class1() { // l + sum_{e=0}^{6} l^(e^2)
    Poly p = monomials({{1, 1}});
    for (int e = 0; e <= 6; ++e) poly_axpy(p, 1, monomials({{e * e, 1}}));
    return p;
}
Poly poly64_class2() { // l + l^4 + sum_{e=0}^{5} l^(e^2)
    Poly p = monomials({{1, 1}, {4, 1}});
    for (int e = 0; e <= 5; ++e) poly_axpy(p, 1, monomials({{e * e, 1}}));
    return p;
}
Poly poly64_class3() { // -1 - l^16 + sum_{e=0}^{4} 2 l^(e^2)
    Poly p = monomials({{0, -1}, {16, -1}});
    for (int e = 0; e <= 4; ++e) poly_axpy(p, 1, monomials({{e * e, 2}}));
    return p;
}

} // namespace

PsiTable::PsiTable(int constellation_order) : order_(constellation_order) {
    if (order_ != 4 && order_ != 16 && order_ != 64)
        throw DimensionError("PsiTable: unsupported constellation order");
}

const PsiTable::Row& PsiTable::row(int k) const {
    static std::mutex build_mutex;
    if (k < 1) throw DimensionError("PsiTable: k must be >= 1");
    std::lock_guard<std::mutex> lock(build_mutex);
    while (static_cast<int>(rows_.size()) < k) {
        int kk = static_cast<int>(rows_.size()) + 1;
        auto r = std::make_unique<Row>();
        if (order_ == 4) {
            // binomial row C(2k, v)
            r->denom = 1;
            r->numer.resize(static_cast<std::size_t>(2 * kk) + 1);
            for (int v = 0; v <= 2 * kk; ++v)
                r->numer[static_cast<std::size_t>(v)] = binomial(2 * kk, v);
        } else if (order_ == 16) {
            // sum_j C(2k, j) * edge^j * inner^(2k-j), all over 2^2k
            r->denom = BigInt(1) << (2 * kk);
            auto epw = poly_powers(kEdge16, 2 * kk);
            auto ipw = poly_powers(kInner16, 2 * kk);
            Poly acc;
            for (int j = 0; j <= 2 * kk; ++j)
                poly_axpy(acc, binomial(2 * kk, j),
                          poly_mul(epw[static_cast<std::size_t>(j)],
                                   ipw[static_cast<std::size_t>(2 * kk - j)]));
            r->numer = std::move(acc);
        } else {
            // multinomial sum over xi0+xi1+xi2+xi3 = 2k, all over 4^2k
            r->denom = BigInt(1) << (4 * kk);
            auto p0 = poly_powers(poly64_class0(), 2 * kk);
            auto p1 = poly_powers(poly64_class1(), 2 * kk);
            auto p2 = poly_powers(poly64_class2(), 2 * kk);
            auto p3 = poly_powers(poly64_class3(), 2 * kk);
            BigInt fact2k = factorial(2 * kk);
            Poly acc;
            for (int x0 = 0; x0 <= 2 * kk; ++x0)
                for (int x1 = 0; x1 + x0 <= 2 * kk; ++x1)
                    for (int x2 = 0; x2 + x1 + x0 <= 2 * kk; ++x2) {
                        int x3 = 2 * kk - x0 - x1 - x2;
                        BigInt coef = fact2k / (factorial(x0) * factorial(x1) *
                                                factorial(x2) * factorial(x3));
                        Poly term = poly_mul(
                            poly_mul(p0[static_cast<std::size_t>(x0)],
                                     p1[static_cast<std::size_t>(x1)]),
                            poly_mul(p2[static_cast<std::size_t>(x2)],
                                     p3[static_cast<std::size_t>(x3)]));
                        poly_axpy(acc, coef, term);
                    }
            r->numer = std::move(acc);
        }
        const double denom_d = r->denom.convert_to<double>();
        r->values.resize(r->numer.size());
        for (std::size_t v = 0; v < r->numer.size(); ++v)
            r->values[v] = r->numer[v].convert_to<double>() / denom_d;
        rows_.push_back(std::move(r));
    }
    return *rows_[static_cast<std::size_t>(k - 1)];
}

double PsiTable::psi(int k, int v) const {
    const Row& r = row(k);
    if (v < 0 || v >= static_cast<int>(r.values.size())) return 0.0;
    return r.values[static_cast<std::size_t>(v)];
}

const BigInt& PsiTable::numerator(int k, int v) const {
    static const BigInt zero(0);
    const Row& r = row(k);
    if (v < 0 || v >= static_cast<int>(r.numer.size())) return zero;
    return r.numer[static_cast<std::size_t>(v)];
}

BigInt PsiTable::denom(int k) const { return row(k).denom; }

const std::vector<double>& PsiTable::psi_row_values(int k) const {
    return row(k).values;
}

int PsiTable::support_max(int k) const {
    int per_dim = (order_ == 4) ? 1 : (order_ == 16) ? 9 : 49;
    return 2 * k * per_dim;
}

double psi(int constellation_order, int k, int v) {
    static std::mutex tables_mutex;
    static std::map<int, PsiTable> tables;
    PsiTable* table;
    {
        std::lock_guard<std::mutex> lock(tables_mutex);
        table = &tables.try_emplace(constellation_order, constellation_order)
                     .first->second;
    }
    return table->psi(k, v);
}

// ---------------------------------------------------------------------------
// flop models

std::int64_t f_sp(int k, int m_levels) {
    if (k < 1) throw DimensionError("f_sp: k must be >= 1");
    if (m_levels != 2 && m_levels != 4 && m_levels != 8)
        throw DimensionError("f_sp: levels per dimension must be 2, 4 or 8");
    return 8LL * k + 20 + 4LL * m_levels;
}

std::int64_t f_sb(int m, int n) {
    if (m < 1 || n < m) throw DimensionError("f_sb requires n >= m >= 1");
    // m^3 + 5m^2/2 + nm^2 + 3mn - m/2; (5m^2 - m) is always even
    return static_cast<std::int64_t>(m) * m * m +
           static_cast<std::int64_t>(n) * m * m +
           3LL * static_cast<std::int64_t>(m) * n +
           (5LL * m * m - m) / 2;
}

std::int64_t f_dn(const std::vector<int>& layer_dims) {
    if (layer_dims.size() < 2) throw DimensionError("f_dn: need >= 2 layers");
    std::int64_t total = 0;
    for (std::size_t i = 0; i + 1 < layer_dims.size(); ++i)
        total += 2LL * layer_dims[i + 1] * layer_dims[i];
    return total;
}

// ---------------------------------------------------------------------------
// expected complexity

namespace {

/* The difference counts index squared half-differences of the odd-integer
 * levels, i.e. the unit-spaced lattice; squared radii and the noise
 * variance convert by a factor of 4. */
constexpr double kLatticeScale2 = 4.0;

double fixed_radius_node_ops(int m, int n, double s2n, double d2n,
                             const PsiTable& table, int v_max, double* tail) {
    const int M = (table.order() == 4) ? 2 : (table.order() == 16) ? 4 : 8;
    double total = 0.0;
    for (int k = 1; k <= m; ++k) {
        const auto& values = table.psi_row_values(k);
        int support = table.support_max(k);
        int vm = (v_max < 0) ? support : std::min(v_max, support);
        double inner = 0.0;
        double mass = 0.0;
        for (int v = 0; v <= vm; ++v) {
            double p = values[static_cast<std::size_t>(v)];
            if (p == 0.0) continue;
            mass += p;
            inner += p * reg_lower_gamma(d2n / (s2n + v), n - m + k);
        }
        total += double(f_sp(k, M)) * inner;
        if (tail && vm < support) {
            double rest = std::pow(double(M), 2.0 * k) - mass;
            *tail += double(f_sp(k, M)) * rest *
                     reg_lower_gamma(d2n / (s2n + vm + 1), n - m + k);
        }
    }
    return total;
}

} // namespace

FixedRadiusComplexity expected_complexity_fixed_radius(
    int m, int n, double sigma_w2, double d, const Constellation& cst,
    int v_max) {
    if (d <= 0.0) throw DimensionError("expected complexity requires d > 0");
    PsiTable table(cst.order());
    FixedRadiusComplexity out;
    out.value = fixed_radius_node_ops(m, n, sigma_w2 / kLatticeScale2,
                                      d * d / kLatticeScale2, table, v_max,
                                      &out.tail_bound);
    return out;
}

double expected_complexity_spi(int m, int n, double sigma_w2,
                               const std::vector<double>& radii,
                               const Constellation& cst) {
    if (radii.empty()) throw DimensionError("expected_complexity_spi: no radii");
    for (std::size_t c = 1; c < radii.size(); ++c)
        if (!(radii[c] > radii[c - 1]))
            throw DimensionError("expected_complexity_spi: radii must increase");
    PsiTable table(cst.order());
    double total = 0.0;
    double p_prev = 0.0;
    for (double r : radii) {
        double p = reg_lower_gamma(r * r / sigma_w2, n);
        double node_ops =
            fixed_radius_node_ops(m, n, sigma_w2 / kLatticeScale2,
                                  r * r / kLatticeScale2, table, -1, nullptr);
        total += (p - p_prev) * node_ops;
        p_prev = p;
    }
    return total;
}

double expected_complexity_dl(const std::vector<std::vector<double>>& samples,
                              int m, int n, double sigma_w2,
                              const Constellation& cst,
                              const std::vector<int>& layer_dims) {
    if (samples.empty())
        throw DimensionError("expected_complexity_dl: need at least one sample");
    PsiTable table(cst.order());
    double node_total = 0.0;
    double p_last_total = 0.0;
    for (const auto& radii : samples) {
        double p_prev = 0.0;
        for (double r : radii) {
            double p = reg_lower_gamma(r * r / sigma_w2, n);
            node_total +=
                (p - p_prev) *
                fixed_radius_node_ops(m, n, sigma_w2 / kLatticeScale2,
                                      r * r / kLatticeScale2, table, -1,
                                      nullptr);
            p_prev = p;
        }
        p_last_total += p_prev;
    }
    const double u = double(samples.size());
    return node_total / u + double(f_sb(m, n)) * (1.0 - p_last_total / u) +
           double(f_dn(layer_dims));
}

double complexity_exponent(double c, int m) {
    if (c <= 0.0 || m < 2)
        throw DimensionError("complexity_exponent requires C > 0 and m >= 2");
    return std::log(c) / std::log(double(m));
}

std::shared_ptr<const std::vector<double>> spi_schedule_x(int n, int min_size) {
    static std::mutex cache_mutex;
    static std::map<int, std::shared_ptr<const std::vector<double>>> cache;
    if (min_size < 1) throw DimensionError("spi_schedule_x: min_size >= 1");
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto& slot = cache[n];
    if (!slot || static_cast<int>(slot->size()) < min_size) {
        auto xs = std::make_shared<std::vector<double>>(
            slot ? *slot : std::vector<double>{});
        while (static_cast<int>(xs->size()) < min_size) {
            int next = static_cast<int>(xs->size()) + 1;
            double p = 1.0 - std::pow(0.99, next);
            xs->push_back(inv_reg_lower_gamma(p, n));
        }
        slot = std::move(xs);
    }
    return slot;
}

double spi_schedule_radius(int i, int n, double sigma_w2) {
    if (i < 1) throw DimensionError("spi_schedule_radius: i must be >= 1");
    auto xs = spi_schedule_x(n, i);
    return std::max(std::sqrt(sigma_w2 * (*xs)[static_cast<std::size_t>(i - 1)]),
                    1e-9);
}

} // namespace latdet
