#include "latdet/constellation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "latdet/error.hpp"

namespace latdet {

namespace {

int int_log2(int v) {
    int b = 0;
    while ((1 << b) < v) ++b;
    return b;
}

/* Gray label of the level index; adjacent levels differ in one bit. */
std::uint32_t gray(std::uint32_t idx) { return idx ^ (idx >> 1); }

} // namespace

Constellation::Constellation(int order, std::vector<int> levels)
    : order_(order), levels_(std::move(levels)) {
    double acc = 0.0;
    for (int a : levels_)
        for (int b : levels_) acc += double(a) * a + double(b) * b;
    avg_power_ = acc / order_;
    bits_per_symbol_ = int_log2(order_);
}

Constellation Constellation::qam(int order) {
    if (order != 4 && order != 16 && order != 64)
        throw DimensionError("constellation order must be 4, 16 or 64");
    int M = (order == 4) ? 2 : (order == 16) ? 4 : 8;
    std::vector<int> levels(M);
    for (int i = 0; i < M; ++i) levels[i] = 2 * i - (M - 1);
    return Constellation(order, std::move(levels));
}

int Constellation::nearest_level_index(double x) const {
    // levels are -(M-1) + 2i; round the affine index and clamp
    int M = levels_per_dim();
    double t = (x + (M - 1)) / 2.0;
    long i = std::lround(t);
    if (i < 0) i = 0;
    if (i >= M) i = M - 1;
    return static_cast<int>(i);
}

int Constellation::level_index(int level) const {
    int M = levels_per_dim();
    int i = (level + (M - 1)) / 2;
    if (i < 0 || i >= M || levels_[static_cast<std::size_t>(i)] != level)
        throw DimensionError("value is not a constellation level");
    return i;
}

bool Constellation::contains(std::complex<double> s) const {
    auto is_level = [&](double x) {
        double r = std::round(x);
        if (std::abs(x - r) > 1e-9) return false;
        int v = static_cast<int>(r);
        return std::binary_search(levels_.begin(), levels_.end(), v);
    };
    return is_level(s.real()) && is_level(s.imag());
}

std::complex<double> Constellation::point(int index) const {
    int M = levels_per_dim();
    if (index < 0 || index >= order_)
        throw DimensionError("symbol index out of range");
    return {double(levels_[static_cast<std::size_t>(index / M)]),
            double(levels_[static_cast<std::size_t>(index % M)])};
}

int Constellation::index_of(std::complex<double> s) const {
    int M = levels_per_dim();
    int re = level_index(static_cast<int>(std::lround(s.real())));
    int im = level_index(static_cast<int>(std::lround(s.imag())));
    return re * M + im;
}

int Constellation::bit_errors(std::complex<double> a, std::complex<double> b) const {
    auto dim_errors = [&](double x, double y) {
        std::uint32_t ga = gray(static_cast<std::uint32_t>(
            level_index(static_cast<int>(std::lround(x)))));
        std::uint32_t gb = gray(static_cast<std::uint32_t>(
            level_index(static_cast<int>(std::lround(y)))));
        return __builtin_popcount(ga ^ gb);
    };
    return dim_errors(a.real(), b.real()) + dim_errors(a.imag(), b.imag());
}

} // namespace latdet
