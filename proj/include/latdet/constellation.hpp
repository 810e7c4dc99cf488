#pragma once

#include <complex>
#include <vector>

namespace latdet {

/* Square M^2-QAM constellation.
 *
 * Per real dimension the M levels are the consecutive odd integers
 * {-(M-1), ..., -1, +1, ..., M-1}; complex points are the Cartesian
 * product levels x levels. Bit labels are Gray-coded per real dimension.
 */
class Constellation {
public:
    /* order must be one of 4, 16, 64 */
    static Constellation qam(int order);

    int order() const { return order_; }                  // M^2
    int levels_per_dim() const { return static_cast<int>(levels_.size()); }
    const std::vector<int>& real_levels() const { return levels_; }
    double avg_power() const { return avg_power_; }       // sigma_s^2
    int bits_per_symbol() const { return bits_per_symbol_; }

    /* index of the level nearest to x, clamped into the level range */
    int nearest_level_index(double x) const;

    /* exact level value -> index; throws if x is not a level */
    int level_index(int level) const;

    bool contains(std::complex<double> s) const;

    /* complex symbol index (real-part major) <-> constellation point */
    std::complex<double> point(int index) const;
    int index_of(std::complex<double> s) const;

    /* Hamming distance between the Gray bit labels of two symbols */
    int bit_errors(std::complex<double> a, std::complex<double> b) const;

private:
    Constellation(int order, std::vector<int> levels);

    int order_;
    std::vector<int> levels_;
    double avg_power_;
    int bits_per_symbol_;
};

} // namespace latdet
