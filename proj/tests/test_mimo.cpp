#include <doctest.h>

#include <cmath>

#include "latdet/error.hpp"
#include "latdet/mimo.hpp"

using namespace latdet;

TEST_CASE("constellation levels and average power") {
    auto c4 = Constellation::qam(4);
    CHECK(c4.real_levels() == std::vector<int>{-1, 1});
    CHECK(c4.avg_power() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(c4.bits_per_symbol() == 2);

    auto c16 = Constellation::qam(16);
    CHECK(c16.real_levels() == std::vector<int>{-3, -1, 1, 3});
    CHECK(c16.avg_power() == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(c16.bits_per_symbol() == 4);

    auto c64 = Constellation::qam(64);
    CHECK(c64.avg_power() == doctest::Approx(42.0).epsilon(1e-14));
    CHECK(c64.bits_per_symbol() == 6);

    CHECK_THROWS_AS(Constellation::qam(8), DimensionError);
}

TEST_CASE("gray labels differ by one bit between adjacent levels") {
    auto c16 = Constellation::qam(16);
    for (int i = 0; i + 1 < c16.levels_per_dim(); ++i) {
        std::complex<double> a(c16.real_levels()[size_t(i)], 1.0);
        std::complex<double> b(c16.real_levels()[size_t(i) + 1], 1.0);
        CHECK(c16.bit_errors(a, b) == 1);
    }
    CHECK(c16.bit_errors({1.0, -3.0}, {1.0, -3.0}) == 0);
}

TEST_CASE("nearest level index clamps and rounds") {
    auto c16 = Constellation::qam(16);
    CHECK(c16.real_levels()[size_t(c16.nearest_level_index(0.2))] == 1);
    CHECK(c16.real_levels()[size_t(c16.nearest_level_index(-0.2))] == -1);
    CHECK(c16.real_levels()[size_t(c16.nearest_level_index(9.0))] == 3);
    CHECK(c16.real_levels()[size_t(c16.nearest_level_index(-100.0))] == -3);
}

TEST_CASE("gen_channel shapes, determinism and variance") {
    Rng a(7), b(7);
    auto h1 = gen_channel(a, 2, 2);
    auto h2 = gen_channel(b, 2, 2);
    CHECK(h1.rows() == 2);
    CHECK(h1.cols() == 2);
    CHECK((h1 - h2).norm() == 0.0); // same seed twice

    Rng s(1);
    auto h = gen_channel(s, 1, 1);
    CHECK(h.rows() == 1);
    CHECK(h.cols() == 1);

    CHECK_THROWS_AS(gen_channel(s, 1, 2), DimensionError);

    // empirical variance over 1e5 entries
    Rng v(7);
    double acc = 0.0;
    for (int i = 0; i < 25000; ++i) acc += gen_channel(v, 2, 2).squaredNorm();
    double var = acc / 1e5;
    CHECK(var > 0.99);
    CHECK(var < 1.01);
}

TEST_CASE("snr_to_sigma and its inverse") {
    CHECK(snr_to_sigma(0.0, 1, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(snr_to_sigma(10.0, 1, 1.0) == doctest::Approx(0.1).epsilon(1e-14));
    CHECK(snr_to_sigma(20.0, 10, 10.0) == doctest::Approx(1.0).epsilon(1e-14));
    for (double snr : {-3.0, 0.0, 8.5, 26.0})
        CHECK(sigma_to_snr(snr_to_sigma(snr, 4, 10.0), 4, 10.0) ==
              doctest::Approx(snr).epsilon(1e-12));
}

TEST_CASE("observe noiseless and noise moments") {
    auto cst = Constellation::qam(4);
    Rng rng(3);
    auto H = gen_channel(rng, 2, 2);
    Eigen::VectorXcd s(2);
    s << std::complex<double>(1, -1), std::complex<double>(-1, 1);

    auto clean = observe(H, s, rng, 0.0);
    CHECK((clean.y - H * s).norm() == 0.0);
    REQUIRE(clean.truth.has_value());
    CHECK((*clean.truth - s).norm() == 0.0);

    auto ident = observe(Eigen::MatrixXcd::Identity(2, 2), s, rng, 0.0);
    CHECK((ident.y - s).norm() == 0.0);

    // per-entry noise variance over 1e5 complex draws within 1%
    const double sigma = 0.37;
    double acc = 0.0;
    Rng noise(11);
    Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(2, 2);
    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(2);
    for (int i = 0; i < 50000; ++i)
        acc += observe(I, zero, noise, sigma).y.squaredNorm();
    double var = acc / 1e5;
    CHECK(var > 0.99 * sigma);
    CHECK(var < 1.01 * sigma);
}

TEST_CASE("real embedding identity example") {
    Observation obs;
    obs.H = Eigen::MatrixXcd::Identity(1, 1);
    obs.y.resize(1);
    obs.y << std::complex<double>(1, 2);
    auto e = real_embedding(obs);
    CHECK(e.y_r(0) == 1.0);
    CHECK(e.y_r(1) == 2.0);
    CHECK(e.H_r(0, 0) == 1.0);
    CHECK(e.H_r(0, 1) == 0.0);
    CHECK(e.H_r(1, 0) == 0.0);
    CHECK(e.H_r(1, 1) == 1.0);
}

TEST_CASE("real embedding preserves distances") {
    auto cst = Constellation::qam(16);
    Rng rng(21);
    for (int i = 0; i < 1000; ++i) {
        auto H = gen_channel(rng, 2, 2);
        auto s = draw_symbols(rng, cst, 2);
        auto obs = observe(H, s, rng, 0.5);
        auto probe = draw_symbols(rng, cst, 2);
        auto e = real_embedding(obs);
        Eigen::VectorXd pr(4);
        pr << probe.real(), probe.imag();
        double dc = (obs.y - obs.H * probe).squaredNorm();
        double dr = (e.y_r - e.H_r * pr).squaredNorm();
        CHECK(std::abs(dc - dr) <= 1e-10 * std::max(1.0, dc));
    }
}

TEST_CASE("real embedding with real-valued symbols") {
    Rng rng(5);
    auto H = gen_channel(rng, 2, 2);
    Eigen::VectorXcd s(2);
    s << std::complex<double>(3, 0), std::complex<double>(-1, 0);
    auto obs = observe(H, s, rng, 0.0);
    auto e = real_embedding(obs);
    Eigen::VectorXd sr(4);
    sr << s.real(), s.imag();
    CHECK((e.y_r - e.H_r * sr).norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stack_input layout") {
    Observation obs;
    obs.H.resize(1, 1);
    obs.H << std::complex<double>(1, -2);
    obs.y.resize(1);
    obs.y << std::complex<double>(3, 4);
    auto x = stack_input(obs);
    REQUIRE(x.size() == 4);
    CHECK(x(0) == 3.0);
    CHECK(x(1) == 4.0);
    CHECK(x(2) == 1.0);
    CHECK(x(3) == -2.0);

    Rng rng(9);
    Observation big;
    big.H = gen_channel(rng, 2, 2);
    big.y = Eigen::VectorXcd::Zero(2);
    CHECK(stack_input(big).size() == 12);

    Observation zero;
    zero.H = Eigen::MatrixXcd::Zero(2, 2);
    zero.y = Eigen::VectorXcd::Zero(2);
    CHECK(stack_input(zero).norm() == 0.0);

    for (int n = 1; n <= 4; ++n)
        for (int m = 1; m <= n; ++m) {
            Observation o;
            o.H = Eigen::MatrixXcd::Zero(n, m);
            o.y = Eigen::VectorXcd::Zero(n);
            CHECK(stack_input(o).size() == 2 * n * (m + 1));
        }
}

TEST_CASE("stack_input row-major channel order") {
    Observation obs;
    obs.H.resize(2, 2);
    obs.H << std::complex<double>(1, 2), std::complex<double>(3, 4),
        std::complex<double>(5, 6), std::complex<double>(7, 8);
    obs.y = Eigen::VectorXcd::Zero(2);
    auto x = stack_input(obs);
    // h11 h12 h21 h22
    CHECK(x(4) == 1.0);
    CHECK(x(5) == 2.0);
    CHECK(x(6) == 3.0);
    CHECK(x(7) == 4.0);
    CHECK(x(8) == 5.0);
    CHECK(x(9) == 6.0);
    CHECK(x(10) == 7.0);
    CHECK(x(11) == 8.0);
}
