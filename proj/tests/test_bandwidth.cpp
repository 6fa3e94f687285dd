#include <doctest.h>

#include <cmath>
#include <random>

#include "ftspec/bandwidth.hpp"
#include "ftspec/errors.hpp"
#include "ftspec/sim.hpp"
#include "test_util.hpp"

using namespace ftspec;

namespace {

// Straight loops, no caching: rho_m(tau, sigma) from its definition.
double naive_rho(const Eigen::MatrixXd& x, long m, Eigen::Index a, Eigen::Index b) {
    const long n = static_cast<long>(x.rows());
    double num = 0.0, va = 0.0, vb = 0.0;
    for (long t = 0; t < n; ++t) {
        va += x(t, a) * x(t, a);
        vb += x(t, b) * x(t, b);
    }
    for (long t = m; t < n; ++t) num += x(t, a) * x(t - m, b);
    return num / std::sqrt(va * vb);
}

long naive_q(const Eigen::MatrixXd& x, Eigen::Index a, Eigen::Index b, double threshold, long k, long first_m) {
    const long n = static_cast<long>(x.rows());
    for (long q = 0; q <= n - 1 - k; ++q) {
        bool ok = true;
        for (long m = first_m; m <= k; ++m) ok = ok && std::abs(naive_rho(x, q + m, a, b)) < threshold;
        if (ok) return q;
    }
    return n - 1 - k;
}

}  // namespace

TEST_SUITE("bandwidth") {

TEST_CASE("helpers") {
    CHECK(bandwidth_from_q(3, 0.5) == doctest::Approx(1.0 / 6.0));
    CHECK(bandwidth_from_q(0, 0.5) == 1.0);
    CHECK(bandwidth_from_q(1, 0.505) == doctest::Approx(0.5));
    CHECK(bandwidth_from_q(2, 0.302112432009108) == doctest::Approx(1.0 / 7.0));
    CHECK_THROWS_AS((void)bandwidth_from_q(-1, 0.5), DomainError);
    CHECK(window_length(512) == 5);
    CHECK(window_length(std::size_t{1} << 30) == 5);
    CHECK(significance_threshold(2.0, 100) == doctest::Approx(2.0 * std::sqrt(2.0 / 100.0)));
    CHECK(pilot_index(0, 100) == 0);
    CHECK(pilot_index(5, 100) == 50);
    CHECK(pilot_index(9, 100) == 90);
    CHECK(pilot_index(0, 5) == 0);
    CHECK(pilot_index(9, 5) == 4);
    for (std::size_t i = 0; i < 10; ++i) CHECK(pilot_index(i, 3) < 3);
    CHECK(parse_aggregation(to_string(Aggregation::Mean)) == Aggregation::Mean);
    CHECK(parse_lag_window(to_string(LagWindow::FromCandidate)) == LagWindow::FromCandidate);
    CHECK_THROWS_AS((void)parse_aggregation("median"), ParseError);
}

TEST_CASE("correlogram properties") {
    std::mt19937_64 rng(12);
    const auto s = center(testing::white_noise(64, 7, rng));
    for (std::size_t i = 0; i < 7; ++i) CHECK(correlogram(s, 0, i, i) == doctest::Approx(1.0).epsilon(1e-14));
    for (long m = -63; m < 64; ++m) {
        for (std::size_t i : {0u, 3u}) {
            for (std::size_t j : {1u, 6u}) {
                const double r = correlogram(s, m, i, j);
                CHECK(std::abs(r) <= 1.0 + 1e-12);
                if (m >= 0) {
                    CHECK(r == doctest::Approx(naive_rho(s.values(), m, i, j)).epsilon(1e-12));
                } else {
                    CHECK(r == doctest::Approx(naive_rho(s.values(), -m, j, i)).epsilon(1e-12));
                }
            }
        }
    }
    CHECK_THROWS_AS((void)correlogram(s, 64, 0, 0), DomainError);
    CHECK_THROWS_AS((void)correlogram(testing::white_noise(10, 2, rng), 1, 0, 0), PreconditionError);

    Eigen::MatrixXd flat = Eigen::MatrixXd::Random(20, 3);
    flat.col(1).setZero();
    CHECK_THROWS_AS((void)correlogram(center(FunctionalSeries(Grid(3), flat)), 1, 1, 0), DegenerateDataError);
}

TEST_CASE("pilot grid matches a brute-force search") {
    const auto model = Fma1Model::random(Grid(13), 40);
    const auto s = center(generate_fma1(model, 200));
    for (const auto window : {LagWindow::FromNextLag, LagWindow::FromCandidate}) {
        BandwidthOptions opts;
        opts.window = window;
        const auto report = select_bandwidth(s, FlatTopSpec::trapezoid(), opts);
        const double threshold = significance_threshold(2.0, 200);
        long q_max = 0;
        for (std::size_t i = 0; i < kPilotGridSize; ++i) {
            for (std::size_t j = 0; j < kPilotGridSize; ++j) {
                const long q = naive_q(s.values(), static_cast<Eigen::Index>(pilot_index(i, 13)),
                                       static_cast<Eigen::Index>(pilot_index(j, 13)), threshold, 5,
                                       window == LagWindow::FromNextLag ? 1 : 0);
                CHECK(report.q_grid[i][j] == q);
                q_max = std::max(q_max, q);
                CHECK(report.bandwidth_for_pair(i, j) == bandwidth_from_q(q, report.c_ef));
            }
        }
        CHECK(report.q_hat == q_max);
        CHECK(report.bandwidth == bandwidth_from_q(q_max, 0.505));
        CHECK(report.c_ef == doctest::Approx(0.505));
        CHECK_FALSE(report.fallback);
    }
}

TEST_CASE("rank-one white noise selects the widest bandwidth") {
    // Every pilot pair sees the same scalar correlogram, so only K_T lags are tested.
    std::mt19937_64 rng(2024);
    std::normal_distribution<double> normal;
    Eigen::VectorXd shape(16);
    for (Eigen::Index i = 0; i < shape.size(); ++i) shape(i) = 1.0 + 0.1 * i;
    int hits = 0;
    const int runs = 40;
    for (int r = 0; r < runs; ++r) {
        Eigen::MatrixXd x(512, 16);
        for (Eigen::Index t = 0; t < x.rows(); ++t) x.row(t) = normal(rng) * shape.transpose();
        if (select_bandwidth(center(FunctionalSeries(Grid(16), x)), FlatTopSpec::trapezoid()).bandwidth == 1.0) ++hits;
    }
    CHECK(hits >= 38);
}

TEST_CASE("lag-5 correlogram of white noise stays within 4 / sqrt(T)") {
    std::mt19937_64 rng(55);
    int inside = 0;
    for (int r = 0; r < 200; ++r) {
        const auto s = center(testing::white_noise(256, 2, rng));
        if (std::abs(correlogram(s, 5, 0, 1)) < 4.0 / 16.0) ++inside;
    }
    CHECK(inside >= 190);
}

TEST_CASE("candidate-lag window always keeps q >= 1 on the diagonal") {
    std::mt19937_64 rng(3);
    const auto s = center(testing::white_noise(256, 10, rng));
    BandwidthOptions opts;
    opts.window = LagWindow::FromCandidate;
    const auto report = select_bandwidth(s, FlatTopSpec::trapezoid(), opts);
    for (std::size_t i = 0; i < kPilotGridSize; ++i) CHECK(report.q_grid[i][i] >= 1);
    CHECK(report.bandwidth < 1.0);
}

TEST_CASE("aggregation and threshold monotonicity") {
    const auto model = Fma1Model::random(Grid(30), 8);
    const auto s = center(generate_fma1(model, 300));
    BandwidthOptions mean_opts;
    mean_opts.aggregation = Aggregation::Mean;
    const auto by_max = select_bandwidth(s, FlatTopSpec::flat_top_parzen());
    const auto by_mean = select_bandwidth(s, FlatTopSpec::flat_top_parzen(), mean_opts);
    CHECK(by_mean.q_hat <= by_max.q_hat);
    CHECK(by_mean.bandwidth >= by_max.bandwidth);
    CHECK(by_mean.q_grid == by_max.q_grid);
    long sum = 0;
    for (const auto& row : by_mean.q_grid) for (long v : row) sum += v;
    CHECK(by_mean.q_hat == static_cast<long>(std::ceil(sum / 100.0)));

    long previous = std::numeric_limits<long>::max();
    for (double c0 : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        BandwidthOptions opts;
        opts.c0 = c0;
        const auto report = select_bandwidth(s, FlatTopSpec::flat_top_parzen(), opts);
        CHECK(report.q_hat <= previous);
        previous = report.q_hat;
    }
}

TEST_CASE("fallback when nothing is insignificant") {
    std::mt19937_64 rng(9);
    const auto s = center(testing::white_noise(64, 4, rng));
    BandwidthOptions opts;
    opts.c0 = 1e-9;
    const auto report = select_bandwidth(s, FlatTopSpec::trapezoid(), opts);
    CHECK(report.fallback);
    CHECK(report.q_hat == 64 - 5 - 1);
    CHECK(report.bandwidth == bandwidth_from_q(58, 0.505));
}

TEST_CASE("argument checks") {
    std::mt19937_64 rng(1);
    const auto s = center(testing::white_noise(64, 4, rng));
    CHECK_THROWS_AS((void)select_bandwidth(s, FlatTopSpec::epanechnikov()), UnsupportedError);
    CHECK_THROWS_AS((void)select_bandwidth(center(testing::white_noise(7, 4, rng)), FlatTopSpec::trapezoid()), DomainError);
    CHECK_THROWS_AS((void)select_bandwidth(testing::white_noise(64, 4, rng), FlatTopSpec::trapezoid()), PreconditionError);
    BandwidthOptions bad;
    bad.c0 = 0.0;
    CHECK_THROWS_AS((void)select_bandwidth(s, FlatTopSpec::trapezoid(), bad), DomainError);
}

}
