#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "ftspec/errors.hpp"
#include "ftspec/psd.hpp"
#include "test_util.hpp"

using namespace ftspec;

namespace {

// Cyclic Jacobi on the real symmetric embedding [[Re, -Im], [Im, Re]].
// Each eigenvalue of the Hermitian matrix appears twice in the embedding.
std::vector<double> jacobi_eigenvalues(const Eigen::MatrixXcd& h) {
    const Eigen::Index n = h.rows();
    Eigen::MatrixXd a(2 * n, 2 * n);
    a << h.real(), -h.imag(), h.imag(), h.real();
    const Eigen::Index m = a.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < m; ++p)
            for (Eigen::Index q = p + 1; q < m; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30) break;
        for (Eigen::Index p = 0; p < m; ++p) {
            for (Eigen::Index q = p + 1; q < m; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < m; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::vector<double> all(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) all[static_cast<std::size_t>(i)] = a(i, i);
    std::sort(all.begin(), all.end(), std::greater<>());
    std::vector<double> out;
    for (std::size_t i = 0; i < all.size(); i += 2) out.push_back(all[i]);
    return out;
}

}  // namespace

TEST_SUITE("psd") {

TEST_CASE("eigendecomposition matches an independent Jacobi solver") {
    std::mt19937_64 rng(4);
    for (std::size_t n : {1u, 2u, 5u, 12u}) {
        const Eigen::MatrixXcd h = testing::random_hermitian(n, rng);
        const auto eig = eigendecompose(h);
        const auto oracle = jacobi_eigenvalues(h);
        REQUIRE(eig.eigenvalues.size() == static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) CHECK(eig.eigenvalues(static_cast<Eigen::Index>(i)) == doctest::Approx(oracle[i]).epsilon(1e-10));
        for (Eigen::Index i = 1; i < eig.eigenvalues.size(); ++i) CHECK(eig.eigenvalues(i - 1) >= eig.eigenvalues(i));
        const Eigen::MatrixXcd gram = eig.eigenvectors.adjoint() * eig.eigenvectors;
        CHECK((gram - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((eig.reconstruct() - h).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("rank-one kernel") {
    Eigen::VectorXcd v(3);
    v << Complex(1.0, 2.0), Complex(-0.5, 0.0), Complex(0.0, 1.5);
    const Eigen::MatrixXcd m = v * v.adjoint();
    const auto eig = eigendecompose(m);
    CHECK(eig.eigenvalues(0) == doctest::Approx(v.squaredNorm()).epsilon(1e-13));
    CHECK(std::abs(eig.eigenvalues(1)) < 1e-13);
    CHECK(std::abs(eig.eigenvalues(2)) < 1e-13);
    const Complex overlap = eig.eigenvectors.col(0).dot(v) / v.norm();
    CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("clipping worked examples") {
    Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(3, 3);
    diag.diagonal() << 2.0, -1.0, 0.5;
    const FrequencyKernel k(0.0, diag);

    Eigen::MatrixXcd psd = Eigen::MatrixXcd::Zero(3, 3);
    psd.diagonal() << 2.0, 0.0, 0.5;
    CHECK((clip_to_psd(k).matrix() - psd).cwiseAbs().maxCoeff() < 1e-15);

    Eigen::MatrixXcd pd = Eigen::MatrixXcd::Zero(3, 3);
    pd.diagonal() << 2.0, 0.75, 0.75;
    CHECK((clip_to_pd(k, 0.75).matrix() - pd).cwiseAbs().maxCoeff() < 1e-15);

    // [[0, 1], [1, 0]] has eigenvalues +-1; the PSD part is (1/2)[[1, 1], [1, 1]].
    Eigen::MatrixXcd flip(2, 2);
    flip << 0.0, 1.0, 1.0, 0.0;
    Eigen::MatrixXcd half = Eigen::MatrixXcd::Constant(2, 2, 0.5);
    const auto clipped = clip_to_psd(FrequencyKernel(1.0, flip));
    CHECK((clipped.matrix() - half).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(clipped.omega() == 1.0);
    CHECK(min_eigenvalue(FrequencyKernel(1.0, flip)) == doctest::Approx(-1.0));
}

TEST_CASE("PSD projection is a contraction towards the cone") {
    std::mt19937_64 rng(77);
    std::size_t violations = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 8;
        const FrequencyKernel truth(0.5, testing::random_psd(d, rng, 1 + trial % d));
        const FrequencyKernel noisy(0.5, truth.matrix() + testing::random_hermitian(d, rng, 0.5 + trial % 3));
        const auto clipped = clip_to_psd(noisy);
        if (hs_distance(clipped, truth) > hs_distance(noisy, truth) + 1e-12) ++violations;
        CHECK(min_eigenvalue(clipped) >= -1e-10);
    }
    CHECK(violations == 0);
}

TEST_CASE("clipping is idempotent and leaves PSD kernels alone") {
    std::mt19937_64 rng(5);
    const FrequencyKernel k(0.0, testing::random_hermitian(6, rng));
    const auto once = clip_to_psd(k);
    const auto twice = clip_to_psd(once);
    CHECK((once.matrix() - twice.matrix()).cwiseAbs().maxCoeff() < 1e-12);

    const FrequencyKernel p(0.0, testing::random_psd(6, rng));
    CHECK((clip_to_psd(p).matrix() - p.matrix()).cwiseAbs().maxCoeff() < 1e-10);

    const auto pd = clip_to_pd(k, 0.1);
    CHECK(min_eigenvalue(pd) >= 0.1 - 1e-12);
    CHECK((clip_to_pd(pd, 0.1).matrix() - pd.matrix()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("errors") {
    const FrequencyKernel k(0.0, Eigen::MatrixXcd::Identity(2, 2));
    CHECK_THROWS_AS((void)clip_to_pd(k, 0.0), DomainError);
    CHECK_THROWS_AS((void)clip_to_pd(k, -1.0), DomainError);
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Identity(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS((void)eigendecompose(bad), NumericError);
}

}
