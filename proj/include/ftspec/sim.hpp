#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ftspec/bandwidth.hpp"
#include "ftspec/core.hpp"
#include "ftspec/kernels.hpp"

namespace ftspec {

/// Independent generator for a task identified by `ids`, derived from a master seed.
[[nodiscard]] std::mt19937_64 derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> ids);

/// X_t = A0 eps_t + A1 eps_{t-1} in the (psi_m x e_k) basis, with Karhunen-Loeve
/// innovations of variance eta_k = 1 / ((k - 1/2)^2 pi^2).
struct Fma1Model {
    Eigen::MatrixXd a0;
    Eigen::MatrixXd a1;
    Eigen::VectorXd eta;
    std::uint64_t seed = 0;
    Grid grid{100};

    /// A0, A1 with row j (1-based) entries drawn N(0, j^-2).
    [[nodiscard]] static Fma1Model random(Grid grid, std::uint64_t seed, std::size_t coef_dim = 50,
                                          std::size_t innovation_dim = 100);
    [[nodiscard]] static Fma1Model random(Grid grid, std::mt19937_64& rng, std::size_t coef_dim = 50,
                                          std::size_t innovation_dim = 100);

    /// Throws DimensionError on inconsistent shapes.
    void validate() const;

    [[nodiscard]] std::size_t coef_dim() const { return static_cast<std::size_t>(a0.rows()); }
    [[nodiscard]] std::size_t innovation_dim() const { return static_cast<std::size_t>(eta.size()); }

    /// d x coef_dim matrix of psi_m(tau_i) = sqrt(2) sin((m - 1/2) pi tau_i).
    [[nodiscard]] Eigen::MatrixXd basis() const;

    /// Analytic lag-u autocovariance kernel on the grid (zero for |u| > 1).
    [[nodiscard]] Eigen::MatrixXd autocovariance(long lag) const;
};

/// eta_k = 1 / ((k - 1/2)^2 pi^2), k = 1..n.
[[nodiscard]] Eigen::VectorXd karhunen_loeve_variances(std::size_t n);

[[nodiscard]] FunctionalSeries generate_fma1(const Fma1Model& model, std::size_t length, std::mt19937_64& rng);
/// Uses a stream derived from model.seed and the length.
[[nodiscard]] FunctionalSeries generate_fma1(const Fma1Model& model, std::size_t length);

struct TrueSpectrum {
    std::vector<double> frequencies;
    std::vector<FrequencyKernel> kernels;
};

/// f_omega = (1/2pi) (A0 + e^{-i omega} A1) diag(eta) (A0 + e^{-i omega} A1)^* mapped to the grid.
[[nodiscard]] TrueSpectrum true_spectrum(const Fma1Model& model, const std::vector<double>& frequencies);

/// 2 sum_j w_j |||est_j - truth_j|||^2 over omega_j = pi j / 10, trapezoid weights (pi/10, halved at j = 0).
[[nodiscard]] double integrated_squared_error(const std::vector<FrequencyKernel>& estimate,
                                              const std::vector<FrequencyKernel>& truth);

/// Quadrature weights used by integrated_squared_error.
[[nodiscard]] std::vector<double> imse_frequency_weights();

enum class BandwidthMode { Rate, DoubleRate, Auto, Fixed };

[[nodiscard]] std::string to_string(BandwidthMode mode);
[[nodiscard]] BandwidthMode parse_bandwidth_mode(const std::string& text);

/// T^{-1/5}, 2 T^{-1/5}, or the fixed value; Auto is resolved per sample elsewhere.
[[nodiscard]] double rate_bandwidth(BandwidthMode mode, std::size_t length, double fixed = 0.0);

/// Replaces the estimator inside imse_experiment (used to inject known answers).
using EstimatorOverride = std::function<std::vector<FrequencyKernel>(
    const FunctionalSeries& centered, const Fma1Model& model, const FlatTopSpec& spec, double bandwidth)>;

struct ImseConfig {
    std::vector<std::size_t> lengths{64, 128, 256, 512, 1024};
    std::size_t runs = 50;
    std::vector<FlatTopSpec> kernels{FlatTopSpec::epanechnikov(), FlatTopSpec::trapezoid(),
                                     FlatTopSpec::flat_top_parzen(), FlatTopSpec::infinitely_differentiable()};
    BandwidthMode bandwidth_mode = BandwidthMode::Rate;
    double fixed_bandwidth = 0.5;
    BandwidthOptions bandwidth_options{};
    std::uint64_t seed = 1;
    std::size_t grid_size = 50;
    /// Draw A0, A1 once for the whole experiment instead of once per replication.
    bool freeze_operators = false;
    std::size_t threads = 0;
    EstimatorOverride estimator_override{};
};

struct ImseRow {
    std::string kernel;
    std::size_t length = 0;
    std::string bandwidth_mode;
    double mean_log2_imse = 0.0;
    double stderr_log2 = 0.0;
    double mean_imse = 0.0;
    double mean_bandwidth = 0.0;
};

struct ImseResult {
    /// Ordered by kernel, then length.
    std::vector<ImseRow> rows;
    /// imse[kernel][length index][replication]; NaN where a kernel does not apply.
    std::vector<std::vector<std::vector<double>>> imse;

    [[nodiscard]] const ImseRow& row(const std::string& kernel, std::size_t length) const;
};

/// Monte-Carlo IMSE comparison; deterministic in (config.seed, config) and independent of threads.
[[nodiscard]] ImseResult imse_experiment(const ImseConfig& config);

}  // namespace ftspec
