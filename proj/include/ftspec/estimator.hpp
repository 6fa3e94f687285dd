#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "ftspec/core.hpp"
#include "ftspec/kernels.hpp"

namespace ftspec {

/// fDFT coefficients at one frequency.
struct Fdft {
    double omega = 0.0;
    Eigen::VectorXcd coefficients;
};

/// Sample autocovariance kernel at one lag.
struct AutocovKernel {
    long lag = 0;
    Eigen::MatrixXd matrix;
};

/// d x T matrix whose column s holds the fDFT at omega_s = 2 pi s / T,
/// normalized by (2 pi T)^{-1/2}. Requires a centered series.
[[nodiscard]] Eigen::MatrixXcd fdft_matrix(const FunctionalSeries& series);

/// fDFT at every Fourier frequency 2 pi s / T, s = 0..T-1.
[[nodiscard]] std::vector<Fdft> fdft_all(const FunctionalSeries& series);

/// Rank-one periodogram kernel X~ X~^*.
[[nodiscard]] FrequencyKernel periodogram(const Fdft& fdft);

/// r_u(tau_i, tau_j) = (1/T) sum_t X_{t+u}(tau_i) X_t(tau_j). Throws DomainError when |u| >= T.
[[nodiscard]] AutocovKernel autocovariance(const FunctionalSeries& series, long lag);

/// {pi j / 10 : j = 0..9}.
[[nodiscard]] std::vector<double> default_frequencies();

/// {2 pi s / T : s = 0..T-1}.
[[nodiscard]] std::vector<double> fourier_frequencies(std::size_t length);

struct EstimateOptions {
    /// Worker threads for the per-frequency sums; 0 picks default_parallelism().
    std::size_t threads = 1;
};

/// Periodized smoothing weight as a callable: the flat-top lag form for flat-top families,
/// the Epanechnikov periodization for EPA. Taper values are computed once.
[[nodiscard]] std::function<double(double)> make_weight(const FlatTopSpec& spec, double bandwidth);

/// Smoothed periodogram (2 pi / T) sum_{s=1}^{T-1} W(omega - 2 pi s / T) p_{2 pi s / T}
/// with the flat-top weight or, for the EPA family, the periodized Epanechnikov weight.
[[nodiscard]] SpectralEstimate estimate_smoothed(const FunctionalSeries& series, const FlatTopSpec& spec,
                                                 double bandwidth, const std::vector<double>& frequencies,
                                                 const EstimateOptions& options = {});

/// Smoothed periodogram with an arbitrary 2 pi-periodic weight.
[[nodiscard]] SpectralEstimate estimate_smoothed_with_weight(const FunctionalSeries& series,
                                                             const std::function<double(double)>& weight,
                                                             const std::vector<double>& frequencies,
                                                             const EstimateOptions& options = {});

/// Same sum evaluated on a precomputed fdft_matrix; the building block of both functions above.
[[nodiscard]] std::vector<FrequencyKernel> smooth_periodograms(const Eigen::MatrixXcd& fdft,
                                                               const std::function<double(double)>& weight,
                                                               const std::vector<double>& frequencies,
                                                               const EstimateOptions& options = {});

/// Lag-window form (1/2 pi) sum_{|u| < T} lambda(B u) r_u e^{-i omega u}, truncated at
/// min(T - 1, support_radius / B). Flat-top families only.
[[nodiscard]] SpectralEstimate estimate_lagwindow(const FunctionalSeries& series, const FlatTopSpec& spec,
                                                  double bandwidth, const std::vector<double>& frequencies,
                                                  const EstimateOptions& options = {});

}  // namespace ftspec
