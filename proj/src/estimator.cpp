#include "ftspec/estimator.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/FFT>

#include "ftspec/errors.hpp"
#include "ftspec/parallel.hpp"

namespace ftspec {
namespace {

void require_centered(const FunctionalSeries& series, const char* what) {
    if (!series.centered()) {
        throw PreconditionError(std::string(what) + " requires a centered series; call center() first");
    }
}

Eigen::MatrixXd lagged_product(const Eigen::MatrixXd& x, long lag) {
    const auto n = x.rows();
    return x.middleRows(lag, n - lag).transpose() * x.topRows(n - lag) / static_cast<double>(n);
}

}  // namespace

Eigen::MatrixXcd fdft_matrix(const FunctionalSeries& series) {
    require_centered(series, "fDFT");
    const auto& x = series.values();
    const auto length = x.rows();
    const auto d = x.cols();
    const double scale = 1.0 / std::sqrt(2.0 * M_PI * static_cast<double>(length));

    Eigen::FFT<double> fft;
    std::vector<Complex> in(static_cast<std::size_t>(length));
    std::vector<Complex> out;
    Eigen::MatrixXcd result(d, length);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index t = 0; t < length; ++t) in[static_cast<std::size_t>(t)] = x(t, i);
        fft.fwd(out, in);
        for (Eigen::Index s = 0; s < length; ++s) result(i, s) = out[static_cast<std::size_t>(s)] * scale;
    }
    return result;
}

std::vector<Fdft> fdft_all(const FunctionalSeries& series) {
    const Eigen::MatrixXcd m = fdft_matrix(series);
    const auto length = m.cols();
    std::vector<Fdft> out;
    out.reserve(static_cast<std::size_t>(length));
    for (Eigen::Index s = 0; s < length; ++s) {
        out.push_back({2.0 * M_PI * static_cast<double>(s) / static_cast<double>(length), m.col(s)});
    }
    return out;
}

FrequencyKernel periodogram(const Fdft& fdft) {
    const auto& v = fdft.coefficients;
    return FrequencyKernel(fdft.omega, hermitian_part(v * v.adjoint()));
}

AutocovKernel autocovariance(const FunctionalSeries& series, long lag) {
    const long length = static_cast<long>(series.length());
    if (std::abs(lag) >= length) {
        throw DomainError("autocovariance lag " + std::to_string(lag) + " must satisfy |u| < T = " +
                          std::to_string(length));
    }
    if (lag >= 0) return {lag, lagged_product(series.values(), lag)};
    return {lag, lagged_product(series.values(), -lag).transpose()};
}

std::vector<double> default_frequencies() {
    std::vector<double> out;
    for (int j = 0; j < 10; ++j) out.push_back(M_PI * j / 10.0);
    return out;
}

std::vector<double> fourier_frequencies(std::size_t length) {
    std::vector<double> out;
    out.reserve(length);
    for (std::size_t s = 0; s < length; ++s) {
        out.push_back(2.0 * M_PI * static_cast<double>(s) / static_cast<double>(length));
    }
    return out;
}

std::vector<FrequencyKernel> smooth_periodograms(const Eigen::MatrixXcd& fdft,
                                                 const std::function<double(double)>& weight,
                                                 const std::vector<double>& frequencies,
                                                 const EstimateOptions& options) {
    const auto length = fdft.cols();
    const auto d = fdft.rows();
    const double step = 2.0 * M_PI / static_cast<double>(length);
    // The s = 0 ordinate is excluded.
    const auto ordinates = fdft.rightCols(length - 1);

    std::vector<Eigen::MatrixXcd> results(frequencies.size());
    parallel_for(frequencies.size(), options.threads, [&](std::size_t k) {
        Eigen::VectorXd w(length - 1);
        for (Eigen::Index s = 1; s < length; ++s) {
            w(s - 1) = step * weight(frequencies[k] - step * static_cast<double>(s));
        }
        Eigen::MatrixXcd weighted = ordinates * w.asDiagonal();
        Eigen::MatrixXcd sum(d, d);
        sum.noalias() = weighted * ordinates.adjoint();
        results[k] = hermitian_part(sum);
    });

    std::vector<FrequencyKernel> kernels;
    kernels.reserve(frequencies.size());
    for (std::size_t k = 0; k < frequencies.size(); ++k) kernels.emplace_back(frequencies[k], std::move(results[k]));
    return kernels;
}

SpectralEstimate estimate_smoothed_with_weight(const FunctionalSeries& series,
                                               const std::function<double(double)>& weight,
                                               const std::vector<double>& frequencies,
                                               const EstimateOptions& options) {
    SpectralEstimate est;
    est.frequencies = frequencies;
    est.kernels = smooth_periodograms(fdft_matrix(series), weight, frequencies, options);
    est.method = EstimationMethod::SmoothedPeriodogram;
    est.kernel_id = "custom";
    est.validate();
    return est;
}

std::function<double(double)> make_weight(const FlatTopSpec& spec, double bandwidth) {
    spec.validate();
    check_bandwidth(bandwidth);
    if (!spec.is_flat_top()) {
        return [bandwidth](double x) { return baseline_weight(bandwidth, x); };
    }
    // lambda(B u) for u >= 1 up to the support edge.
    const auto lags = static_cast<long>(std::ceil(spec.support_radius() / bandwidth));
    std::vector<double> taper;
    for (long u = 1; u <= lags; ++u) {
        const double l = lambda_eval(spec, bandwidth * static_cast<double>(u));
        if (l == 0.0) break;
        taper.push_back(l);
    }
    return [taper = std::move(taper)](double x) {
        double sum = 1.0;
        for (std::size_t u = 0; u < taper.size(); ++u) sum += 2.0 * taper[u] * std::cos(x * static_cast<double>(u + 1));
        return sum / (2.0 * M_PI);
    };
}

SpectralEstimate estimate_smoothed(const FunctionalSeries& series, const FlatTopSpec& spec, double bandwidth,
                                   const std::vector<double>& frequencies, const EstimateOptions& options) {
    SpectralEstimate est = estimate_smoothed_with_weight(series, make_weight(spec, bandwidth), frequencies, options);
    est.bandwidth = bandwidth;
    est.kernel_id = spec.id();
    return est;
}

SpectralEstimate estimate_lagwindow(const FunctionalSeries& series, const FlatTopSpec& spec, double bandwidth,
                                    const std::vector<double>& frequencies, const EstimateOptions& options) {
    if (!spec.is_flat_top()) {
        throw UnsupportedError("the lag-window estimator needs a flat-top function; EPA has none");
    }
    spec.validate();
    check_bandwidth(bandwidth);
    require_centered(series, "lag-window estimate");

    const long length = static_cast<long>(series.length());
    const long max_lag = std::min(length - 1, static_cast<long>(std::ceil(spec.support_radius() / bandwidth)));
    std::vector<double> taper;
    std::vector<Eigen::MatrixXd> autocov;
    const Eigen::MatrixXd r0 = autocovariance(series, 0).matrix;
    for (long u = 1; u <= max_lag; ++u) {
        const double l = lambda_eval(spec, bandwidth * static_cast<double>(u));
        if (l == 0.0) break;
        taper.push_back(l);
        autocov.push_back(autocovariance(series, u).matrix);
    }

    const auto d = r0.rows();
    std::vector<Eigen::MatrixXcd> results(frequencies.size());
    parallel_for(frequencies.size(), options.threads, [&](std::size_t k) {
        Eigen::MatrixXcd positive = Eigen::MatrixXcd::Zero(d, d);
        for (std::size_t u = 0; u < taper.size(); ++u) {
            const Complex phase = std::polar(taper[u], -frequencies[k] * static_cast<double>(u + 1));
            positive += phase * autocov[u].cast<Complex>();
        }
        // Negative lags contribute the adjoint, since r_{-u} = r_u^T.
        Eigen::MatrixXcd sum = positive + positive.adjoint();
        sum += r0.cast<Complex>();
        results[k] = hermitian_part(sum / (2.0 * M_PI));
    });

    SpectralEstimate est;
    est.frequencies = frequencies;
    est.kernels.reserve(frequencies.size());
    for (std::size_t k = 0; k < frequencies.size(); ++k) est.kernels.emplace_back(frequencies[k], std::move(results[k]));
    est.bandwidth = bandwidth;
    est.kernel_id = spec.id();
    est.method = EstimationMethod::LagWindow;
    est.validate();
    return est;
}

}  // namespace ftspec
