#include "ftspec/sim.hpp"

#include <cmath>
#include <limits>

#include "ftspec/errors.hpp"
#include "ftspec/estimator.hpp"
#include "ftspec/parallel.hpp"

namespace ftspec {
namespace {

constexpr std::uint64_t kOperatorStream = 0x0A;
constexpr std::uint64_t kDataStream = 0x0D;

Eigen::MatrixXd random_operator(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd a(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    for (Eigen::Index j = 0; j < a.rows(); ++j) {
        const double sd = 1.0 / static_cast<double>(j + 1);
        for (Eigen::Index k = 0; k < a.cols(); ++k) a(j, k) = sd * normal(rng);
    }
    return a;
}

}  // namespace

std::mt19937_64 derive_stream(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (ids.size() + 1));
    auto push = [&](std::uint64_t v) {
        words.push_back(static_cast<std::uint32_t>(v & 0xffffffffu));
        words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(master);
    for (auto id : ids) push(id);
    std::seed_seq seq(words.begin(), words.end());
    return std::mt19937_64(seq);
}

Eigen::VectorXd karhunen_loeve_variances(std::size_t n) {
    Eigen::VectorXd eta(static_cast<Eigen::Index>(n));
    for (std::size_t k = 1; k <= n; ++k) {
        const double a = (static_cast<double>(k) - 0.5) * M_PI;
        eta(static_cast<Eigen::Index>(k - 1)) = 1.0 / (a * a);
    }
    return eta;
}

Fma1Model Fma1Model::random(Grid grid, std::mt19937_64& rng, std::size_t coef_dim, std::size_t innovation_dim) {
    Fma1Model model;
    model.grid = grid;
    model.a0 = random_operator(coef_dim, innovation_dim, rng);
    model.a1 = random_operator(coef_dim, innovation_dim, rng);
    model.eta = karhunen_loeve_variances(innovation_dim);
    return model;
}

Fma1Model Fma1Model::random(Grid grid, std::uint64_t seed, std::size_t coef_dim, std::size_t innovation_dim) {
    auto rng = derive_stream(seed, {kOperatorStream});
    Fma1Model model = random(grid, rng, coef_dim, innovation_dim);
    model.seed = seed;
    return model;
}

void Fma1Model::validate() const {
    if (a0.rows() != a1.rows() || a0.cols() != a1.cols() || a0.cols() != eta.size()) {
        throw DimensionError("FMA(1) operators and innovation variances have inconsistent shapes");
    }
    if (!a0.allFinite() || !a1.allFinite()) throw NumericError("FMA(1) operators must be finite");
}

Eigen::MatrixXd Fma1Model::basis() const {
    const auto d = static_cast<Eigen::Index>(grid.size());
    const auto m = a0.rows();
    Eigen::MatrixXd psi(d, m);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double tau = grid.point(static_cast<std::size_t>(i));
        for (Eigen::Index j = 0; j < m; ++j) {
            psi(i, j) = std::sqrt(2.0) * std::sin((static_cast<double>(j) + 0.5) * M_PI * tau);
        }
    }
    return psi;
}

Eigen::MatrixXd Fma1Model::autocovariance(long lag) const {
    validate();
    const Eigen::MatrixXd psi = basis();
    const auto& c = eta.asDiagonal();
    Eigen::MatrixXd coef;
    switch (std::abs(lag)) {
        case 0: coef = a0 * c * a0.transpose() + a1 * c * a1.transpose(); break;
        case 1: coef = a1 * c * a0.transpose(); break;
        default: return Eigen::MatrixXd::Zero(psi.rows(), psi.rows());
    }
    Eigen::MatrixXd out = psi * coef * psi.transpose();
    if (lag < 0) out.transposeInPlace();
    return out;
}

FunctionalSeries generate_fma1(const Fma1Model& model, std::size_t length, std::mt19937_64& rng) {
    model.validate();
    if (length < 2) throw DomainError("generate_fma1 needs T >= 2");
    const auto n = static_cast<Eigen::Index>(length);
    const auto k = model.eta.size();
    // Innovations eps_{-1}, ..., eps_{T-1}, one per row.
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd eps(n + 1, k);
    const Eigen::ArrayXd sd = model.eta.array().sqrt();
    for (Eigen::Index t = 0; t <= n; ++t) {
        for (Eigen::Index j = 0; j < k; ++j) eps(t, j) = sd(j) * normal(rng);
    }
    const Eigen::MatrixXd coef =
        eps.bottomRows(n) * model.a0.transpose() + eps.topRows(n) * model.a1.transpose();
    return FunctionalSeries(model.grid, coef * model.basis().transpose());
}

FunctionalSeries generate_fma1(const Fma1Model& model, std::size_t length) {
    auto rng = derive_stream(model.seed, {kDataStream, length});
    return generate_fma1(model, length, rng);
}

TrueSpectrum true_spectrum(const Fma1Model& model, const std::vector<double>& frequencies) {
    model.validate();
    const Eigen::MatrixXcd psi = model.basis().cast<Complex>();
    const Eigen::MatrixXcd a0 = model.a0.cast<Complex>();
    const Eigen::MatrixXcd a1 = model.a1.cast<Complex>();
    const Eigen::VectorXcd eta = model.eta.cast<Complex>();
    TrueSpectrum out;
    out.frequencies = frequencies;
    for (double omega : frequencies) {
        const Eigen::MatrixXcd transfer = a0 + std::polar(1.0, -omega) * a1;
        const Eigen::MatrixXcd coef = transfer * eta.asDiagonal() * transfer.adjoint() / (2.0 * M_PI);
        out.kernels.emplace_back(omega, hermitian_part(psi * coef * psi.adjoint()));
    }
    return out;
}

std::vector<double> imse_frequency_weights() {
    std::vector<double> w(10, M_PI / 10.0);
    w[0] *= 0.5;
    return w;
}

double integrated_squared_error(const std::vector<FrequencyKernel>& estimate,
                                const std::vector<FrequencyKernel>& truth) {
    const auto weights = imse_frequency_weights();
    if (estimate.size() != weights.size() || truth.size() != weights.size()) {
        throw DimensionError("integrated_squared_error expects kernels at pi j / 10, j = 0..9");
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        const double e = hs_distance(estimate[j], truth[j]);
        sum += weights[j] * e * e;
    }
    return 2.0 * sum;
}

std::string to_string(BandwidthMode mode) {
    switch (mode) {
        case BandwidthMode::Rate: return "rate";
        case BandwidthMode::DoubleRate: return "rate2";
        case BandwidthMode::Auto: return "auto";
        case BandwidthMode::Fixed: return "fixed";
    }
    return "?";
}

BandwidthMode parse_bandwidth_mode(const std::string& text) {
    if (text == "rate") return BandwidthMode::Rate;
    if (text == "rate2") return BandwidthMode::DoubleRate;
    if (text == "auto") return BandwidthMode::Auto;
    if (text == "fixed") return BandwidthMode::Fixed;
    throw ParseError("unknown bandwidth mode '" + text + "'");
}

double rate_bandwidth(BandwidthMode mode, std::size_t length, double fixed) {
    const double rate = std::pow(static_cast<double>(length), -0.2);
    switch (mode) {
        case BandwidthMode::Rate: return rate;
        case BandwidthMode::DoubleRate: return std::min(1.0, 2.0 * rate);
        case BandwidthMode::Fixed: return fixed;
        case BandwidthMode::Auto: break;
    }
    throw ConfigError("automatic bandwidth is data dependent");
}

const ImseRow& ImseResult::row(const std::string& kernel, std::size_t length) const {
    for (const auto& r : rows) {
        if (r.kernel == kernel && r.length == length) return r;
    }
    throw DomainError("no IMSE row for kernel " + kernel + " at T = " + std::to_string(length));
}

ImseResult imse_experiment(const ImseConfig& config) {
    if (config.runs < 2) throw ConfigError("IMSE experiment needs at least 2 replications");
    if (config.lengths.empty() || config.kernels.empty()) throw ConfigError("IMSE experiment needs lengths and kernels");
    for (const auto& spec : config.kernels) spec.validate();
    const Grid grid(config.grid_size);
    const auto frequencies = default_frequencies();
    const std::size_t n_kernels = config.kernels.size();
    const std::size_t n_lengths = config.lengths.size();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    ImseResult result;
    result.imse.assign(n_kernels, std::vector<std::vector<double>>(n_lengths, std::vector<double>(config.runs, nan)));
    std::vector<std::vector<std::vector<double>>> bandwidths = result.imse;

    Fma1Model frozen;
    if (config.freeze_operators) {
        auto rng = derive_stream(config.seed, {kOperatorStream});
        frozen = Fma1Model::random(grid, rng);
    }

    // One task per (replication, length); every slot is written by exactly one task.
    parallel_for(config.runs * n_lengths, config.threads, [&](std::size_t task) {
        const std::size_t rep = task / n_lengths;
        const std::size_t li = task % n_lengths;
        const std::size_t length = config.lengths[li];

        Fma1Model model = frozen;
        if (!config.freeze_operators) {
            auto rng = derive_stream(config.seed, {kOperatorStream, rep});
            model = Fma1Model::random(grid, rng);
        }
        auto data_rng = derive_stream(config.seed, {kDataStream, rep, length});
        const FunctionalSeries series = center(generate_fma1(model, length, data_rng));
        const TrueSpectrum truth = true_spectrum(model, frequencies);
        const Eigen::MatrixXcd dft = fdft_matrix(series);

        for (std::size_t ki = 0; ki < n_kernels; ++ki) {
            const FlatTopSpec& spec = config.kernels[ki];
            double bandwidth = 0.0;
            if (config.bandwidth_mode == BandwidthMode::Auto) {
                if (!spec.is_flat_top()) continue;
                bandwidth = select_bandwidth(series, spec, config.bandwidth_options).bandwidth;
            } else {
                bandwidth = rate_bandwidth(config.bandwidth_mode, length, config.fixed_bandwidth);
            }
            std::vector<FrequencyKernel> estimate =
                config.estimator_override
                    ? config.estimator_override(series, model, spec, bandwidth)
                    : smooth_periodograms(dft, make_weight(spec, bandwidth), frequencies);
            result.imse[ki][li][rep] = integrated_squared_error(estimate, truth.kernels);
            bandwidths[ki][li][rep] = bandwidth;
        }
    });

    for (std::size_t ki = 0; ki < n_kernels; ++ki) {
        for (std::size_t li = 0; li < n_lengths; ++li) {
            const auto& values = result.imse[ki][li];
            if (std::isnan(values.front())) continue;
            double sum = 0.0;
            double bw = 0.0;
            for (std::size_t r = 0; r < values.size(); ++r) {
                sum += values[r];
                bw += bandwidths[ki][li][r];
            }
            const double n = static_cast<double>(values.size());
            const double mean = sum / n;
            double ss = 0.0;
            for (double v : values) ss += (v - mean) * (v - mean);
            const double se = std::sqrt(ss / (n - 1.0) / n);

            ImseRow row;
            row.kernel = config.kernels[ki].id();
            row.length = config.lengths[li];
            row.bandwidth_mode = to_string(config.bandwidth_mode);
            row.mean_imse = mean;
            row.mean_log2_imse = std::log2(mean);
            // Delta method on log2(mean).
            row.stderr_log2 = mean > 0.0 ? se / (mean * std::log(2.0)) : 0.0;
            row.mean_bandwidth = bw / n;
            result.rows.push_back(row);
        }
    }
    return result;
}

}  // namespace ftspec
