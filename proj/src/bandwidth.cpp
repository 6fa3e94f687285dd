#include "ftspec/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "ftspec/errors.hpp"

namespace ftspec {
namespace {

void require_centered(const FunctionalSeries& series) {
    if (!series.centered()) throw PreconditionError("correlogram requires a centered series");
}

// Lazily evaluated correlogram of one (tau, sigma) pair.
class PairCorrelogram {
public:
    PairCorrelogram(const Eigen::MatrixXd& x, std::size_t tau, std::size_t sigma)
        : x_(x), tau_(static_cast<Eigen::Index>(tau)), sigma_(static_cast<Eigen::Index>(sigma)) {
        const double vt = x_.col(tau_).squaredNorm();
        const double vs = x_.col(sigma_).squaredNorm();
        if (!(vt > 0.0) || !(vs > 0.0)) {
            throw DegenerateDataError("zero sample variance at a pilot grid point");
        }
        norm_ = std::sqrt(vt * vs);
        cache_.resize(static_cast<std::size_t>(x_.rows()));
    }

    double operator()(long lag) {
        auto& slot = cache_[static_cast<std::size_t>(lag)];
        if (!slot) {
            const auto n = x_.rows();
            slot = x_.col(tau_).tail(n - lag).dot(x_.col(sigma_).head(n - lag)) / norm_;
        }
        return *slot;
    }

private:
    const Eigen::MatrixXd& x_;
    Eigen::Index tau_;
    Eigen::Index sigma_;
    double norm_ = 1.0;
    std::vector<std::optional<double>> cache_;
};

}  // namespace

std::string to_string(Aggregation a) { return a == Aggregation::Max ? "max" : "mean"; }

Aggregation parse_aggregation(const std::string& text) {
    if (text == "max") return Aggregation::Max;
    if (text == "mean") return Aggregation::Mean;
    throw ParseError("unknown aggregation '" + text + "'");
}

std::string to_string(LagWindow w) { return w == LagWindow::FromNextLag ? "next-lag" : "candidate"; }

LagWindow parse_lag_window(const std::string& text) {
    if (text == "next-lag") return LagWindow::FromNextLag;
    if (text == "candidate") return LagWindow::FromCandidate;
    throw ParseError("unknown lag window '" + text + "'");
}

double bandwidth_from_q(long q, double c_ef) {
    if (q < 0) throw DomainError("q must be nonnegative");
    if (!(c_ef > 0.0)) throw DomainError("c_ef must be positive");
    const double steps = std::max(std::ceil(static_cast<double>(q) / c_ef), 1.0);
    return 1.0 / steps;
}

double BandwidthReport::bandwidth_for_pair(std::size_t i, std::size_t j) const {
    return bandwidth_from_q(q_grid.at(i).at(j), c_ef);
}

long window_length(std::size_t length) {
    const double root = std::sqrt(std::log10(static_cast<double>(length)));
    return std::max(5L, static_cast<long>(std::ceil(root)));
}

double significance_threshold(double c0, std::size_t length) {
    const double t = static_cast<double>(length);
    return c0 * std::sqrt(std::log10(t) / t);
}

std::size_t pilot_index(std::size_t i, std::size_t d) {
    const double pos = static_cast<double>(i) * static_cast<double>(d) / 10.0 - 0.5;
    const long idx = std::lround(pos);
    return static_cast<std::size_t>(std::clamp(idx, 0L, static_cast<long>(d) - 1));
}

double correlogram(const FunctionalSeries& series, long lag, std::size_t tau_idx, std::size_t sigma_idx) {
    require_centered(series);
    const long length = static_cast<long>(series.length());
    if (std::abs(lag) >= length) throw DomainError("correlogram lag must satisfy |m| < T");
    if (tau_idx >= series.dim() || sigma_idx >= series.dim()) throw DimensionError("grid index out of range");
    // r_{-m}(tau, sigma) = r_m(sigma, tau)
    if (lag < 0) return PairCorrelogram(series.values(), sigma_idx, tau_idx)(-lag);
    return PairCorrelogram(series.values(), tau_idx, sigma_idx)(lag);
}

BandwidthReport select_bandwidth(const FunctionalSeries& series, const FlatTopSpec& spec,
                                 const BandwidthOptions& options) {
    require_centered(series);
    if (!spec.is_flat_top()) throw UnsupportedError("bandwidth rule needs a flat-top kernel (c_ef)");
    spec.validate();
    if (!(options.c0 > 0.0)) throw DomainError("C0 must be positive");
    const std::size_t length = series.length();
    if (length < 8) throw DomainError("bandwidth rule needs T >= 8");

    BandwidthReport report;
    report.c_ef = effective_flat_top_radius(spec);
    report.c0 = options.c0;
    report.k_t = window_length(length);
    report.aggregation = options.aggregation;
    report.window = options.window;

    const double threshold = significance_threshold(options.c0, length);
    const long last_lag = static_cast<long>(length) - 1;
    const long first_m = options.window == LagWindow::FromNextLag ? 1 : 0;
    const long fallback_q = last_lag - report.k_t;

    for (std::size_t i = 0; i < kPilotGridSize; ++i) {
        for (std::size_t j = 0; j < kPilotGridSize; ++j) {
            PairCorrelogram rho(series.values(), pilot_index(i, series.dim()), pilot_index(j, series.dim()));
            long found = -1;
            for (long q = 0; q <= fallback_q && found < 0; ++q) {
                bool quiet = true;
                for (long m = first_m; m <= report.k_t && quiet; ++m) {
                    quiet = std::abs(rho(q + m)) < threshold;
                }
                if (quiet) found = q;
            }
            if (found < 0) {
                found = fallback_q;
                report.fallback = true;
            }
            report.q_grid[i][j] = found;
        }
    }

    if (options.aggregation == Aggregation::Max) {
        long q = 0;
        for (const auto& row : report.q_grid) q = std::max(q, *std::max_element(row.begin(), row.end()));
        report.q_hat = q;
    } else {
        constexpr long cells = kPilotGridSize * kPilotGridSize;
        long sum = 0;
        for (const auto& row : report.q_grid) for (long v : row) sum += v;
        report.q_hat = (sum + cells - 1) / cells;
    }
    report.bandwidth = bandwidth_from_q(report.q_hat, report.c_ef);
    return report;
}

}  // namespace ftspec
