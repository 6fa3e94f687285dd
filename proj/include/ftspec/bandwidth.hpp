#pragma once

#include <array>
#include <cstddef>
#include <string>

#include "ftspec/core.hpp"
#include "ftspec/kernels.hpp"

namespace ftspec {

enum class Aggregation { Max, Mean };

/// Which lags must be insignificant for a candidate q.
enum class LagWindow {
    /// rho_{q+m} for m = 1..K_T: the Bonferroni form. Lag 0 is never tested.
    FromNextLag,
    /// rho_{q+m} for m = 0..K_T: the boxed form. Diagonal pairs always get q >= 1.
    FromCandidate,
};

[[nodiscard]] std::string to_string(Aggregation a);
[[nodiscard]] Aggregation parse_aggregation(const std::string& text);
[[nodiscard]] std::string to_string(LagWindow w);
[[nodiscard]] LagWindow parse_lag_window(const std::string& text);

inline constexpr std::size_t kPilotGridSize = 10;
using PilotGrid = std::array<std::array<long, kPilotGridSize>, kPilotGridSize>;

struct BandwidthOptions {
    double c0 = 2.0;
    Aggregation aggregation = Aggregation::Max;
    LagWindow window = LagWindow::FromNextLag;
};

struct BandwidthReport {
    long q_hat = 0;
    PilotGrid q_grid{};
    double bandwidth = 1.0;
    double c_ef = 0.0;
    double c0 = 2.0;
    long k_t = 5;
    Aggregation aggregation = Aggregation::Max;
    LagWindow window = LagWindow::FromNextLag;
    /// Set when some pair stayed significant up to lag T - K_T - 1.
    bool fallback = false;

    /// 1 / max(ceil(q_{tau,sigma} / c_ef), 1) for one pilot pair.
    [[nodiscard]] double bandwidth_for_pair(std::size_t i, std::size_t j) const;
};

/// 1 / max(ceil(q / c_ef), 1).
[[nodiscard]] double bandwidth_from_q(long q, double c_ef);

/// max(5, ceil(sqrt(log10 T))).
[[nodiscard]] long window_length(std::size_t length);

/// C0 sqrt(log10 T / T).
[[nodiscard]] double significance_threshold(double c0, std::size_t length);

/// Grid index closest to i / 10 on a midpoint grid of size d.
[[nodiscard]] std::size_t pilot_index(std::size_t i, std::size_t d);

/// rho_m(tau, sigma) = r_m(tau, sigma) / sqrt(r_0(tau, tau) r_0(sigma, sigma)).
[[nodiscard]] double correlogram(const FunctionalSeries& series, long lag, std::size_t tau_idx,
                                 std::size_t sigma_idx);

/// Correlogram thresholding over the 10 x 10 pilot grid, then B_T = 1 / max(ceil(q / c_ef), 1).
[[nodiscard]] BandwidthReport select_bandwidth(const FunctionalSeries& series, const FlatTopSpec& spec,
                                               const BandwidthOptions& options = {});

}  // namespace ftspec
