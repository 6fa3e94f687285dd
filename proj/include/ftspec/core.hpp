#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace ftspec {

using Complex = std::complex<double>;

/// Uniform midpoint grid tau_i = (i + 1/2) / d on [0, 1], quadrature weight 1/d.
class Grid {
public:
    explicit Grid(std::size_t d);

    [[nodiscard]] std::size_t size() const noexcept { return d_; }
    [[nodiscard]] double weight() const noexcept { return 1.0 / static_cast<double>(d_); }
    [[nodiscard]] double point(std::size_t i) const noexcept {
        return (static_cast<double>(i) + 0.5) / static_cast<double>(d_);
    }
    [[nodiscard]] Eigen::VectorXd points() const;

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t d_;
};

/// T curves sampled on a shared grid. Row t of values() is X_t.
class FunctionalSeries {
public:
    FunctionalSeries(Grid grid, Eigen::MatrixXd values, bool centered = false);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const Eigen::MatrixXd& values() const noexcept { return values_; }
    [[nodiscard]] bool centered() const noexcept { return centered_; }
    [[nodiscard]] std::size_t length() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    [[nodiscard]] std::size_t dim() const noexcept { return grid_.size(); }

private:
    Grid grid_;
    Eigen::MatrixXd values_;
    bool centered_;
};

/// d x d Hermitian matrix approximating f_omega(tau_i, tau_j).
class FrequencyKernel {
public:
    /// Throws DimensionError if not square, NumericError if not Hermitian to 1e-10 relative.
    FrequencyKernel(double omega, Eigen::MatrixXcd matrix);

    [[nodiscard]] double omega() const noexcept { return omega_; }
    [[nodiscard]] const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }
    [[nodiscard]] std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix_.rows()); }

    /// max |m - m^*| / max(1, max |m|).
    [[nodiscard]] double hermitian_residual() const;

private:
    double omega_;
    Eigen::MatrixXcd matrix_;
};

enum class EstimationMethod { SmoothedPeriodogram, LagWindow };

[[nodiscard]] std::string to_string(EstimationMethod method);
[[nodiscard]] EstimationMethod parse_method(const std::string& text);

struct SpectralEstimate {
    std::vector<double> frequencies;
    std::vector<FrequencyKernel> kernels;
    double bandwidth = 0.0;
    std::string kernel_id;
    EstimationMethod method = EstimationMethod::SmoothedPeriodogram;

    /// Checks the frequency ordering and the kernel count.
    void validate() const;
};

/// Subtracts the sample mean curve.
[[nodiscard]] FunctionalSeries center(const FunctionalSeries& series);

/// Riemann approximation of the L^2([0,1]^2) norm: sqrt(sum |m_ij|^2) / d.
[[nodiscard]] double hs_norm(const Eigen::MatrixXcd& matrix);
[[nodiscard]] double hs_norm(const FrequencyKernel& kernel);

/// hs_norm(a - b); throws DimensionError on mismatched shapes.
[[nodiscard]] double hs_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);
[[nodiscard]] double hs_distance(const FrequencyKernel& a, const FrequencyKernel& b);

/// Makes a matrix exactly Hermitian by averaging with its adjoint.
[[nodiscard]] Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& matrix);

}  // namespace ftspec
