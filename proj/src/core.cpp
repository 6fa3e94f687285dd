#include "ftspec/core.hpp"

#include <algorithm>
#include <cmath>

#include "ftspec/errors.hpp"

namespace ftspec {

Grid::Grid(std::size_t d) : d_(d) {
    if (d < 2) {
        throw DomainError("grid needs at least 2 points, got " + std::to_string(d));
    }
}

Eigen::VectorXd Grid::points() const {
    Eigen::VectorXd out(static_cast<Eigen::Index>(d_));
    for (std::size_t i = 0; i < d_; ++i) out(static_cast<Eigen::Index>(i)) = point(i);
    return out;
}

FunctionalSeries::FunctionalSeries(Grid grid, Eigen::MatrixXd values, bool centered)
    : grid_(grid), values_(std::move(values)), centered_(centered) {
    if (values_.rows() < 2) {
        throw DomainError("functional series needs T >= 2 curves");
    }
    if (static_cast<std::size_t>(values_.cols()) != grid_.size()) {
        throw DimensionError("series has " + std::to_string(values_.cols()) +
                             " columns but grid has " + std::to_string(grid_.size()) + " points");
    }
    if (!values_.allFinite()) {
        throw NumericError("functional series contains non-finite values");
    }
}

FrequencyKernel::FrequencyKernel(double omega, Eigen::MatrixXcd matrix)
    : omega_(omega), matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() == 0) {
        throw DimensionError("frequency kernel must be a non-empty square matrix");
    }
    if (!matrix_.allFinite()) {
        throw NumericError("frequency kernel contains non-finite entries");
    }
    if (hermitian_residual() > 1e-10) {
        throw NumericError("frequency kernel is not Hermitian (residual " +
                           std::to_string(hermitian_residual()) + ")");
    }
}

double FrequencyKernel::hermitian_residual() const {
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    return (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() / scale;
}

std::string to_string(EstimationMethod method) {
    switch (method) {
        case EstimationMethod::SmoothedPeriodogram: return "smoothed-periodogram";
        case EstimationMethod::LagWindow: return "lag-window";
    }
    return "unknown";
}

EstimationMethod parse_method(const std::string& text) {
    if (text == "smoothed-periodogram" || text == "smoothed") return EstimationMethod::SmoothedPeriodogram;
    if (text == "lag-window" || text == "lagwindow") return EstimationMethod::LagWindow;
    throw ParseError("unknown estimation method '" + text + "'");
}

void SpectralEstimate::validate() const {
    if (kernels.size() != frequencies.size()) {
        throw DimensionError("spectral estimate has " + std::to_string(kernels.size()) +
                             " kernels for " + std::to_string(frequencies.size()) + " frequencies");
    }
    for (std::size_t k = 0; k < frequencies.size(); ++k) {
        const double w = frequencies[k];
        if (!(w >= 0.0 && w < 2.0 * M_PI)) {
            throw DomainError("frequency " + std::to_string(w) + " outside [0, 2pi)");
        }
        if (k > 0 && !(w > frequencies[k - 1])) {
            throw DomainError("frequencies must be strictly increasing");
        }
    }
}

FunctionalSeries center(const FunctionalSeries& series) {
    if (series.centered()) return series;
    Eigen::MatrixXd values = series.values();
    const Eigen::RowVectorXd mean = values.colwise().mean();
    values.rowwise() -= mean;
    return FunctionalSeries(series.grid(), std::move(values), true);
}

double hs_norm(const Eigen::MatrixXcd& matrix) {
    return matrix.norm() / static_cast<double>(matrix.rows());
}

double hs_norm(const FrequencyKernel& kernel) { return hs_norm(kernel.matrix()); }

double hs_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError("hs_distance: shapes differ");
    }
    return hs_norm(Eigen::MatrixXcd(a - b));
}

double hs_distance(const FrequencyKernel& a, const FrequencyKernel& b) {
    return hs_distance(a.matrix(), b.matrix());
}

Eigen::MatrixXcd hermitian_part(const Eigen::MatrixXcd& matrix) {
    Eigen::MatrixXcd out(matrix.rows(), matrix.cols());
    for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
        out(j, j) = Complex(matrix(j, j).real(), 0.0);
        for (Eigen::Index i = j + 1; i < matrix.rows(); ++i) {
            const Complex v = 0.5 * (matrix(i, j) + std::conj(matrix(j, i)));
            out(i, j) = v;
            out(j, i) = std::conj(v);
        }
    }
    return out;
}

}  // namespace ftspec
