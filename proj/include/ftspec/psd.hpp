#pragma once

#include <Eigen/Dense>

#include "ftspec/core.hpp"

namespace ftspec {

/// Eigenvalues in descending order with matching orthonormal eigenvector columns.
struct EigenDecomposition {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXcd eigenvectors;

    /// V diag(nu) V^*.
    [[nodiscard]] Eigen::MatrixXcd reconstruct() const;
};

/// Full Hermitian eigendecomposition. Throws NumericError on non-finite input.
[[nodiscard]] EigenDecomposition eigendecompose(const Eigen::MatrixXcd& matrix);
[[nodiscard]] EigenDecomposition eigendecompose(const FrequencyKernel& kernel);

/// Replaces negative eigenvalues by zero. This is the Frobenius projection onto the PSD cone.
[[nodiscard]] FrequencyKernel clip_to_psd(const FrequencyKernel& kernel);

/// Raises every eigenvalue below eps to eps. Throws DomainError when eps <= 0.
[[nodiscard]] FrequencyKernel clip_to_pd(const FrequencyKernel& kernel, double eps);

[[nodiscard]] double min_eigenvalue(const FrequencyKernel& kernel);

}  // namespace ftspec
