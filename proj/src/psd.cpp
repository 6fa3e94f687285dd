#include "ftspec/psd.hpp"

#include <algorithm>

#include <Eigen/Eigenvalues>

#include "ftspec/errors.hpp"

namespace ftspec {
namespace {

FrequencyKernel clip_below(const FrequencyKernel& kernel, double floor) {
    EigenDecomposition eig = eigendecompose(kernel);
    eig.eigenvalues = eig.eigenvalues.cwiseMax(floor);
    return FrequencyKernel(kernel.omega(), hermitian_part(eig.reconstruct()));
}

}  // namespace

Eigen::MatrixXcd EigenDecomposition::reconstruct() const {
    return eigenvectors * eigenvalues.cast<Complex>().asDiagonal() * eigenvectors.adjoint();
}

EigenDecomposition eigendecompose(const Eigen::MatrixXcd& matrix) {
    if (matrix.rows() != matrix.cols()) throw DimensionError("eigendecompose needs a square matrix");
    if (!matrix.allFinite()) throw NumericError("eigendecompose: matrix has non-finite entries");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(matrix);
    if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
    // Eigen returns ascending order.
    EigenDecomposition out;
    out.eigenvalues = solver.eigenvalues().reverse();
    out.eigenvectors = solver.eigenvectors().rowwise().reverse();
    return out;
}

EigenDecomposition eigendecompose(const FrequencyKernel& kernel) { return eigendecompose(kernel.matrix()); }

FrequencyKernel clip_to_psd(const FrequencyKernel& kernel) { return clip_below(kernel, 0.0); }

FrequencyKernel clip_to_pd(const FrequencyKernel& kernel, double eps) {
    if (!(eps > 0.0)) throw DomainError("clip_to_pd needs eps > 0");
    return clip_below(kernel, eps);
}

double min_eigenvalue(const FrequencyKernel& kernel) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(kernel.matrix(), Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericError("Hermitian eigensolver did not converge");
    return solver.eigenvalues()(0);
}

}  // namespace ftspec
