#include "guided/linalg.hpp"

#include "guided/errors.hpp"

#include <string>

namespace guided {

double hermiticity_defect(const Eigen::MatrixXcd& m) {
    if (m.size() == 0) return 0.0;
    return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw SolverError("Hermitian matrix must be square");
    if (!m_.allFinite()) throw SolverError("matrix has non-finite entries");
    const double defect = hermiticity_defect(m_);
    if (defect > kTolerance) throw SolverError("matrix is not Hermitian (defect " + std::to_string(defect) + ")");
}

Eigen::VectorXd HermitianMatrix::eigenvalues() const {
    if (m_.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m_, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolverError("Hermitian eigensolver did not converge");
    return solver.eigenvalues();
}

EigenSystem eigensystem(const HermitianMatrix& m) {
    if (m.dimension() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m.matrix());
    if (solver.info() != Eigen::Success) throw SolverError("Hermitian eigensolver did not converge");
    return {solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
    if (m.rows() == 0) return {};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw SolverError("symmetric eigensolver did not converge");
    return solver.eigenvalues();
}

} // namespace guided
