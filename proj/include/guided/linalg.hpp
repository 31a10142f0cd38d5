#pragma once

#include <Eigen/Dense>

namespace guided {

/// Dense Hermitian matrix, checked for conjugate symmetry (1e-12 absolute) and finite entries.
class HermitianMatrix {
public:
    static constexpr double kTolerance = 1e-12;

    HermitianMatrix() = default;
    explicit HermitianMatrix(Eigen::MatrixXcd m);

    const Eigen::MatrixXcd& matrix() const { return m_; }
    Eigen::Index dimension() const { return m_.rows(); }
    std::complex<double> operator()(Eigen::Index i, Eigen::Index j) const { return m_(i, j); }

    /// Eigenvalues in ascending order.
    Eigen::VectorXd eigenvalues() const;

private:
    Eigen::MatrixXcd m_;
};

double hermiticity_defect(const Eigen::MatrixXcd& m);

struct EigenSystem {
    Eigen::VectorXd values;   // ascending
    Eigen::MatrixXcd vectors; // columns, orthonormal
};

EigenSystem eigensystem(const HermitianMatrix& m);

/// Eigenvalues of a real symmetric matrix, ascending.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

} // namespace guided
