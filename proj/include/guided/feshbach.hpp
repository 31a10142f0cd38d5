#pragma once

#include "guided/cylinder.hpp"
#include "guided/graph_model.hpp"
#include "guided/guided_solver.hpp"

#include <optional>
#include <string_view>
#include <vector>

namespace guided {

/// Energy-dependent contact potential Q(lambda) of one guide component with a single contact vertex.
class ContactPotential {
public:
    ContactPotential(Eigen::MatrixXd component_laplacian, Eigen::Index contact);

    /// Q(lambda); empty at a pole (Dirichlet eigenvalue of the component).
    std::optional<double> operator()(double lambda) const;
    /// Dirichlet eigenvalues of the component, ascending.
    const Eigen::VectorXd& poles() const { return poles_; }
    /// Upper bound for the spectrum of the perturbed square lattice with this component attached.
    double spectral_upper_bound() const;
    const Eigen::MatrixXd& laplacian() const { return lap_; }
    Eigen::Index contact() const { return contact_; }

private:
    std::optional<double> schur(double lambda) const;

    Eigen::MatrixXd lap_;
    Eigen::Index contact_;
    Eigen::VectorXd poles_;
};

/// Contact potential of the guide component containing contact_vertex.
ContactPotential q_potential(const GuideSpec& guide, std::string_view contact_vertex);

/// Eigenvalue 2 +- sqrt(4 + Q^2) of the chain Laplacian with a point potential Q; none for Q = 0.
std::optional<double> point_potential_eigenvalue(double q);

/// g(lambda) = lambda - sqrt(4 + Q(lambda)^2); empty at poles.
std::optional<double> dispersion_function(const ContactPotential& q, double lambda);

/// Roots of lambda - sqrt(4 + Q^2(lambda)) = 4 - 2 cos(theta) with Q(lambda) > 0, ascending.
std::vector<double> dispersion_solve(const ContactPotential& q, double theta);

/// Roots of lambda + sqrt(4 + Q^2(lambda)) = 4 - 2 cos(theta) with Q(lambda) < 0 (below the essential spectrum).
std::vector<double> dispersion_solve_below(const ContactPotential& q, double theta);

/// Dispersive band set {lambda : 2 <= g(lambda) <= 6, Q(lambda) > 0} as closed ascending intervals;
/// with below = true, the set {lambda : 2 <= lambda + sqrt(4+Q^2) <= 6, Q(lambda) < 0}.
std::vector<Band> exact_band_set(const ContactPotential& q, bool below = false);

/// Throws UnsupportedError unless the host is the square lattice and the guide has one component with one contact.
void require_exact_support(const PeriodicGraphSpec& host, const GuideSpec& guide);

GuidedSpectrum guided_spectrum_exact(const PeriodicGraphSpec& host, const GuideSpec& guide, int grid = 201);

/// Finite section of the Feshbach map F(theta, lambda) on the host rows of the window.
HermitianMatrix feshbach_map(const PeriodicGraphSpec& host, const GuideSpec& guide, std::span<const double> theta,
                             double lambda, const CylinderWindow& window);

} // namespace guided
