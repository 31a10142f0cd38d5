#pragma once

#include "guided/cylinder.hpp"
#include "guided/graph_model.hpp"
#include "guided/guided_solver.hpp"

#include <span>
#include <string>
#include <vector>

namespace guided {

/// Oriented cylinder edge between two contact vertices (guide vertex positions).
struct ContactEdge {
    std::size_t from;
    std::size_t to;
    std::vector<int> tau_long;
    int multiplicity;
};

/// First-order large-multiplicity data for one simple positive eigenvalue zeta_j of Delta1.
struct AsymptoticProfile {
    int j = 0;
    double zeta = 0.0;
    Eigen::VectorXd f;           // unit eigenvector on V_1
    bool flat = false;           // f vanishes on V_01
    double contact_mass = 0.0;   // sum over V_01 of kappa0_v f(v)^2
    std::vector<ContactEdge> edges;
    double w_minus = 0.0;
    double w_plus = 0.0;
    double w_dot = 0.0;

    /// W_j(theta).
    double operator()(std::span<const double> theta) const;
    /// Oscillating part (bridge terms only); its torus average is zero.
    double omega(std::span<const double> theta) const;
};

/// Profile for the j-th largest positive eigenvalue (1-based). Throws for degenerate zeta_j or j out of range.
AsymptoticProfile wj_function(const PeriodicGraphSpec& host, const GuideSpec& guide, int j);

/// 1-based indices j whose zeta_j is degenerate (skipped by the asymptotic analysis).
std::vector<int> degenerate_indices(const GuideLaplacian& gl);

struct PredictedEdges {
    double lo;
    double hi;
};

PredictedEdges predicted_band_edges(const AsymptoticProfile& profile, double t);

struct ConvergenceRow {
    int t = 1;
    bool found = false;
    double measured_lo = 0.0;
    double measured_hi = 0.0;
    double predicted_lo = 0.0;
    double predicted_hi = 0.0;
    double residual_lo = 0.0;
    double residual_hi = 0.0;
    double width = 0.0;
};

struct ConvergenceStudy {
    AsymptoticProfile profile;
    std::vector<ConvergenceRow> rows;
    double slope_lo = 0.0;
    double slope_hi = 0.0;
    double slope_max = 0.0;
};

/// Least-squares slope of log(y) against log(x), over entries with y > 0.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ConvergenceStudy convergence_study(const PeriodicGraphSpec& host, const GuideSpec& guide, int j,
                                   const std::vector<int>& t_list, const SweepOptions& options = {});

struct BoundCheck {
    std::string name;
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    double margin = 0.0;
};

struct ComponentBounds {
    int component = 0;
    int size = 0;
    double zeta_1 = 0.0;
    double zeta_p = 0.0;
    std::vector<BoundCheck> checks;
};

/// Degree bounds on the extreme positive eigenvalues of each guide component with at least two vertices.
/// "zeta_p_lower" uses adjacent pairs; "zeta_p_lower_nonadjacent" uses non-adjacent pairs.
std::vector<ComponentBounds> guide_eigenvalue_bounds(const GuideLaplacian& gl);

} // namespace guided
