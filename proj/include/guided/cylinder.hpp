#pragma once

#include "guided/graph_model.hpp"
#include "guided/linalg.hpp"

#include <optional>
#include <span>
#include <vector>

namespace guided {

enum class Boundary { dirichlet, periodic };

const char* to_string(Boundary b);
Boundary parse_boundary(std::string_view s);

struct CylinderWindow {
    int half_width = 50;
    Boundary boundary = Boundary::periodic;
};

/// Default half-width: 50 for one transverse direction, 12 for two or more.
CylinderWindow default_window(int transverse_dim);

/// Row numbering of the truncated cylinder: host rows (quotient vertex, transverse cell in {-W..W}^(D-d))
/// followed by guide vertices that are not attached. Attached guide vertices share the host row of their image.
class CylinderLayout {
public:
    CylinderLayout(const PeriodicGraphSpec& host, const GuideSpec& guide, const CylinderWindow& window);

    Eigen::Index size() const { return size_; }
    Eigen::Index host_size() const { return host_size_; }
    int transverse_dim() const { return k_; }
    int half_width() const { return window_.half_width; }
    const CylinderWindow& window() const { return window_; }

    /// Row of (q, cell); the cell is wrapped (periodic) or rejected (dirichlet) when outside the window.
    std::optional<Eigen::Index> host_row(std::size_t q, std::span<const int> cell) const;
    Eigen::Index guide_row(std::size_t g) const { return guide_rows_[g]; }

    bool is_host_row(Eigen::Index r) const { return r < host_size_; }
    /// Transverse cell of a host row.
    std::vector<int> cell_of(Eigen::Index r) const;
    /// Host row in the outer 20% shell of transverse cells.
    bool in_shell(Eigen::Index r) const;
    /// Rows of the contact set V_01.
    const std::vector<Eigen::Index>& contact_rows() const { return contact_rows_; }

private:
    CylinderWindow window_;
    int k_;
    std::size_t nu_;
    Eigen::Index cells_;
    Eigen::Index host_size_;
    Eigen::Index size_;
    std::vector<Eigen::Index> guide_rows_;
    std::vector<Eigen::Index> contact_rows_;
};

/// Truncated fiber Laplacian Delta(theta) of the perturbed cylinder.
HermitianMatrix assemble_truncated_fiber(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                         std::span<const double> theta, const CylinderWindow& window);
/// P Delta0(theta) P: host part only (guide-only rows are zero).
HermitianMatrix assemble_host_part(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                   std::span<const double> theta, const CylinderWindow& window);
/// P1 Delta1 P1: guide Laplacian embedded in the cylinder rows.
HermitianMatrix assemble_guide_part(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                    const CylinderWindow& window);
/// Delta^gamma: Laplacian of the cylinder with all bridges deleted (diagonal is the remaining degree).
HermitianMatrix assemble_bridge_deleted(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                        const CylinderWindow& window);
/// Delta_beta(theta): bridge operator with diagonal beta_v and phased off-diagonal entries.
HermitianMatrix assemble_bridge_operator(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                         std::span<const double> theta, const CylinderWindow& window);

struct GuideLaplacian {
    Eigen::MatrixXd laplacian;          // Delta1 over V_1 in guide vertex order
    std::vector<std::size_t> contact;   // V_01
    std::vector<std::size_t> interior;  // V_1 \ V_01
    Eigen::MatrixXd dirichlet;          // Delta_D over V_1 \ V_01
    Eigen::VectorXd eigenvalues;        // ascending, all
    Eigen::MatrixXd eigenvectors;       // columns matching eigenvalues
    std::vector<double> zeta;           // positive eigenvalues, descending
    std::vector<Eigen::VectorXd> zeta_vectors; // eigenvector for each zeta entry
    int components = 0;
    int p = 0;
};

GuideLaplacian guide_laplacian(const GuideSpec& guide);

/// Fraction of the squared norm of v carried by host rows in the outer shell.
double shell_mass_fraction(const CylinderLayout& layout, const Eigen::VectorXcd& v);

constexpr double kLocalizationThreshold = 1e-4;

/// sup of the essential spectrum of Delta^gamma, from a phi sweep of the non-bridge host fiber.
double bridge_deleted_essential_sup(const PeriodicGraphSpec& host, int d, int phi_grid);

struct MuValues {
    double ess_sup = 0.0;
    std::vector<double> mu_tilde; // localized eigenvalues of Delta^gamma above ess_sup, descending
    std::vector<double> mu;       // mu_j = max(mu_tilde_j, ess_sup), j = 1..p
};

MuValues mu_values(const PeriodicGraphSpec& host, const GuideSpec& guide, const CylinderWindow& window, int p);

} // namespace guided
