#pragma once

#include "guided/cylinder.hpp"
#include "guided/floquet.hpp"
#include "guided/graph_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace guided {

struct SweepOptions {
    int grid = 201;
    std::optional<CylinderWindow> window; // default_window(D - d) when unset
    double tol_ess = 1e-6;
    double eig_tol = 1e-8; // eigenvalue clustering tolerance (relative above 1)
    double localization = kLocalizationThreshold;
    int phi_grid = 0; // default_phi_grid(D - d) when 0
    bool refine = true;
};

struct DiscreteLevel {
    double value = 0.0;
    bool guide_supported = false; // eigenvector vanishes on all host rows
};

struct DispersionPoint {
    std::vector<double> theta;
    std::vector<DiscreteLevel> levels; // descending
    double m_minus = 0.0;
    double m_plus = 0.0;
    bool refined = false;

    std::vector<double> values() const;
    /// Levels that are not guide supported, descending.
    std::vector<double> dispersive_values() const;
    /// Dispersive levels above m_+ (above = true) or below m_- (above = false), descending.
    std::vector<double> dispersive_values(bool above) const;
};

struct DispersionTrace {
    int dim_guide = 1;
    int p = 0;
    std::vector<DispersionPoint> points;

    /// N = max over points of N_theta.
    std::size_t max_count() const;
    std::size_t max_dispersive_count() const;
    std::size_t max_dispersive_count(bool above) const;
};

/// Discrete eigenvalues of the truncated Delta(theta) outside the essential spectrum, plus guide-supported ones.
DispersionPoint discrete_spectrum_at(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                     std::span<const double> theta, const SweepOptions& options);

DispersionTrace sweep(const PeriodicGraphSpec& host, const GuideSpec& guide, const SweepOptions& options = {});

struct FlatValue {
    double value = 0.0;
    int multiplicity = 0;
    bool guide_supported = false;
    bool certified = false;
};

struct Certificate {
    std::string name;
    bool passed = false;
    double margin = 0.0;
    std::string detail;
};

struct GuidedSpectrum {
    BandSet bands;             // dispersive and flat bands, sorted by lo
    std::vector<Band> indexed; // dispersive bands by descending index j = 1, 2, ...
    std::vector<FlatValue> flat_bands;
    std::vector<Certificate> certificates;
    bool exact = false;
    std::vector<std::string> notes;
};

GuidedSpectrum guided_bands(const DispersionTrace& trace, double tol_flat = kFlatTolerance);

struct FlatBand {
    double value = 0.0;
    int multiplicity = 0;
    Eigen::MatrixXd eigenvectors; // orthonormal basis of the eigenvectors vanishing on V_01
};

/// Eigenvalues of Delta1 with eigenvectors vanishing on the contact set.
std::vector<FlatBand> flat_bands(const GuideLaplacian& guide);

struct EstimateInputs {
    double rho = 0.0;
    std::vector<double> zeta;
    MuValues mu;
    int beta_plus = 0;
    int beta_01 = 0;
    int p = 0;
    std::vector<FlatBand> flats;
};

EstimateInputs estimate_inputs(const PeriodicGraphSpec& host, const GuideSpec& guide, const CylinderWindow& window);

/// Bands sigma_j by descending index over all levels (guide-supported included).
std::vector<Band> full_index_bands(const DispersionTrace& trace);

std::vector<Certificate> verify_certificates(const EstimateInputs& inputs, const DispersionTrace& trace,
                                             GuidedSpectrum& spectrum);
std::vector<Certificate> verify_certificates(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                             const DispersionTrace& trace, GuidedSpectrum& spectrum,
                                             const CylinderWindow& window);

bool all_passed(const std::vector<Certificate>& certificates);

} // namespace guided
