#pragma once

#include "guided/graph_model.hpp"
#include "guided/linalg.hpp"

#include <span>
#include <vector>

namespace guided {

/// theta in (-pi, pi]^d (longitudinal), phi in (-pi, pi]^(D-d) (transverse).
struct Quasimomentum {
    std::vector<double> theta;
    std::vector<double> phi;

    std::vector<double> combined() const;
};

struct Band {
    double lo = 0.0;
    double hi = 0.0;
    bool flat = false;
    int multiplicity = 1;
};

struct BandSet {
    std::vector<Band> bands;

    /// Sorts by lo and sets the flat flags from the tolerance.
    void normalize(double flat_tolerance);
    bool empty() const { return bands.empty(); }
    std::size_t size() const { return bands.size(); }
    bool contains(double x, double tol = 0.0) const;
    /// Distance from x to the union of the bands (0 inside).
    double distance(double x) const;
};

/// Merges overlapping or touching intervals into a sorted union.
BandSet union_of(std::vector<Band> intervals, double flat_tolerance = 1e-6);

constexpr int kDefaultRhoGrid = 128;
constexpr int kDefaultPhiGrid = 256;
constexpr double kFlatTolerance = 1e-6;

/// n points in (-pi, pi]: odd n gives linspace(-pi, pi, n), even n gives spacing 2 pi / n. Both contain 0 and pi.
std::vector<double> torus_grid(int n);

HermitianMatrix assemble_full_fiber(const PeriodicGraphSpec& spec, std::span<const double> q);
HermitianMatrix assemble_full_fiber(const PeriodicGraphSpec& spec, const Quasimomentum& q);

struct UnperturbedSpectrum {
    BandSet bands;
    double rho = 0.0;
};

/// Band structure of the full fiber sampled on a tensor grid of the D-torus.
UnperturbedSpectrum unperturbed_bands(const PeriodicGraphSpec& spec, int grid_points_per_dim = kDefaultRhoGrid);

struct EssentialSpectrum {
    BandSet intervals;
    double m_minus = 0.0;
    double m_plus = 0.0;
};

/// Spectrum of the unperturbed cylinder fiber at theta, by a transverse Floquet sweep over phi.
EssentialSpectrum essential_spectrum_at(const PeriodicGraphSpec& spec, std::span<const double> theta,
                                        int phi_grid = kDefaultPhiGrid);

/// Default phi grid per transverse dimension, reduced for two or more transverse directions.
int default_phi_grid(int transverse_dim);

/// Visits every point of the tensor grid grid^dim in lexicographic order.
std::vector<std::vector<double>> tensor_grid(const std::vector<double>& axis, int dim);

} // namespace guided
