#include "guided/floquet.hpp"

#include "guided/errors.hpp"
#include "guided/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace guided {

std::vector<double> Quasimomentum::combined() const {
    std::vector<double> q = theta;
    q.insert(q.end(), phi.begin(), phi.end());
    return q;
}

void BandSet::normalize(double flat_tolerance) {
    std::sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    for (auto& b : bands) b.flat = (b.hi - b.lo) < flat_tolerance;
}

bool BandSet::contains(double x, double tol) const {
    return std::any_of(bands.begin(), bands.end(), [&](const Band& b) { return x >= b.lo - tol && x <= b.hi + tol; });
}

double BandSet::distance(double x) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& b : bands) {
        if (x >= b.lo && x <= b.hi) return 0.0;
        best = std::min(best, x < b.lo ? b.lo - x : x - b.hi);
    }
    return best;
}

BandSet union_of(std::vector<Band> intervals, double flat_tolerance) {
    std::sort(intervals.begin(), intervals.end(), [](const Band& a, const Band& b) { return a.lo < b.lo; });
    BandSet out;
    for (const auto& b : intervals) {
        if (!out.bands.empty() && b.lo <= out.bands.back().hi) {
            auto& last = out.bands.back();
            last.hi = std::max(last.hi, b.hi);
            last.multiplicity += b.multiplicity;
        } else {
            out.bands.push_back(b);
        }
    }
    out.normalize(flat_tolerance);
    return out;
}

std::vector<double> torus_grid(int n) {
    if (n < 2) throw std::invalid_argument("grid must have at least 2 points");
    const double pi = std::numbers::pi;
    std::vector<double> g(n);
    if (n % 2 == 1) {
        for (int k = 0; k < n; ++k) g[k] = -pi + 2.0 * pi * k / (n - 1);
        g[(n - 1) / 2] = 0.0;
    } else {
        for (int k = 0; k < n; ++k) g[k] = -pi + 2.0 * pi * (k + 1) / n;
        g[n / 2 - 1] = 0.0;
        g[n - 1] = pi;
    }
    return g;
}

std::vector<std::vector<double>> tensor_grid(const std::vector<double>& axis, int dim) {
    std::vector<std::vector<double>> points;
    if (dim == 0) return {{}};
    std::vector<std::size_t> idx(dim, 0);
    while (true) {
        std::vector<double> p(dim);
        for (int k = 0; k < dim; ++k) p[k] = axis[idx[k]];
        points.push_back(std::move(p));
        int k = dim - 1;
        while (k >= 0 && ++idx[k] == axis.size()) idx[k--] = 0;
        if (k < 0) break;
    }
    return points;
}

HermitianMatrix assemble_full_fiber(const PeriodicGraphSpec& spec, std::span<const double> q) {
    const int D = spec.dim_total();
    if (static_cast<int>(q.size()) != D) throw std::invalid_argument("quasimomentum must have D components");
    const auto n = static_cast<Eigen::Index>(spec.vertex_count());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index v = 0; v < n; ++v) m(v, v) = spec.degree(static_cast<std::size_t>(v));
    for (const auto& oe : spec.oriented_edges()) {
        double phase = 0.0;
        for (int k = 0; k < D; ++k) phase += oe.index[k] * q[k];
        m(oe.from, oe.to) -= static_cast<double>(oe.multiplicity) * std::polar(1.0, phase);
    }
    return HermitianMatrix(std::move(m));
}

HermitianMatrix assemble_full_fiber(const PeriodicGraphSpec& spec, const Quasimomentum& q) {
    return assemble_full_fiber(spec, q.combined());
}

UnperturbedSpectrum unperturbed_bands(const PeriodicGraphSpec& spec, int grid_points_per_dim) {
    const auto points = tensor_grid(torus_grid(grid_points_per_dim), spec.dim_total());
    const auto nu = static_cast<Eigen::Index>(spec.vertex_count());
    std::vector<Eigen::VectorXd> eigs(points.size());
    parallel_for(points.size(), [&](std::size_t i) { eigs[i] = assemble_full_fiber(spec, points[i]).eigenvalues(); });

    std::vector<Band> bands(nu);
    for (Eigen::Index b = 0; b < nu; ++b) {
        bands[b].lo = std::numeric_limits<double>::infinity();
        bands[b].hi = -std::numeric_limits<double>::infinity();
    }
    for (const auto& e : eigs) {
        for (Eigen::Index b = 0; b < nu; ++b) {
            bands[b].lo = std::min(bands[b].lo, e[b]);
            bands[b].hi = std::max(bands[b].hi, e[b]);
        }
    }
    if (bands[0].lo > 1e-6)
        throw SolverError("lowest band does not reach 0 on the grid (min " + std::to_string(bands[0].lo) + ")");
    UnperturbedSpectrum out;
    out.bands.bands = bands;
    out.bands.normalize(kFlatTolerance);
    out.rho = bands.back().hi;
    return out;
}

int default_phi_grid(int transverse_dim) {
    return transverse_dim <= 1 ? kDefaultPhiGrid : 48;
}

EssentialSpectrum essential_spectrum_at(const PeriodicGraphSpec& spec, std::span<const double> theta, int phi_grid) {
    const int D = spec.dim_total();
    const int d = static_cast<int>(theta.size());
    if (d < 1 || d >= D) throw std::invalid_argument("theta must have d components with 1 <= d < D");
    const auto phis = tensor_grid(torus_grid(phi_grid), D - d);
    const auto nu = static_cast<Eigen::Index>(spec.vertex_count());
    std::vector<Band> branch(nu, Band{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()});
    std::vector<double> q(D);
    std::copy(theta.begin(), theta.end(), q.begin());
    for (const auto& phi : phis) {
        std::copy(phi.begin(), phi.end(), q.begin() + d);
        const auto e = assemble_full_fiber(spec, q).eigenvalues();
        for (Eigen::Index b = 0; b < nu; ++b) {
            branch[b].lo = std::min(branch[b].lo, e[b]);
            branch[b].hi = std::max(branch[b].hi, e[b]);
        }
    }
    EssentialSpectrum out;
    out.intervals = union_of(branch, kFlatTolerance);
    out.m_minus = out.intervals.bands.front().lo;
    out.m_plus = 0.0;
    for (const auto& b : out.intervals.bands) out.m_plus = std::max(out.m_plus, b.hi);
    return out;
}

} // namespace guided
