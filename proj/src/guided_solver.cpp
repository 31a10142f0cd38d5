#include "guided/guided_solver.hpp"

#include "guided/errors.hpp"
#include "guided/parallel.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace guided {

namespace {

constexpr double kHostRankTolerance = 1e-6;

CylinderWindow resolve_window(const PeriodicGraphSpec& host, const GuideSpec& guide, const SweepOptions& options) {
    return options.window ? *options.window : default_window(host.dim_total() - guide.dim_guide());
}

int resolve_phi_grid(const PeriodicGraphSpec& host, const GuideSpec& guide, const SweepOptions& options) {
    return options.phi_grid > 0 ? options.phi_grid : default_phi_grid(host.dim_total() - guide.dim_guide());
}

double snap(double margin, double scale) {
    return std::abs(margin) <= 1e-9 * std::max(1.0, std::abs(scale)) ? 0.0 : margin;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(9);
    os << x;
    return os.str();
}

} // namespace

std::vector<double> DispersionPoint::values() const {
    std::vector<double> out;
    for (const auto& l : levels) out.push_back(l.value);
    return out;
}

std::vector<double> DispersionPoint::dispersive_values() const {
    std::vector<double> out;
    for (const auto& l : levels)
        if (!l.guide_supported) out.push_back(l.value);
    return out;
}

std::vector<double> DispersionPoint::dispersive_values(bool above) const {
    std::vector<double> out;
    for (const auto& l : levels)
        if (!l.guide_supported && (l.value > m_plus) == above) out.push_back(l.value);
    return out;
}

std::size_t DispersionTrace::max_count() const {
    std::size_t n = 0;
    for (const auto& p : points) n = std::max(n, p.levels.size());
    return n;
}

std::size_t DispersionTrace::max_dispersive_count() const {
    std::size_t n = 0;
    for (const auto& p : points) n = std::max(n, p.dispersive_values().size());
    return n;
}

std::size_t DispersionTrace::max_dispersive_count(bool above) const {
    std::size_t n = 0;
    for (const auto& p : points) n = std::max(n, p.dispersive_values(above).size());
    return n;
}

DispersionPoint discrete_spectrum_at(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                     std::span<const double> theta, const SweepOptions& options) {
    const CylinderWindow window = resolve_window(host, guide, options);
    const CylinderLayout layout(host, guide, window);
    const auto ess = essential_spectrum_at(host, theta, resolve_phi_grid(host, guide, options));
    const auto sys = eigensystem(assemble_truncated_fiber(host, guide, theta, window));

    DispersionPoint point;
    point.theta.assign(theta.begin(), theta.end());
    point.m_minus = ess.m_minus;
    point.m_plus = ess.m_plus;

    const Eigen::Index n = sys.values.size();
    const Eigen::Index hs = layout.host_size();
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && sys.values[stop] - sys.values[stop - 1] <=
                               options.eig_tol * std::max(1.0, std::abs(sys.values[stop])))
            ++stop;
        const Eigen::Index m = stop - start;
        const double value = sys.values.segment(start, m).mean();
        const Eigen::MatrixXcd block = sys.vectors.block(0, start, hs, m);
        Eigen::Index rank = 0;
        if (hs > 0) {
            Eigen::JacobiSVD<Eigen::MatrixXcd> svd(block);
            const auto& sv = svd.singularValues();
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv[i] > kHostRankTolerance) ++rank;
        }
        const Eigen::Index compact = m - rank;
        for (Eigen::Index i = 0; i < compact; ++i) point.levels.push_back({value, true});
        if (rank > 0 && ess.intervals.distance(value) > options.tol_ess) {
            double shell = 0.0;
            for (Eigen::Index i = start; i < stop; ++i) shell += shell_mass_fraction(layout, sys.vectors.col(i));
            if (shell < options.localization * static_cast<double>(rank))
                for (Eigen::Index i = 0; i < rank; ++i) point.levels.push_back({value, false});
        }
        start = stop;
    }
    std::stable_sort(point.levels.begin(), point.levels.end(),
                     [](const DiscreteLevel& a, const DiscreteLevel& b) { return a.value > b.value; });
    return point;
}

DispersionTrace sweep(const PeriodicGraphSpec& host, const GuideSpec& guide, const SweepOptions& options) {
    const int d = guide.dim_guide();
    if (options.grid < 2) throw ValidationError("theta grid must have at least 2 points");
    DispersionTrace trace;
    trace.dim_guide = d;
    trace.p = guide.empty() ? 0 : guide_laplacian(guide).p;
    const auto thetas = tensor_grid(torus_grid(options.grid), d);
    trace.points.resize(thetas.size());
    parallel_for(thetas.size(),
                 [&](std::size_t i) { trace.points[i] = discrete_spectrum_at(host, guide, thetas[i], options); });

    if (options.refine && d == 1 && trace.points.size() >= 3) {
        std::vector<DispersionPoint> extra;
        std::vector<std::pair<bool, std::size_t>> branches;
        for (bool above : {true, false})
            for (std::size_t j = 0; j < trace.max_dispersive_count(above); ++j) branches.emplace_back(above, j);
        for (const auto& [above, j] : branches) {
            for (int sense : {+1, -1}) {
                // sense +1 refines the minimum of lambda_j, -1 the maximum.
                std::size_t best = trace.points.size();
                double best_value = std::numeric_limits<double>::infinity();
                for (std::size_t i = 0; i < trace.points.size(); ++i) {
                    const auto v = trace.points[i].dispersive_values(above);
                    if (j < v.size() && sense * v[j] < best_value) {
                        best_value = sense * v[j];
                        best = i;
                    }
                }
                if (best == trace.points.size()) continue;
                const double a = trace.points[best == 0 ? 0 : best - 1].theta[0];
                const double b = trace.points[std::min(best + 1, trace.points.size() - 1)].theta[0];
                std::map<double, DispersionPoint> cache;
                auto objective = [&](double t) {
                    const std::vector<double> th{t};
                    auto it = cache.emplace(t, discrete_spectrum_at(host, guide, th, options)).first;
                    const auto v = it->second.dispersive_values(above);
                    return j < v.size() ? sense * v[j] : std::numeric_limits<double>::infinity();
                };
                std::uintmax_t iterations = 40;
                const auto result = boost::math::tools::brent_find_minima(objective, a, b, 30, iterations);
                if (result.second < best_value) {
                    DispersionPoint pt = cache.at(result.first);
                    pt.refined = true;
                    extra.push_back(std::move(pt));
                }
            }
        }
        for (auto& pt : extra) trace.points.push_back(std::move(pt));
        std::stable_sort(trace.points.begin(), trace.points.end(),
                         [](const DispersionPoint& x, const DispersionPoint& y) { return x.theta[0] < y.theta[0]; });
    }
    return trace;
}

GuidedSpectrum guided_bands(const DispersionTrace& trace, double tol_flat) {
    if (trace.points.empty()) throw ValidationError("dispersion trace is empty");
    GuidedSpectrum out;

    // Guide-supported levels, clustered across theta.
    std::vector<double> compact;
    for (const auto& pt : trace.points)
        for (const auto& l : pt.levels)
            if (l.guide_supported) compact.push_back(l.value);
    std::sort(compact.begin(), compact.end());
    for (std::size_t i = 0; i < compact.size();) {
        std::size_t k = i + 1;
        while (k < compact.size() && compact[k] - compact[k - 1] <= 1e-8 * std::max(1.0, std::abs(compact[k]))) ++k;
        const double lo = compact[i];
        const double hi = compact[k - 1];
        int mult = 0;
        for (const auto& pt : trace.points) {
            int c = 0;
            for (const auto& l : pt.levels)
                if (l.guide_supported && l.value >= lo && l.value <= hi) ++c;
            mult = std::max(mult, c);
        }
        const double value = 0.5 * (lo + hi);
        out.flat_bands.push_back({value, mult, true, false});
        out.bands.bands.push_back({value, value, true, mult});
        i = k;
    }

    std::size_t index = 0;
    for (bool above : {true, false}) {
        const std::size_t count = trace.max_dispersive_count(above);
        for (std::size_t j = 0; j < count; ++j) {
            Band b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), false, 1};
            std::size_t present = 0;
            for (const auto& pt : trace.points) {
                const auto v = pt.dispersive_values(above);
                if (j < v.size()) {
                    b.lo = std::min(b.lo, v[j]);
                    b.hi = std::max(b.hi, v[j]);
                    ++present;
                }
            }
            ++index;
            b.flat = present == trace.points.size() && (b.hi - b.lo) < tol_flat;
            out.indexed.push_back(b);
            out.bands.bands.push_back(b);
            if (b.flat) {
                out.flat_bands.push_back({0.5 * (b.lo + b.hi), 1, false, false});
                out.notes.push_back("band " + std::to_string(index) + " is numerically flat, uncertified");
            }
        }
    }
    std::sort(out.bands.bands.begin(), out.bands.bands.end(), [](const Band& a, const Band& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::sort(out.flat_bands.begin(), out.flat_bands.end(),
              [](const FlatValue& a, const FlatValue& b) { return a.value < b.value; });
    return out;
}

std::vector<FlatBand> flat_bands(const GuideLaplacian& guide) {
    std::vector<FlatBand> out;
    const Eigen::Index n = guide.eigenvalues.size();
    const double scale = std::max(1.0, guide.eigenvalues.cwiseAbs().maxCoeff());
    Eigen::Index start = 0;
    while (start < n) {
        Eigen::Index stop = start + 1;
        while (stop < n && guide.eigenvalues[stop] - guide.eigenvalues[stop - 1] <= 1e-9 * scale) ++stop;
        const Eigen::Index m = stop - start;
        const Eigen::MatrixXd basis = guide.eigenvectors.middleCols(start, m);
        Eigen::MatrixXd restriction(static_cast<Eigen::Index>(guide.contact.size()), m);
        for (std::size_t r = 0; r < guide.contact.size(); ++r)
            restriction.row(static_cast<Eigen::Index>(r)) = basis.row(static_cast<Eigen::Index>(guide.contact[r]));
        Eigen::MatrixXd null_basis;
        if (restriction.rows() == 0) {
            null_basis = basis;
        } else {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(restriction, Eigen::ComputeFullV);
            const auto& sv = svd.singularValues();
            Eigen::Index rank = 0;
            for (Eigen::Index i = 0; i < sv.size(); ++i)
                if (sv[i] > 1e-9) ++rank;
            null_basis = basis * svd.matrixV().rightCols(m - rank);
        }
        if (null_basis.cols() > 0) {
            const double value = guide.eigenvalues.segment(start, m).mean();
            out.push_back({value, static_cast<int>(null_basis.cols()), null_basis});
        }
        start = stop;
    }
    return out;
}

EstimateInputs estimate_inputs(const PeriodicGraphSpec& host, const GuideSpec& guide, const CylinderWindow& window) {
    EstimateInputs in;
    in.rho = unperturbed_bands(host).rho;
    const auto stats = bridge_stats(host, guide);
    in.beta_plus = stats.beta_plus;
    in.beta_01 = stats.beta_01;
    if (!guide.empty()) {
        const auto gl = guide_laplacian(guide);
        in.zeta = gl.zeta;
        in.p = gl.p;
        in.flats = flat_bands(gl);
    }
    in.mu = mu_values(host, guide, window, in.p);
    return in;
}

std::vector<Band> full_index_bands(const DispersionTrace& trace) {
    std::vector<Band> out;
    const std::size_t count = trace.max_count();
    for (std::size_t j = 0; j < count; ++j) {
        Band b{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(), false, 1};
        for (const auto& pt : trace.points) {
            if (j < pt.levels.size()) {
                b.lo = std::min(b.lo, pt.levels[j].value);
                b.hi = std::max(b.hi, pt.levels[j].value);
            }
        }
        out.push_back(b);
    }
    return out;
}

std::vector<Certificate> verify_certificates(const EstimateInputs& in, const DispersionTrace& trace,
                                             GuidedSpectrum& spectrum) {
    std::vector<Certificate> certs;
    const auto bands = full_index_bands(trace);
    const double rho = in.rho;

    const int N = static_cast<int>(trace.max_count());
    certs.push_back({"band_count", N <= in.p, static_cast<double>(in.p - N),
                     "N = " + std::to_string(N) + ", p = " + std::to_string(in.p)});
    int above = 0;
    for (const auto& pt : trace.points) {
        const int c = static_cast<int>(
            std::count_if(pt.levels.begin(), pt.levels.end(), [&](const DiscreteLevel& l) { return l.value > pt.m_plus; }));
        above = std::max(above, c);
    }
    certs.push_back({"band_count_above", above <= in.p, static_cast<double>(in.p - above),
                     "levels above m_+: " + std::to_string(above) + ", p = " + std::to_string(in.p)});

    int n_g = 0;
    for (std::size_t j = 0; j < bands.size(); ++j) {
        const Band& b = bands[j];
        if (b.hi < rho) continue;
        ++n_g;
        const double lo = std::max(b.lo, rho);
        const double hi = b.hi;
        const std::string tag = "[" + std::to_string(j + 1) + "]";
        const std::string part = "part [" + fmt(lo) + ", " + fmt(hi) + "]";
        if (j < in.zeta.size()) {
            const double z = in.zeta[j];
            const double margin = snap(std::min(lo - z, z + rho - hi), hi);
            certs.push_back({"zeta_bracket" + tag, margin >= 0.0, margin,
                             part + " in [" + fmt(z) + ", " + fmt(z + rho) + "]"});
        }
        if (j < in.mu.mu.size()) {
            const double mu = in.mu.mu[j];
            const double margin = snap(std::min(lo - mu, mu + 2.0 * in.beta_plus - hi), hi);
            certs.push_back({"bridge_bracket" + tag, margin >= 0.0, margin,
                             part + " in [" + fmt(mu) + ", " + fmt(mu + 2.0 * in.beta_plus) + "]"});
        }
        const double wmargin = snap(2.0 * in.beta_plus - (hi - lo), hi);
        certs.push_back({"width_bound" + tag, wmargin >= 0.0, wmargin,
                         "width " + fmt(hi - lo) + " <= 2 beta_+ = " + std::to_string(2 * in.beta_plus)});
    }
    const int expected =
        static_cast<int>(std::count_if(in.zeta.begin(), in.zeta.end(), [&](double z) { return z > rho; }));
    certs.push_back({"count_lower_bound", n_g >= expected, static_cast<double>(n_g - expected),
                     "N_g = " + std::to_string(n_g) + ", #{zeta_j > rho} = " + std::to_string(expected)});

    double upper = std::numeric_limits<double>::infinity();
    double lower = std::numeric_limits<double>::infinity();
    for (const auto& pt : trace.points) {
        for (std::size_t j = 0; j < pt.levels.size() && j < in.zeta.size(); ++j) {
            const double l = pt.levels[j].value;
            if (l <= pt.m_plus) break;
            upper = std::min({upper, snap(l - in.zeta[j], l), snap(in.zeta[j] + pt.m_plus - l, l)});
            lower = std::min(lower, snap(l - in.zeta[j] - pt.m_minus, l));
        }
    }
    if (std::isfinite(upper)) {
        certs.push_back({"fiber_bracket", upper >= 0.0, upper, "zeta_j <= lambda_j(theta) <= zeta_j + m_+(theta)"});
        certs.push_back({"fiber_bracket_lower", lower >= 0.0, lower, "zeta_j + m_-(theta) <= lambda_j(theta)"});
    }

    // Flat bands: guide criterion versus theta-independent sweep levels.
    int mismatches = 0;
    std::string detail;
    for (const auto& f : in.flats) {
        auto it = std::find_if(spectrum.flat_bands.begin(), spectrum.flat_bands.end(), [&](const FlatValue& v) {
            return std::abs(v.value - f.value) < 1e-6;
        });
        if (it == spectrum.flat_bands.end() || it->multiplicity != f.multiplicity) {
            ++mismatches;
            detail += "flat value " + fmt(f.value) + " (multiplicity " + std::to_string(f.multiplicity) +
                      ") not reproduced by the sweep; ";
        } else {
            it->certified = true;
        }
    }
    for (const auto& v : spectrum.flat_bands) {
        if (!v.certified) {
            ++mismatches;
            detail += "sweep flat value " + fmt(v.value) + " is numerically flat, uncertified; ";
        }
    }
    certs.push_back({"flat_consistency", mismatches == 0, -static_cast<double>(mismatches),
                     mismatches == 0 ? "all flat bands certified" : detail});
    spectrum.certificates = certs;
    return certs;
}

std::vector<Certificate> verify_certificates(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                             const DispersionTrace& trace, GuidedSpectrum& spectrum,
                                             const CylinderWindow& window) {
    return verify_certificates(estimate_inputs(host, guide, window), trace, spectrum);
}

bool all_passed(const std::vector<Certificate>& certificates) {
    return std::all_of(certificates.begin(), certificates.end(), [](const Certificate& c) { return c.passed; });
}

} // namespace guided
