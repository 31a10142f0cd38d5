#include "guided/feshbach.hpp"

#include "guided/errors.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace guided {

namespace {

constexpr int kScanSamples = 64;
constexpr double kRootTolerance = 1e-12;

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(9);
    os << x;
    return os.str();
}

// Bracketed root of f on [a, b] with f(a), f(b) of opposite signs.
template <class F>
double bracketed_root(F f, double a, double b) {
    std::uintmax_t iterations = 200;
    auto tol = [](double x, double y) { return std::abs(x - y) <= kRootTolerance * std::max(1.0, std::abs(x)); };
    const auto r = boost::math::tools::toms748_solve(f, a, b, tol, iterations);
    return 0.5 * (r.first + r.second);
}

// Cosine-clustered interior samples of (a, b).
std::vector<double> scan_points(double a, double b) {
    std::vector<double> x(kScanSamples);
    const double shrink = 1e-10 * std::max(1.0, std::abs(b - a));
    for (int k = 0; k < kScanSamples; ++k) {
        const double s = 0.5 * (1.0 - std::cos(std::numbers::pi * k / (kScanSamples - 1)));
        x[k] = a + shrink + (b - a - 2.0 * shrink) * s;
    }
    return x;
}

// Intervals of (lo, hi) on which Q is finite and has the given sign.
std::vector<std::pair<double, double>> signed_pieces(const ContactPotential& q, double lo, double hi, int sign) {
    std::vector<double> cuts{lo};
    for (Eigen::Index i = 0; i < q.poles().size(); ++i)
        if (q.poles()[i] > lo && q.poles()[i] < hi) cuts.push_back(q.poles()[i]);
    cuts.push_back(hi);

    std::vector<std::pair<double, double>> pieces;
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
        const double a = cuts[c];
        const double b = cuts[c + 1];
        if (b - a <= 0.0) continue;
        const auto xs = scan_points(a, b);
        std::vector<double> zeros{a};
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const auto qa = q(xs[k]);
            const auto qb = q(xs[k + 1]);
            if (!qa || !qb) continue;
            if (*qa == 0.0) {
                zeros.push_back(xs[k]);
            } else if ((*qa < 0.0) != (*qb < 0.0) && *qb != 0.0) {
                zeros.push_back(bracketed_root([&](double x) { return q(x).value_or(0.0); }, xs[k], xs[k + 1]));
            }
        }
        zeros.push_back(b);
        for (std::size_t k = 0; k + 1 < zeros.size(); ++k) {
            const double mid = 0.5 * (zeros[k] + zeros[k + 1]);
            const auto qm = q(mid);
            if (qm && sign * *qm > 0.0 && zeros[k + 1] > zeros[k]) pieces.emplace_back(zeros[k], zeros[k + 1]);
        }
    }
    return pieces;
}

// Branch s = +1: g = lambda - sqrt(4+Q^2), Q > 0, lambda > 4. Branch s = -1: g = lambda + sqrt(4+Q^2), Q < 0, lambda < 4.
struct Branch {
    int sign;
    double lo;
    double hi;
};

Branch branch_for(const ContactPotential& q, bool below) {
    return below ? Branch{-1, 0.0, 4.0} : Branch{+1, 4.0, q.spectral_upper_bound()};
}

std::optional<double> branch_function(const ContactPotential& q, double lambda, int sign) {
    const auto v = q(lambda);
    if (!v) return std::nullopt;
    return lambda - sign * std::sqrt(4.0 + (*v) * (*v));
}

std::vector<double> solve_branch(const ContactPotential& q, double theta, bool below) {
    const double target = 4.0 - 2.0 * std::cos(theta);
    const Branch br = branch_for(q, below);
    const double missing = br.sign > 0 ? -1e300 : 1e300;
    std::vector<double> roots;
    for (const auto& [a, b] : signed_pieces(q, br.lo, br.hi, br.sign)) {
        auto f = [&](double x) { return branch_function(q, x, br.sign).value_or(missing) - target; };
        const auto xs = scan_points(a, b);
        for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
            const double fa = f(xs[k]);
            const double fb = f(xs[k + 1]);
            if (fa == 0.0) {
                roots.push_back(xs[k]);
            } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
                roots.push_back(bracketed_root(f, xs[k], xs[k + 1]));
            }
        }
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::vector<Band> branch_bands(const ContactPotential& q, bool below) {
    const Branch br = branch_for(q, below);
    const double missing = br.sign > 0 ? -1e300 : 1e300;
    std::vector<Band> out;
    for (const auto& [a, b] : signed_pieces(q, br.lo, br.hi, br.sign)) {
        auto g = [&](double x) { return branch_function(q, x, br.sign).value_or(missing); };
        const auto xs = scan_points(a, b);
        std::vector<double> cuts{a};
        for (double level : {2.0, 6.0}) {
            for (std::size_t k = 0; k + 1 < xs.size(); ++k) {
                const double fa = g(xs[k]) - level;
                const double fb = g(xs[k + 1]) - level;
                if ((fa < 0.0) != (fb < 0.0))
                    cuts.push_back(bracketed_root([&](double x) { return g(x) - level; }, xs[k], xs[k + 1]));
            }
        }
        cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (cuts[k + 1] <= cuts[k]) continue;
            const double gm = g(0.5 * (cuts[k] + cuts[k + 1]));
            if (gm < 2.0 || gm > 6.0) continue;
            if (!out.empty() && std::abs(out.back().hi - cuts[k]) <= 1e-12 * std::max(1.0, cuts[k]))
                out.back().hi = cuts[k + 1];
            else
                out.push_back({cuts[k], cuts[k + 1], false, 1});
        }
    }
    return out;
}

} // namespace

ContactPotential::ContactPotential(Eigen::MatrixXd component_laplacian, Eigen::Index contact)
    : lap_(std::move(component_laplacian)), contact_(contact) {
    if (lap_.rows() != lap_.cols() || contact_ < 0 || contact_ >= lap_.rows())
        throw std::invalid_argument("contact potential needs a square Laplacian and a valid contact");
    const Eigen::Index n = lap_.rows();
    Eigen::MatrixXd dirichlet(n - 1, n - 1);
    for (Eigen::Index i = 0, ii = 0; i < n; ++i) {
        if (i == contact_) continue;
        for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
            if (j == contact_) continue;
            dirichlet(ii, jj++) = lap_(i, j);
        }
        ++ii;
    }
    poles_ = symmetric_eigenvalues(dirichlet);
}

std::optional<double> ContactPotential::schur(double lambda) const {
    const Eigen::Index n = lap_.rows();
    if (n == 1) return lap_(0, 0);
    Eigen::MatrixXd dirichlet(n - 1, n - 1);
    Eigen::VectorXd b(n - 1);
    for (Eigen::Index i = 0, ii = 0; i < n; ++i) {
        if (i == contact_) continue;
        b[ii] = lap_(i, contact_);
        for (Eigen::Index j = 0, jj = 0; j < n; ++j) {
            if (j == contact_) continue;
            dirichlet(ii, jj++) = lap_(i, j);
        }
        ++ii;
    }
    dirichlet.diagonal().array() -= lambda;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(dirichlet);
    if (!lu.isInvertible() || lu.rcond() < 1e-14) return std::nullopt;
    return lap_(contact_, contact_) - b.dot(lu.solve(b));
}

std::optional<double> ContactPotential::operator()(double lambda) const {
    const double scale = std::max(1.0, std::abs(lambda));
    for (Eigen::Index i = 0; i < poles_.size(); ++i)
        if (std::abs(lambda - poles_[i]) <= 1e-13 * scale) return std::nullopt;
    const Eigen::Index n = lap_.rows();
    Eigen::MatrixXd a = lap_;
    for (Eigen::Index i = 0; i < n; ++i)
        if (i != contact_) a(i, i) -= lambda;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.isInvertible() && lu.rcond() > 1e-12) {
        const Eigen::VectorXd x = lu.solve(Eigen::VectorXd::Unit(n, contact_));
        if (x[contact_] != 0.0) return 1.0 / x[contact_];
    }
    return schur(lambda);
}

double ContactPotential::spectral_upper_bound() const {
    double row = 0.0;
    for (Eigen::Index i = 0; i < lap_.rows(); ++i) row = std::max(row, lap_.row(i).cwiseAbs().sum());
    return 2.0 * (4.0 + row) + 1.0;
}

ContactPotential q_potential(const GuideSpec& guide, std::string_view contact_vertex) {
    const std::size_t c = guide.vertex_index(contact_vertex);
    if (!guide.is_attached(c)) throw ValidationError("vertex '" + std::string(contact_vertex) + "' is not attached");
    const auto labels = guide.component_labels();
    std::vector<std::size_t> members;
    for (std::size_t g = 0; g < guide.vertex_count(); ++g) {
        if (labels[g] != labels[c]) continue;
        if (g != c && guide.is_attached(g))
            throw UnsupportedError("guide component has more than one contact vertex");
        members.push_back(g);
    }
    const auto gl = guide_laplacian(guide);
    const auto n = static_cast<Eigen::Index>(members.size());
    Eigen::MatrixXd block(n, n);
    Eigen::Index contact = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (members[i] == c) contact = i;
        for (Eigen::Index j = 0; j < n; ++j) block(i, j) = gl.laplacian(members[i], members[j]);
    }
    return ContactPotential(std::move(block), contact);
}

std::optional<double> point_potential_eigenvalue(double q) {
    if (q == 0.0) return std::nullopt;
    const double r = std::sqrt(4.0 + q * q);
    return q > 0.0 ? 2.0 + r : 2.0 - r;
}

std::optional<double> dispersion_function(const ContactPotential& q, double lambda) {
    const auto v = q(lambda);
    if (!v) return std::nullopt;
    return lambda - std::sqrt(4.0 + (*v) * (*v));
}

std::vector<double> dispersion_solve(const ContactPotential& q, double theta) {
    return solve_branch(q, theta, false);
}

std::vector<double> dispersion_solve_below(const ContactPotential& q, double theta) {
    return solve_branch(q, theta, true);
}

std::vector<Band> exact_band_set(const ContactPotential& q, bool below) {
    return branch_bands(q, below);
}

void require_exact_support(const PeriodicGraphSpec& host, const GuideSpec& guide) {
    const char* advice = "; use the bands command (truncated-cylinder solver) instead";
    bool square = host.dim_total() == 2 && host.vertex_count() == 1 && host.edges().size() == 2 &&
                  guide.dim_guide() == 1;
    if (square) {
        std::set<IndexVector> seen;
        for (const auto& e : host.edges()) {
            if (e.multiplicity != 1) square = false;
            const IndexVector& t = e.index;
            seen.insert(t < -t ? -t : t);
        }
        square = square && seen == std::set<IndexVector>{IndexVector{0, 1}, IndexVector{1, 0}};
    }
    if (!square) throw UnsupportedError(std::string("exact solver requires the square-lattice host with d = 1") + advice);
    if (guide.empty()) throw UnsupportedError(std::string("exact solver requires a nonempty guide") + advice);
    if (guide.component_count() != 1 || guide.attachments().size() != 1)
        throw UnsupportedError(std::string("exact solver requires a single guide component with one contact") + advice);
}

GuidedSpectrum guided_spectrum_exact(const PeriodicGraphSpec& host, const GuideSpec& guide, int grid) {
    require_exact_support(host, guide);
    const auto q = q_potential(guide, guide.attachments().front().guide_vertex);
    GuidedSpectrum out;
    out.exact = true;
    out.indexed = exact_band_set(q, false);
    std::reverse(out.indexed.begin(), out.indexed.end());
    auto below = exact_band_set(q, true);
    std::reverse(below.begin(), below.end());
    for (const auto& b : below) {
        out.indexed.push_back(b);
        out.notes.push_back("band [" + fmt(b.lo) + ", " + fmt(b.hi) + "] lies below the essential spectrum (Q < 0)");
    }

    int monotone_failures = 0;
    for (const auto& b : out.indexed) {
        const int branch = b.hi <= 4.0 ? -1 : 1;
        int sign = 0;
        double prev = 0.0;
        for (int k = 0; k <= kScanSamples; ++k) {
            const double x = b.lo + (b.hi - b.lo) * (0.001 + 0.998 * k / kScanSamples);
            const double gx = branch_function(q, x, branch).value_or(0.0);
            if (k > 0) {
                const int s = gx > prev ? 1 : (gx < prev ? -1 : 0);
                if (sign == 0) sign = s;
                if (s != sign) {
                    ++monotone_failures;
                    out.notes.push_back("dispersion function is not monotone on [" + fmt(b.lo) + ", " + fmt(b.hi) + "]");
                    break;
                }
            }
            prev = gx;
        }
    }
    out.certificates.push_back({"monotone_dispersion", monotone_failures == 0, -static_cast<double>(monotone_failures),
                                "sampled sign of dg/dlambda on every band"});

    double worst = 0.0;
    for (double theta : torus_grid(grid)) {
        auto roots = dispersion_solve(q, theta);
        const auto lower = dispersion_solve_below(q, theta);
        roots.insert(roots.end(), lower.begin(), lower.end());
        for (double root : roots) {
            double dist = std::numeric_limits<double>::infinity();
            for (const auto& b : out.indexed)
                dist = std::min(dist, root < b.lo ? b.lo - root : (root > b.hi ? root - b.hi : 0.0));
            worst = std::max(worst, dist);
        }
    }
    out.certificates.push_back({"grid_consistency", worst <= 1e-8, -worst, "every grid root lies in a band"});

    const auto gl = guide_laplacian(guide);
    for (const auto& f : flat_bands(gl)) {
        out.flat_bands.push_back({f.value, f.multiplicity, true, true});
        out.bands.bands.push_back({f.value, f.value, true, f.multiplicity});
    }
    for (const auto& b : out.indexed) out.bands.bands.push_back(b);
    out.bands.normalize(kFlatTolerance);

    // Alternative flat-band characterisations, compared against the guide criterion.
    auto is_flat = [&](double v) {
        return std::any_of(out.flat_bands.begin(), out.flat_bands.end(),
                           [&](const FlatValue& f) { return std::abs(f.value - v) < 1e-8 * std::max(1.0, v); });
    };
    for (Eigen::Index i = 0; i < q.poles().size(); ++i) {
        if (!is_flat(q.poles()[i]))
            out.notes.push_back("Dirichlet eigenvalue " + fmt(q.poles()[i]) +
                                " is not a flat band (no guide eigenvector vanishing on the contact set)");
    }
    const double contact_entry = q.laplacian()(q.contact(), q.contact());
    if (!is_flat(contact_entry))
        out.notes.push_back("contact-projected guide Laplacian eigenvalue " + fmt(contact_entry) +
                            " is not a flat band");
    for (const auto& f : out.flat_bands) {
        if (std::abs(f.value - contact_entry) > 1e-8 * std::max(1.0, f.value))
            out.notes.push_back("flat band " + fmt(f.value) +
                                " is not an eigenvalue of the contact-projected guide Laplacian");
    }
    return out;
}

HermitianMatrix feshbach_map(const PeriodicGraphSpec& host, const GuideSpec& guide, std::span<const double> theta,
                             double lambda, const CylinderWindow& window) {
    const CylinderLayout layout(host, guide, window);
    const Eigen::Index hs = layout.host_size();
    Eigen::MatrixXcd f = assemble_host_part(host, guide, theta, window).matrix().topLeftCorner(hs, hs);
    f.diagonal().array() -= lambda;
    if (!guide.empty()) {
        const auto gl = guide_laplacian(guide);
        const auto nc = static_cast<Eigen::Index>(gl.contact.size());
        const auto ni = static_cast<Eigen::Index>(gl.interior.size());
        Eigen::MatrixXd acc(nc, nc), aci(nc, ni);
        for (Eigen::Index i = 0; i < nc; ++i) {
            for (Eigen::Index j = 0; j < nc; ++j) acc(i, j) = gl.laplacian(gl.contact[i], gl.contact[j]);
            for (Eigen::Index j = 0; j < ni; ++j) aci(i, j) = gl.laplacian(gl.contact[i], gl.interior[j]);
        }
        Eigen::MatrixXd schur = acc;
        if (ni > 0) {
            Eigen::MatrixXd d = gl.dirichlet;
            d.diagonal().array() -= lambda;
            Eigen::FullPivLU<Eigen::MatrixXd> lu(d);
            if (!lu.isInvertible() || lu.rcond() < 1e-14)
                throw SolverError("lambda = " + fmt(lambda) + " is an eigenvalue of the Dirichlet guide block");
            schur -= aci * lu.solve(aci.transpose());
            schur = 0.5 * (schur + schur.transpose()).eval();
        }
        for (Eigen::Index i = 0; i < nc; ++i) {
            const Eigen::Index ri = layout.guide_row(gl.contact[i]);
            for (Eigen::Index j = 0; j < nc; ++j) f(ri, layout.guide_row(gl.contact[j])) += schur(i, j);
        }
    }
    return HermitianMatrix(std::move(f));
}

} // namespace guided
