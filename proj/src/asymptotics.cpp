#include "guided/asymptotics.hpp"

#include "guided/errors.hpp"
#include "guided/floquet.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

namespace guided {

namespace {

double phase(const std::vector<int>& tau, std::span<const double> theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < tau.size(); ++i) s += tau[i] * theta[i];
    return s;
}

int extremum_grid(int d) {
    return d == 1 ? 401 : (d == 2 ? 101 : 41);
}

} // namespace

double AsymptoticProfile::operator()(std::span<const double> theta) const {
    double w = contact_mass;
    for (const auto& e : edges) w -= e.multiplicity * std::cos(phase(e.tau_long, theta)) * f[e.from] * f[e.to];
    return w;
}

double AsymptoticProfile::omega(std::span<const double> theta) const {
    double w = 0.0;
    for (const auto& e : edges) {
        if (std::all_of(e.tau_long.begin(), e.tau_long.end(), [](int x) { return x == 0; })) continue;
        w -= e.multiplicity * std::cos(phase(e.tau_long, theta)) * f[e.from] * f[e.to];
    }
    return w;
}

std::vector<int> degenerate_indices(const GuideLaplacian& gl) {
    std::vector<int> out;
    const double scale = std::max(1.0, gl.zeta.empty() ? 1.0 : gl.zeta.front());
    for (std::size_t j = 0; j < gl.zeta.size(); ++j) {
        const bool prev = j > 0 && std::abs(gl.zeta[j] - gl.zeta[j - 1]) <= 1e-9 * scale;
        const bool next = j + 1 < gl.zeta.size() && std::abs(gl.zeta[j] - gl.zeta[j + 1]) <= 1e-9 * scale;
        if (prev || next) out.push_back(static_cast<int>(j) + 1);
    }
    return out;
}

AsymptoticProfile wj_function(const PeriodicGraphSpec& host, const GuideSpec& guide, int j) {
    const auto gl = guide_laplacian(guide);
    if (j < 1 || j > gl.p) throw ValidationError("eigenvalue index j out of range 1..p");
    const auto degenerate = degenerate_indices(gl);
    if (std::find(degenerate.begin(), degenerate.end(), j) != degenerate.end())
        throw ValidationError("zeta_" + std::to_string(j) + " is degenerate; the first-order profile needs a simple eigenvalue");

    AsymptoticProfile prof;
    prof.j = j;
    prof.zeta = gl.zeta[j - 1];
    prof.f = gl.zeta_vectors[j - 1].normalized();
    for (Eigen::Index i = 0; i < prof.f.size(); ++i) {
        if (std::abs(prof.f[i]) > 1e-12) {
            if (prof.f[i] < 0.0) prof.f = -prof.f;
            break;
        }
    }

    const int d = guide.dim_guide();
    double contact_max = 0.0;
    for (std::size_t g : gl.contact) {
        const auto& att = guide.attachments()[*guide.attachment_of(g)];
        const std::size_t q = host.vertex_index(att.lattice_vertex);
        prof.contact_mass += host.degree(q) * prof.f[g] * prof.f[g];
        contact_max = std::max(contact_max, std::abs(prof.f[g]));
        for (const auto& oe : host.oriented_edges()) {
            if (oe.from != q) continue;
            const auto split = split_index(oe.index, d);
            std::vector<int> target = att.transverse_offset;
            for (std::size_t k = 0; k < target.size(); ++k) target[k] += split.transverse[k];
            for (std::size_t h : gl.contact) {
                const auto& other = guide.attachments()[*guide.attachment_of(h)];
                if (host.vertex_index(other.lattice_vertex) == oe.to && other.transverse_offset == target)
                    prof.edges.push_back({g, h, split.longitudinal, oe.multiplicity});
            }
        }
    }
    prof.flat = contact_max < 1e-9;

    prof.w_minus = std::numeric_limits<double>::infinity();
    prof.w_plus = -std::numeric_limits<double>::infinity();
    const auto axis = torus_grid(extremum_grid(d));
    std::vector<double> argmin, argmax;
    for (const auto& theta : tensor_grid(axis, d)) {
        const double w = prof(theta);
        if (w < prof.w_minus) {
            prof.w_minus = w;
            argmin = theta;
        }
        if (w > prof.w_plus) {
            prof.w_plus = w;
            argmax = theta;
        }
    }
    if (d == 1) {
        const double h = 2.0 * std::numbers::pi / (axis.size() - 1);
        for (int sense : {+1, -1}) {
            const double centre = sense > 0 ? argmin[0] : argmax[0];
            auto obj = [&](double t) {
                const double th[1] = {t};
                return sense * prof(th);
            };
            std::uintmax_t iterations = 100;
            const auto r = boost::math::tools::brent_find_minima(obj, centre - h, centre + h, 52, iterations);
            if (sense > 0)
                prof.w_minus = std::min(prof.w_minus, r.second);
            else
                prof.w_plus = std::max(prof.w_plus, -r.second);
        }
    }
    prof.w_dot = prof.w_plus - prof.w_minus;
    return prof;
}

PredictedEdges predicted_band_edges(const AsymptoticProfile& profile, double t) {
    if (t < 1.0) throw std::invalid_argument("t must be >= 1");
    if (profile.flat) return {t * profile.zeta, t * profile.zeta};
    return {t * profile.zeta + profile.w_minus, t * profile.zeta + profile.w_plus};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
        if (!(y[i] > 0.0) || !(x[i] > 0.0)) continue;
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return std::numeric_limits<double>::quiet_NaN();
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

ConvergenceStudy convergence_study(const PeriodicGraphSpec& host, const GuideSpec& guide, int j,
                                   const std::vector<int>& t_list, const SweepOptions& options) {
    if (t_list.size() < 2) throw ValidationError("t list needs at least two entries");
    if (!std::is_sorted(t_list.begin(), t_list.end()) ||
        std::adjacent_find(t_list.begin(), t_list.end()) != t_list.end())
        throw ValidationError("t list must be strictly ascending");
    if (t_list.front() < 1) throw ValidationError("t values must be >= 1");

    ConvergenceStudy study;
    study.profile = wj_function(host, guide, j);
    std::vector<double> ts, rlo, rhi, rmax;
    for (int t : t_list) {
        const GuideSpec scaled = guide.scaled(t);
        const auto trace = sweep(host, scaled, options);
        const auto bands = full_index_bands(trace);
        ConvergenceRow row;
        row.t = t;
        const auto pred = predicted_band_edges(study.profile, t);
        row.predicted_lo = pred.lo;
        row.predicted_hi = pred.hi;
        if (static_cast<int>(bands.size()) >= j) {
            row.found = true;
            row.measured_lo = bands[j - 1].lo;
            row.measured_hi = bands[j - 1].hi;
            row.width = row.measured_hi - row.measured_lo;
            row.residual_lo = std::abs(row.measured_lo - pred.lo);
            row.residual_hi = std::abs(row.measured_hi - pred.hi);
            ts.push_back(t);
            rlo.push_back(row.residual_lo);
            rhi.push_back(row.residual_hi);
            rmax.push_back(std::max(row.residual_lo, row.residual_hi));
        }
        study.rows.push_back(row);
    }
    study.slope_lo = loglog_slope(ts, rlo);
    study.slope_hi = loglog_slope(ts, rhi);
    study.slope_max = loglog_slope(ts, rmax);
    return study;
}

std::vector<ComponentBounds> guide_eigenvalue_bounds(const GuideLaplacian& gl) {
    std::vector<ComponentBounds> out;
    const auto n = gl.laplacian.rows();
    // Components from the nonzero pattern of the Laplacian.
    std::vector<int> label(n, -1);
    int count = 0;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (label[s] >= 0) continue;
        std::vector<Eigen::Index> stack{s};
        label[s] = count;
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            for (Eigen::Index u = 0; u < n; ++u)
                if (u != v && gl.laplacian(v, u) != 0.0 && label[u] < 0) {
                    label[u] = count;
                    stack.push_back(u);
                }
        }
        ++count;
    }
    for (int c = 0; c < count; ++c) {
        std::vector<Eigen::Index> members;
        for (Eigen::Index v = 0; v < n; ++v)
            if (label[v] == c) members.push_back(v);
        const auto m = static_cast<Eigen::Index>(members.size());
        if (m < 2) continue;
        Eigen::MatrixXd block(m, m);
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index k = 0; k < m; ++k) block(i, k) = gl.laplacian(members[i], members[k]);
        const Eigen::VectorXd ev = symmetric_eigenvalues(block);
        ComponentBounds b;
        b.component = c;
        b.size = static_cast<int>(m);
        b.zeta_1 = ev[m - 1];
        b.zeta_p = ev[1];
        const double nu = static_cast<double>(m);
        const Eigen::VectorXd deg = block.diagonal();
        double adj_max = -std::numeric_limits<double>::infinity();
        double adj_min = std::numeric_limits<double>::infinity();
        double nonadj_min = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i)
            for (Eigen::Index k = i + 1; k < m; ++k) {
                const double s = deg[i] + deg[k];
                if (block(i, k) != 0.0) {
                    adj_max = std::max(adj_max, s);
                    adj_min = std::min(adj_min, s);
                } else {
                    nonadj_min = std::min(nonadj_min, s);
                }
            }
        auto check = [&](std::string name, double lhs, double rhs) {
            const double margin = rhs - lhs;
            b.checks.push_back({std::move(name), lhs, rhs, margin >= -1e-9 * std::max(1.0, std::abs(rhs)), margin});
        };
        check("zeta_1_lower", nu / (nu - 1.0) * deg.maxCoeff(), b.zeta_1);
        check("zeta_1_upper", b.zeta_1, adj_max);
        check("zeta_p_lower", adj_min - (nu - 2.0), b.zeta_p);
        if (std::isfinite(nonadj_min)) check("zeta_p_lower_nonadjacent", nonadj_min - (nu - 2.0), b.zeta_p);
        check("zeta_p_upper", b.zeta_p, nu / (nu - 1.0) * deg.minCoeff());
        out.push_back(std::move(b));
    }
    return out;
}

} // namespace guided
