#include "guided/cylinder.hpp"

#include "guided/errors.hpp"
#include "guided/floquet.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace guided {

const char* to_string(Boundary b) {
    return b == Boundary::periodic ? "periodic" : "dirichlet";
}

Boundary parse_boundary(std::string_view s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "dirichlet") return Boundary::dirichlet;
    throw ValidationError("boundary must be 'periodic' or 'dirichlet'");
}

CylinderWindow default_window(int transverse_dim) {
    return CylinderWindow{transverse_dim <= 1 ? 50 : 12, Boundary::periodic};
}

CylinderLayout::CylinderLayout(const PeriodicGraphSpec& host, const GuideSpec& guide, const CylinderWindow& window)
    : window_(window), k_(host.dim_total() - guide.dim_guide()), nu_(host.vertex_count()) {
    const int W = window_.half_width;
    if (W < 1) throw ValidationError("window half-width must be >= 1");
    for (const auto& e : host.edges()) {
        const auto split = split_index(e.index, guide.dim_guide());
        for (int x : split.transverse) {
            if (std::abs(x) > W) throw ValidationError("window too small: W < max transverse index magnitude");
        }
    }
    cells_ = 1;
    for (int i = 0; i < k_; ++i) cells_ *= 2 * W + 1;
    host_size_ = cells_ * static_cast<Eigen::Index>(nu_);
    Eigen::Index next = host_size_;
    guide_rows_.resize(guide.vertex_count());
    for (std::size_t g = 0; g < guide.vertex_count(); ++g) {
        if (auto a = guide.attachment_of(g)) {
            const auto& att = guide.attachments()[*a];
            for (int x : att.transverse_offset) {
                if (std::abs(x) > W) throw ValidationError("window too small: attachment offset outside the window");
            }
            guide_rows_[g] = *host_row(host.vertex_index(att.lattice_vertex), att.transverse_offset);
            contact_rows_.push_back(guide_rows_[g]);
        } else {
            guide_rows_[g] = next++;
        }
    }
    size_ = next;
}

std::optional<Eigen::Index> CylinderLayout::host_row(std::size_t q, std::span<const int> cell) const {
    const int W = window_.half_width;
    const int span = 2 * W + 1;
    Eigen::Index linear = 0;
    Eigen::Index stride = 1;
    for (int i = 0; i < k_; ++i) {
        int c = cell[i];
        if (c < -W || c > W) {
            if (window_.boundary == Boundary::dirichlet) return std::nullopt;
            c = ((c + W) % span + span) % span - W;
        }
        linear += (c + W) * stride;
        stride *= span;
    }
    return linear * static_cast<Eigen::Index>(nu_) + static_cast<Eigen::Index>(q);
}

std::vector<int> CylinderLayout::cell_of(Eigen::Index r) const {
    const int W = window_.half_width;
    const int span = 2 * W + 1;
    Eigen::Index linear = r / static_cast<Eigen::Index>(nu_);
    std::vector<int> cell(k_);
    for (int i = 0; i < k_; ++i) {
        cell[i] = static_cast<int>(linear % span) - W;
        linear /= span;
    }
    return cell;
}

bool CylinderLayout::in_shell(Eigen::Index r) const {
    if (!is_host_row(r)) return false;
    const int W = window_.half_width;
    const int inner = W - static_cast<int>(std::ceil(0.2 * W));
    const auto cell = cell_of(r);
    return std::any_of(cell.begin(), cell.end(), [&](int c) { return std::abs(c) > inner; });
}

namespace {

struct Parts {
    bool non_bridges;
    bool bridges;
    bool guide;
};

HermitianMatrix assemble(const PeriodicGraphSpec& host, const GuideSpec& guide, std::span<const double> theta,
                         const CylinderWindow& window, Parts parts) {
    const int d = guide.dim_guide();
    if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("theta must have d components");
    const CylinderLayout layout(host, guide, window);
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(layout.size(), layout.size());

    if (parts.non_bridges || parts.bridges) {
        const int W = window.half_width;
        const int k = layout.transverse_dim();
        std::vector<int> cell(k, -W);
        std::vector<int> target(k);
        const Eigen::Index cells = layout.host_size() / static_cast<Eigen::Index>(host.vertex_count());
        for (Eigen::Index c = 0; c < cells; ++c) {
            for (const auto& oe : host.oriented_edges()) {
                const bool bridge = is_bridge(oe.index, d);
                if ((bridge && !parts.bridges) || (!bridge && !parts.non_bridges)) continue;
                double phase = 0.0;
                for (int i = 0; i < d; ++i) phase += oe.index[i] * theta[i];
                for (int i = 0; i < k; ++i) target[i] = cell[i] + oe.index[d + i];
                const Eigen::Index r = *layout.host_row(oe.from, cell);
                m(r, r) += oe.multiplicity;
                if (auto t = layout.host_row(oe.to, target))
                    m(r, *t) -= static_cast<double>(oe.multiplicity) * std::polar(1.0, phase);
            }
            for (int i = 0; i < k; ++i) {
                if (++cell[i] <= W) break;
                cell[i] = -W;
            }
        }
    }
    if (parts.guide) {
        for (const auto& e : guide.edges()) {
            const Eigen::Index a = layout.guide_row(guide.vertex_index(e.u));
            const Eigen::Index b = layout.guide_row(guide.vertex_index(e.v));
            m(a, a) += e.multiplicity;
            m(b, b) += e.multiplicity;
            m(a, b) -= e.multiplicity;
            m(b, a) -= e.multiplicity;
        }
    }
    return HermitianMatrix(std::move(m));
}

} // namespace

HermitianMatrix assemble_truncated_fiber(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                         std::span<const double> theta, const CylinderWindow& window) {
    return assemble(host, guide, theta, window, {true, true, true});
}

HermitianMatrix assemble_host_part(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                   std::span<const double> theta, const CylinderWindow& window) {
    return assemble(host, guide, theta, window, {true, true, false});
}

HermitianMatrix assemble_guide_part(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                    const CylinderWindow& window) {
    const std::vector<double> zero(guide.dim_guide(), 0.0);
    return assemble(host, guide, zero, window, {false, false, true});
}

HermitianMatrix assemble_bridge_deleted(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                        const CylinderWindow& window) {
    const std::vector<double> zero(guide.dim_guide(), 0.0);
    return assemble(host, guide, zero, window, {true, false, true});
}

HermitianMatrix assemble_bridge_operator(const PeriodicGraphSpec& host, const GuideSpec& guide,
                                         std::span<const double> theta, const CylinderWindow& window) {
    return assemble(host, guide, theta, window, {false, true, false});
}

GuideLaplacian guide_laplacian(const GuideSpec& guide) {
    if (guide.empty()) throw ValidationError("guide has no vertices");
    const auto n = static_cast<Eigen::Index>(guide.vertex_count());
    GuideLaplacian gl;
    gl.laplacian = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : guide.edges()) {
        const auto a = static_cast<Eigen::Index>(guide.vertex_index(e.u));
        const auto b = static_cast<Eigen::Index>(guide.vertex_index(e.v));
        gl.laplacian(a, a) += e.multiplicity;
        gl.laplacian(b, b) += e.multiplicity;
        gl.laplacian(a, b) -= e.multiplicity;
        gl.laplacian(b, a) -= e.multiplicity;
    }
    for (std::size_t g = 0; g < guide.vertex_count(); ++g)
        (guide.is_attached(g) ? gl.contact : gl.interior).push_back(g);
    const auto ni = static_cast<Eigen::Index>(gl.interior.size());
    gl.dirichlet.resize(ni, ni);
    for (Eigen::Index i = 0; i < ni; ++i)
        for (Eigen::Index j = 0; j < ni; ++j) gl.dirichlet(i, j) = gl.laplacian(gl.interior[i], gl.interior[j]);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gl.laplacian);
    if (solver.info() != Eigen::Success) throw SolverError("guide Laplacian eigensolver did not converge");
    gl.eigenvalues = solver.eigenvalues();
    gl.eigenvectors = solver.eigenvectors();
    const double tol = 1e-9 * std::max(1.0, gl.eigenvalues.cwiseAbs().maxCoeff());
    int kernel = 0;
    for (Eigen::Index i = n - 1; i >= 0; --i) {
        if (gl.eigenvalues[i] > tol) {
            gl.zeta.push_back(gl.eigenvalues[i]);
            gl.zeta_vectors.push_back(gl.eigenvectors.col(i));
        } else {
            if (gl.eigenvalues[i] < -tol) throw SolverError("guide Laplacian is not positive semidefinite");
            ++kernel;
        }
    }
    gl.components = guide.component_count();
    if (kernel != gl.components)
        throw SolverError("guide Laplacian kernel dimension " + std::to_string(kernel) +
                          " differs from the component count " + std::to_string(gl.components));
    gl.p = static_cast<int>(n) - gl.components;
    return gl;
}

double shell_mass_fraction(const CylinderLayout& layout, const Eigen::VectorXcd& v) {
    const double total = v.squaredNorm();
    if (total == 0.0) return 0.0;
    double shell = 0.0;
    for (Eigen::Index r = 0; r < layout.host_size(); ++r)
        if (layout.in_shell(r)) shell += std::norm(v[r]);
    return shell / total;
}

double bridge_deleted_essential_sup(const PeriodicGraphSpec& host, int d, int phi_grid) {
    const int D = host.dim_total();
    const auto nu = static_cast<Eigen::Index>(host.vertex_count());
    double sup = -std::numeric_limits<double>::infinity();
    for (const auto& phi : tensor_grid(torus_grid(phi_grid), D - d)) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(nu, nu);
        for (const auto& oe : host.oriented_edges()) {
            if (is_bridge(oe.index, d)) continue;
            double phase = 0.0;
            for (int i = 0; i < D - d; ++i) phase += oe.index[d + i] * phi[i];
            m(oe.from, oe.from) += oe.multiplicity;
            m(oe.from, oe.to) -= static_cast<double>(oe.multiplicity) * std::polar(1.0, phase);
        }
        sup = std::max(sup, HermitianMatrix(std::move(m)).eigenvalues().maxCoeff());
    }
    return sup;
}

MuValues mu_values(const PeriodicGraphSpec& host, const GuideSpec& guide, const CylinderWindow& window, int p) {
    if (window.half_width < 5) throw ValidationError("window too small for the localization test (W >= 5 required)");
    const int k = host.dim_total() - guide.dim_guide();
    MuValues out;
    out.ess_sup = bridge_deleted_essential_sup(host, guide.dim_guide(), default_phi_grid(k));
    const CylinderLayout layout(host, guide, window);
    const auto sys = eigensystem(assemble_bridge_deleted(host, guide, window));
    constexpr double tol_ess = 1e-6;
    for (Eigen::Index i = sys.values.size() - 1; i >= 0; --i) {
        if (sys.values[i] <= out.ess_sup + tol_ess) break;
        if (shell_mass_fraction(layout, sys.vectors.col(i)) < kLocalizationThreshold)
            out.mu_tilde.push_back(sys.values[i]);
    }
    for (int j = 0; j < p; ++j)
        out.mu.push_back(j < static_cast<int>(out.mu_tilde.size()) ? std::max(out.mu_tilde[j], out.ess_sup)
                                                                   : out.ess_sup);
    return out;
}

} // namespace guided
