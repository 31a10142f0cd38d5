#pragma once

// Independent reference computations for the test suites. Nothing here calls the library solvers.

#include "guided/graph_model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

using QFunction = std::function<double(double)>;

// Star: centre attached, p pendants, each edge of multiplicity t.
inline QFunction star_q(int p, double t) {
    return [p, t](double l) { return p * t * l / (l - t); };
}

// Path v0 - v1 - v2 with multiplicity t, contact v0.
inline QFunction path_q(double t) {
    return [t](double l) { return t - t * t * (t - l) / ((2 * t - l) * (t - l) - t * t); };
}

inline double bisect(const std::function<double(double)>& f, double a, double b) {
    double fa = f(a);
    for (int it = 0; it < 200 && b - a > 1e-14 * std::max(1.0, std::abs(a)); ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if ((fm < 0) == (fa < 0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

struct Interval {
    double lo;
    double hi;
};

// Closure of {lambda in (4, ub) : Q > 0, 2 <= lambda - sqrt(4+Q^2) <= 6} by dense scan plus bisection.
inline std::vector<Interval> bands_above(const QFunction& q, double ub, int samples = 200000) {
    auto inside = [&](double l) {
        const double v = q(l);
        if (!std::isfinite(v) || v <= 0) return false;
        const double g = l - std::sqrt(4 + v * v);
        return g >= 2 && g <= 6;
    };
    std::vector<Interval> out;
    const double h = (ub - 4.0) / samples;
    bool prev = false;
    double start = 0;
    for (int k = 1; k <= samples; ++k) {
        const double x = 4.0 + k * h;
        const bool now = inside(x);
        if (now && !prev) start = bisect([&](double l) { return inside(l) ? 1.0 : -1.0; }, x - h, x);
        if (!now && prev) out.push_back({start, bisect([&](double l) { return inside(l) ? -1.0 : 1.0; }, x - h, x)});
        prev = now;
    }
    if (prev) out.push_back({start, ub});
    return out;
}

// Eigenvalues of the chain Laplacian (degree 2 everywhere, n sites, Dirichlet ends) plus Q at the centre.
inline Eigen::VectorXd chain_with_point_potential(int n, double q) {
    Eigen::VectorXd diag = Eigen::VectorXd::Constant(n, 2.0);
    diag[n / 2] += q;
    const Eigen::VectorXd sub = Eigen::VectorXd::Constant(n - 1, -1.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

// Full fiber built straight from the unoriented edge list.
inline Eigen::MatrixXcd full_fiber(const guided::PeriodicGraphSpec& spec, const std::vector<double>& q) {
    const auto n = static_cast<Eigen::Index>(spec.vertex_count());
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
    for (const auto& e : spec.edges()) {
        const auto a = static_cast<Eigen::Index>(spec.vertex_index(e.u));
        const auto b = static_cast<Eigen::Index>(spec.vertex_index(e.v));
        double ph = 0;
        for (std::size_t i = 0; i < q.size(); ++i) ph += e.index[i] * q[i];
        const std::complex<double> z = std::polar(1.0, ph);
        m(a, a) += e.multiplicity;
        m(b, b) += e.multiplicity;
        m(a, b) -= static_cast<double>(e.multiplicity) * z;
        m(b, a) -= static_cast<double>(e.multiplicity) * std::conj(z);
    }
    return m;
}

// Random connected Z^2-periodic quotient with nu <= 4 vertices and indices in [-2, 2]^2.
inline guided::PeriodicGraphSpec random_spec(std::mt19937& rng, int max_vertices = 4) {
    std::uniform_int_distribution<int> nv(1, max_vertices);
    std::uniform_int_distribution<int> ix(-2, 2);
    std::uniform_int_distribution<int> mult(1, 3);
    for (;;) {
        const int n = nv(rng);
        std::vector<guided::QuotientVertex> vs;
        for (int i = 0; i < n; ++i) vs.push_back({"v" + std::to_string(i), std::nullopt});
        std::vector<guided::IndexedEdge> es;
        std::uniform_int_distribution<int> pick(0, n - 1);
        // spanning path with zero index, then two loops generating Z^2, then extras
        for (int i = 0; i + 1 < n; ++i) es.push_back({vs[i].id, vs[i + 1].id, {ix(rng), ix(rng)}, mult(rng)});
        es.push_back({vs[pick(rng)].id, vs[pick(rng)].id, {1, 0}, mult(rng)});
        es.push_back({vs[pick(rng)].id, vs[pick(rng)].id, {0, 1}, mult(rng)});
        std::uniform_int_distribution<int> extra(0, 3);
        for (int k = extra(rng); k > 0; --k) {
            guided::IndexedEdge e{vs[pick(rng)].id, vs[pick(rng)].id, {ix(rng), ix(rng)}, mult(rng)};
            if (e.u == e.v && e.index.is_zero()) continue;
            es.push_back(e);
        }
        try {
            return guided::PeriodicGraphSpec(2, vs, es);
        } catch (const std::invalid_argument&) {
            // duplicate edge drawn; try again
        }
    }
}

// Random connected guide on nu1 vertices, the first one attached to `lattice_vertex` at transverse offset 0.
inline guided::GuideSpec random_guide(std::mt19937& rng, int nu1, const std::string& lattice_vertex = "0",
                                     int max_multiplicity = 3) {
    std::vector<std::string> vs;
    for (int i = 0; i < nu1; ++i) vs.push_back("g" + std::to_string(i));
    std::vector<guided::GuideEdge> es;
    std::uniform_int_distribution<int> mult(1, max_multiplicity);
    for (int i = 1; i < nu1; ++i) {
        std::uniform_int_distribution<int> parent(0, i - 1);
        es.push_back({vs[parent(rng)], vs[i], mult(rng)});
    }
    std::bernoulli_distribution chord(0.3);
    for (int i = 0; i < nu1; ++i)
        for (int j = i + 1; j < nu1; ++j) {
            const bool present = std::any_of(es.begin(), es.end(), [&](const guided::GuideEdge& e) {
                return (e.u == vs[i] && e.v == vs[j]) || (e.u == vs[j] && e.v == vs[i]);
            });
            if (!present && chord(rng)) es.push_back({vs[i], vs[j], mult(rng)});
        }
    return guided::GuideSpec(1, vs, es, {{vs[0], lattice_vertex, {0}}});
}

inline guided::PeriodicGraphSpec square_lattice() {
    return guided::PeriodicGraphSpec(2, {{"0", std::vector<double>{0.0, 0.0}}}, {{"0", "0", {1, 0}, 1}, {"0", "0", {0, 1}, 1}});
}

} // namespace oracle
