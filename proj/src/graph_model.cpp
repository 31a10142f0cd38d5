#include "guided/graph_model.hpp"

#include "guided/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace guided {

namespace {

std::string quoted(std::string_view s) {
    return "'" + std::string(s) + "'";
}

// Integer row reduction; returns true iff the rows span all of Z^D.
bool spans_integer_lattice(std::vector<std::vector<long long>> rows, int D) {
    std::size_t pivot_row = 0;
    long long det = 1;
    for (int col = 0; col < D; ++col) {
        // Euclidean elimination on column col among rows pivot_row..end.
        while (true) {
            std::size_t best = rows.size();
            for (std::size_t r = pivot_row; r < rows.size(); ++r) {
                if (rows[r][col] != 0 && (best == rows.size() || std::llabs(rows[r][col]) < std::llabs(rows[best][col])))
                    best = r;
            }
            if (best == rows.size()) return false;
            std::swap(rows[pivot_row], rows[best]);
            bool reduced = true;
            for (std::size_t r = pivot_row + 1; r < rows.size(); ++r) {
                if (rows[r][col] == 0) continue;
                const long long f = rows[r][col] / rows[pivot_row][col];
                for (int k = col; k < D; ++k) rows[r][k] -= f * rows[pivot_row][k];
                if (rows[r][col] != 0) reduced = false;
            }
            if (reduced) break;
        }
        det *= rows[pivot_row][col];
        ++pivot_row;
    }
    return std::llabs(det) == 1;
}

} // namespace

bool IndexVector::is_zero() const {
    return std::all_of(entries_.begin(), entries_.end(), [](int x) { return x == 0; });
}

IndexVector IndexVector::operator-() const {
    std::vector<int> out(entries_.size());
    std::transform(entries_.begin(), entries_.end(), out.begin(), [](int x) { return -x; });
    return IndexVector(std::move(out));
}

IndexVector IndexVector::operator+(const IndexVector& other) const {
    if (other.size() != size()) throw std::invalid_argument("index vectors of different length");
    std::vector<int> out(entries_.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = entries_[i] + other.entries_[i];
    return IndexVector(std::move(out));
}

PeriodicGraphSpec::PeriodicGraphSpec(int dim_total, std::vector<QuotientVertex> vertices,
                                     std::vector<IndexedEdge> edges)
    : dim_total_(dim_total), vertices_(std::move(vertices)), edges_(std::move(edges)) {
    if (dim_total_ < 1) throw ValidationError("dim_total must be >= 1");
    if (vertices_.empty()) throw ValidationError("quotient graph has no vertices");

    std::set<std::string> ids;
    for (const auto& v : vertices_) {
        if (!ids.insert(v.id).second) throw ValidationError("duplicate quotient vertex id " + quoted(v.id));
        if (v.coords) {
            if (static_cast<int>(v.coords->size()) != dim_total_)
                throw ValidationError("coords of vertex " + quoted(v.id) + " must have length D");
            for (double c : *v.coords) {
                if (!std::isfinite(c) || c < 0.0 || c >= 1.0)
                    throw ValidationError("coords of vertex " + quoted(v.id) + " must lie in [0,1)");
            }
        }
    }

    degrees_.assign(vertices_.size(), 0);
    std::set<std::tuple<std::size_t, std::size_t, IndexVector>> seen;
    for (const auto& e : edges_) {
        const auto a = find_vertex(e.u);
        const auto b = find_vertex(e.v);
        if (!a) throw ValidationError("edge references unknown quotient vertex " + quoted(e.u));
        if (!b) throw ValidationError("edge references unknown quotient vertex " + quoted(e.v));
        if (static_cast<int>(e.index.size()) != dim_total_)
            throw ValidationError("edge " + quoted(e.u) + "-" + quoted(e.v) + " index must have length D");
        if (e.multiplicity < 1)
            throw ValidationError("edge " + quoted(e.u) + "-" + quoted(e.v) + " multiplicity must be >= 1");
        auto key = std::make_tuple(*a, *b, e.index);
        auto rkey = std::make_tuple(*b, *a, -e.index);
        if (seen.count(key) || seen.count(rkey))
            throw ValidationError("edge " + quoted(e.u) + "-" + quoted(e.v) +
                                  " listed twice (reversed edges are implicit)");
        seen.insert(key);
        oriented_.push_back({*a, *b, e.index, e.multiplicity});
        oriented_.push_back({*b, *a, -e.index, e.multiplicity});
        degrees_[*a] += e.multiplicity;
        degrees_[*b] += e.multiplicity;
    }
    for (std::size_t v = 0; v < vertices_.size(); ++v) {
        if (degrees_[v] < 1) throw ValidationError("quotient vertex " + quoted(vertices_[v].id) + " has degree 0");
    }

    // Connectivity of the periodic graph: connected quotient and cycle indices spanning Z^D.
    const std::size_t n = vertices_.size();
    std::vector<std::vector<const OrientedEdge*>> adj(n);
    for (const auto& oe : oriented_) adj[oe.from].push_back(&oe);
    std::vector<std::optional<std::vector<long long>>> potential(n);
    potential[0] = std::vector<long long>(dim_total_, 0);
    std::queue<std::size_t> queue;
    queue.push(0);
    while (!queue.empty()) {
        const std::size_t v = queue.front();
        queue.pop();
        for (const OrientedEdge* oe : adj[v]) {
            if (potential[oe->to]) continue;
            std::vector<long long> p = *potential[v];
            for (int k = 0; k < dim_total_; ++k) p[k] += oe->index[k];
            potential[oe->to] = std::move(p);
            queue.push(oe->to);
        }
    }
    for (std::size_t v = 0; v < n; ++v) {
        if (!potential[v]) throw ValidationError("periodic graph is not connected (quotient graph disconnected)");
    }
    std::vector<std::vector<long long>> cycles;
    for (const auto& oe : oriented_) {
        std::vector<long long> c(dim_total_);
        bool nonzero = false;
        for (int k = 0; k < dim_total_; ++k) {
            c[k] = (*potential[oe.from])[k] + oe.index[k] - (*potential[oe.to])[k];
            nonzero = nonzero || c[k] != 0;
        }
        if (nonzero) cycles.push_back(std::move(c));
    }
    if (!spans_integer_lattice(std::move(cycles), dim_total_))
        throw ValidationError("periodic graph is not connected (edge indices do not generate Z^D)");
}

std::optional<std::size_t> PeriodicGraphSpec::find_vertex(std::string_view id) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i].id == id) return i;
    return std::nullopt;
}

std::size_t PeriodicGraphSpec::vertex_index(std::string_view id) const {
    auto i = find_vertex(id);
    if (!i) throw ValidationError("unknown quotient vertex " + quoted(id));
    return *i;
}

int PeriodicGraphSpec::max_degree() const {
    return *std::max_element(degrees_.begin(), degrees_.end());
}

int PeriodicGraphSpec::max_abs_index() const {
    int m = 0;
    for (const auto& e : edges_)
        for (int x : e.index.entries()) m = std::max(m, std::abs(x));
    return m;
}

GuideSpec::GuideSpec(int dim_guide, std::vector<std::string> vertices, std::vector<GuideEdge> edges,
                     std::vector<Attachment> attachments)
    : dim_guide_(dim_guide), vertices_(std::move(vertices)), edges_(std::move(edges)),
      attachments_(std::move(attachments)) {
    if (dim_guide_ < 1) throw ValidationError("dim_guide must be >= 1");
    std::set<std::string> ids;
    for (const auto& v : vertices_) {
        if (!ids.insert(v).second) throw ValidationError("duplicate guide vertex id " + quoted(v));
    }
    degrees_.assign(vertices_.size(), 0);
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& e : edges_) {
        const auto a = find_vertex(e.u);
        const auto b = find_vertex(e.v);
        if (!a) throw ValidationError("guide edge references unknown guide vertex " + quoted(e.u));
        if (!b) throw ValidationError("guide edge references unknown guide vertex " + quoted(e.v));
        if (e.multiplicity < 1)
            throw ValidationError("guide edge " + quoted(e.u) + "-" + quoted(e.v) + " multiplicity must be >= 1");
        if (seen.count({*a, *b}) || seen.count({*b, *a}))
            throw ValidationError("guide edge " + quoted(e.u) + "-" + quoted(e.v) + " listed twice");
        seen.insert({*a, *b});
        degrees_[*a] += e.multiplicity;
        degrees_[*b] += e.multiplicity;
    }
    attachment_index_.assign(vertices_.size(), std::nullopt);
    for (std::size_t k = 0; k < attachments_.size(); ++k) {
        const auto g = find_vertex(attachments_[k].guide_vertex);
        if (!g)
            throw ValidationError("attachment references unknown guide vertex " +
                                  quoted(attachments_[k].guide_vertex));
        if (attachment_index_[*g]) throw ValidationError("guide vertex " + quoted(vertices_[*g]) + " attached twice");
        attachment_index_[*g] = k;
    }
}

std::optional<std::size_t> GuideSpec::find_vertex(std::string_view id) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i] == id) return i;
    return std::nullopt;
}

std::size_t GuideSpec::vertex_index(std::string_view id) const {
    auto i = find_vertex(id);
    if (!i) throw ValidationError("unknown guide vertex " + quoted(id));
    return *i;
}

std::optional<std::size_t> GuideSpec::attachment_of(std::size_t guide_vertex) const {
    return attachment_index_.at(guide_vertex);
}

std::vector<int> GuideSpec::component_labels() const {
    const std::size_t n = vertices_.size();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges_) {
        const int a = find(static_cast<int>(vertex_index(e.u)));
        const int b = find(static_cast<int>(vertex_index(e.v)));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> labels(n, -1);
    std::map<int, int> relabel;
    for (std::size_t i = 0; i < n; ++i) {
        const int r = find(static_cast<int>(i));
        auto it = relabel.find(r);
        if (it == relabel.end()) it = relabel.emplace(r, static_cast<int>(relabel.size())).first;
        labels[i] = it->second;
    }
    return labels;
}

int GuideSpec::component_count() const {
    const auto labels = component_labels();
    return labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
}

GuideSpec GuideSpec::scaled(int t) const {
    if (t < 1) throw std::invalid_argument("multiplicity scale must be >= 1");
    auto edges = edges_;
    for (auto& e : edges) e.multiplicity *= t;
    return GuideSpec(dim_guide_, vertices_, std::move(edges), attachments_);
}

Problem make_problem(PeriodicGraphSpec host, GuideSpec guide) {
    const int D = host.dim_total();
    const int d = guide.dim_guide();
    if (!(d < D))
        throw ValidationError("d must satisfy d < D (got d=" + std::to_string(d) + ", D=" + std::to_string(D) + ")");

    std::set<std::pair<std::size_t, std::vector<int>>> images;
    for (const auto& a : guide.attachments()) {
        const auto q = host.find_vertex(a.lattice_vertex);
        if (!q) throw ValidationError("guide attachment references unknown quotient vertex " + quoted(a.lattice_vertex));
        if (static_cast<int>(a.transverse_offset.size()) != D - d)
            throw ValidationError("transverse_offset of attachment " + quoted(a.guide_vertex) + " must have length D-d");
        if (!images.insert({*q, a.transverse_offset}).second)
            throw ValidationError("two guide vertices attached to the same cylinder vertex " + quoted(a.lattice_vertex));
    }

    if (!guide.empty()) {
        const auto labels = guide.component_labels();
        std::vector<bool> anchored(guide.component_count(), false);
        for (std::size_t g = 0; g < guide.vertex_count(); ++g)
            if (guide.is_attached(g)) anchored[labels[g]] = true;
        for (std::size_t c = 0; c < anchored.size(); ++c) {
            if (!anchored[c])
                throw ValidationError("perturbed graph is not connected: a guide component has no attachment");
        }
    }
    return Problem{std::move(host), std::move(guide)};
}

LongitudinalSplit split_index(const IndexVector& index, int d) {
    if (d < 0 || d >= static_cast<int>(index.size())) throw std::invalid_argument("d must satisfy 0 <= d < D");
    const auto& e = index.entries();
    return {std::vector<int>(e.begin(), e.begin() + d), std::vector<int>(e.begin() + d, e.end())};
}

bool is_bridge(const IndexVector& index, int d) {
    const auto& e = index.entries();
    return std::any_of(e.begin(), e.begin() + d, [](int x) { return x != 0; });
}

IndexVector compute_edge_index(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) throw std::invalid_argument("endpoint coordinates of different length");
    std::vector<int> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = static_cast<int>(std::floor(v[i])) - static_cast<int>(std::floor(u[i]));
    return IndexVector(std::move(out));
}

std::vector<IndexVector> compute_edge_indices(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& embedded_edges) {
    std::vector<IndexVector> out;
    out.reserve(embedded_edges.size());
    for (const auto& [u, v] : embedded_edges) out.push_back(compute_edge_index(u, v));
    return out;
}

BridgeStats bridge_stats(const PeriodicGraphSpec& host, const GuideSpec& guide) {
    const int d = guide.dim_guide();
    BridgeStats stats;
    std::vector<int> beta(host.vertex_count(), 0);
    for (const auto& oe : host.oriented_edges()) {
        if (is_bridge(oe.index, d)) beta[oe.from] += oe.multiplicity;
    }
    for (std::size_t v = 0; v < host.vertex_count(); ++v) {
        stats.beta_per_vertex[host.vertices()[v].id] = beta[v];
        stats.beta_plus = std::max(stats.beta_plus, beta[v]);
    }
    for (std::size_t g = 0; g < guide.vertex_count(); ++g) {
        if (!guide.is_attached(g)) stats.beta_per_vertex["guide/" + guide.vertices()[g]] = 0;
    }

    std::set<std::pair<std::size_t, std::vector<int>>> contacts;
    for (const auto& a : guide.attachments()) contacts.insert({host.vertex_index(a.lattice_vertex), a.transverse_offset});
    for (const auto& [q, offset] : contacts) {
        for (const auto& oe : host.oriented_edges()) {
            if (oe.from != q) continue;
            if (!is_bridge(oe.index, d)) continue;
            const auto split = split_index(oe.index, d);
            std::vector<int> target = offset;
            for (std::size_t k = 0; k < target.size(); ++k) target[k] += split.transverse[k];
            if (contacts.count({oe.to, target})) stats.beta_01 += oe.multiplicity;
        }
    }
    return stats;
}

int cylinder_max_degree(const PeriodicGraphSpec& host, const GuideSpec& guide) {
    int m = host.max_degree();
    for (std::size_t g = 0; g < guide.vertex_count(); ++g) {
        int deg = guide.degree(g);
        if (auto a = guide.attachment_of(g)) deg += host.degree(host.vertex_index(guide.attachments()[*a].lattice_vertex));
        m = std::max(m, deg);
    }
    return m;
}

} // namespace guided
