#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace guided {

/// Lattice translation in the period basis a_1..a_D.
class IndexVector {
public:
    IndexVector() = default;
    explicit IndexVector(std::vector<int> entries) : entries_(std::move(entries)) {}
    IndexVector(std::initializer_list<int> entries) : entries_(entries) {}

    std::size_t size() const { return entries_.size(); }
    int operator[](std::size_t i) const { return entries_[i]; }
    const std::vector<int>& entries() const { return entries_; }

    bool is_zero() const;
    IndexVector operator-() const;
    IndexVector operator+(const IndexVector& other) const;

    friend bool operator==(const IndexVector&, const IndexVector&) = default;
    friend auto operator<=>(const IndexVector&, const IndexVector&) = default;

private:
    std::vector<int> entries_;
};

struct QuotientVertex {
    std::string id;
    std::optional<std::vector<double>> coords;

    friend bool operator==(const QuotientVertex&, const QuotientVertex&) = default;
};

struct IndexedEdge {
    std::string u;
    std::string v;
    IndexVector index;
    int multiplicity = 1;

    friend bool operator==(const IndexedEdge&, const IndexedEdge&) = default;
};

/// One orientation of a quotient edge, in vertex positions. A loop with index tau
/// contributes two oriented edges (tau and -tau); a loop with zero index contributes
/// two oriented edges with zero index.
struct OrientedEdge {
    std::size_t from;
    std::size_t to;
    IndexVector index;
    int multiplicity;
};

/// Finite quotient of a Z^D-periodic graph. Validated on construction.
class PeriodicGraphSpec {
public:
    PeriodicGraphSpec(int dim_total, std::vector<QuotientVertex> vertices, std::vector<IndexedEdge> edges);

    int dim_total() const { return dim_total_; }
    const std::vector<QuotientVertex>& vertices() const { return vertices_; }
    const std::vector<IndexedEdge>& edges() const { return edges_; }
    std::size_t vertex_count() const { return vertices_.size(); }

    std::optional<std::size_t> find_vertex(std::string_view id) const;
    std::size_t vertex_index(std::string_view id) const;

    const std::vector<OrientedEdge>& oriented_edges() const { return oriented_; }
    int degree(std::size_t v) const { return degrees_[v]; }
    int max_degree() const;
    int max_abs_index() const;

    friend bool operator==(const PeriodicGraphSpec& a, const PeriodicGraphSpec& b) {
        return a.dim_total_ == b.dim_total_ && a.vertices_ == b.vertices_ && a.edges_ == b.edges_;
    }

private:
    int dim_total_;
    std::vector<QuotientVertex> vertices_;
    std::vector<IndexedEdge> edges_;
    std::vector<OrientedEdge> oriented_;
    std::vector<int> degrees_;
};

struct GuideEdge {
    std::string u;
    std::string v;
    int multiplicity = 1;

    friend bool operator==(const GuideEdge&, const GuideEdge&) = default;
};

struct Attachment {
    std::string guide_vertex;
    std::string lattice_vertex;
    std::vector<int> transverse_offset;

    friend bool operator==(const Attachment&, const Attachment&) = default;
};

/// Finite guide graph with zero-index edges and its attachment map onto the cylinder.
class GuideSpec {
public:
    GuideSpec(int dim_guide, std::vector<std::string> vertices, std::vector<GuideEdge> edges,
              std::vector<Attachment> attachments);

    int dim_guide() const { return dim_guide_; }
    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<GuideEdge>& edges() const { return edges_; }
    const std::vector<Attachment>& attachments() const { return attachments_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    bool empty() const { return vertices_.empty(); }

    std::optional<std::size_t> find_vertex(std::string_view id) const;
    std::size_t vertex_index(std::string_view id) const;

    /// Position in attachments() for a guide vertex, if attached.
    std::optional<std::size_t> attachment_of(std::size_t guide_vertex) const;
    bool is_attached(std::size_t guide_vertex) const { return attachment_of(guide_vertex).has_value(); }

    int degree(std::size_t v) const { return degrees_[v]; }
    std::vector<int> component_labels() const;
    int component_count() const;

    /// Copy with every edge multiplicity multiplied by t.
    GuideSpec scaled(int t) const;

    friend bool operator==(const GuideSpec& a, const GuideSpec& b) {
        return a.dim_guide_ == b.dim_guide_ && a.vertices_ == b.vertices_ && a.edges_ == b.edges_ &&
               a.attachments_ == b.attachments_;
    }

private:
    int dim_guide_;
    std::vector<std::string> vertices_;
    std::vector<GuideEdge> edges_;
    std::vector<Attachment> attachments_;
    std::vector<std::optional<std::size_t>> attachment_index_;
    std::vector<int> degrees_;
};

/// A host/guide pair whose cross-invariants have been checked.
struct Problem {
    PeriodicGraphSpec host;
    GuideSpec guide;

    friend bool operator==(const Problem&, const Problem&) = default;
};

/// Checks the invariants linking host and guide and returns the pair.
Problem make_problem(PeriodicGraphSpec host, GuideSpec guide);

struct BridgeStats {
    std::map<std::string, int> beta_per_vertex;
    int beta_plus = 0;
    int beta_01 = 0;
};

struct LongitudinalSplit {
    std::vector<int> longitudinal;
    std::vector<int> transverse;
};

LongitudinalSplit split_index(const IndexVector& index, int d);

/// A cylinder edge is a bridge iff its longitudinal part (first d entries) is nonzero.
bool is_bridge(const IndexVector& index, int d);

/// tau = floor(v) - floor(u) componentwise.
IndexVector compute_edge_index(std::span<const double> u, std::span<const double> v);
std::vector<IndexVector> compute_edge_indices(
    const std::vector<std::pair<std::vector<double>, std::vector<double>>>& embedded_edges);

BridgeStats bridge_stats(const PeriodicGraphSpec& host, const GuideSpec& guide);

/// Max total degree over the perturbed cylinder (host degree plus guide degree at attached vertices).
int cylinder_max_degree(const PeriodicGraphSpec& host, const GuideSpec& guide);

/// Parses and validates a graph document.
Problem load_spec(std::string_view document);
Problem load_spec_file(const std::string& path);
std::string serialize(const Problem& problem);

/// Builtin families: square, square_star(p), square_double_mandarin(s), square_path(t),
/// square_multi_mandarin(p), square_pendant(t).
Problem builtin_example(std::string_view name, const std::map<std::string, int>& params);
std::vector<std::string> builtin_names();

} // namespace guided
