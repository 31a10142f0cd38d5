#include "oracles.hpp"

#include "guided/errors.hpp"
#include "guided/graph_model.hpp"

#include <doctest.h>

#include <random>

using namespace guided;

namespace {

std::vector<QuotientVertex> one_vertex() {
    return {{"0", std::nullopt}};
}

} // namespace

TEST_CASE("index vector arithmetic") {
    const IndexVector a{1, -2};
    const IndexVector b{0, 3};
    CHECK((a + b) == IndexVector{1, 1});
    CHECK((-a) == IndexVector{-1, 2});
    CHECK(IndexVector{0, 0}.is_zero());
    CHECK_FALSE(a.is_zero());
    CHECK_THROWS_AS(a + IndexVector{1}, std::invalid_argument);
}

TEST_CASE("square lattice quotient") {
    const auto sq = oracle::square_lattice();
    CHECK(sq.vertex_count() == 1);
    CHECK(sq.degree(0) == 4);
    CHECK(sq.max_degree() == 4);
    CHECK(sq.max_abs_index() == 1);
    // each loop contributes both orientations
    REQUIRE(sq.oriented_edges().size() == 4);
    int sum0 = 0, sum1 = 0;
    for (const auto& oe : sq.oriented_edges()) {
        sum0 += oe.index[0];
        sum1 += oe.index[1];
    }
    CHECK(sum0 == 0);
    CHECK(sum1 == 0);
}

TEST_CASE("periodic spec validation") {
    using V = std::vector<QuotientVertex>;
    using E = std::vector<IndexedEdge>;
    CHECK_THROWS_AS(PeriodicGraphSpec(2, V{{"0", {}}, {"0", {}}}, E{}), ValidationError);
    CHECK_THROWS_AS(PeriodicGraphSpec(2, V{{"0", std::vector<double>{0.0}}}, E{{"0", "0", {1, 0}, 1}, {"0", "0", {0, 1}, 1}}),
                    ValidationError);
    CHECK_THROWS_AS(PeriodicGraphSpec(2, V{{"0", std::vector<double>{0.0, 1.0}}}, E{{"0", "0", {1, 0}, 1}, {"0", "0", {0, 1}, 1}}),
                    ValidationError);
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "x", {1, 0}, 1}}), ValidationError);
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {1, 0, 0}, 1}}), ValidationError);
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {1, 0}, 0}, {"0", "0", {0, 1}, 1}}), ValidationError);
    // the same loop listed in both orientations
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {1, 0}, 1}, {"0", "0", {-1, 0}, 1}, {"0", "0", {0, 1}, 1}}),
                    ValidationError);
    // isolated vertex
    CHECK_THROWS_AS(PeriodicGraphSpec(2, V{{"0", {}}, {"1", {}}}, E{{"0", "0", {1, 0}, 1}, {"0", "0", {0, 1}, 1}}),
                    ValidationError);
    // indices generate an index-2 sublattice
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {2, 0}, 1}, {"0", "0", {0, 1}, 1}}), ValidationError);
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {1, 1}, 1}, {"0", "0", {1, -1}, 1}}), ValidationError);
    // rank deficient
    CHECK_THROWS_AS(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {1, 0}, 1}}), ValidationError);
    // unimodular but not axis aligned
    CHECK_NOTHROW(PeriodicGraphSpec(2, one_vertex(), E{{"0", "0", {1, 1}, 1}, {"0", "0", {1, 2}, 1}}));
}

TEST_CASE("connectivity through a two-vertex cell") {
    using V = std::vector<QuotientVertex>;
    using E = std::vector<IndexedEdge>;
    // honeycomb-like cell: cycles a-b-a give differences of the edge indices
    CHECK_NOTHROW(PeriodicGraphSpec(2, V{{"a", {}}, {"b", {}}},
                                    E{{"a", "b", {0, 0}, 1}, {"a", "b", {1, 0}, 1}, {"a", "b", {0, 1}, 1}}));
    CHECK_THROWS_AS(PeriodicGraphSpec(2, V{{"a", {}}, {"b", {}}},
                                      E{{"a", "b", {0, 0}, 1}, {"a", "b", {2, 0}, 1}, {"a", "b", {0, 1}, 1}}),
                    ValidationError);
}

TEST_CASE("edge index from embedded coordinates") {
    const std::vector<double> u{0.25, 0.75};
    const std::vector<double> v{1.5, -0.25};
    CHECK(compute_edge_index(u, v) == IndexVector{1, -1});
    const auto all = compute_edge_indices({{{0.1, 0.1}, {0.9, 2.2}}, {{0.0, 0.0}, {-0.5, 0.0}}});
    REQUIRE(all.size() == 2);
    CHECK(all[0] == IndexVector{0, 2});
    CHECK(all[1] == IndexVector{-1, 0});
}

TEST_CASE("index split and bridges") {
    const auto s = split_index(IndexVector{1, -2, 3}, 1);
    CHECK(s.longitudinal == std::vector<int>{1});
    CHECK(s.transverse == std::vector<int>{-2, 3});
    CHECK(is_bridge(IndexVector{1, 0}, 1));
    CHECK_FALSE(is_bridge(IndexVector{0, 1}, 1));
    CHECK(is_bridge(IndexVector{0, 1, 0}, 2));
}

TEST_CASE("guide spec validation") {
    CHECK_THROWS_AS(GuideSpec(1, {"a", "a"}, {}, {}), ValidationError);
    CHECK_THROWS_AS(GuideSpec(1, {"a"}, {{"a", "b", 1}}, {}), ValidationError);
    CHECK_THROWS_AS(GuideSpec(1, {"a", "b"}, {{"a", "b", 0}}, {}), ValidationError);
    CHECK_THROWS_AS(GuideSpec(1, {"a", "b"}, {{"a", "b", 1}, {"b", "a", 1}}, {}), ValidationError);
    CHECK_THROWS_AS(GuideSpec(1, {"a"}, {}, {{"x", "0", {0}}}), ValidationError);
    CHECK_THROWS_AS(GuideSpec(1, {"a"}, {}, {{"a", "0", {0}}, {"a", "0", {1}}}), ValidationError);
    const GuideSpec g(1, {"a", "b", "c", "d"}, {{"a", "b", 2}, {"c", "d", 1}}, {{"a", "0", {0}}, {"c", "0", {1}}});
    CHECK(g.component_count() == 2);
    CHECK(g.degree(0) == 2);
    CHECK(g.is_attached(0));
    CHECK_FALSE(g.is_attached(1));
    const auto labels = g.component_labels();
    CHECK(labels[0] == labels[1]);
    CHECK(labels[0] != labels[2]);
    const auto s = g.scaled(3);
    CHECK(s.edges()[0].multiplicity == 6);
    CHECK(s.edges()[1].multiplicity == 3);
    CHECK_THROWS(g.scaled(0));
}

TEST_CASE("problem cross checks") {
    const auto sq = oracle::square_lattice();
    CHECK_THROWS_WITH_AS(make_problem(sq, GuideSpec(2, {"a"}, {}, {{"a", "0", {}}})),
                         "d must satisfy d < D (got d=2, D=2)", ValidationError);
    CHECK_THROWS_AS(make_problem(sq, GuideSpec(1, {"a"}, {}, {{"a", "zz", {0}}})), ValidationError);
    CHECK_THROWS_AS(make_problem(sq, GuideSpec(1, {"a"}, {}, {{"a", "0", {0, 0}}})), ValidationError);
    CHECK_THROWS_AS(make_problem(sq, GuideSpec(1, {"a", "b"}, {}, {{"a", "0", {0}}, {"b", "0", {0}}})),
                    ValidationError);
    // component without an attachment
    CHECK_THROWS_AS(make_problem(sq, GuideSpec(1, {"a", "b", "c"}, {{"b", "c", 1}}, {{"a", "0", {0}}})),
                    ValidationError);
    CHECK_NOTHROW(make_problem(sq, GuideSpec(1, {"a", "b"}, {}, {{"a", "0", {0}}, {"b", "0", {1}}})));
}

TEST_CASE("bridge statistics of the builtin star") {
    const auto pr = builtin_example("square_star", {{"p", 2}});
    const auto st = bridge_stats(pr.host, pr.guide);
    CHECK(st.beta_plus == 2);
    CHECK(st.beta_01 == 2);
    CHECK(st.beta_per_vertex.at("0") == 2);
    CHECK(st.beta_per_vertex.at("guide/l1") == 0);
    CHECK(cylinder_max_degree(pr.host, pr.guide) == 6);
}

TEST_CASE("bridge statistics of multi-contact guides") {
    const auto pr = builtin_example("square_multi_mandarin", {{"p", 3}});
    const auto st = bridge_stats(pr.host, pr.guide);
    CHECK(st.beta_plus == 2);
    // three contact images at offsets 0, 1, 2: each has a bridge loop to itself in both orientations
    CHECK(st.beta_01 == 6);
}

TEST_CASE("builtin examples") {
    for (const auto& name : builtin_names()) {
        CAPTURE(name);
        const auto pr = builtin_example(name, {});
        CHECK(pr.host.dim_total() == 2);
    }
    CHECK_THROWS_AS(builtin_example("nope", {}), ValidationError);
    CHECK_THROWS_AS(builtin_example("square_star", {{"q", 2}}), ValidationError);
    CHECK_THROWS_AS(builtin_example("square_star", {{"p", 0}}), ValidationError);
    const auto star = builtin_example("square_star", {{"p", 3}, {"t", 2}});
    CHECK(star.guide.vertex_count() == 4);
    CHECK(star.guide.edges().front().multiplicity == 2);
    CHECK(builtin_example("square", {}).guide.empty());
}

TEST_CASE("document parsing errors carry a location") {
    CHECK_THROWS_AS(load_spec("{"), ParseError);
    CHECK_THROWS_AS(load_spec("[]"), ParseError);
    CHECK_THROWS_WITH_AS(load_spec(R"({"dim_total": 2, "dim_guide": 1, "quotient_vertices": [{"id": 3}], "quotient_edges": []})"),
                         doctest::Contains("/quotient_vertices/0/id"), ParseError);
    CHECK_THROWS_AS(load_spec(R"({"dim_total": 2, "dim_guide": 1, "quotient_vertices": [{"id": "0", "coords": ["1/0", 0]}],
                                  "quotient_edges": []})"),
                    ParseError);
    CHECK_THROWS_AS(load_spec(R"({"dim_total": 2, "dim_guide": 2, "quotient_vertices": [{"id": "0"}],
                                  "quotient_edges": [{"u": "0", "v": "0", "index": [1, 0]}, {"u": "0", "v": "0", "index": [0, 1]}]})"),
                    ValidationError);
    CHECK_THROWS_AS(load_spec_file("/nonexistent/spec.json"), IoError);
}

TEST_CASE("rational coordinates and default multiplicity") {
    const auto pr = load_spec(R"({"dim_total": 2, "dim_guide": 1,
        "quotient_vertices": [{"id": "0", "coords": ["1/3", 0.5]}],
        "quotient_edges": [{"u": "0", "v": "0", "index": [1, 0]}, {"u": "0", "v": "0", "index": [0, 1], "multiplicity": 2}]})");
    CHECK(pr.host.vertices()[0].coords->at(0) == doctest::Approx(1.0 / 3.0));
    CHECK(pr.host.edges()[0].multiplicity == 1);
    CHECK(pr.host.edges()[1].multiplicity == 2);
    CHECK(pr.guide.empty());
}

TEST_CASE("serialization round trip") {
    for (const auto& name : builtin_names()) {
        CAPTURE(name);
        const auto pr = builtin_example(name, {});
        CHECK(load_spec(serialize(pr)) == pr);
    }
    std::mt19937 rng(20240611);
    for (int k = 0; k < 50; ++k) {
        auto host = oracle::random_spec(rng);
        auto guide = oracle::random_guide(rng, 1 + k % 4, "v0");
        const auto pr = make_problem(std::move(host), std::move(guide));
        const auto text = serialize(pr);
        CHECK(load_spec(text) == pr);
        CHECK(serialize(load_spec(text)) == text);
    }
}
