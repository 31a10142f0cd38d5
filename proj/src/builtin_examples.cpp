#include "guided/errors.hpp"
#include "guided/graph_model.hpp"

#include <set>

namespace guided {

namespace {

PeriodicGraphSpec square_lattice() {
    return PeriodicGraphSpec(2, {{"0", std::vector<double>{0.0, 0.0}}},
                             {{"0", "0", {1, 0}, 1}, {"0", "0", {0, 1}, 1}});
}

// Square lattice written with a 3-vertex supercell along a_1; the middle vertex B has no bridge.
PeriodicGraphSpec square_lattice_supercell() {
    return PeriodicGraphSpec(2,
                             {{"A", std::vector<double>{0.0, 0.0}},
                              {"B", std::vector<double>{1.0 / 3.0, 0.0}},
                              {"C", std::vector<double>{2.0 / 3.0, 0.0}}},
                             {{"A", "B", {0, 0}, 1},
                              {"B", "C", {0, 0}, 1},
                              {"C", "A", {1, 0}, 1},
                              {"A", "A", {0, 1}, 1},
                              {"B", "B", {0, 1}, 1},
                              {"C", "C", {0, 1}, 1}});
}

int param(const std::map<std::string, int>& params, const std::string& key, int fallback) {
    auto it = params.find(key);
    const int value = it == params.end() ? fallback : it->second;
    if (value < 1) throw ValidationError("parameter " + key + " must be positive");
    return value;
}

void check_keys(const std::map<std::string, int>& params, std::set<std::string> allowed, std::string_view name) {
    for (const auto& [k, v] : params) {
        if (!allowed.count(k))
            throw ValidationError("unknown parameter '" + k + "' for example '" + std::string(name) + "'");
    }
}

} // namespace

std::vector<std::string> builtin_names() {
    return {"square", "square_star", "square_double_mandarin", "square_path", "square_multi_mandarin",
            "square_pendant"};
}

Problem builtin_example(std::string_view name, const std::map<std::string, int>& params) {
    if (name == "square") {
        check_keys(params, {}, name);
        return make_problem(square_lattice(), GuideSpec(1, {}, {}, {}));
    }
    if (name == "square_star") {
        check_keys(params, {"p", "t"}, name);
        const int p = param(params, "p", 1);
        const int t = param(params, "t", 1);
        std::vector<std::string> vertices{"c"};
        std::vector<GuideEdge> edges;
        for (int k = 1; k <= p; ++k) {
            vertices.push_back("l" + std::to_string(k));
            edges.push_back({"c", vertices.back(), t});
        }
        return make_problem(square_lattice(), GuideSpec(1, vertices, edges, {{"c", "0", {0}}}));
    }
    if (name == "square_double_mandarin") {
        check_keys(params, {"s", "t"}, name);
        const int s = param(params, "s", 2);
        const int t = param(params, "t", 1);
        return make_problem(square_lattice(), GuideSpec(1, {"c", "a", "b"}, {{"c", "a", s * t}, {"c", "b", s * t}},
                                                        {{"c", "0", {0}}}));
    }
    if (name == "square_path") {
        check_keys(params, {"t"}, name);
        const int t = param(params, "t", 1);
        return make_problem(square_lattice(), GuideSpec(1, {"v0", "v1", "v2"}, {{"v0", "v1", t}, {"v1", "v2", t}},
                                                        {{"v0", "0", {0}}}));
    }
    if (name == "square_multi_mandarin") {
        check_keys(params, {"p", "t"}, name);
        const int p = param(params, "p", 3);
        const int t = param(params, "t", 1);
        std::vector<std::string> vertices;
        std::vector<GuideEdge> edges;
        std::vector<Attachment> attachments;
        for (int j = 1; j <= p; ++j) {
            const std::string u = "u" + std::to_string(j);
            const std::string w = "w" + std::to_string(j);
            vertices.push_back(u);
            vertices.push_back(w);
            edges.push_back({u, w, j * t});
            attachments.push_back({u, "0", {j - 1}});
        }
        return make_problem(square_lattice(), GuideSpec(1, vertices, edges, attachments));
    }
    if (name == "square_pendant") {
        check_keys(params, {"t"}, name);
        const int t = param(params, "t", 1);
        return make_problem(square_lattice_supercell(), GuideSpec(1, {"b", "w"}, {{"b", "w", t}}, {{"b", "B", {0}}}));
    }
    throw ValidationError("unknown builtin example '" + std::string(name) + "'");
}

} // namespace guided
