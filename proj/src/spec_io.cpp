#include "guided/errors.hpp"
#include "guided/graph_model.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <sstream>

namespace guided {

namespace {

using nlohmann::json;

const json& field(const json& obj, const char* key, const std::string& path) {
    if (!obj.is_object()) throw ParseError(path + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(path + ": missing field '" + key + "'");
    return *it;
}

int as_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ParseError(path + ": expected an integer");
    return j.get<int>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) throw ParseError(path + ": expected a string");
    return j.get<std::string>();
}

const json& as_array(const json& j, const std::string& path) {
    if (!j.is_array()) throw ParseError(path + ": expected an array");
    return j;
}

double parse_rational(const json& j, const std::string& path) {
    if (j.is_number()) return j.get<double>();
    if (!j.is_string()) throw ParseError(path + ": expected a number or a rational string 'p/q'");
    const std::string s = j.get<std::string>();
    try {
        const auto slash = s.find('/');
        std::size_t used = 0;
        if (slash == std::string::npos) {
            const long long p = std::stoll(s, &used);
            if (used != s.size()) throw std::invalid_argument(s);
            return static_cast<double>(p);
        }
        const std::string num = s.substr(0, slash);
        const std::string den = s.substr(slash + 1);
        const long long p = std::stoll(num, &used);
        if (used != num.size()) throw std::invalid_argument(s);
        const long long q = std::stoll(den, &used);
        if (used != den.size() || q == 0) throw std::invalid_argument(s);
        return static_cast<double>(p) / static_cast<double>(q);
    } catch (const std::exception&) {
        throw ParseError(path + ": malformed rational '" + s + "'");
    }
}

std::vector<int> int_list(const json& j, const std::string& path) {
    std::vector<int> out;
    const auto& arr = as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_int(arr[i], path + "/" + std::to_string(i)));
    return out;
}

int optional_multiplicity(const json& obj, const std::string& path) {
    auto it = obj.find("multiplicity");
    if (it == obj.end()) return 1;
    return as_int(*it, path + "/multiplicity");
}

} // namespace

Problem load_spec(std::string_view document) {
    json doc;
    try {
        doc = json::parse(document.begin(), document.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("/: document must be an object");

    const int D = as_int(field(doc, "dim_total", ""), "/dim_total");
    const int d = as_int(field(doc, "dim_guide", ""), "/dim_guide");

    std::vector<QuotientVertex> vertices;
    const auto& jv = as_array(field(doc, "quotient_vertices", ""), "/quotient_vertices");
    for (std::size_t i = 0; i < jv.size(); ++i) {
        const std::string path = "/quotient_vertices/" + std::to_string(i);
        QuotientVertex v;
        v.id = as_string(field(jv[i], "id", path), path + "/id");
        if (auto it = jv[i].find("coords"); it != jv[i].end()) {
            std::vector<double> coords;
            const auto& arr = as_array(*it, path + "/coords");
            for (std::size_t k = 0; k < arr.size(); ++k)
                coords.push_back(parse_rational(arr[k], path + "/coords/" + std::to_string(k)));
            v.coords = std::move(coords);
        }
        vertices.push_back(std::move(v));
    }

    std::vector<IndexedEdge> edges;
    const auto& je = as_array(field(doc, "quotient_edges", ""), "/quotient_edges");
    for (std::size_t i = 0; i < je.size(); ++i) {
        const std::string path = "/quotient_edges/" + std::to_string(i);
        IndexedEdge e;
        e.u = as_string(field(je[i], "u", path), path + "/u");
        e.v = as_string(field(je[i], "v", path), path + "/v");
        e.index = IndexVector(int_list(field(je[i], "index", path), path + "/index"));
        e.multiplicity = optional_multiplicity(je[i], path);
        edges.push_back(std::move(e));
    }

    std::vector<std::string> gvertices;
    std::vector<GuideEdge> gedges;
    std::vector<Attachment> attachments;
    if (auto git = doc.find("guide"); git != doc.end()) {
        const json& g = *git;
        if (!g.is_object()) throw ParseError("/guide: expected an object");
        if (auto it = g.find("vertices"); it != g.end()) {
            const auto& arr = as_array(*it, "/guide/vertices");
            for (std::size_t i = 0; i < arr.size(); ++i)
                gvertices.push_back(as_string(arr[i], "/guide/vertices/" + std::to_string(i)));
        }
        if (auto it = g.find("edges"); it != g.end()) {
            const auto& arr = as_array(*it, "/guide/edges");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "/guide/edges/" + std::to_string(i);
                GuideEdge e;
                e.u = as_string(field(arr[i], "u", path), path + "/u");
                e.v = as_string(field(arr[i], "v", path), path + "/v");
                e.multiplicity = optional_multiplicity(arr[i], path);
                gedges.push_back(std::move(e));
            }
        }
        if (auto it = g.find("attachments"); it != g.end()) {
            const auto& arr = as_array(*it, "/guide/attachments");
            for (std::size_t i = 0; i < arr.size(); ++i) {
                const std::string path = "/guide/attachments/" + std::to_string(i);
                Attachment a;
                a.guide_vertex = as_string(field(arr[i], "guide_vertex", path), path + "/guide_vertex");
                a.lattice_vertex = as_string(field(arr[i], "lattice_vertex", path), path + "/lattice_vertex");
                a.transverse_offset =
                    int_list(field(arr[i], "transverse_offset", path), path + "/transverse_offset");
                attachments.push_back(std::move(a));
            }
        }
    }

    return make_problem(PeriodicGraphSpec(D, std::move(vertices), std::move(edges)),
                        GuideSpec(d, std::move(gvertices), std::move(gedges), std::move(attachments)));
}

Problem load_spec_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error while reading '" + path + "'");
    return load_spec(buf.str());
}

std::string serialize(const Problem& problem) {
    using ojson = nlohmann::ordered_json;
    ojson doc;
    doc["dim_total"] = problem.host.dim_total();
    doc["dim_guide"] = problem.guide.dim_guide();
    ojson verts = ojson::array();
    for (const auto& v : problem.host.vertices()) {
        ojson jv;
        jv["id"] = v.id;
        if (v.coords) jv["coords"] = *v.coords;
        verts.push_back(jv);
    }
    doc["quotient_vertices"] = verts;
    ojson edges = ojson::array();
    for (const auto& e : problem.host.edges()) {
        ojson je;
        je["u"] = e.u;
        je["v"] = e.v;
        je["index"] = e.index.entries();
        je["multiplicity"] = e.multiplicity;
        edges.push_back(je);
    }
    doc["quotient_edges"] = edges;
    ojson guide;
    guide["vertices"] = problem.guide.vertices();
    ojson gedges = ojson::array();
    for (const auto& e : problem.guide.edges()) {
        ojson je;
        je["u"] = e.u;
        je["v"] = e.v;
        je["multiplicity"] = e.multiplicity;
        gedges.push_back(je);
    }
    guide["edges"] = gedges;
    ojson atts = ojson::array();
    for (const auto& a : problem.guide.attachments()) {
        ojson ja;
        ja["guide_vertex"] = a.guide_vertex;
        ja["lattice_vertex"] = a.lattice_vertex;
        ja["transverse_offset"] = a.transverse_offset;
        atts.push_back(ja);
    }
    guide["attachments"] = atts;
    doc["guide"] = guide;
    return doc.dump(2);
}

} // namespace guided
