#include "guided/report.hpp"

#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace guided;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path write_temp(const std::string& name, const std::string& text) {
    const auto p = fs::temp_directory_path() / ("guided_cli_test_" + name);
    std::ofstream(p) << text;
    return p;
}

const char* kTriangular = R"({"dim_total": 2, "dim_guide": 1,
  "quotient_vertices": [{"id": "0"}],
  "quotient_edges": [{"u": "0", "v": "0", "index": [1, 0]}, {"u": "0", "v": "0", "index": [0, 1]},
                     {"u": "0", "v": "0", "index": [1, -1]}],
  "guide": {"vertices": ["c", "l"], "edges": [{"u": "c", "v": "l"}],
            "attachments": [{"guide_vertex": "c", "lattice_vertex": "0", "transverse_offset": [0]}]}})";

} // namespace

TEST_CASE("version and usage errors") {
    const auto v = run({"--version"});
    CHECK(v.code == 0);
    CHECK(v.out.find("0.1.0") != std::string::npos);
    CHECK(run({"frobnicate"}).code == exit_code::validation);
    CHECK(run({}).code == exit_code::validation);
    CHECK(run({"bands", "--example", "square_star", "--grid", "0"}).code == exit_code::validation);
    CHECK(run({"bands", "--example", "square_star", "--format", "xml"}).code == exit_code::validation);
    CHECK(run({"bands", "--example", "square_star", "--param", "p"}).code == exit_code::validation);
    CHECK(run({"validate"}).code == exit_code::validation);
}

TEST_CASE("validate summary") {
    const auto r = run({"validate", "--example", "square_star", "--param", "p=2"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["version"] == "0.1.0");
    CHECK(j["summary"]["p"] == 2);
    CHECK(j["summary"]["beta_plus"] == 2);
    CHECK(j["summary"]["beta_01"] == 2);
    CHECK(j["summary"]["nu_1"] == 3);
    CHECK(j["config"]["params"]["p"] == 2);
}

TEST_CASE("validation and I/O exit codes") {
    const auto bad = write_temp("bad.json", "{ not json");
    CHECK(run({"validate", "--input", bad.string()}).code == exit_code::validation);
    const auto dd = write_temp("dd.json", R"({"dim_total": 2, "dim_guide": 2, "quotient_vertices": [{"id": "0"}],
        "quotient_edges": [{"u": "0", "v": "0", "index": [1, 0]}, {"u": "0", "v": "0", "index": [0, 1]}]})");
    const auto r = run({"validate", "--input", dd.string()});
    CHECK(r.code == exit_code::validation);
    CHECK(r.err.find("d < D") != std::string::npos);
    CHECK(run({"validate", "--input", "/nonexistent/graph.json"}).code == exit_code::io);
    CHECK(run({"validate", "--example", "square_star", "--out", "/nonexistent/dir/out.json"}).code == exit_code::io);
    CHECK(run({"validate", "--example", "nope"}).code == exit_code::validation);
}

TEST_CASE("unsupported host for the exact solver") {
    const auto tri = write_temp("tri.json", kTriangular);
    CHECK(run({"validate", "--input", tri.string()}).code == 0);
    const auto r = run({"feshbach", "--input", tri.string(), "--grid", "5"});
    CHECK(r.code == exit_code::unsupported);
    CHECK(r.err.find("bands") != std::string::npos);
}

TEST_CASE("bands report is deterministic and complete") {
    const std::vector<std::string> args{"bands", "--example", "square_star", "--param", "p=2", "--grid", "11",
                                        "--window", "20"};
    const auto a = run(args);
    const auto b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const auto j = nlohmann::json::parse(a.out);
    for (const char* key : {"version", "config", "summary", "unperturbed", "guided", "estimates", "certificates", "dispersion"})
        CHECK(j.contains(key));
    for (const auto& c : j["certificates"]) CHECK(c.contains("margin"));
    CHECK(j["unperturbed"]["rho"] == 8.0);
}

TEST_CASE("csv dispersion table") {
    const auto r = run({"bands", "--example", "square_star", "--param", "p=2", "--grid", "5", "--window", "20",
                        "--format", "csv"});
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header;
    std::getline(in, header);
    CHECK(header == "theta_1,lambda_1,lambda_2,lambda_3");
    std::string line;
    bool saw_empty = false;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 3);
        if (line.back() == ',') saw_empty = true;
    }
    CHECK(saw_empty);
}

TEST_CASE("output file and other commands") {
    const auto path = fs::temp_directory_path() / "guided_cli_test_out.json";
    fs::remove(path);
    const auto r = run({"flat-bands", "--example", "square_star", "--param", "p=3", "--out", path.string()});
    REQUIRE(r.code == 0);
    std::ifstream in(path);
    const auto j = nlohmann::json::parse(in);
    CHECK(j.contains("config"));

    const auto ex = run({"example", "--example", "square_path", "--param", "t=2"});
    REQUIRE(ex.code == 0);
    const auto spec = write_temp("path.json", ex.out);
    CHECK(run({"validate", "--input", spec.string()}).code == 0);

    const auto fe = run({"feshbach", "--example", "square_star", "--param", "p=1", "--grid", "11", "--window", "30"});
    REQUIRE(fe.code == 0);
    const auto fj = nlohmann::json::parse(fe.out);
    CHECK(fj["feshbach"]["indexed_bands"][0]["lo"].get<double>() == doctest::Approx(4.38297577).epsilon(1e-8));
    CHECK(fj.contains("comparison"));

    const auto as = run({"asymptotics", "--example", "square_star", "--param", "p=2", "--j", "2", "--t-list", "8,16",
                         "--grid", "11", "--window", "20", "--format", "csv"});
    REQUIRE(as.code == 0);
    CHECK(as.out.find("j,t") == 0);
    CHECK(run({"asymptotics", "--example", "square_star", "--t-list", "8,x"}).code == exit_code::validation);
}

TEST_CASE("number formatting") {
    CHECK(format_number(4.382975768123) == "4.38297577");
    CHECK(format_number(8.0) == "8");
    CHECK(format_number(1e-12) == "1e-12");
}
