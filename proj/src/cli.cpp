#include "guided/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <ostream>
#include <sstream>

namespace guided {

namespace {

std::map<std::string, Command> command_map() {
    return {{"validate", Command::validate},       {"bands", Command::bands},
            {"feshbach", Command::feshbach},       {"flat-bands", Command::flat_bands},
            {"estimates", Command::estimates},     {"asymptotics", Command::asymptotics},
            {"example", Command::example}};
}

std::pair<std::string, int> parse_param(const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--param", "expected k=v, got '" + kv + "'");
    try {
        std::size_t used = 0;
        const int v = std::stoi(kv.substr(eq + 1), &used);
        if (used != kv.size() - eq - 1) throw std::invalid_argument(kv);
        return {kv.substr(0, eq), v};
    } catch (const std::exception&) {
        throw CLI::ValidationError("--param", "value must be an integer in '" + kv + "'");
    }
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Guided and flat bands of periodic graphs with guides", "guided-bands"};
    app.set_version_flag("--version", version());

    RunConfig config;
    std::string command;
    std::string input, example, boundary = "periodic", format = "json", out_path, t_list;
    std::vector<std::string> params;
    int window = 0;
    int j = 0;

    std::vector<std::string> names;
    for (const auto& [k, v] : command_map()) names.push_back(k);
    app.add_option("command", command, "validate | bands | feshbach | flat-bands | estimates | asymptotics | example")
        ->required()
        ->check(CLI::IsMember(names));
    app.add_option("--input", input, "Graph document (JSON)");
    app.add_option("--example", example, "Builtin example name");
    app.add_option("--param", params, "Builtin parameter k=v (repeatable)");
    app.add_option("--grid", config.theta_grid, "Theta grid points per dimension")->capture_default_str();
    app.add_option("--window", window, "Cylinder half-width W");
    app.add_option("--boundary", boundary, "Transverse boundary condition")
        ->check(CLI::IsMember({"periodic", "dirichlet"}))
        ->capture_default_str();
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
    app.add_option("--out", out_path, "Output path (default stdout)");
    app.add_option("--t-list", t_list, "Comma-separated multiplicity scales for asymptotics");
    app.add_option("--j", j, "Eigenvalue index for asymptotics (default: all simple)");
    app.add_option("--tol-ess", config.tol_ess, "Distance to the essential spectrum")->capture_default_str();
    app.add_option("--tol-flat", config.tol_flat, "Flat band width tolerance")->capture_default_str();
    app.add_option("--eig-tol", config.eig_tol, "Eigenvalue clustering tolerance")->capture_default_str();

    std::vector<const char*> argv{"guided-bands"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
        for (const auto& p : params) config.params.insert(parse_param(p));
        if (!t_list.empty()) {
            config.t_list.clear();
            std::stringstream ss(t_list);
            std::string item;
            while (std::getline(ss, item, ',')) {
                try {
                    config.t_list.push_back(std::stoi(item));
                } catch (const std::exception&) {
                    throw CLI::ValidationError("--t-list", "entries must be integers");
                }
            }
        }
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_code::ok;
    } catch (const CLI::CallForVersion&) {
        out << version() << "\n";
        return exit_code::ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::validation;
    }

    config.command = command_map().at(command);
    if (!input.empty()) config.input = input;
    if (!example.empty()) config.example = example;
    if (!out_path.empty()) config.out = out_path;
    if (app.count("--window")) config.window = window;
    if (app.count("--j")) config.j = j;
    config.boundary = boundary == "periodic" ? Boundary::periodic : Boundary::dirichlet;
    config.format = format == "json" ? OutputFormat::json : OutputFormat::csv;
    return run_command(config, out, err);
}

} // namespace guided
