#pragma once

#include "guided/cylinder.hpp"

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace guided {

enum class Command { validate, bands, feshbach, flat_bands, estimates, asymptotics, example };
enum class OutputFormat { json, csv };

const char* to_string(Command c);
const char* to_string(OutputFormat f);

struct RunConfig {
    Command command = Command::validate;
    std::optional<std::string> input;
    std::optional<std::string> example;
    std::map<std::string, int> params;
    int theta_grid = 201;
    std::optional<int> window;
    Boundary boundary = Boundary::periodic;
    double tol_ess = 1e-6;
    double tol_flat = 1e-6;
    double eig_tol = 1e-8;
    OutputFormat format = OutputFormat::json;
    std::optional<std::string> out;
    std::vector<int> t_list{8, 16, 32, 64};
    std::optional<int> j;

    /// Throws ValidationError on nonpositive grid/window or tolerances outside (0, 1).
    void check() const;
};

namespace exit_code {
constexpr int ok = 0;
constexpr int validation = 2;
constexpr int io = 3;
constexpr int solver = 4;
constexpr int unsupported = 5;
} // namespace exit_code

std::string version();

/// Each command writes its report to config.out (or `out`) and diagnostics to `err`.
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_bands(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_feshbach(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_flat_bands(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_estimates(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_asymptotics(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_example(const RunConfig& config, std::ostream& out, std::ostream& err);

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (without the program name) and runs the command.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Formats x with 9 significant digits.
std::string format_number(double x);

} // namespace guided
