#include "guided/report.hpp"

#include "guided/asymptotics.hpp"
#include "guided/errors.hpp"
#include "guided/feshbach.hpp"
#include "guided/floquet.hpp"
#include "guided/graph_model.hpp"
#include "guided/guided_solver.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>

namespace guided {

namespace {

using ojson = nlohmann::ordered_json;

ojson num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return std::stod(format_number(x));
}

Problem load_problem(const RunConfig& config) {
    if (config.input && config.example) throw ValidationError("--input and --example are mutually exclusive");
    if (config.input) return load_spec_file(*config.input);
    if (config.example) return builtin_example(*config.example, config.params);
    throw ValidationError("one of --input or --example is required");
}

CylinderWindow window_for(const RunConfig& config, const Problem& pr) {
    CylinderWindow w = default_window(pr.host.dim_total() - pr.guide.dim_guide());
    if (config.window) w.half_width = *config.window;
    w.boundary = config.boundary;
    return w;
}

SweepOptions sweep_options(const RunConfig& config, const Problem& pr) {
    SweepOptions o;
    o.grid = config.theta_grid;
    o.window = window_for(config, pr);
    o.tol_ess = config.tol_ess;
    o.eig_tol = config.eig_tol;
    return o;
}

ojson config_echo(const RunConfig& c) {
    ojson j;
    j["command"] = to_string(c.command);
    j["input"] = c.input ? ojson(*c.input) : ojson(nullptr);
    j["example"] = c.example ? ojson(*c.example) : ojson(nullptr);
    ojson params = ojson::object();
    for (const auto& [k, v] : c.params) params[k] = v;
    j["params"] = params;
    j["theta_grid"] = c.theta_grid;
    j["window"] = c.window ? ojson(*c.window) : ojson("default");
    j["boundary"] = to_string(c.boundary);
    j["tol_ess"] = c.tol_ess;
    j["tol_flat"] = c.tol_flat;
    j["eig_tol"] = c.eig_tol;
    j["format"] = to_string(c.format);
    j["t_list"] = c.t_list;
    j["j"] = c.j ? ojson(*c.j) : ojson(nullptr);
    return j;
}

ojson header(const RunConfig& c) {
    ojson j;
    j["version"] = version();
    j["config"] = config_echo(c);
    return j;
}

ojson band_json(const Band& b) {
    ojson j;
    j["lo"] = num(b.lo);
    j["hi"] = num(b.hi);
    j["flat"] = b.flat;
    j["multiplicity"] = b.multiplicity;
    return j;
}

ojson bands_json(const std::vector<Band>& bands) {
    ojson arr = ojson::array();
    for (const auto& b : bands) arr.push_back(band_json(b));
    return arr;
}

ojson certificates_json(const std::vector<Certificate>& certs) {
    ojson arr = ojson::array();
    for (const auto& c : certs) {
        ojson j;
        j["name"] = c.name;
        j["passed"] = c.passed;
        j["margin"] = num(c.margin);
        j["detail"] = c.detail;
        arr.push_back(j);
    }
    return arr;
}

ojson flat_values_json(const std::vector<FlatValue>& flats) {
    ojson arr = ojson::array();
    for (const auto& f : flats) {
        ojson j;
        j["value"] = num(f.value);
        j["multiplicity"] = f.multiplicity;
        j["guide_supported"] = f.guide_supported;
        j["certified"] = f.certified;
        arr.push_back(j);
    }
    return arr;
}

ojson summary_json(const Problem& pr) {
    ojson j;
    const auto stats = bridge_stats(pr.host, pr.guide);
    j["D"] = pr.host.dim_total();
    j["d"] = pr.guide.dim_guide();
    j["nu"] = pr.host.vertex_count();
    j["nu_1"] = pr.guide.vertex_count();
    j["c_guide"] = pr.guide.component_count();
    j["p"] = static_cast<int>(pr.guide.vertex_count()) - pr.guide.component_count();
    j["contacts"] = pr.guide.attachments().size();
    j["beta_plus"] = stats.beta_plus;
    j["beta_01"] = stats.beta_01;
    j["kappa_plus"] = cylinder_max_degree(pr.host, pr.guide);
    j["kappa_plus_host"] = pr.host.max_degree();
    return j;
}

std::string csv_cell(double x) {
    return std::isfinite(x) ? format_number(x) : std::string();
}

std::string csv_text(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

std::string dispersion_csv(const DispersionTrace& trace) {
    std::ostringstream os;
    const std::size_t n = trace.max_count();
    for (int k = 1; k <= trace.dim_guide; ++k) os << (k > 1 ? "," : "") << "theta_" << k;
    for (std::size_t j = 1; j <= n; ++j) os << ",lambda_" << j;
    os << "\n";
    for (const auto& pt : trace.points) {
        for (std::size_t k = 0; k < pt.theta.size(); ++k) os << (k > 0 ? "," : "") << csv_cell(pt.theta[k]);
        for (std::size_t j = 0; j < n; ++j) os << "," << (j < pt.levels.size() ? csv_cell(pt.levels[j].value) : "");
        os << "\n";
    }
    return os.str();
}

ojson dispersion_json(const DispersionTrace& trace) {
    ojson j;
    ojson columns = ojson::array();
    for (int k = 1; k <= trace.dim_guide; ++k) columns.push_back("theta_" + std::to_string(k));
    for (std::size_t k = 1; k <= trace.max_count(); ++k) columns.push_back("lambda_" + std::to_string(k));
    j["columns"] = columns;
    ojson rows = ojson::array();
    for (const auto& pt : trace.points) {
        ojson row = ojson::array();
        for (double t : pt.theta) row.push_back(num(t));
        for (std::size_t k = 0; k < trace.max_count(); ++k)
            row.push_back(k < pt.levels.size() ? num(pt.levels[k].value) : ojson(nullptr));
        rows.push_back(row);
    }
    j["rows"] = rows;
    return j;
}

void emit(const RunConfig& config, std::ostream& out, const std::string& text) {
    if (config.out) {
        std::ofstream f(*config.out);
        if (!f) throw IoError("cannot write '" + *config.out + "'");
        f << text;
        if (!f) throw IoError("error while writing '" + *config.out + "'");
    } else {
        out << text;
    }
}

void emit_json(const RunConfig& config, std::ostream& out, const ojson& j) {
    emit(config, out, j.dump(2) + "\n");
}

int guarded(const std::function<int()>& body, std::ostream& err) {
    try {
        return body();
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::validation;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return exit_code::io;
    } catch (const UnsupportedError& e) {
        err << "unsupported: " << e.what() << "\n";
        return exit_code::unsupported;
    } catch (const SolverError& e) {
        err << "solver failure: " << e.what() << "\n";
        return exit_code::solver;
    } catch (const std::exception& e) {
        err << "solver failure: " << e.what() << "\n";
        return exit_code::solver;
    }
}

ojson estimates_json(const EstimateInputs& in) {
    ojson j;
    j["rho"] = num(in.rho);
    ojson zeta = ojson::array();
    for (double z : in.zeta) zeta.push_back(num(z));
    j["zeta"] = zeta;
    ojson mu = ojson::array();
    for (double m : in.mu.mu) mu.push_back(num(m));
    j["mu"] = mu;
    ojson mut = ojson::array();
    for (double m : in.mu.mu_tilde) mut.push_back(num(m));
    j["mu_tilde"] = mut;
    j["bridge_deleted_ess_sup"] = num(in.mu.ess_sup);
    j["beta_plus"] = in.beta_plus;
    j["beta_01"] = in.beta_01;
    j["p"] = in.p;
    return j;
}

} // namespace

const char* to_string(Command c) {
    switch (c) {
    case Command::validate: return "validate";
    case Command::bands: return "bands";
    case Command::feshbach: return "feshbach";
    case Command::flat_bands: return "flat-bands";
    case Command::estimates: return "estimates";
    case Command::asymptotics: return "asymptotics";
    case Command::example: return "example";
    }
    return "?";
}

const char* to_string(OutputFormat f) {
    return f == OutputFormat::json ? "json" : "csv";
}

void RunConfig::check() const {
    if (theta_grid < 2) throw ValidationError("--grid must be at least 2");
    if (window && *window < 1) throw ValidationError("--window must be positive");
    for (double tol : {tol_ess, tol_flat, eig_tol})
        if (!(tol > 0.0 && tol < 1.0)) throw ValidationError("tolerances must lie in (0, 1)");
}

std::string version() {
    return GUIDED_VERSION;
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", x);
    return buf;
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        config.check();
        const Problem pr = load_problem(config);
        const ojson summary = summary_json(pr);
        if (config.format == OutputFormat::csv) {
            std::string text = "key,value\n";
            for (const auto& [k, v] : summary.items()) text += k + "," + v.dump() + "\n";
            emit(config, out, text);
        } else {
            ojson j = header(config);
            j["valid"] = true;
            j["summary"] = summary;
            emit_json(config, out, j);
        }
        return exit_code::ok;
    }, err);
}

int cmd_bands(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        config.check();
        const Problem pr = load_problem(config);
        const auto window = window_for(config, pr);
        const auto unperturbed = unperturbed_bands(pr.host);
        const auto trace = sweep(pr.host, pr.guide, sweep_options(config, pr));
        if (config.format == OutputFormat::csv) {
            emit(config, out, dispersion_csv(trace));
            return exit_code::ok;
        }
        auto spectrum = guided_bands(trace, config.tol_flat);
        const auto inputs = estimate_inputs(pr.host, pr.guide, window);
        verify_certificates(inputs, trace, spectrum);

        ojson j = header(config);
        j["summary"] = summary_json(pr);
        ojson un;
        un["bands"] = bands_json(unperturbed.bands.bands);
        un["rho"] = num(unperturbed.rho);
        j["unperturbed"] = un;
        ojson g;
        g["bands"] = bands_json(spectrum.bands.bands);
        g["indexed_bands"] = bands_json(spectrum.indexed);
        g["flat_bands"] = flat_values_json(spectrum.flat_bands);
        g["N"] = trace.max_count();
        g["notes"] = spectrum.notes;
        j["guided"] = g;
        j["estimates"] = estimates_json(inputs);
        j["certificates"] = certificates_json(spectrum.certificates);
        j["dispersion"] = dispersion_json(trace);
        emit_json(config, out, j);
        return exit_code::ok;
    }, err);
}

int cmd_feshbach(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        config.check();
        const Problem pr = load_problem(config);
        const auto exact = guided_spectrum_exact(pr.host, pr.guide, config.theta_grid);
        const auto q = q_potential(pr.guide, pr.guide.attachments().front().guide_vertex);
        const auto trace = sweep(pr.host, pr.guide, sweep_options(config, pr));
        const auto numeric = guided_bands(trace, config.tol_flat);

        if (config.format == OutputFormat::csv) {
            std::string text = "kind,lo,hi,multiplicity\n";
            for (const auto& b : exact.bands.bands)
                text += std::string(b.flat ? "flat" : "band") + "," + csv_cell(b.lo) + "," + csv_cell(b.hi) + "," +
                        std::to_string(b.multiplicity) + "\n";
            emit(config, out, text);
            return exit_code::ok;
        }
        ojson j = header(config);
        ojson e;
        e["exact"] = true;
        e["bands"] = bands_json(exact.bands.bands);
        e["indexed_bands"] = bands_json(exact.indexed);
        e["flat_bands"] = flat_values_json(exact.flat_bands);
        e["notes"] = exact.notes;
        j["feshbach"] = e;
        j["certificates"] = certificates_json(exact.certificates);
        ojson poles = ojson::array();
        for (Eigen::Index i = 0; i < q.poles().size(); ++i) poles.push_back(num(q.poles()[i]));
        j["q_poles"] = poles;
        ojson table = ojson::array();
        const double ub = q.spectral_upper_bound();
        for (int k = 0; k <= 80; ++k) {
            const double lambda = ub * k / 80.0;
            ojson row;
            row["lambda"] = num(lambda);
            const auto v = q(lambda);
            row["Q"] = v ? num(*v) : ojson("pole");
            table.push_back(row);
        }
        j["q_table"] = table;
        ojson cmp = ojson::array();
        for (std::size_t k = 0; k < exact.indexed.size(); ++k) {
            ojson row;
            row["j"] = k + 1;
            row["exact_lo"] = num(exact.indexed[k].lo);
            row["exact_hi"] = num(exact.indexed[k].hi);
            if (k < numeric.indexed.size()) {
                row["sweep_lo"] = num(numeric.indexed[k].lo);
                row["sweep_hi"] = num(numeric.indexed[k].hi);
                row["diff_lo"] = num(numeric.indexed[k].lo - exact.indexed[k].lo);
                row["diff_hi"] = num(numeric.indexed[k].hi - exact.indexed[k].hi);
            } else {
                row["sweep_lo"] = nullptr;
                row["sweep_hi"] = nullptr;
            }
            cmp.push_back(row);
        }
        j["comparison"] = cmp;
        emit_json(config, out, j);
        return exit_code::ok;
    }, err);
}

int cmd_flat_bands(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        config.check();
        const Problem pr = load_problem(config);
        if (pr.guide.empty()) throw ValidationError("flat-bands needs a nonempty guide");
        const auto gl = guide_laplacian(pr.guide);
        const auto flats = flat_bands(gl);
        if (config.format == OutputFormat::csv) {
            std::string text = "value,multiplicity\n";
            for (const auto& f : flats) text += csv_cell(f.value) + "," + std::to_string(f.multiplicity) + "\n";
            emit(config, out, text);
            return exit_code::ok;
        }
        ojson j = header(config);
        ojson arr = ojson::array();
        for (const auto& f : flats) {
            ojson jf;
            jf["value"] = num(f.value);
            jf["multiplicity"] = f.multiplicity;
            ojson vecs = ojson::array();
            for (Eigen::Index c = 0; c < f.eigenvectors.cols(); ++c) {
                ojson v = ojson::object();
                for (std::size_t g = 0; g < pr.guide.vertex_count(); ++g)
                    v[pr.guide.vertices()[g]] = num(f.eigenvectors(static_cast<Eigen::Index>(g), c));
                vecs.push_back(v);
            }
            jf["eigenvectors"] = vecs;
            arr.push_back(jf);
        }
        j["flat_bands"] = arr;
        ojson zeta = ojson::array();
        for (double z : gl.zeta) zeta.push_back(num(z));
        j["zeta"] = zeta;
        emit_json(config, out, j);
        return exit_code::ok;
    }, err);
}

int cmd_estimates(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        config.check();
        const Problem pr = load_problem(config);
        const auto window = window_for(config, pr);
        const auto trace = sweep(pr.host, pr.guide, sweep_options(config, pr));
        auto spectrum = guided_bands(trace, config.tol_flat);
        const auto inputs = estimate_inputs(pr.host, pr.guide, window);
        const auto certs = verify_certificates(inputs, trace, spectrum);
        if (config.format == OutputFormat::csv) {
            std::string text = "name,passed,margin,detail\n";
            for (const auto& c : certs)
                text += c.name + "," + (c.passed ? "true" : "false") + "," + csv_cell(c.margin) + "," +
                        csv_text(c.detail) + "\n";
            emit(config, out, text);
            return exit_code::ok;
        }
        ojson j = header(config);
        j["estimates"] = estimates_json(inputs);
        j["full_index_bands"] = bands_json(full_index_bands(trace));
        j["certificates"] = certificates_json(certs);
        ojson bounds = ojson::array();
        if (!pr.guide.empty()) {
            for (const auto& b : guide_eigenvalue_bounds(guide_laplacian(pr.guide))) {
                ojson jb;
                jb["component"] = b.component;
                jb["size"] = b.size;
                jb["zeta_1"] = num(b.zeta_1);
                jb["zeta_p"] = num(b.zeta_p);
                ojson checks = ojson::array();
                for (const auto& c : b.checks) {
                    ojson jc;
                    jc["name"] = c.name;
                    jc["lhs"] = num(c.lhs);
                    jc["rhs"] = num(c.rhs);
                    jc["holds"] = c.holds;
                    jc["margin"] = num(c.margin);
                    checks.push_back(jc);
                }
                jb["checks"] = checks;
                bounds.push_back(jb);
            }
        }
        j["guide_eigenvalue_bounds"] = bounds;
        emit_json(config, out, j);
        return exit_code::ok;
    }, err);
}

int cmd_asymptotics(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        config.check();
        const Problem pr = load_problem(config);
        if (pr.guide.empty()) throw ValidationError("asymptotics needs a nonempty guide");
        const auto gl = guide_laplacian(pr.guide);
        const auto skipped = degenerate_indices(gl);
        const auto stats = bridge_stats(pr.host, pr.guide);
        std::vector<int> indices;
        if (config.j) {
            indices.push_back(*config.j);
        } else {
            for (int k = 1; k <= gl.p; ++k)
                if (std::find(skipped.begin(), skipped.end(), k) == skipped.end()) indices.push_back(k);
        }
        std::vector<ConvergenceStudy> studies;
        for (int k : indices)
            studies.push_back(convergence_study(pr.host, pr.guide, k, config.t_list, sweep_options(config, pr)));

        if (config.format == OutputFormat::csv) {
            std::string text = "j,t,measured_lo,measured_hi,predicted_lo,predicted_hi,residual_lo,residual_hi,width\n";
            for (const auto& s : studies)
                for (const auto& r : s.rows)
                    text += std::to_string(s.profile.j) + "," + std::to_string(r.t) + "," +
                            (r.found ? csv_cell(r.measured_lo) : "") + "," + (r.found ? csv_cell(r.measured_hi) : "") +
                            "," + csv_cell(r.predicted_lo) + "," + csv_cell(r.predicted_hi) + "," +
                            (r.found ? csv_cell(r.residual_lo) : "") + "," + (r.found ? csv_cell(r.residual_hi) : "") +
                            "," + (r.found ? csv_cell(r.width) : "") + "\n";
            emit(config, out, text);
            return exit_code::ok;
        }
        ojson j = header(config);
        j["beta_01"] = stats.beta_01;
        j["skipped_degenerate"] = skipped;
        ojson arr = ojson::array();
        for (const auto& s : studies) {
            ojson js;
            js["j"] = s.profile.j;
            js["zeta"] = num(s.profile.zeta);
            js["flat"] = s.profile.flat;
            js["W_minus"] = num(s.profile.w_minus);
            js["W_plus"] = num(s.profile.w_plus);
            js["W_dot"] = num(s.profile.w_dot);
            js["W_dot_bound"] = 2 * stats.beta_01;
            js["W_dot_bound_holds"] = s.profile.w_dot <= 2.0 * stats.beta_01 + 1e-9;
            ojson rows = ojson::array();
            for (const auto& r : s.rows) {
                ojson jr;
                jr["t"] = r.t;
                jr["found"] = r.found;
                jr["measured_lo"] = r.found ? num(r.measured_lo) : ojson(nullptr);
                jr["measured_hi"] = r.found ? num(r.measured_hi) : ojson(nullptr);
                jr["predicted_lo"] = num(r.predicted_lo);
                jr["predicted_hi"] = num(r.predicted_hi);
                jr["residual_lo"] = r.found ? num(r.residual_lo) : ojson(nullptr);
                jr["residual_hi"] = r.found ? num(r.residual_hi) : ojson(nullptr);
                jr["width"] = r.found ? num(r.width) : ojson(nullptr);
                rows.push_back(jr);
            }
            js["rows"] = rows;
            js["slope_lo"] = num(s.slope_lo);
            js["slope_hi"] = num(s.slope_hi);
            js["slope_max"] = num(s.slope_max);
            arr.push_back(js);
        }
        j["studies"] = arr;
        emit_json(config, out, j);
        return exit_code::ok;
    }, err);
}

int cmd_example(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded([&] {
        if (!config.example) throw ValidationError("example needs --example NAME");
        const Problem pr = builtin_example(*config.example, config.params);
        emit(config, out, serialize(pr) + "\n");
        return exit_code::ok;
    }, err);
}

int run_command(const RunConfig& config, std::ostream& out, std::ostream& err) {
    switch (config.command) {
    case Command::validate: return cmd_validate(config, out, err);
    case Command::bands: return cmd_bands(config, out, err);
    case Command::feshbach: return cmd_feshbach(config, out, err);
    case Command::flat_bands: return cmd_flat_bands(config, out, err);
    case Command::estimates: return cmd_estimates(config, out, err);
    case Command::asymptotics: return cmd_asymptotics(config, out, err);
    case Command::example: return cmd_example(config, out, err);
    }
    return exit_code::validation;
}

} // namespace guided
