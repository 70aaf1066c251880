// Copyright 2026 The weakval developers.

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end. Every command prints one JSON document (or a CSV
// table for sweep/sample) with floating-point fields at 17 significant
// digits; identical invocations produce byte-identical output. Exit codes:
// 0 success, 1 failed scenario report, 2 validation error, 3 forbidden
// transition / regime error, 4 numerical error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "weakval/weakval.hpp"

namespace {

using namespace weakval;

// ---------------------------------------------------------------------------
// Inline argument parsing
// ---------------------------------------------------------------------------

std::vector<std::string> split(const std::string &text, char sep) {
    std::vector<std::string> out;
    std::string current;
    for (char c : text) {
        if (c == sep) {
            out.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    out.push_back(current);
    return out;
}

double parse_real(const std::string &text, const std::string &what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) {
            throw validation_error(what + ": trailing characters in '" + text + "'");
        }
        return v;
    } catch (const validation_error &) {
        throw;
    } catch (const std::exception &) {
        throw validation_error(what + ": cannot parse '" + text + "' as a number");
    }
}

cplx parse_complex_scalar(const std::string &text, const std::string &what) {
    const auto parts = split(text, ',');
    if (parts.size() == 1) {
        return {parse_real(parts[0], what), 0.0};
    }
    if (parts.size() == 2) {
        return {parse_real(parts[0], what), parse_real(parts[1], what)};
    }
    throw validation_error(what + ": expected 're' or 're,im'");
}

/// "re,im;re,im;..." -> complex vector.
Eigen::VectorXcd parse_complex_list(const std::string &text, const std::string &what) {
    const auto entries = split(text, ';');
    Eigen::VectorXcd v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto parts = split(entries[i], ',');
        if (parts.size() != 2) {
            throw validation_error(what + "[" + std::to_string(i) + "]: expected 're,im'");
        }
        v[static_cast<Eigen::Index>(i)] = {parse_real(parts[0], what), parse_real(parts[1], what)};
    }
    return v;
}

/// "a,b,c" -> real vector.
Eigen::VectorXd parse_real_list(const std::string &text, const std::string &what) {
    const auto entries = split(text, ',');
    Eigen::VectorXd v(static_cast<Eigen::Index>(entries.size()));
    for (std::size_t i = 0; i < entries.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = parse_real(entries[i], what);
    }
    return v;
}

/// "zero" or rows separated by ';', entries by whitespace, each 're,im'.
Eigen::MatrixXcd parse_matrix(const std::string &text, Eigen::Index dim, const std::string &what) {
    if (text == "zero") {
        return Eigen::MatrixXcd::Zero(dim, dim);
    }
    const auto rows = split(text, ';');
    if (static_cast<Eigen::Index>(rows.size()) != dim) {
        throw validation_error(what + ": expected 'zero' or " + std::to_string(dim) + " rows");
    }
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        std::istringstream row(rows[static_cast<std::size_t>(r)]);
        std::string entry;
        Eigen::Index c = 0;
        while (row >> entry) {
            if (c >= dim) {
                throw validation_error(what + ": row " + std::to_string(r) + " has too many entries");
            }
            m(r, c) = parse_complex_scalar(entry, what);
            ++c;
        }
        if (c != dim) {
            throw validation_error(what + ": row " + std::to_string(r) + " needs " +
                                   std::to_string(dim) + " entries");
        }
    }
    return m;
}

// ---------------------------------------------------------------------------
// Setup resolution: file document first, inline flags override
// ---------------------------------------------------------------------------

struct cli_inputs {
    std::string setup_path;
    std::string psi_text;
    std::string phi_text;
    std::string hamiltonian_text;
    std::string observable_text;
    double time = 1.0;
    double width = 1.0;
    double coupling = 1.0;
    std::uint64_t seed = 0;

    CLI::Option *setup_opt = nullptr;
    CLI::Option *psi_opt = nullptr;
    CLI::Option *phi_opt = nullptr;
    CLI::Option *hamiltonian_opt = nullptr;
    CLI::Option *observable_opt = nullptr;
    CLI::Option *time_opt = nullptr;
    CLI::Option *width_opt = nullptr;
    CLI::Option *coupling_opt = nullptr;
    CLI::Option *seed_opt = nullptr;

    void attach(CLI::App *cmd, bool with_meter) {
        setup_opt = cmd->add_option("--setup", setup_path, "Setup JSON document");
        psi_opt = cmd->add_option("--psi", psi_text, "Initial state, 're,im;re,im;...'");
        phi_opt = cmd->add_option("--phi", phi_text, "Final state, 're,im;re,im;...'");
        hamiltonian_opt = cmd->add_option("--hamiltonian", hamiltonian_text,
                                          "'zero' or rows 're,im re,im;...' (row-major)");
        time_opt = cmd->add_option("--time,-T", time, "Total evolution time");
        observable_opt = cmd->add_option("--B", observable_text, "Observable eigenvalues 'b1,b2,...'");
        if (with_meter) {
            width_opt = cmd->add_option("--width", width, "Meter width");
            coupling_opt = cmd->add_option("--coupling", coupling, "Meter coupling (default 1)");
        }
        seed_opt = cmd->add_option("--seed", seed, "64-bit seed");
    }

    setup_document resolve() const {
        setup_document doc;
        if (setup_opt && setup_opt->count() > 0) {
            doc = load_setup_file(setup_path);
        }
        if (psi_opt->count() > 0) {
            const auto v = parse_complex_list(psi_text, "psi");
            if (doc.dimension > 0 && v.size() != doc.dimension) {
                throw validation_error("psi: length differs from setup dimension");
            }
            doc.psi = v;
            if (doc.dimension == 0) {
                doc.dimension = v.size();
                doc.hamiltonian = Eigen::MatrixXcd::Zero(v.size(), v.size());
            }
        }
        if (phi_opt->count() > 0) {
            const auto v = parse_complex_list(phi_text, "phi");
            if (doc.dimension > 0 && v.size() != doc.dimension) {
                throw validation_error("phi: length differs from setup dimension");
            }
            doc.phi = v;
            if (doc.dimension == 0) {
                doc.dimension = v.size();
                doc.hamiltonian = Eigen::MatrixXcd::Zero(v.size(), v.size());
            }
        }
        if (doc.dimension == 0) {
            throw validation_error("setup: provide --setup or inline --psi/--phi");
        }
        if (hamiltonian_opt->count() > 0) {
            doc.hamiltonian = parse_matrix(hamiltonian_text, doc.dimension, "hamiltonian");
        }
        if (time_opt->count() > 0) {
            doc.time = time;
        }
        if (observable_opt->count() > 0) {
            const auto b = parse_real_list(observable_text, "observable");
            if (b.size() != doc.dimension) {
                throw validation_error("observable: length differs from setup dimension");
            }
            doc.observable_eigenvalues = b;
            doc.has_observable = true;
        }
        if (width_opt && width_opt->count() > 0) {
            doc.meter_width = width;
            doc.has_meter = true;
        }
        if (coupling_opt && coupling_opt->count() > 0) {
            doc.meter_coupling = coupling;
            if (!doc.has_meter) {
                throw validation_error("meter.width: required when --coupling is given");
            }
        }
        if (seed_opt->count() > 0) {
            doc.seed = seed;
        }
        return doc;
    }
};

measurement_setup build_setup(const setup_document &doc) {
    const auto paths =
        path_amplitudes(make_psi(doc), make_phi(doc), make_hamiltonian(doc), doc.time);
    return measurement_setup(paths, make_meter(doc));
}

// ---------------------------------------------------------------------------
// Output helpers
// ---------------------------------------------------------------------------

void value_or_null(jout::writer &w, double v) {
    if (std::isfinite(v)) {
        w.value(v);
    } else {
        w.null();
    }
}

void write_report(jout::writer &w, const scenario_report &report) {
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("scenario");
    w.key("name").value(report.name);
    w.key("passed").value(report.passed());
    w.key("rows").begin_array();
    for (const auto &row : report.rows) {
        w.begin_object();
        w.key("label").value(row.label);
        w.key("expected").value(row.expected);
        w.key("computed");
        value_or_null(w, row.computed);
        w.key("tolerance").value(row.tolerance);
        w.key("passed").value(row.passed);
        w.end_object();
    }
    w.end_array();
    w.key("narrative").value(report.narrative);
    w.end_object();
}

void print(const jout::writer &w) { std::cout << w.str() << "\n"; }

void require_json(const std::string &format, const std::string &command) {
    if (format != "json") {
        throw validation_error(command + ": only --format json is supported here");
    }
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

int run_amplitudes(const cli_inputs &inputs, const std::string &format) {
    require_json(format, "amplitudes");
    const auto doc = inputs.resolve();
    const auto psi = make_psi(doc);
    const auto phi = make_phi(doc);
    const auto h = make_hamiltonian(doc);
    const auto paths = path_amplitudes(psi, phi, h, doc.time);
    const cplx amplitude = transition_amplitude(psi, phi, h, doc.time);

    jout::writer w;
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("amplitudes");
    w.key("dimension").value(static_cast<std::uint64_t>(paths.dim()));
    w.key("transition_amplitude").complex_pair(amplitude);
    w.key("probability").value(std::norm(amplitude));
    w.key("path_amplitudes").begin_array();
    for (Eigen::Index i = 0; i < paths.dim(); ++i) {
        w.complex_pair(paths.amplitudes()[i]);
    }
    w.end_array();
    w.key("total").complex_pair(paths.total());
    const bool forbidden = std::abs(paths.total()) <= default_amplitude_cutoff;
    w.key("forbidden").value(forbidden);
    w.key("relative_amplitudes");
    if (forbidden) {
        w.null();
    } else {
        const auto alpha = relative_amplitudes(paths);
        w.begin_array();
        for (Eigen::Index i = 0; i < alpha.size(); ++i) {
            w.complex_pair(alpha[i]);
        }
        w.end_array();
    }
    w.key("path_probabilities");
    if (paths.weight() > 0.0) {
        const auto omega = path_probabilities(paths);
        w.begin_array();
        for (Eigen::Index i = 0; i < omega.size(); ++i) {
            w.value(omega[i]);
        }
        w.end_array();
    } else {
        w.null();
    }
    w.end_object();
    print(w);
    return 0;
}

int run_weakvalue(const cli_inputs &inputs, const std::string &format) {
    require_json(format, "weakvalue");
    const auto doc = inputs.resolve();
    const cplx wv = weak_value(make_psi(doc), make_phi(doc), make_hamiltonian(doc), doc.time,
                               make_observable(doc));
    jout::writer w;
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("weakvalue");
    w.key("weak_value").complex_pair(wv);
    w.end_object();
    print(w);
    return 0;
}

int run_meanshift(const cli_inputs &inputs, const std::string &format, bool quad) {
    require_json(format, "meanshift");
    const auto setup = build_setup(inputs.resolve());
    const auto stats = quad ? mean_pointer_shift_quadrature(setup) : mean_pointer_shift(setup);
    jout::writer w;
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("meanshift");
    w.key("method").value(stats.method == shift_method::quadrature ? "quadrature" : "closed_form");
    w.key("norm").value(stats.norm);
    w.key("mean_shift").value(stats.mean_shift);
    w.end_object();
    print(w);
    return 0;
}

int run_sweep(const cli_inputs &inputs, const std::string &format, bool quad,
              const std::string &widths_text) {
    const auto widths_vec = parse_real_list(widths_text, "widths");
    std::vector<double> widths(widths_vec.data(), widths_vec.data() + widths_vec.size());
    const auto setup = build_setup(inputs.resolve());
    const auto sweep = sweep_width(setup, widths, default_norm_cutoff, quad);
    const double slope = weak_convergence_slope(sweep);

    if (format == "csv") {
        std::cout << "width,status,norm,mean_shift,abs_err_strong,abs_err_weak\n";
        for (const auto &row : sweep.rows) {
            std::cout << jout::number(row.width) << ','
                      << (row.forbidden ? "forbidden" : "ok") << ',' << jout::number(row.norm)
                      << ',';
            if (!row.forbidden) {
                std::cout << jout::number(row.mean_shift);
            }
            std::cout << ',';
            if (std::isfinite(row.err_strong)) {
                std::cout << jout::number(row.err_strong);
            }
            std::cout << ',';
            if (std::isfinite(row.err_weak)) {
                std::cout << jout::number(row.err_weak);
            }
            std::cout << '\n';
        }
        return 0;
    }

    jout::writer w;
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("sweep");
    w.key("method").value(quad ? "quadrature" : "closed_form");
    w.key("strong_reference");
    value_or_null(w, sweep.strong_reference);
    w.key("weak_reference");
    value_or_null(w, sweep.weak_reference);
    w.key("tail_slope");
    value_or_null(w, slope);
    w.key("rows").begin_array();
    for (const auto &row : sweep.rows) {
        w.begin_object();
        w.key("width").value(row.width);
        w.key("status").value(row.forbidden ? "forbidden" : "ok");
        w.key("norm").value(row.norm);
        w.key("mean_shift");
        value_or_null(w, row.forbidden ? std::numeric_limits<double>::quiet_NaN() : row.mean_shift);
        w.key("abs_err_strong");
        value_or_null(w, row.err_strong);
        w.key("abs_err_weak");
        value_or_null(w, row.err_weak);
        w.end_object();
    }
    w.end_array();
    w.end_object();
    print(w);
    return 0;
}

int run_sample(const cli_inputs &inputs, const std::string &format, std::uint64_t n,
               unsigned threads, bool classify, bool include_readings) {
    const auto doc = inputs.resolve();
    const auto setup = build_setup(doc);
    const auto batch = sample_pointer(setup, n, doc.seed, default_norm_cutoff, threads);

    if (format == "csv") {
        std::cout << "reading\n";
        for (double f : batch.readings) {
            std::cout << jout::number(f) << '\n';
        }
        return 0;
    }

    const auto stats = empirical_stats(batch);
    jout::writer w;
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("sample");
    w.key("n").value(static_cast<std::uint64_t>(stats.count));
    w.key("seed").value(doc.seed);
    w.key("threads").value(static_cast<std::uint64_t>(threads));
    w.key("mean").value(stats.mean);
    w.key("std_error").value(stats.std_error);
    if (classify) {
        const auto counts = classify_strong(batch);
        w.key("outcome_counts").begin_array();
        for (std::size_t c : counts) {
            w.value(static_cast<std::uint64_t>(c));
        }
        w.end_array();
    }
    if (include_readings) {
        w.key("readings").begin_array();
        for (double f : batch.readings) {
            w.value(f);
        }
        w.end_array();
    }
    w.end_object();
    print(w);
    return 0;
}

int run_solve(const cli_inputs &inputs, const std::string &format, const std::string &z_text) {
    require_json(format, "solve");
    auto doc = inputs.resolve();
    if (doc.dimension != 2) {
        throw validation_error("solve: two-path problems only (dimension 2)");
    }
    target_problem problem;
    problem.initial = make_psi(doc).coeffs();
    const auto obs = make_observable(doc);
    problem.eigenvalues = obs.eigenvalues();
    problem.target = parse_complex_scalar(z_text, "Z");

    const pure_state phi = solve_postselection(problem);
    const double residual = verify_target(problem, phi);
    const cplx achieved = weak_value(pure_state(problem.initial), phi, hermitian_op::zero(2), 0.0,
                                     obs);

    doc.psi = problem.initial;
    doc.phi = phi.coeffs();
    doc.hamiltonian = Eigen::MatrixXcd::Zero(2, 2);

    jout::writer w;
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("command").value("solve");
    w.key("target").complex_pair(problem.target);
    w.key("eta").begin_array();
    w.complex_pair(problem.target - problem.eigenvalues[1]);
    w.complex_pair(problem.eigenvalues[0] - problem.target);
    w.end_array();
    w.key("phi").begin_array();
    for (Eigen::Index i = 0; i < 2; ++i) {
        w.complex_pair(phi.coeffs()[i]);
    }
    w.end_array();
    w.key("weak_value").complex_pair(achieved);
    w.key("residual").value(residual);
    w.key("setup");
    write_setup(w, doc);
    w.end_object();
    print(w);
    return 0;
}

int run_scenario(const cli_inputs &inputs, const std::string &format, const std::string &which) {
    require_json(format, "scenario");
    scenario_report report;
    if (which == "threebox") {
        report = three_box();
    } else if (which == "aav") {
        const std::uint64_t seed =
            inputs.seed_opt->count() > 0 ? inputs.seed : default_scenario_seed;
        report = aav_spin(seed);
    } else if (which == "route") {
        const bool custom = inputs.setup_opt->count() > 0 || inputs.psi_opt->count() > 0;
        if (custom) {
            const auto doc = inputs.resolve();
            report = route_number(make_psi(doc), make_phi(doc), make_hamiltonian(doc), doc.time);
        } else {
            report = route_number();
        }
    } else {
        throw validation_error("scenario: expected one of threebox, aav, route");
    }
    jout::writer w;
    write_report(w, report);
    print(w);
    return report.passed() ? 0 : 1;
}

void emit_error(const std::string &code, const std::string &message) {
    std::cerr << "code:" << code << " " << message << "\n";
}

int dispatch(int argc, char **argv) {
    CLI::App app{"von Neumann pointer statistics for pre- and post-selected systems"};
    app.require_subcommand(1);
    app.fallthrough(); // lets --format appear after the subcommand

    std::string format = "json";
    app.add_option("--format", format, "Output format: json or csv (csv: sweep/sample only)")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();

    cli_inputs in_amp, in_wv, in_shift, in_sweep, in_sample, in_solve, in_scenario;

    auto *amplitudes = app.add_subcommand("amplitudes", "Path amplitude decomposition");
    in_amp.attach(amplitudes, false);

    auto *weakvalue = app.add_subcommand("weakvalue", "Weak value of a path-diagonal observable");
    in_wv.attach(weakvalue, false);

    auto *meanshift = app.add_subcommand("meanshift", "Conditioned mean pointer shift");
    in_shift.attach(meanshift, true);
    bool shift_quad = false;
    meanshift->add_flag("--quad", shift_quad, "Use the quadrature oracle instead of the closed form");

    auto *sweep = app.add_subcommand("sweep", "Mean shift across meter widths");
    in_sweep.attach(sweep, true);
    bool sweep_quad = false;
    std::string widths_text;
    sweep->add_flag("--quad", sweep_quad, "Use the quadrature oracle instead of the closed form");
    sweep->add_option("--widths", widths_text, "Ascending widths 'w1,w2,...'")->required();

    auto *sample = app.add_subcommand("sample", "Monte Carlo pointer readings");
    in_sample.attach(sample, true);
    std::uint64_t n = 1000;
    unsigned threads = 1;
    bool classify = false;
    bool readings = false;
    sample->add_option("--n", n, "Number of readings")->capture_default_str();
    sample->add_option("--threads", threads, "Worker threads (output is identical for any count)")
        ->capture_default_str();
    sample->add_flag("--classify", classify, "Strong-regime eigenvalue counts");
    sample->add_flag("--readings", readings, "Include raw readings in the JSON output");

    auto *solve = app.add_subcommand("solve", "Construct a post-selection for a target weak value");
    in_solve.attach(solve, false);
    std::string z_text;
    solve->add_option("--Z", z_text, "Target weak value 're[,im]'")->required();

    auto *scenario = app.add_subcommand("scenario", "Canned worked cases");
    std::string which;
    scenario->add_option("name", which, "threebox, aav, or route")->required();
    in_scenario.attach(scenario, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        emit_error("validation_error", e.what());
        return 2;
    }

    if (amplitudes->parsed()) {
        return run_amplitudes(in_amp, format);
    }
    if (weakvalue->parsed()) {
        return run_weakvalue(in_wv, format);
    }
    if (meanshift->parsed()) {
        return run_meanshift(in_shift, format, shift_quad);
    }
    if (sweep->parsed()) {
        return run_sweep(in_sweep, format, sweep_quad, widths_text);
    }
    if (sample->parsed()) {
        return run_sample(in_sample, format, n, threads, classify, readings);
    }
    if (solve->parsed()) {
        return run_solve(in_solve, format, z_text);
    }
    if (scenario->parsed()) {
        return run_scenario(in_scenario, format, which);
    }
    emit_error("validation_error", "no subcommand given");
    return 2;
}

} // namespace

int main(int argc, char **argv) {
    try {
        return dispatch(argc, argv);
    } catch (const validation_error &e) {
        emit_error("validation_error", e.what());
        return 2;
    } catch (const forbidden_transition &e) {
        emit_error("forbidden_transition", e.what());
        return 3;
    } catch (const no_open_path &e) {
        emit_error("no_open_path", e.what());
        return 3;
    } catch (const regime_error &e) {
        emit_error("regime_error", e.what());
        return 3;
    } catch (const numerical_error &e) {
        emit_error("numerical_error", e.what());
        return 4;
    } catch (const std::exception &e) {
        emit_error("internal_error", e.what());
        return 4;
    }
}
