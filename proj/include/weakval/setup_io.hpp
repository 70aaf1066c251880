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

// Setup documents: the JSON description of a pre-/post-selected measurement
// consumed and produced by the command-line front end. Complex numbers are
// always explicit [re, im] pairs. Parsing goes through nlohmann::json;
// emission uses a small writer of its own so that every floating-point field
// is printed with 17 significant digits and object keys keep a fixed order,
// making output byte-stable.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "weakval/core.hpp"
#include "weakval/errors.hpp"
#include "weakval/pointer.hpp"

namespace weakval {

inline constexpr int setup_schema_version = 1;

struct setup_document {
    Eigen::Index dimension = 0;
    Eigen::VectorXcd psi;
    Eigen::VectorXcd phi;
    Eigen::MatrixXcd hamiltonian; // zero matrix when the document says "zero"
    double time = 1.0;
    bool has_observable = false;
    Eigen::VectorXd observable_eigenvalues;
    bool has_meter = false;
    double meter_width = 1.0;
    double meter_coupling = 1.0;
    std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Deterministic JSON output
// ---------------------------------------------------------------------------

namespace jout {

/// 17 significant digits: enough for bit-exact double round-trips.
inline std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string number(std::uint64_t v) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(v));
    return buf;
}

inline std::string quoted(const std::string &s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    out += '"';
    return out;
}

/// Minimal streaming writer: keys are emitted in call order.
class writer {
  public:
    writer &begin_object() {
        separate();
        buf_ += '{';
        fresh_ = true;
        return *this;
    }
    writer &end_object() {
        buf_ += '}';
        fresh_ = false;
        return *this;
    }
    writer &begin_array() {
        separate();
        buf_ += '[';
        fresh_ = true;
        return *this;
    }
    writer &end_array() {
        buf_ += ']';
        fresh_ = false;
        return *this;
    }
    writer &key(const std::string &k) {
        separate();
        buf_ += quoted(k);
        buf_ += ':';
        fresh_ = true;
        return *this;
    }
    writer &value(double v) { return raw(number(v)); }
    writer &value(int v) { return raw(std::to_string(v)); }
    writer &value(std::uint64_t v) { return raw(number(v)); }
    writer &value(bool v) { return raw(v ? "true" : "false"); }
    writer &value(const std::string &v) { return raw(quoted(v)); }
    writer &value(const char *v) { return raw(quoted(v)); }
    writer &null() { return raw("null"); }
    writer &complex_pair(cplx v) {
        begin_array();
        value(v.real());
        value(v.imag());
        return end_array();
    }

    const std::string &str() const { return buf_; }

  private:
    writer &raw(const std::string &text) {
        separate();
        buf_ += text;
        fresh_ = false;
        return *this;
    }
    void separate() {
        if (!fresh_ && !buf_.empty()) {
            const char last = buf_.back();
            if (last != '{' && last != '[' && last != ':') {
                buf_ += ',';
            }
        }
        fresh_ = false;
    }

    std::string buf_;
    bool fresh_ = true;
};

} // namespace jout

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace detail {

using json = nlohmann::json;

[[noreturn]] inline void field_error(const std::string &field, const std::string &what) {
    throw validation_error("setup." + field + ": " + what);
}

inline double require_number(const json &j, const std::string &field) {
    if (!j.is_number()) {
        field_error(field, "expected a number");
    }
    return j.get<double>();
}

inline cplx parse_complex(const json &j, const std::string &field) {
    if (!j.is_array() || j.size() != 2) {
        field_error(field, "expected a [re, im] pair");
    }
    return {require_number(j[0], field + "[0]"), require_number(j[1], field + "[1]")};
}

inline Eigen::VectorXcd parse_state(const json &j, const std::string &field, Eigen::Index dim) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
        field_error(field, "expected " + std::to_string(dim) + " [re, im] pairs");
    }
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        v[i] = parse_complex(j[static_cast<std::size_t>(i)],
                             field + "[" + std::to_string(i) + "]");
    }
    return v;
}

inline Eigen::MatrixXcd parse_hamiltonian(const json &j, Eigen::Index dim) {
    if (j.is_string()) {
        if (j.get<std::string>() != "zero") {
            field_error("hamiltonian", "the only recognized string form is \"zero\"");
        }
        return Eigen::MatrixXcd::Zero(dim, dim);
    }
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != dim) {
        field_error("hamiltonian", "expected \"zero\" or " + std::to_string(dim) + " rows");
    }
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        const auto &row = j[static_cast<std::size_t>(r)];
        const std::string row_field = "hamiltonian[" + std::to_string(r) + "]";
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != dim) {
            field_error(row_field, "expected " + std::to_string(dim) + " [re, im] pairs");
        }
        for (Eigen::Index c = 0; c < dim; ++c) {
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)],
                                    row_field + "[" + std::to_string(c) + "]");
        }
    }
    return m;
}

} // namespace detail

/// Parses a setup document, reporting malformed JSON with the parser's
/// line/column diagnostics and semantic problems with the offending field.
inline setup_document parse_setup_text(const std::string &text) {
    detail::json j;
    try {
        j = detail::json::parse(text);
    } catch (const detail::json::parse_error &e) {
        throw validation_error(std::string("setup: ") + e.what());
    }
    if (!j.is_object()) {
        detail::field_error("<root>", "expected a JSON object");
    }

    setup_document doc;
    if (j.contains("schema")) {
        if (!j["schema"].is_number_integer() || j["schema"].get<int>() != setup_schema_version) {
            detail::field_error("schema", "unsupported schema version");
        }
    }
    if (!j.contains("dimension") || !j["dimension"].is_number_integer()) {
        detail::field_error("dimension", "required integer field");
    }
    const auto dim = j["dimension"].get<Eigen::Index>();
    if (dim < 2 || dim > 64) {
        detail::field_error("dimension", "must lie in [2, 64]");
    }
    doc.dimension = dim;

    if (!j.contains("psi")) {
        detail::field_error("psi", "required field");
    }
    doc.psi = detail::parse_state(j["psi"], "psi", dim);
    if (!j.contains("phi")) {
        detail::field_error("phi", "required field");
    }
    doc.phi = detail::parse_state(j["phi"], "phi", dim);

    doc.hamiltonian = j.contains("hamiltonian") ? detail::parse_hamiltonian(j["hamiltonian"], dim)
                                                : Eigen::MatrixXcd::Zero(dim, dim);
    doc.time = j.contains("time") ? detail::require_number(j["time"], "time") : 1.0;

    if (j.contains("observable")) {
        const auto &obs = j["observable"];
        if (!obs.is_array() || static_cast<Eigen::Index>(obs.size()) != dim) {
            detail::field_error("observable", "expected " + std::to_string(dim) + " eigenvalues");
        }
        doc.observable_eigenvalues.resize(dim);
        for (Eigen::Index i = 0; i < dim; ++i) {
            doc.observable_eigenvalues[i] = detail::require_number(
                obs[static_cast<std::size_t>(i)], "observable[" + std::to_string(i) + "]");
        }
        doc.has_observable = true;
    }

    if (j.contains("meter")) {
        const auto &meter = j["meter"];
        if (!meter.is_object() || !meter.contains("width")) {
            detail::field_error("meter", "expected an object with at least a width");
        }
        doc.meter_width = detail::require_number(meter["width"], "meter.width");
        doc.meter_coupling =
            meter.contains("coupling") ? detail::require_number(meter["coupling"], "meter.coupling")
                                       : 1.0;
        doc.has_meter = true;
    }

    if (j.contains("seed")) {
        if (!j["seed"].is_number_unsigned() && !j["seed"].is_number_integer()) {
            detail::field_error("seed", "expected an unsigned integer");
        }
        doc.seed = j["seed"].get<std::uint64_t>();
    }
    return doc;
}

inline setup_document load_setup_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw validation_error("setup: cannot open '" + path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_setup_text(buffer.str());
}

/// Writes the document as a JSON object into an existing writer.
inline void write_setup(jout::writer &w, const setup_document &doc) {
    w.begin_object();
    w.key("schema").value(setup_schema_version);
    w.key("dimension").value(static_cast<std::uint64_t>(doc.dimension));
    w.key("psi").begin_array();
    for (Eigen::Index i = 0; i < doc.psi.size(); ++i) {
        w.complex_pair(doc.psi[i]);
    }
    w.end_array();
    w.key("phi").begin_array();
    for (Eigen::Index i = 0; i < doc.phi.size(); ++i) {
        w.complex_pair(doc.phi[i]);
    }
    w.end_array();
    w.key("hamiltonian");
    if (doc.hamiltonian.isZero(0.0)) {
        w.value("zero");
    } else {
        w.begin_array();
        for (Eigen::Index r = 0; r < doc.hamiltonian.rows(); ++r) {
            w.begin_array();
            for (Eigen::Index c = 0; c < doc.hamiltonian.cols(); ++c) {
                w.complex_pair(doc.hamiltonian(r, c));
            }
            w.end_array();
        }
        w.end_array();
    }
    w.key("time").value(doc.time);
    if (doc.has_observable) {
        w.key("observable").begin_array();
        for (Eigen::Index i = 0; i < doc.observable_eigenvalues.size(); ++i) {
            w.value(doc.observable_eigenvalues[i]);
        }
        w.end_array();
    }
    if (doc.has_meter) {
        w.key("meter").begin_object();
        w.key("width").value(doc.meter_width);
        w.key("coupling").value(doc.meter_coupling);
        w.end_object();
    }
    w.key("seed").value(doc.seed);
    w.end_object();
}

/// Serializes the document; parse(setup_to_json(doc)) reproduces it exactly.
inline std::string setup_to_json(const setup_document &doc) {
    jout::writer w;
    write_setup(w, doc);
    return w.str() + "\n";
}

// ---------------------------------------------------------------------------
// Document -> module types
// ---------------------------------------------------------------------------

inline pure_state make_psi(const setup_document &doc) {
    if (doc.psi.size() == 0) {
        detail::field_error("psi", "required by this command");
    }
    return pure_state(doc.psi);
}

inline pure_state make_phi(const setup_document &doc) {
    if (doc.phi.size() == 0) {
        detail::field_error("phi", "required by this command");
    }
    return pure_state(doc.phi);
}
inline hermitian_op make_hamiltonian(const setup_document &doc) {
    return hermitian_op(doc.hamiltonian);
}

inline observable make_observable(const setup_document &doc) {
    if (!doc.has_observable) {
        detail::field_error("observable", "required by this command");
    }
    return observable(doc.observable_eigenvalues);
}

inline meter_config make_meter(const setup_document &doc) {
    if (!doc.has_meter) {
        detail::field_error("meter", "required by this command");
    }
    return meter_config(doc.meter_width, doc.meter_coupling, make_observable(doc).eigenvalues());
}

} // namespace weakval
