#include "qfim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qfim {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
    throw InputError(field + ": " + what);
}

cplx entry_from_json(const Json& e, const std::string& field) {
    if (e.is_number()) return {e.get<double>(), 0.0};
    if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number())
        return {e[0].get<double>(), e[1].get<double>()};
    fail(field, "expected a number or an [re, im] pair");
}

Json complex_to_json(cplx z) { return Json::array({z.real(), z.imag()}); }

void write_value(const Json& v, std::string& out, int depth);

void newline(std::string& out, int depth) {
    out += '\n';
    out.append(static_cast<std::size_t>(depth) * 2, ' ');
}

// Arrays of scalars or of short scalar arrays stay on one line.
bool is_compact(const Json& v) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
        if (e.is_object()) return false;
        if (e.is_array())
            for (const auto& x : e)
                if (x.is_structured()) return false;
    }
    return true;
}

void write_compact(const Json& v, std::string& out) {
    if (!v.is_array()) {
        write_value(v, out, 0);
        return;
    }
    out += '[';
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        write_compact(v[i], out);
    }
    out += ']';
}

void write_value(const Json& v, std::string& out, int depth) {
    switch (v.type()) {
        case Json::value_t::object: {
            if (v.empty()) {
                out += "{}";
                return;
            }
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                newline(out, depth + 1);
                out += Json(it.key()).dump();
                out += ": ";
                write_value(it.value(), out, depth + 1);
            }
            newline(out, depth);
            out += '}';
            return;
        }
        case Json::value_t::array: {
            if (v.empty()) {
                out += "[]";
                return;
            }
            if (is_compact(v)) {
                write_compact(v, out);
                return;
            }
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ',';
                newline(out, depth + 1);
                write_value(v[i], out, depth + 1);
            }
            newline(out, depth);
            out += ']';
            return;
        }
        case Json::value_t::number_float:
            out += format_double(v.get<double>());
            return;
        default:
            out += v.dump();
            return;
    }
}

}  // namespace

std::string format_double(double x) {
    if (!std::isfinite(x)) return "null";
    if (x == 0.0) return std::signbit(x) ? "-0.0" : "0.0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    std::string s(buf);
    // Keep floats recognisable as floats when %.17g yields an integer form.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

Json parse_json(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const Json::parse_error& e) {
        std::size_t line = 1;
        std::size_t col = 1;
        const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
        for (std::size_t i = 0; i < end; ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        std::string what = e.what();
        if (const auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
        throw InputError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
    }
}

Json load_json_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path.string() + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_json(ss.str(), path.string());
}

std::string write_json(const Json& value) {
    std::string out;
    write_value(value, out, 0);
    out += '\n';
    return out;
}

Json matrix_to_json(const ComplexMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json real_matrix_to_json(const SymmetricRealMatrix& m) {
    Json rows = Json::array();
    for (std::size_t r = 0; r < m.size(); ++r) {
        Json row = Json::array();
        for (std::size_t c = 0; c < m.size(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& field) {
    if (!j.is_array() || j.empty()) fail(field, "expected a non-empty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    std::vector<cplx> entries;
    for (std::size_t r = 0; r < rows; ++r) {
        const std::string row_field = field + "[" + std::to_string(r) + "]";
        const Json& row = j[r];
        if (!row.is_array() || row.empty()) fail(row_field, "expected a non-empty array of entries");
        if (r == 0) cols = row.size();
        if (row.size() != cols) fail(row_field, "row length differs from row 0");
        for (std::size_t c = 0; c < cols; ++c)
            entries.push_back(entry_from_json(row[c], row_field + "[" + std::to_string(c) + "]"));
    }
    try {
        return ComplexMatrix(rows, cols, std::move(entries));
    } catch (const std::invalid_argument& e) {
        fail(field, e.what());
    }
}

DensityMatrix state_from_json(const Json& j) {
    try {
        if (j.is_array()) return DensityMatrix(matrix_from_json(j, "state"));
        if (!j.is_object()) fail("state", "expected a matrix or an object with a \"type\" field");
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "type" && it.key() != "matrix" && it.key() != "amplitudes")
                fail("state." + it.key(), "unknown field");
        const std::string type = j.contains("type") && j["type"].is_string() ? j["type"].get<std::string>() : "";
        if (type == "density") {
            if (!j.contains("matrix")) fail("state.matrix", "missing");
            return DensityMatrix(matrix_from_json(j["matrix"], "state.matrix"));
        }
        if (type == "pure") {
            if (!j.contains("amplitudes") || !j["amplitudes"].is_array() || j["amplitudes"].empty())
                fail("state.amplitudes", "expected a non-empty array");
            ComplexVector amp;
            for (std::size_t i = 0; i < j["amplitudes"].size(); ++i)
                amp.push_back(entry_from_json(j["amplitudes"][i], "state.amplitudes[" + std::to_string(i) + "]"));
            const double n = norm(amp);
            if (std::abs(n - 1.0) > 1e-12) fail("state.amplitudes", "vector is not normalized");
            return PureState(std::move(amp)).projector();
        }
        fail("state.type", "expected \"density\" or \"pure\"");
    } catch (const InputError&) {
        throw;
    } catch (const std::invalid_argument& e) {
        throw InputError(std::string("state: ") + e.what());
    }
}

Json state_to_json(const DensityMatrix& rho) {
    Json j;
    j["type"] = "density";
    j["matrix"] = matrix_to_json(rho.matrix());
    return j;
}

std::vector<HermitianOperator> generators_from_json(const Json& j) {
    const Json* list = &j;
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it)
            if (it.key() != "generators") fail("generators-file." + it.key(), "unknown field");
        if (!j.contains("generators")) fail("generators", "missing");
        list = &j["generators"];
    }
    if (!list->is_array() || list->empty()) fail("generators", "expected a non-empty array of matrices");
    std::vector<HermitianOperator> gens;
    for (std::size_t k = 0; k < list->size(); ++k) {
        const std::string field = "generators[" + std::to_string(k) + "]";
        const ComplexMatrix m = matrix_from_json((*list)[k], field);
        if (!m.is_square()) fail(field, "generator must be square");
        try {
            gens.emplace_back(m);
        } catch (const std::invalid_argument& e) {
            fail(field, e.what());
        }
    }
    return gens;
}

Json generators_to_json(std::span<const HermitianOperator> gens) {
    Json list = Json::array();
    for (const auto& g : gens) list.push_back(matrix_to_json(g.matrix()));
    Json j;
    j["generators"] = std::move(list);
    return j;
}

Json channel_to_json(const KrausChannel& ch) {
    Json j;
    j["dim_in"] = ch.dim_in();
    j["dim_out"] = ch.dim_out();
    j["completeness"] =
        ch.completeness() == Completeness::trace_preserving ? "trace-preserving" : "trace-non-increasing";
    Json kraus = Json::array();
    for (const auto& k : ch.kraus()) kraus.push_back(matrix_to_json(k));
    j["kraus"] = std::move(kraus);
    if (const auto& meta = ch.metadata()) {
        Json m;
        m["scheme"] = meta->scheme;
        m["samples"] = meta->samples;
        m["tolerance"] = meta->tolerance;
        j["covariance"] = std::move(m);
    }
    return j;
}

KrausChannel channel_from_json(const Json& j) {
    if (!j.is_object()) fail("channel", "expected an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& k = it.key();
        if (k != "dim_in" && k != "dim_out" && k != "completeness" && k != "kraus" && k != "covariance")
            fail("channel." + k, "unknown field");
    }
    if (!j.contains("kraus") || !j["kraus"].is_array() || j["kraus"].empty())
        fail("channel.kraus", "expected a non-empty array of matrices");
    Completeness c = Completeness::trace_preserving;
    if (j.contains("completeness")) {
        const auto& v = j["completeness"];
        if (v == "trace-preserving") c = Completeness::trace_preserving;
        else if (v == "trace-non-increasing") c = Completeness::trace_non_increasing;
        else fail("channel.completeness", "expected \"trace-preserving\" or \"trace-non-increasing\"");
    }
    std::vector<ComplexMatrix> kraus;
    for (std::size_t i = 0; i < j["kraus"].size(); ++i)
        kraus.push_back(matrix_from_json(j["kraus"][i], "channel.kraus[" + std::to_string(i) + "]"));
    for (const char* key : {"dim_in", "dim_out"}) {
        if (!j.contains(key)) continue;
        if (!j[key].is_number_unsigned()) fail(std::string("channel.") + key, "expected a positive integer");
        const auto dim = j[key].get<std::size_t>();
        const std::size_t actual = std::string(key) == "dim_in" ? kraus.front().cols() : kraus.front().rows();
        if (dim != actual) fail(std::string("channel.") + key, "does not match the Kraus operator shape");
    }
    try {
        KrausChannel ch(std::move(kraus), c);
        if (j.contains("covariance")) {
            const auto& m = j["covariance"];
            CovarianceMetadata meta;
            meta.scheme = m.value("scheme", std::string{});
            meta.samples = m.value("samples", std::size_t{0});
            meta.tolerance = m.value("tolerance", 0.0);
            ch = ch.with_metadata(std::move(meta));
        }
        return ch;
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        fail("channel", e.what());
    }
}

Json report_to_json(const VerificationReport& r) {
    Json j;
    j["theorem-id"] = r.theorem_id;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["tolerance"] = r.tolerance;
    j["max-violation"] = r.max_violation;
    j["passed"] = r.passed;
    if (!r.metrics.empty()) {
        Json m = Json::object();
        for (const auto& [k, v] : r.metrics) m[k] = v;
        j["metrics"] = std::move(m);
    }
    if (!r.notes.empty()) j["notes"] = r.notes;
    Json diags = Json::array();
    for (const auto& d : r.diagnostics) {
        Json e;
        e["trial"] = d.trial;
        e["check"] = d.check;
        e["dim"] = d.dim;
        e["rank"] = d.rank;
        e["group"] = d.group;
        e["f"] = d.f;
        e["violation"] = d.violation;
        if (!d.witness.empty()) e["witness"] = d.witness;
        diags.push_back(std::move(e));
    }
    j["diagnostics"] = std::move(diags);
    if (!r.components.empty()) {
        Json comps = Json::array();
        for (const auto& c : r.components) comps.push_back(report_to_json(c));
        j["components"] = std::move(comps);
    }
    return j;
}

std::string real_matrix_to_csv(const SymmetricRealMatrix& m) {
    std::string out;
    for (std::size_t r = 0; r < m.size(); ++r) {
        for (std::size_t c = 0; c < m.size(); ++c) {
            if (c) out += ',';
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

}  // namespace qfim
