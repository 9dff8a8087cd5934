#pragma once

// JSON encoding of matrices, states, generator sets, channels and reports.
//
// Complex matrices are arrays of rows; each entry is [re, im] (a bare number is read as real).
// Floats are written with 17 significant digits so values round-trip exactly.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qfim/channels.hpp"
#include "qfim/fisher.hpp"
#include "qfim/linalg.hpp"
#include "qfim/states.hpp"
#include "qfim/theoremlab.hpp"

namespace qfim {

using Json = nlohmann::ordered_json;

/// Malformed input; the message names the file position or JSON field at fault.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Parses a file, reporting syntax errors as "path:line:column: message".
Json load_json_file(const std::filesystem::path& path);
Json parse_json(const std::string& text, const std::string& source = "<input>");

/// Deterministic writer: two-space indent, insertion-ordered keys, %.17g floats, null for non-finite.
std::string write_json(const Json& value);

Json matrix_to_json(const ComplexMatrix& m);
Json real_matrix_to_json(const SymmetricRealMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& field);

/// A bare matrix, {"type": "density", "matrix": ...} or {"type": "pure", "amplitudes": [...]}.
DensityMatrix state_from_json(const Json& j);
Json state_to_json(const DensityMatrix& rho);

/// {"generators": [matrix, ...]} or a bare array of matrices.
std::vector<HermitianOperator> generators_from_json(const Json& j);
Json generators_to_json(std::span<const HermitianOperator> gens);

/// {"dim_in", "dim_out", "completeness": "trace-preserving" | "trace-non-increasing",
///  "kraus": [...], "covariance": {"scheme", "samples", "tolerance"}}
Json channel_to_json(const KrausChannel& ch);
KrausChannel channel_from_json(const Json& j);

Json report_to_json(const VerificationReport& r);

/// Comma-separated rows with %.17g entries.
std::string real_matrix_to_csv(const SymmetricRealMatrix& m);

std::string format_double(double x);

}  // namespace qfim
