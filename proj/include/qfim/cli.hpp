#pragma once

// Command-line front end. Exit codes: 0 success, 1 a verification failed,
// 2 invalid input, 3 unbounded Fisher information or a rank-deficient state
// where the command needs full rank.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qfim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInvalidInput = 2;
inline constexpr int kExitUnbounded = 3;

struct RunConfig {
    std::string command;
    std::string state_path;
    std::string gens_path;
    std::optional<std::string> group;
    double j = 1.0;
    std::string f = "sld";
    std::uint64_t seed = 7;
    std::size_t trials = 0;  // 0 = suite defaults
    std::optional<double> tol;
    double h = 1e-4;
    std::string out;
    std::string format = "json";
    std::string suite = "all";
    bool regularize = false;
    bool inject_noncovariant = false;
    std::size_t m = 4;
    bool richardson = false;
};

/// Runs one command; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qfim
