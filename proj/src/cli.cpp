#include "qfim/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>

#include "qfim/io.hpp"
#include "qfim/theoremlab.hpp"

namespace qfim {

namespace {

const std::vector<std::string> kSuites = {"all",      "positivity", "faithfulness",  "monotonicity",
                                          "selective", "luo",        "min-cov",       "counterexample",
                                          "contraction", "resource", "twirl-scaling"};

// Raised for rank-deficient states handed to a command that needs full rank.
class RankDeficientError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

template <class T>
T json_as(const Json& v, const std::string& key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw InputError("");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw InputError("");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_unsigned()) throw InputError("");
        } else {
            if (!v.is_number()) throw InputError("");
        }
        return v.get<T>();
    } catch (const std::exception&) {
        throw InputError("config." + key + ": wrong type");
    }
}

// Values from the config file apply only where the flag was not given explicitly.
void merge_config(const std::string& path, RunConfig& cfg, const std::map<std::string, CLI::Option*>& opts) {
    const Json j = load_json_file(path);
    if (!j.is_object()) throw InputError(path + ": config must be a JSON object");
    const std::map<std::string, std::function<void(const Json&)>> setters = {
        {"state", [&](const Json& v) { cfg.state_path = json_as<std::string>(v, "state"); }},
        {"gens", [&](const Json& v) { cfg.gens_path = json_as<std::string>(v, "gens"); }},
        {"group", [&](const Json& v) { cfg.group = json_as<std::string>(v, "group"); }},
        {"j", [&](const Json& v) { cfg.j = json_as<double>(v, "j"); }},
        {"f", [&](const Json& v) { cfg.f = json_as<std::string>(v, "f"); }},
        {"seed", [&](const Json& v) { cfg.seed = json_as<std::uint64_t>(v, "seed"); }},
        {"trials",
         [&](const Json& v) {
             cfg.trials = json_as<std::size_t>(v, "trials");
             if (cfg.trials == 0) throw InputError("config.trials: must be positive");
         }},
        {"tol", [&](const Json& v) { cfg.tol = json_as<double>(v, "tol"); }},
        {"h", [&](const Json& v) { cfg.h = json_as<double>(v, "h"); }},
        {"out", [&](const Json& v) { cfg.out = json_as<std::string>(v, "out"); }},
        {"format", [&](const Json& v) { cfg.format = json_as<std::string>(v, "format"); }},
        {"suite", [&](const Json& v) { cfg.suite = json_as<std::string>(v, "suite"); }},
        {"regularize", [&](const Json& v) { cfg.regularize = json_as<bool>(v, "regularize"); }},
        {"inject-noncovariant",
         [&](const Json& v) { cfg.inject_noncovariant = json_as<bool>(v, "inject-noncovariant"); }},
        {"m", [&](const Json& v) { cfg.m = json_as<std::size_t>(v, "m"); }},
        {"richardson", [&](const Json& v) { cfg.richardson = json_as<bool>(v, "richardson"); }},
    };
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto setter = setters.find(it.key());
        if (setter == setters.end()) throw InputError("config." + it.key() + ": unknown key");
        const auto opt = opts.find(it.key());
        if (opt != opts.end() && opt->second->count() > 0) continue;
        setter->second(it.value());
    }
}

void validate(const RunConfig& cfg) {
    if (!(cfg.j > 0.0) || std::abs(2.0 * cfg.j - std::round(2.0 * cfg.j)) > 1e-12)
        throw InputError("--j: must be a positive multiple of 1/2");
    if (cfg.tol && !(*cfg.tol > 0.0)) throw InputError("--tol: must be positive");
    if (!(cfg.h >= 1e-5 && cfg.h <= 1e-3)) throw InputError("--h: must lie in [1e-5, 1e-3]");
    if (cfg.m < 2) throw InputError("--m: ensemble size must be at least 2");
    if (cfg.format != "json" && cfg.format != "csv") throw InputError("--format: expected json or csv");
    if (cfg.f != "sld" && cfg.f != "wy" && cfg.f != "km") throw InputError("--f: expected sld, wy or km");
    if (cfg.group && *cfg.group != "u1" && *cfg.group != "rN" && *cfg.group != "su2" && *cfg.group != "su2-spin-j")
        throw InputError("--group: expected u1, rN or su2");
    if (std::find(kSuites.begin(), kSuites.end(), cfg.suite) == kSuites.end())
        throw InputError("--suite: unknown suite '" + cfg.suite + "'");
    if (cfg.format == "csv" && cfg.command != "fisher")
        throw InputError("--format csv is only available for the fisher command");
}

std::string group_name(const std::string& g) { return g == "su2-spin-j" ? "su2" : g; }

GeneratorSet resolve_generators(const RunConfig& cfg) {
    if (!cfg.gens_path.empty()) {
        auto gens = generators_from_json(load_json_file(cfg.gens_path));
        try {
            return GeneratorSet(std::move(gens), cfg.group ? group_name(*cfg.group) : "custom");
        } catch (const std::invalid_argument& e) {
            throw InputError(cfg.gens_path + ": " + e.what());
        }
    }
    if (cfg.group) return default_preset(group_name(*cfg.group), cfg.j);
    throw InputError("--gens or --group is required");
}

DensityMatrix resolve_state(const RunConfig& cfg) {
    if (cfg.state_path.empty()) throw InputError("--state is required");
    return state_from_json(load_json_file(cfg.state_path));
}

Json config_json(const RunConfig& cfg) {
    Json j;
    j["command"] = cfg.command;
    if (!cfg.state_path.empty()) j["state"] = cfg.state_path;
    if (!cfg.gens_path.empty()) j["gens"] = cfg.gens_path;
    if (cfg.group) j["group"] = *cfg.group;
    j["j"] = cfg.j;
    j["f"] = cfg.f;
    j["seed"] = cfg.seed;
    j["trials"] = cfg.trials;
    if (cfg.tol) j["tol"] = *cfg.tol;
    j["h"] = cfg.h;
    j["suite"] = cfg.suite;
    j["regularize"] = cfg.regularize;
    j["inject-noncovariant"] = cfg.inject_noncovariant;
    j["m"] = cfg.m;
    j["richardson"] = cfg.richardson;
    return j;
}

void emit(const RunConfig& cfg, const std::string& body, const std::string& summary, std::ostream& out) {
    if (cfg.out.empty()) {
        out << body;
        return;
    }
    std::ofstream f(cfg.out, std::ios::binary);
    if (!f) throw InputError("--out: cannot open " + cfg.out + " for writing");
    f << body;
    if (!f) throw InputError("--out: failed writing " + cfg.out);
    out << summary << '\n';
}

MinCovOptions min_cov_options(const RunConfig& cfg) {
    MinCovOptions o;
    o.h = cfg.h;
    o.richardson = cfg.richardson;
    if (cfg.tol) o.equality_tol = *cfg.tol;
    return o;
}

// ---------------------------------------------------------------------------

int cmd_fisher(const RunConfig& cfg, std::ostream& out) {
    const DensityMatrix rho = resolve_state(cfg);
    const GeneratorSet gens = resolve_generators(cfg);
    if (gens.dim() != rho.dim()) throw InputError("generators act on dimension " + std::to_string(gens.dim()) +
                                                  " but the state has dimension " + std::to_string(rho.dim()));
    const StandardOperatorFunction f = builtin_f(cfg.f);
    const FisherMatrix fm = fisher_matrix(rho, gens, f);

    Rng rng = derive_rng(cfg.seed, 0);
    std::normal_distribution<double> normal;
    double residual = 0.0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> lambda(gens.size());
        for (auto& x : lambda) x = normal(rng);
        const double scalar = fisher_scalar(rho, gens.combination(lambda), f);
        residual = std::max(residual, std::abs(fm.quadratic_form(lambda) - scalar) / std::max(1.0, std::abs(scalar)));
    }

    if (cfg.format == "csv") {
        emit(cfg, real_matrix_to_csv(fm), "wrote " + cfg.out, out);
        return kExitOk;
    }
    Json j;
    j["command"] = "fisher";
    j["f"] = f.name();
    j["f0"] = f.f0();
    j["dim"] = rho.dim();
    j["rank"] = rho.rank();
    j["group"] = gens.label();
    j["generators"] = gens.size();
    j["fisher"] = real_matrix_to_json(fm);
    j["covariance"] = real_matrix_to_json(covariance_matrix(rho, gens));
    j["skew-information"] = real_matrix_to_json(skew_info_matrix(rho, gens, f));
    j["contraction-residual"] = residual;
    emit(cfg, write_json(j), "wrote " + cfg.out, out);
    return kExitOk;
}

VerificationReport run_suites(const RunConfig& cfg) {
    SuiteOptions opts;
    opts.seed = cfg.seed;
    opts.trials = cfg.trials;
    const StandardOperatorFunction f = builtin_f(cfg.f);
    MonotonicityOptions mono;
    mono.inject_noncovariant = cfg.inject_noncovariant;

    std::vector<GeneratorSet> groups;
    if (!cfg.gens_path.empty() || cfg.group) {
        groups.push_back(resolve_generators(cfg));
    } else {
        for (const char* g : {"u1", "rN", "su2"}) groups.push_back(default_preset(g, cfg.j));
    }
    const bool all = cfg.suite == "all";
    const auto want = [&](const char* name) { return all || cfg.suite == name; };

    std::vector<VerificationReport> parts;
    if (want("positivity")) parts.push_back(verify_positivity(opts));
    if (want("contraction")) parts.push_back(verify_contraction(opts));
    if (want("luo")) {
        if (f.f0() > 0.0) parts.push_back(verify_luo_matrix(f, opts));
        else if (!all) throw InputError("--suite luo needs f(0) > 0 (sld or wy)");
    }
    if (want("min-cov")) parts.push_back(verify_min_cov_suite(opts, min_cov_options(cfg)));
    if (want("counterexample")) parts.push_back(counterexample_yu(opts, cfg.m));
    for (const auto& gens : groups) {
        if (cfg.suite == "resource" || all) {
            parts.push_back(verify_resource_measure(gens, f, opts, mono));
        } else {
            if (cfg.suite == "faithfulness") parts.push_back(verify_faithfulness(gens, f, opts));
            if (cfg.suite == "monotonicity") parts.push_back(verify_monotonicity(gens, f, opts, mono));
        }
        if (want("selective")) parts.push_back(verify_selective(gens, f, opts));
        const bool haar = !generators_commute(gens);
        if (cfg.suite == "twirl-scaling" || (all && haar)) {
            if (!haar) throw InputError("--suite twirl-scaling needs non-commuting (su2) generators");
            SuiteOptions scaling = opts;
            scaling.trials = 0;
            parts.push_back(verify_twirl_scaling(gens, 2000, scaling));
        }
    }
    VerificationReport r = combine("verify[" + cfg.suite + "]", cfg.seed, std::move(parts));
    if (f.f0() == 0.0 && all) r.notes.push_back("matrix Luo criteria skipped: f(0) = 0 for " + f.name());
    if (cfg.inject_noncovariant) r.notes.push_back("non-covariant channels injected as a negative control");
    return r;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
    const VerificationReport r = run_suites(cfg);
    Json j = report_to_json(r);
    j["config"] = config_json(cfg);
    emit(cfg, write_json(j), std::string(r.passed ? "PASS " : "FAIL ") + r.theorem_id + " -> " + cfg.out, out);
    return r.passed ? kExitOk : kExitFailed;
}

void stamp_seed(VerificationReport& r, std::uint64_t seed) {
    r.seed = seed;
    for (auto& c : r.components) stamp_seed(c, seed);
}

int cmd_minvar(const RunConfig& cfg, std::ostream& out) {
    DensityMatrix rho = resolve_state(cfg);
    const GeneratorSet gens = resolve_generators(cfg);
    if (gens.dim() != rho.dim()) throw InputError("generators and state have different dimensions");
    constexpr double kEpsilon = 1e-8;
    bool regularized = false;
    if (rho.rank() < rho.dim()) {
        if (!cfg.regularize)
            throw RankDeficientError("state has rank " + std::to_string(rho.rank()) + " < " +
                                     std::to_string(rho.dim()) + "; pass --regularize to mix in 1e-8 I/d");
        rho = regularize(rho, kEpsilon);
        regularized = true;
    }
    Rng rng = derive_rng(cfg.seed, 0);
    MinCovResult res = verify_min_cov_matrix(rho, gens, rng, min_cov_options(cfg));
    stamp_seed(res.report, cfg.seed);
    if (regularized)
        res.report.notes.push_back("state regularized as (1 - 1e-8) rho + 1e-8 I/d; the equality holds by continuity");

    Json j = report_to_json(res.report);
    j["fisher"] = real_matrix_to_json(res.fisher);
    j["four-v"] = real_matrix_to_json(res.four_v);
    j["residual"] = res.residual;
    Json xr = Json::array();
    for (const auto& p : res.xr) {
        Json e;
        e["matrix"] = matrix_to_json(p.XR.matrix());
        e["h"] = p.h;
        e["hermiticity-defect"] = p.residual;
        xr.push_back(std::move(e));
    }
    j["xr"] = std::move(xr);
    j["regularized"] = regularized;
    j["config"] = config_json(cfg);
    emit(cfg, write_json(j), std::string(res.report.passed ? "PASS" : "FAIL") + " min-cov -> " + cfg.out, out);
    return res.report.passed ? kExitOk : kExitFailed;
}

int cmd_counterexample(const RunConfig& cfg, std::ostream& out) {
    SuiteOptions opts;
    opts.seed = cfg.seed;
    opts.trials = cfg.trials;
    const VerificationReport r = counterexample_yu(opts, cfg.m);
    Json j = report_to_json(r);
    j["config"] = config_json(cfg);
    emit(cfg, write_json(j), std::string(r.passed ? "PASS" : "FAIL") + " counterexample -> " + cfg.out, out);
    return r.passed ? kExitOk : kExitFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum Fisher information matrices and theorem checks", "qfim"};
    app.set_help_flag("--help", "Print this help and exit");
    app.require_subcommand(1);
    RunConfig cfg;
    std::string config_path;
    std::map<std::string, CLI::Option*> opts;

    auto* fisher = app.add_subcommand("fisher", "Fisher, covariance and skew-information matrices for a state");
    auto* verify = app.add_subcommand("verify", "Run theorem suites and write a verification report");
    auto* minvar = app.add_subcommand("minvar", "Purification minimum-covariance check with extracted X^R");
    auto* counter = app.add_subcommand("counterexample", "Ensemble-average counterexample at I/2");
    for (auto* sub : {fisher, verify, minvar, counter}) sub->fallthrough();

    opts["state"] = app.add_option("--state", cfg.state_path, "State JSON file");
    opts["gens"] = app.add_option("--gens", cfg.gens_path, "Generator JSON file");
    opts["group"] = app.add_option("--group", cfg.group, "Group preset: u1, rN or su2");
    opts["j"] = app.add_option("--j", cfg.j, "Spin for the su2 preset");
    opts["f"] = app.add_option("--f", cfg.f, "Standard operator function: sld, wy or km");
    opts["seed"] = app.add_option("--seed", cfg.seed, "Master seed");
    opts["trials"] = app.add_option("--trials", cfg.trials, "Trials per suite")->check(CLI::PositiveNumber);
    opts["tol"] = app.add_option("--tol", cfg.tol, "Equality tolerance for the minimum-covariance check");
    opts["h"] = app.add_option("--h", cfg.h, "Finite-difference step for X^R");
    opts["out"] = app.add_option("--out", cfg.out, "Output file (default: stdout)");
    opts["format"] = app.add_option("--format", cfg.format, "json or csv (csv: fisher matrix only)");
    opts["suite"] = app.add_option("--suite", cfg.suite, "Suite to run")->check(CLI::IsMember(kSuites));
    opts["regularize"] = app.add_flag("--regularize", cfg.regularize, "Mix rank-deficient states with 1e-8 I/d");
    opts["inject-noncovariant"] =
        app.add_flag("--inject-noncovariant", cfg.inject_noncovariant, "Negative control: non-covariant channels");
    opts["m"] = app.add_option("--m", cfg.m, "Maximum ensemble size for the counterexample");
    opts["richardson"] = app.add_flag("--richardson", cfg.richardson, "Richardson-extrapolate the X^R derivative");
    app.add_option("--config", config_path, "JSON config with the same keys as the flags");

    std::vector<std::string> argv_store{"qfim"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (!config_path.empty()) merge_config(config_path, cfg, opts);
        validate(cfg);
        if (cfg.command == "fisher") return cmd_fisher(cfg, out);
        if (cfg.command == "verify") return cmd_verify(cfg, out);
        if (cfg.command == "minvar") return cmd_minvar(cfg, out);
        return cmd_counterexample(cfg, out);
    } catch (const UnboundedFisherError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnbounded;
    } catch (const RankDeficientError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUnbounded;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitFailed;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    } catch (const Json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidInput;
    }
}

}  // namespace qfim
