#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qfim/cli.hpp"
#include "qfim/io.hpp"

using namespace qfim;
namespace fs = std::filesystem;

namespace {

const std::string kData = QFIM_EXAMPLES;

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return kData + "/" + name; }

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "qfim-cli-tests";
    fs::create_directories(dir);
    return dir / name;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path p = scratch(name);
    std::ofstream(p) << text;
    return p.string();
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("fisher command") {
    SUBCASE("maximally mixed qubit gives the zero matrix") {
        const Run r = run({"fisher", "--state", data("half.json"), "--gens", data("sxy.json")});
        REQUIRE(r.code == kExitOk);
        const Json j = parse_json(r.out);
        for (const auto& row : j["fisher"])
            for (const auto& v : row) CHECK(v.get<double>() == 0.0);
        CHECK(j["contraction-residual"].get<double>() <= 1e-12);
        CHECK(j["f"] == "sld");
    }
    SUBCASE("pure state gives 4 I, in CSV as well") {
        const Run r = run({"fisher", "--state", data("zero.json"), "--gens", data("sxy.json"), "--format", "csv"});
        REQUIRE(r.code == kExitOk);
        CHECK(r.out == "4,0\n0,4\n");
    }
    SUBCASE("diag(0.75, 0.25) with sigma_x") {
        const Run r = run({"fisher", "--state", data("diag.json"), "--gens", data("sx.json")});
        REQUIRE(r.code == kExitOk);
        CHECK(std::abs(parse_json(r.out)["fisher"][0][0].get<double>() - 1.0) <= 1e-10);
    }
    SUBCASE("unbounded Fisher information exits 3") {
        const Run r = run({"fisher", "--state", data("zero.json"), "--gens", data("sxy.json"), "--f", "km"});
        CHECK(r.code == kExitUnbounded);
        CHECK(r.err.find("error") != std::string::npos);
    }
    SUBCASE("invalid input exits 2 with a diagnostic") {
        const Run bad = run({"fisher", "--state", data("bad.json"), "--gens", data("sxy.json")});
        CHECK(bad.code == kExitInvalidInput);
        CHECK(bad.err.find("bad.json:3:") != std::string::npos);

        const std::string wrong = write_file("wrong-field.json", R"({"type": "density", "matrix": [[1, 0], [0]]})");
        const Run field = run({"fisher", "--state", wrong, "--gens", data("sxy.json")});
        CHECK(field.code == kExitInvalidInput);
        CHECK(field.err.find("matrix") != std::string::npos);

        CHECK(run({"fisher", "--gens", data("sxy.json")}).code == kExitInvalidInput);
        CHECK(run({"fisher", "--state", data("half.json"), "--gens", data("sxy.json"), "--f", "rld"}).code ==
              kExitInvalidInput);
        CHECK(run({"fisher", "--state", data("half.json"), "--gens", data("sxy.json"), "--format", "xml"}).code ==
              kExitInvalidInput);
        CHECK(run({"fisher", "--state", data("half.json"), "--gens", data("sxy.json"), "--trials", "0"}).code ==
              kExitInvalidInput);
        CHECK(run({"frobnicate"}).code == kExitInvalidInput);
        CHECK(run({}).code == kExitInvalidInput);
    }
}

TEST_CASE("minvar command") {
    SUBCASE("diag(0.75, 0.25) with sigma_x") {
        const Run r = run({"minvar", "--state", data("diag.json"), "--gens", data("sx.json")});
        REQUIRE(r.code == kExitOk);
        const Json j = parse_json(r.out);
        CHECK(j["residual"].get<double>() <= 1e-6);
        CHECK(std::abs(j["fisher"][0][0].get<double>() - 1.0) <= 1e-10);
        CHECK(j["xr"].size() == 1);
        CHECK(j["regularized"] == false);
    }
    SUBCASE("maximally mixed qubit: both sides vanish") {
        const Run r = run({"minvar", "--state", data("half.json"), "--gens", data("sxy.json")});
        REQUIRE(r.code == kExitOk);
        const Json j = parse_json(r.out);
        for (const char* key : {"fisher", "four-v"})
            for (const auto& row : j[key])
                for (const auto& v : row) CHECK(std::abs(v.get<double>()) <= 1e-6);
    }
    SUBCASE("rank-deficient state needs --regularize") {
        CHECK(run({"minvar", "--state", data("zero.json"), "--gens", data("sx.json")}).code == kExitUnbounded);
        const Run r = run({"minvar", "--state", data("zero.json"), "--gens", data("sx.json"), "--regularize"});
        CHECK(r.code == kExitOk);
        CHECK(parse_json(r.out)["regularized"] == true);
    }
    SUBCASE("step outside the supported range") {
        CHECK(run({"minvar", "--state", data("diag.json"), "--gens", data("sx.json"), "--h", "0.1"}).code ==
              kExitInvalidInput);
    }
}

TEST_CASE("verify and counterexample commands") {
    SUBCASE("counterexample passes and reports the bound") {
        const Run r = run({"counterexample", "--trials", "500"});
        REQUIRE(r.code == kExitOk);
        const Json j = parse_json(r.out);
        CHECK(j["passed"] == true);
        CHECK(j["seed"] == 7);
    }
    SUBCASE("verify --suite counterexample") {
        CHECK(run({"verify", "--suite", "counterexample", "--trials", "200"}).code == kExitOk);
    }
    SUBCASE("negative control fails") {
        const Run r = run({"verify", "--suite", "monotonicity", "--group", "u1", "--trials", "5",
                           "--inject-noncovariant"});
        CHECK(r.code == kExitFailed);
        CHECK(parse_json(r.out)["passed"] == false);
    }
    SUBCASE("unknown suite and group") {
        CHECK(run({"verify", "--suite", "nope"}).code == kExitInvalidInput);
        CHECK(run({"verify", "--group", "so5"}).code == kExitInvalidInput);
    }
    SUBCASE("reports are byte-identical for identical configurations") {
        const std::vector<std::string> args{"verify", "--suite", "selective", "--group", "su2", "--trials", "5",
                                            "--seed", "3"};
        const Run a = run(args);
        const Run b = run(args);
        CHECK(a.code == kExitOk);
        CHECK(a.out == b.out);
        std::vector<std::string> other = args;
        other.back() = "4";
        CHECK(run(other).out != a.out);
    }
    SUBCASE("--out writes the report and prints a summary") {
        const fs::path p = scratch("report.json");
        fs::remove(p);
        const Run r = run({"verify", "--suite", "positivity", "--trials", "5", "--out", p.string()});
        CHECK(r.code == kExitOk);
        REQUIRE(fs::exists(p));
        const Json j = parse_json(slurp(p));
        CHECK(j["theorem-id"] == "verify[positivity]");
        CHECK(r.out.rfind("PASS verify[positivity]", 0) == 0);
    }
}

TEST_CASE("config files") {
    SUBCASE("flags override the config") {
        const std::string cfg = write_file("cfg.json", R"({"suite": "positivity", "trials": 3, "seed": 11})");
        const Run r = run({"verify", "--config", cfg, "--seed", "12"});
        REQUIRE(r.code == kExitOk);
        const Json j = parse_json(r.out);
        CHECK(j["seed"] == 12);
        CHECK(j["config"]["trials"] == 3);
        CHECK(j["config"]["suite"] == "positivity");
    }
    SUBCASE("same schema as the flags") {
        const std::string cfg = write_file(
            "cfg-fisher.json", "{\"state\": \"" + data("diag.json") + "\", \"gens\": \"" + data("sx.json") +
                                   "\", \"format\": \"csv\"}");
        const Run r = run({"fisher", "--config", cfg});
        CHECK(r.code == kExitOk);
        CHECK(r.out == "1\n");
    }
    SUBCASE("strict parsing") {
        CHECK(run({"verify", "--config", write_file("unknown.json", R"({"suite": "positivity", "trails": 3})")}).code ==
              kExitInvalidInput);
        CHECK(run({"verify", "--config", write_file("zero.json", R"({"trials": 0})")}).code == kExitInvalidInput);
        CHECK(run({"verify", "--config", write_file("type.json", R"({"seed": "seven"})")}).code == kExitInvalidInput);
        CHECK(run({"verify", "--config", write_file("array.json", "[1, 2]")}).code == kExitInvalidInput);
        CHECK(run({"verify", "--config", scratch("missing.json").string()}).code == kExitInvalidInput);
    }
}
