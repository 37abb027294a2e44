#include <doctest.h>

#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loctime/cli.hpp"
#include "loctime/closed_forms.hpp"
#include "loctime/graph_io.hpp"

using namespace loctime;
using nlohmann::json;

namespace {

struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

CliResult run_cli(const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = run(args, out, err);
    return CliResult{code, out.str(), err.str()};
}

json only_record(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    REQUIRE(std::getline(in, line));
    json rec = json::parse(line);
    std::string rest;
    CHECK_FALSE(std::getline(in, rest));
    return rec;
}

const std::filesystem::path& fixture_dir() {
    static const std::filesystem::path dir = [] {
        std::filesystem::path d =
            std::filesystem::temp_directory_path() / "loctime_cli_test";
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string fixture(const std::string& name, const std::string& contents) {
    const std::filesystem::path path = fixture_dir() / name;
    std::ofstream out(path);
    out << contents;
    return path.string();
}

std::string complete4_path() {
    static const std::string path =
        fixture("complete4.json", graph_to_json(complete_graph(4)));
    return path;
}

std::string cycle2_path() {
    static const std::string path = fixture("cycle2.csv", "0,1\n1,0\n");
    return path;
}

}  // namespace

TEST_CASE("mean subcommand reports the exact value") {
    const CliResult r = run_cli(
        {"mean", "--graph", complete4_path(), "--va", "0", "--v1", "1", "--n", "5"});
    REQUIRE(r.code == 0);
    CHECK(r.err.empty());
    const json rec = only_record(r.out);
    CHECK(rec.at("op") == "mean");
    CHECK(rec.at("engine") == "exact");
    CHECK(rec.at("endpoint") == "free");
    CHECK(rec.at("value").get<double>() ==
          doctest::Approx(319.0 / 243.0).epsilon(1e-14));
}

TEST_CASE("mean --verify attaches the cross-check block") {
    const CliResult r = run_cli({"mean", "--graph", complete4_path(), "--va", "0",
                                 "--v1", "1", "--n", "5", "--verify"});
    REQUIRE(r.code == 0);
    const json rec = only_record(r.out);
    const json block = rec.at("verify");
    CHECK(block.at("engine") == "zdomain-series");
    CHECK(block.at("max_delta").get<double>() <= block.at("tolerance").get<double>());
}

TEST_CASE("fixed endpoint splits the record into weight and normalized value") {
    const CliResult r = run_cli({"mean", "--graph", cycle2_path(), "--va", "0",
                                 "--vb", "0", "--v1", "1", "--n", "4"});
    REQUIRE(r.code == 0);
    const json rec = only_record(r.out);
    CHECK(rec.at("vb") == 0);
    CHECK(rec.at("endpoint_weight").get<double>() == 1.0);
    CHECK(rec.at("value_normalized").get<double>() == 2.0);
    CHECK(rec.at("value_unnormalized").get<double>() == 2.0);
}

TEST_CASE("csv output format flattens the record") {
    const CliResult r = run_cli({"mean", "--graph", complete4_path(), "--va", "0",
                                 "--v1", "1", "--n", "5", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("op,mean\n") != std::string::npos);
    CHECK(r.out.find("value,") != std::string::npos);
}

TEST_CASE("dist reports the saturation flag and bucket table") {
    const CliResult r = run_cli({"dist", "--graph", complete4_path(), "--va", "0",
                                 "--v1", "1", "--n", "5", "--lmax", "2"});
    REQUIRE(r.code == 0);
    const json rec = only_record(r.out);
    CHECK(rec.at("top_bucket_saturated") == true);
    REQUIRE(rec.at("mass").size() == 3);
    double total = 0.0;
    for (const json& m : rec.at("mass")) {
        total += m.get<double>();
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary --verify checks pi against the resolvent limit") {
    const CliResult r =
        run_cli({"stationary", "--graph", complete4_path(), "--verify"});
    REQUIRE(r.code == 0);
    const json rec = only_record(r.out);
    REQUIRE(rec.at("pi").size() == 4);
    for (const json& p : rec.at("pi")) {
        CHECK(p.get<double>() == doctest::Approx(0.25).epsilon(1e-10));
    }
    CHECK(rec.at("verify").at("engine") == "zdomain-numeric");
}

TEST_CASE("resolvent reports both matrix elements") {
    const CliResult r = run_cli({"resolvent", "--graph", complete4_path(), "--va",
                                 "0", "--vb", "1", "--z", "2.0"});
    REQUIRE(r.code == 0);
    const json rec = only_record(r.out);
    CHECK(rec.at("resolvent").get<double>() ==
          doctest::Approx(complete_resolvent(4, 2.0, 0, 1)).epsilon(1e-12));
    CHECK(rec.contains("resolvent_p"));
}

TEST_CASE("simulate output is reproducible") {
    const std::vector<std::string> args = {
        "simulate", "mean",  "--graph", complete4_path(), "--va",    "0",
        "--v1",     "1",     "--n",     "5",              "--seed",  "42",
        "--trials", "20000"};
    const CliResult a = run_cli(args);
    const CliResult b = run_cli(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    const json rec = only_record(a.out);
    CHECK(rec.at("engine") == "montecarlo");
    CHECK(rec.at("trials_used") == 20000);
    const double est = rec.at("estimate").get<double>();
    const double se = rec.at("standard_error").get<double>();
    CHECK(std::abs(est - 319.0 / 243.0) < 6.0 * se);
}

TEST_CASE("export round-trips the graph through a file") {
    const std::string out_path = (fixture_dir() / "roundtrip.json").string();
    const CliResult r = run_cli(
        {"export", "--graph", cycle2_path(), "--out", out_path});
    REQUIRE(r.code == 0);
    const json rec = only_record(r.out);
    CHECK(rec.at("path") == out_path);

    const TransitionMatrix reloaded = load_transition(out_path);
    REQUIRE(reloaded.size() == 2);
    CHECK(reloaded(0, 1) == 1.0);
    CHECK(reloaded(1, 0) == 1.0);
}

TEST_CASE("export without --out prints the serialized graph") {
    const CliResult r = run_cli({"export", "--graph", complete4_path()});
    REQUIRE(r.code == 0);
    const GraphFile parsed = parse_graph_json(r.out);
    CHECK(parsed.graph.vertex_count == 4);
    CHECK(parsed.stochastic);
}

TEST_CASE("rejected inputs exit with code 2") {
    CHECK(run_cli({"mean", "--graph", "/nonexistent/graph.json", "--va", "0",
                   "--v1", "1", "--n", "3"})
              .code == 2);
    CHECK(run_cli({"frobnicate"}).code == 2);
    CHECK(run_cli({}).code == 2);
    // Exactly one of --n and --z is allowed.
    CHECK(run_cli({"mean", "--graph", complete4_path(), "--va", "0", "--v1", "1",
                   "--n", "3", "--z", "2.0"})
              .code == 2);
    // A pinned endpoint and an explicit free endpoint conflict.
    CHECK(run_cli({"mean", "--graph", complete4_path(), "--va", "0", "--v1", "1",
                   "--n", "3", "--vb", "1", "--endpoint", "free"})
              .code == 2);
    // Vertex out of range for the loaded graph.
    CHECK(run_cli({"mean", "--graph", complete4_path(), "--va", "9", "--v1", "1",
                   "--n", "3"})
              .code == 2);
}

TEST_CASE("computational failures exit with code 3") {
    // The resolvent is undefined on the closed unit disk.
    CHECK(run_cli({"resolvent", "--graph", complete4_path(), "--va", "0", "--vb",
                   "1", "--z", "0.5"})
              .code == 3);
    // Parity makes an odd-time return to the start impossible on the 2-cycle.
    CHECK(run_cli({"simulate", "mean", "--graph", cycle2_path(), "--va", "0",
                   "--vb", "0", "--v1", "1", "--n", "5", "--trials", "100"})
              .code == 3);
}

TEST_CASE("thread cap env var is validated") {
    setenv("LOCALTIME_THREADS", "0", 1);
    const CliResult bad = run_cli({"simulate", "mean", "--graph", complete4_path(),
                                   "--va", "0", "--v1", "1", "--n", "3", "--trials",
                                   "100"});
    unsetenv("LOCALTIME_THREADS");
    CHECK(bad.code == 2);

    setenv("LOCALTIME_THREADS", "2", 1);
    const CliResult good = run_cli({"simulate", "mean", "--graph", complete4_path(),
                                    "--va", "0", "--v1", "1", "--n", "3",
                                    "--trials", "100"});
    unsetenv("LOCALTIME_THREADS");
    CHECK(good.code == 0);
}

TEST_CASE("help exits cleanly") {
    const CliResult r = run_cli({"--help"});
    CHECK(r.code == 0);
    CHECK(r.out.find("mean") != std::string::npos);
}
