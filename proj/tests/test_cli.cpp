#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pinchfl/cli/commands.hpp"
#include "pinchfl/cli/config.hpp"
#include "pinchfl/cli/table.hpp"
#include "pinchfl/errors.hpp"

using namespace pinchfl;
using namespace pinchfl::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("pinchfl_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(std::vector<std::string> args, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int rc = run_command(args, out, err);
    if (err_text) *err_text = err.str();
    return rc;
}

std::string header_of(const fs::path& csv) {
    std::ifstream in(csv);
    std::string line;
    std::getline(in, line);
    return line;
}

}  // namespace

TEST_CASE("defaults") {
    const auto cfg = load_config("", {});
    CHECK(cfg.K == 40);
    CHECK(cfg.D == 10.0);
    CHECK(cfg.d == 3.0);
    CHECK(cfg.W == 1e6);
    CHECK(cfg.dist == "uniform");
    CHECK(cfg.payload() == 6000.0);
    const auto echo = config_echo(cfg);
    CHECK(echo.size() == config_keys().size());
}

TEST_CASE("file then flags") {
    const auto dir = scratch("override");
    const auto file = dir / "run.cfg";
    std::ofstream(file) << "# comment\nk = 10\n\nm=3   # trailing\n";
    const auto from_file = load_config(file.string(), {});
    CHECK(from_file.K == 10);
    CHECK(from_file.M == 3);
    const auto flagged = load_config(file.string(), {{"k", "20"}});
    CHECK(flagged.K == 20);
    CHECK(flagged.M == 3);
}

TEST_CASE("configuration errors name the key") {
    try {
        load_config("", {{"k", "0"}});
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "k");
    }
    try {
        RunConfig c;
        apply_setting(c, "nonsense", "1");
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key() == "nonsense");
    }
    RunConfig c;
    CHECK_THROWS_AS(apply_setting(c, "k", "ten"), ConfigError);
    CHECK_THROWS_AS(apply_setting(c, "eta", "0.1x"), ConfigError);
    CHECK_THROWS_AS(load_config("/nonexistent/run.cfg", {}), ConfigError);
    const auto dir = scratch("badfile");
    std::ofstream(dir / "bad.cfg") << "width = 3\n";
    CHECK_THROWS_AS(load_config((dir / "bad.cfg").string(), {}), ConfigError);
    std::ofstream(dir / "noeq.cfg") << "k 3\n";
    CHECK_THROWS_AS(load_config((dir / "noeq.cfg").string(), {}), ConfigError);
    CHECK_THROWS_AS(load_config("", {{"m", "41"}}), ConfigError);
    CHECK_THROWS_AS(load_config("", {{"dist", "cauchy"}}), ConfigError);
}

TEST_CASE("exit codes") {
    std::string err;
    CHECK(run({}, &err) == kUsage);
    CHECK(err.find("Usage") != std::string::npos);
    CHECK(run({"frobnicate"}) == kUsage);
    CHECK(run({"ccdf", "--no-such-flag", "1"}) == kUsage);
    CHECK(run({"ccdf", "--k", "0"}, &err) == kConfig);
    CHECK(err.find("'k'") != std::string::npos);
    CHECK(run({"ccdf", "--eta", "abc"}) == kConfig);
    // received power underflows, so no upload completes
    const auto dir = scratch("runtime");
    CHECK(run({"ccdf", "--power", "1e-314", "--trials", "100", "--out", dir.string()}, &err) == kRuntime);
    CHECK(run({"train", "--power", "1e-314", "--rounds", "2", "--out", dir.string()}) == kRuntime);
}

TEST_CASE("every subcommand writes matching CSV and JSON") {
    const auto dir = scratch("all");
    const std::vector<std::vector<std::string>> cmds{
        {"ccdf", "--trials", "2000"},
        {"ccdf", "--mode", "afl", "--trials", "2000"},
        {"straggler", "--k", "12", "--trials", "2000"},
        {"participation", "--trials", "2000", "--grid_points", "20"},
        {"highsnr", "--grid_points", "20"},
        {"train", "--mode", "sfl", "--rounds", "30"},
        {"verify", "--k", "10", "--m", "3", "--trials", "5000"},
    };
    for (auto args : cmds) {
        args.insert(args.end(), {"--out", dir.string()});
        std::string err;
        REQUIRE_MESSAGE(run(args, &err) == kOk, args[0], ": ", err);
        const auto csv = dir / (args[0] + ".csv");
        const auto js = nlohmann::ordered_json::parse(slurp(dir / (args[0] + ".json")));
        CHECK(js.at("command") == args[0]);
        CHECK(js.contains("config"));
        CHECK(js.contains("seed"));
        CHECK(js.contains("metrics"));
        std::string keys;
        for (const auto& [k, v] : js.at("series").items()) keys += (keys.empty() ? "" : ",") + k;
        CHECK(header_of(csv) == keys);
    }
}

TEST_CASE("identical runs give identical bytes") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    for (const auto& dir : {a, b})
        REQUIRE(run({"train", "--mode", "sfl", "--arch", "both", "--m", "7", "--seed", "7", "--rounds", "50", "--out",
                     dir.string()}) == kOk);
    CHECK(slurp(a / "train.csv") == slurp(b / "train.csv"));
    auto ja = nlohmann::ordered_json::parse(slurp(a / "train.json"));
    auto jb = nlohmann::ordered_json::parse(slurp(b / "train.json"));
    ja["config"].erase("out");
    jb["config"].erase("out");
    CHECK(ja == jb);

    REQUIRE(run({"ccdf", "--trials", "20000", "--threads", "1", "--out", a.string()}) == kOk);
    REQUIRE(run({"ccdf", "--trials", "20000", "--threads", "3", "--out", b.string()}) == kOk);
    CHECK(slurp(a / "ccdf.csv") == slurp(b / "ccdf.csv"));
}

TEST_CASE("csv formatting") {
    Table t({"name", "x", "n"});
    t.add({std::string("a,b"), 0.1, std::int64_t{3}});
    t.add({std::string("q\"q"), 1e-300, std::int64_t{-1}});
    std::ostringstream ss;
    write_csv(ss, t);
    CHECK(ss.str() == "name,x,n\n\"a,b\",0.1,3\n\"q\"\"q\",1e-300,-1\n");
    CHECK(format_number(0.1) == "0.1");
    CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}
