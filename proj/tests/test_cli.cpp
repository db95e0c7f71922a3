#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fpplab/cli.hpp"
#include "fpplab/errors.hpp"

using namespace fpplab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "fpplab");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out, err;
    int code = cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json record_of(const Result& r) {
    REQUIRE(r.code == 0);
    return json::parse(r.out);
}

fs::path scratch(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("fpplab_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    fs::path p = dir / name;
    fs::remove(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("exact parity payload") {
    auto rec = record_of(run_cli({"condsum.parity", "--L", "3", "--p", "1/2", "--n", "50"}));
    CHECK(rec.at("payload").at("value") == "1/2");
    CHECK(rec.at("subcommand") == "condsum.parity");
    CHECK(rec.at("version") == cli::version());
    CHECK(rec.at("config").at("n") == 50);
    CHECK(rec.contains("wall_time_s"));
    CHECK(rec.contains("seed_schedule"));
    auto third = record_of(run_cli({"condsum.parity", "--L=5", "--p=1/3", "--n=12"}));
    CHECK(third.at("payload").at("value") == "2/3");
}

TEST_CASE("partition table as CSV") {
    auto csv = scratch("q.csv");
    auto rec = record_of(run_cli({"partition.q", "--Lmax", "10", "--csv", csv.string()}));
    auto rows = rec.at("payload").at("rows");
    CHECK(rows[10][1] == "10");
    std::string text = slurp(csv);
    CHECK(text.find("L,q(L),Q(L)\n") == 0);
    CHECK(text.find("\n10,10,43\n") != std::string::npos);

    auto out = scratch("q.jsonl");
    CHECK(run_cli({"partition.q", "--Lmax", "6", "--out", out.string()}).code == 0);
    CHECK(fs::exists(out.string() + ".csv"));
    auto mult = record_of(run_cli({"partition.q", "--Lmax", "3", "--alpha", "blocks:2"}));
    CHECK(mult.at("payload").at("rows")[1][1] == "2");
}

TEST_CASE("validation errors exit with code 2 and write nothing") {
    auto out = scratch("bad.jsonl");
    CHECK(run_cli({"condsum.parity", "--bogus", "1", "--out", out.string()}).code == cli::kValidationError);
    CHECK_FALSE(fs::exists(out));
    CHECK(run_cli({"condsum.parity", "--n", "x", "--out", out.string()}).code == cli::kValidationError);
    CHECK(run_cli({"no.such.command"}).code == cli::kValidationError);
    CHECK(run_cli({"condsum.parity", "--p", "3/0"}).code == cli::kValidationError);
    CHECK(run_cli({"condsum.parity", "--seed", "-4"}).code == cli::kValidationError);
    auto cfg = scratch("cfg.json");
    spit(cfg, R"({"n": 4, "extra": true})");
    CHECK(run_cli({"condsum.parity", "--config", cfg.string(), "--out", out.string()}).code == cli::kValidationError);
    CHECK_FALSE(fs::exists(out));
    spit(cfg, R"({"subcommand": "partition.q"})");
    CHECK(run_cli({"condsum.parity", "--config", cfg.string()}).code == cli::kValidationError);
    CHECK_THROWS_AS(cli::normalize_config(json{{"subcommand", "condsum.parity"}, {"q", 1}}), ValidationError);
}

TEST_CASE("config files and flag overrides") {
    auto cfg = scratch("parity.json");
    spit(cfg, R"({"L": "5", "p": "1/4", "n": 9})");
    auto rec = record_of(run_cli({"condsum.parity", "--config", cfg.string()}));
    CHECK(rec.at("payload").at("value") == "3/4");
    auto over = record_of(run_cli({"condsum.parity", "--config", cfg.string(), "--p", "1/3"}));
    CHECK(over.at("payload").at("value") == "2/3");
    auto norm = cli::normalize_config(json{{"subcommand", "condsum.parity"}, {"p", "2/4"}});
    CHECK(norm.at("p") == "1/2");
    CHECK(norm.at("seed") == 1);
}

TEST_CASE("runtime error codes") {
    CHECK(run_cli({"iic.estimate", "--n", "12", "--L", "0", "--budget", "20", "--event", "ball(2) >= 1"}).code ==
          cli::kRareConditioning);
    auto cfg = scratch("fine.json");
    spit(cfg, R"({"model": {"head": [], "tail": {"iid": ["0:1/2", "1/1000:1/2"]}}, "n": 3, "L": "5000"})");
    CHECK(run_cli({"condsum.law", "--config", cfg.string()}).code == cli::kGridOverflow);
}

TEST_CASE("replay") {
    auto rec_path = scratch("rec.jsonl");
    REQUIRE(run_cli({"perc.crossing", "--samples", "300", "--n", "8", "--seed", "17", "--out", rec_path.string()}).code == 0);
    json rec = json::parse(slurp(rec_path));
    auto again = run_cli({"replay", "--record", rec_path.string()});
    REQUIRE(again.code == 0);
    CHECK(json::parse(again.out).at("payload").dump() == rec.at("payload").dump());

    auto bad = scratch("rec_bad.jsonl");
    json v = rec;
    v["version"] = "0.0.0-other";
    spit(bad, v.dump());
    auto r1 = run_cli({"replay", "--record", bad.string()});
    CHECK(r1.code == cli::kReplayMismatch);
    CHECK(r1.err.find("version") != std::string::npos);

    json t = rec;
    t["config"]["samples"] = 301;
    spit(bad, t.dump());
    auto r2 = run_cli({"replay", "--record", bad.string()});
    CHECK(r2.code == cli::kReplayMismatch);
    CHECK(r2.err.find("checksum") != std::string::npos);

    json d = rec;
    d["payload"]["estimate"] = 0.123;
    spit(bad, d.dump());
    CHECK(run_cli({"replay", "--record", bad.string()}).code == cli::kReplayMismatch);
    CHECK(run_cli({"replay"}).code == cli::kValidationError);
}

TEST_CASE("payload independent of worker count") {
    auto one = record_of(run_cli({"perc.crossing", "--samples", "2000", "--n", "8", "--seed", "5", "--workers", "1"}));
    auto four = record_of(run_cli({"perc.crossing", "--samples", "2000", "--n", "8", "--seed", "5", "--workers", "4"}));
    CHECK(one.at("payload").dump() == four.at("payload").dump());
    auto six = record_of(run_cli({"perc.crossing", "--samples", "2000", "--n", "8", "--seed", "6"}));
    CHECK(one.at("payload").dump() != six.at("payload").dump());
    auto a = record_of(run_cli({"iic.estimate", "--n", "4", "--L", "1", "--budget", "4000", "--seed", "3", "--workers", "1"}));
    auto b = record_of(run_cli({"iic.estimate", "--n", "4", "--L", "1", "--budget", "4000", "--seed", "3", "--workers", "3"}));
    CHECK(a.at("payload").dump() == b.at("payload").dump());
}

TEST_CASE("every subcommand runs and matches its schema") {
    const std::map<std::string, std::vector<std::string>> small = {
        {"fpp.sim", {"--n", "3", "--samples", "5"}},
        {"fpp.decompose", {"--n", "16", "--samples", "3", "--dist", "bernoulli-half"}},
        {"iic.estimate", {"--n", "3", "--L", "1", "--budget", "2000"}},
        {"iic.sample", {"--proxy_n", "4", "--samples", "2"}},
        {"perc.crossing", {"--samples", "200", "--n", "6"}},
        {"perc.corrlen", {"--p", "0.9", "--nmax", "8", "--samples", "200"}},
        {"perc.fourarm", {"--radii", "1,2", "--samples", "200"}},
        {"perc.ok-event", {"--firings", "1", "--max_configs", "30"}},
        {"condsum.law", {}},
        {"condsum.bound", {}},
        {"condsum.parity", {}},
        {"condsum.general-parity", {"--n_list", "10,40"}},
        {"condsum.oscillate", {"--n_list", "9,99"}},
        {"partition.q", {}},
        {"partition.criteria", {"--N", "12"}},
    };
    auto subs = cli::subcommands();
    CHECK(subs.size() == small.size());
    for (const auto& sub : subs) {
        INFO(sub);
        REQUIRE(small.count(sub) == 1);
        std::vector<std::string> args{sub};
        for (const auto& a : small.at(sub)) args.push_back(a);
        auto r = run_cli(args);
        INFO(r.err);
        REQUIRE(r.code == 0);
        json rec = json::parse(r.out);
        auto problem = cli::validate_against(rec.at("payload"), cli::payload_schema(sub));
        CHECK_FALSE(problem.has_value());
        auto schema = run_cli({"schema", sub});
        CHECK(schema.code == 0);
        CHECK(json::parse(schema.out) == cli::payload_schema(sub));
    }
    CHECK(cli::validate_against(json{{"value", 3}}, cli::payload_schema("condsum.parity")).has_value());
}

TEST_CASE("other modes of the multi-mode subcommands") {
    auto tl = record_of(run_cli({"condsum.bound", "--mode", "trivial-limit", "--K", "10"}));
    CHECK(tl.at("payload").at("mode") == "trivial-limit");
    auto sw = record_of(run_cli({"partition.criteria", "--mode", "sandwich", "--L", "6", "--n", "10"}));
    CHECK(sw.at("payload").at("result").at("ok") == true);
    auto inj = record_of(run_cli({"partition.criteria", "--mode", "injective", "--L", "4", "--n", "10"}));
    CHECK(inj.at("payload").at("result").at("ok") == true);
    auto hr = record_of(run_cli({"partition.criteria", "--mode", "hardy-ramanujan", "--k", "1000"}));
    CHECK(std::abs(hr.at("payload").at("result").at("ratio").get<double>() - 1) <= 0.1);
    CHECK(run_cli({"partition.criteria", "--mode", "nope"}).code == cli::kValidationError);
}

TEST_CASE("installed binary") {
    const char* bin = std::getenv("FPPLAB_BIN");
    if (!bin) {
        MESSAGE("FPPLAB_BIN not set; skipping the process-level checks");
        return;
    }
    auto out = scratch("bin.jsonl");
    std::string cmd = std::string(bin) + " condsum.parity --L 3 --p 1/2 --n 50 --out " + out.string();
    int st = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(st));
    CHECK(WEXITSTATUS(st) == 0);
    CHECK(json::parse(slurp(out)).at("payload").at("value") == "1/2");

    auto none = scratch("bin_bad.jsonl");
    st = std::system((std::string(bin) + " condsum.parity --bogus 1 --out " + none.string() + " 2>/dev/null").c_str());
    CHECK(WEXITSTATUS(st) == 2);
    CHECK_FALSE(fs::exists(none));

    st = std::system((std::string(bin) + " --version > " + none.string()).c_str());
    CHECK(WEXITSTATUS(st) == 0);
    CHECK(slurp(none).find(cli::version()) != std::string::npos);
}
