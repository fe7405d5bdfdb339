#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int code = -1;
    std::string out;
};

// Runs the CLI with stderr discarded.
Result cli(const std::string& args) {
    const std::string cmd = std::string(HYBRIDQ_CLI) + " " + args + " 2>/dev/null";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(p);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("hybridq_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kMM1 = R"({
  "mode": "pure-human", "n_clients": 4, "lambda_bar": 0.1,
  "s_beta": {"kind": "exponential", "mean": 2},
  "horizon": 50000, "warmup": 5000
})";

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("analytic reference evaluation") {
    const Result r = cli("analytic --lambda 0.4 --c 1 --alpha 0.5 --s-beta 3.5 --sigma-s-beta 1 "
                         "--s-alpha 1 --epsilon 0.5 --json");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["w_hybrid"].get<double>() == doctest::Approx(2.458).epsilon(1e-3));
    CHECK(j["c_star"].get<double>() == doctest::Approx(2.25 / 1.75));
    CHECK(j["hybrid_waits_less"] == true);

    const Result no_eps = cli("analytic --lambda 0.4 --alpha 0.5 --s-beta 3.5 --sigma-s-beta 1 "
                              "--s-alpha 1 --epsilon 0.5 --no-epsilon --json");
    CHECK(json::parse(no_eps.out)["w_hybrid"].get<double>() == doctest::Approx(2.208).epsilon(1e-3));
}

TEST_CASE("analytic: agent answers everything") {
    const Result r = cli("analytic --lambda 0.4 --alpha 1 --s-beta 3 --s-alpha 1 --json");
    REQUIRE(r.code == 0);
    CHECK(json::parse(r.out)["w_hybrid"] == 0.0);
}

TEST_CASE("analytic exit codes") {
    CHECK(cli("analytic --lambda 1 --s-beta 3").code == 3);
    CHECK(cli("analytic --lambda 0.1 --c 20 --alpha 0.5 --s-beta 3 --s-alpha 1").code == 3);
    CHECK(cli("analytic --lambda 0.1 --alpha 2 --s-beta 3").code == 2);
    CHECK(cli("analytic --lambda -1 --s-beta 3").code == 2);
    CHECK(cli("analytic --s-beta 3").code == 2);
    CHECK(cli("analytic --lambda abc --s-beta 3").code == 2);
}

TEST_CASE("simulate: determinism and trace") {
    const fs::path d = scratch("sim");
    write(d / "mm1.json", kMM1);
    const std::string cfg = (d / "mm1.json").string();
    const Result a = cli("simulate " + cfg + " --seed 42 --trace " + (d / "a.csv").string());
    const Result b = cli("simulate " + cfg + " --seed 42 --trace " + (d / "b.csv").string());
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    CHECK(slurp(d / "a.csv") == slurp(d / "b.csv"));
    CHECK(slurp(d / "a.csv").rfind("question_id,client_id,arrival,", 0) == 0);
    const Result c = cli("simulate " + cfg + " --seed 43");
    CHECK(c.out != a.out);
    fs::remove_all(d);
}

TEST_CASE("simulate: M/M/1 over 30 replications") {
    const fs::path d = scratch("mm1");
    write(d / "mm1.json", kMM1);
    const Result r = cli("simulate " + (d / "mm1.json").string() + " --reps 30 --seed 1");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["metrics"]["mean_wait_overall"]["mean"].get<double>() ==
          doctest::Approx(8.0).epsilon(0.05));
    fs::remove_all(d);
}

TEST_CASE("simulate exit codes") {
    const fs::path d = scratch("codes");
    CHECK(cli("simulate " + (d / "missing.json").string()).code == 1);
    write(d / "bad.json", R"({"mode": "pure-human", "n_clients": 1})");
    CHECK(cli("simulate " + (d / "bad.json").string()).code == 2);
    write(d / "garbage.json", "{not json");
    CHECK(cli("simulate " + (d / "garbage.json").string()).code == 2);
    write(d / "overload.json", R"({
      "mode": "pure-human", "n_clients": 10, "lambda_bar": 1,
      "s_beta": {"kind": "deterministic", "mean": 2},
      "horizon": 10000, "max_queue": 50
    })");
    CHECK(cli("simulate " + (d / "overload.json").string()).code == 3);
    CHECK(cli("simulate " + (d / "overload.json").string() + " --reps 2").code == 3);
    fs::remove_all(d);
}

TEST_CASE("experiment: unknown preset and missing arguments") {
    const fs::path d = scratch("exp_bad");
    CHECK(cli("experiment --preset fig9 --out " + d.string()).code == 2);
    CHECK(cli("experiment --out " + d.string()).code == 2);
    fs::remove_all(d);
}

TEST_CASE("experiment: sweep spec writes stamped files") {
    const fs::path d = scratch("exp_spec");
    write(d / "spec.json", R"({
      "base": {"mode": "hybrid", "n_clients": 2, "lambda_bar": 0.1, "alpha": 0.5,
               "s_alpha_human": {"kind": "normal", "mean": 1, "stddev": 0.2},
               "s_beta": {"kind": "normal", "mean": 5, "stddev": 1},
               "epsilon": {"kind": "deterministic", "mean": 0.5},
               "horizon": 2000, "warmup": 200},
      "grid": {"n_clients": [1, 2, 3]},
      "reps": 3, "seed": 5
    })");
    const fs::path out = d / "out";
    const Result r = cli("experiment --spec " + (d / "spec.json").string() + " --out " +
                         out.string() + " --svg");
    REQUIRE(r.code == 0);
    const std::string csv = slurp(out / "sweep.csv");
    CHECK(csv.rfind("# hybridq 0.1.0 preset=spec config_hash=", 0) == 0);
    CHECK(csv.find(" seed=5\n") != std::string::npos);
    CHECK(fs::exists(out / "sweep.svg"));
    CHECK(json::parse(slurp(out / "manifest.json"))["seed"] == 5);
    fs::remove_all(d);
}

TEST_CASE("experiment: HYBRIDQ_SEED sets the default seed") {
    const fs::path d = scratch("exp_env");
    const Result r = cli("experiment --preset learning --reps 2 --out " + d.string());
    REQUIRE(r.code == 0);
    CHECK(json::parse(slurp(d / "manifest.json"))["seed"] == 1);
    const std::string cmd = "HYBRIDQ_SEED=77 " + std::string(HYBRIDQ_CLI) +
                            " experiment --preset learning --reps 2 --out " + d.string() +
                            " >/dev/null 2>&1";
    REQUIRE(std::system(cmd.c_str()) == 0);
    CHECK(json::parse(slurp(d / "manifest.json"))["seed"] == 77);
    fs::remove_all(d);
}

}  // TEST_SUITE
