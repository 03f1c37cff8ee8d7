#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace {

struct Run {
    std::string out;
    int code = -1;
};

Run run(const std::string& args)
{
    const std::string cmd = std::string(QRM_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    Run r;
    std::array<char, 4096> buf{};
    std::size_t got = 0;
    while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string read_file(const std::string& path)
{
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("rb prints exact rational coefficients")
{
    const Run r = run("rb --k 2 --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["command"] == "rb");
    CHECK(j["version"] == "1.0.0");
    CHECK(j["runtime_ms"].is_null());
    // tau^2 - 2 tau g^2 - tau + g^4 + g^2 + Delta^2 + 1/6
    std::map<std::array<int, 3>, std::string> want{{{2, 0, 0}, "1"}, {{1, 1, 0}, "-2"}, {{1, 0, 0}, "-1"}, {{0, 2, 0}, "1"},
                                                   {{0, 1, 0}, "1"}, {{0, 0, 1}, "1"},  {{0, 0, 0}, "1/6"}};
    std::map<std::array<int, 3>, std::string> got;
    for (const auto& row : j["results"])
        got[{row["tau_exp"].get<int>(), row["g2_exp"].get<int>(), row["delta2_exp"].get<int>()}] = row["coefficient"];
    CHECK(got == want);
    CHECK(j["error_estimates"].size() == j["results"].size());
}

TEST_CASE("partition at g = 0 matches the two shifted oscillators")
{
    const Run r = run("partition --g 0 --delta 0.4 --beta 1 --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    const double z = j["results"][0]["Z"];
    CHECK(std::abs(z - 2.0 * std::cosh(0.4) / (1.0 - std::exp(-1.0))) < 1e-13);
    CHECK(j["error_estimates"][0].contains("Z_err"));
}

TEST_CASE("CSV output has one error column per value column")
{
    const Run r = run("zeta --g 0.7 --delta 0.4 --tau 2.5 --s 2,2.5");
    REQUIRE(r.code == 0);
    std::istringstream in(r.out);
    std::string header, line;
    std::getline(in, header);
    CHECK(header == "s_re,s_im,tau,zeta_re,zeta_im,zeta_err");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
        ++rows;
    }
    CHECK(rows == 2);
}

TEST_CASE("exit codes")
{
    CHECK(run("").code == 2);
    CHECK(run("partition --beta 1 --g -1").code == 2);
    CHECK(run("kernel --x 0 --y 0").code == 2);            // --t missing
    CHECK(run("rb --k 99").code == 2);
    CHECK(run("zeta --g 1 --delta 0.5 --tau 0.1").code == 3);
    CHECK(run("propagator --t 0 --x 0 --y 0").code == 3);
    CHECK(run("det --g 0.7 --delta 0.4 --tau 0.5 --parity plus").code == 4);
    CHECK(run("--help").code == 0);
    CHECK(run("--version").out == "1.0.0\n");
}

TEST_CASE("output is byte-identical across runs")
{
    const std::string args = "kernel --g 0.5 --delta 0.3 --t 0.8 --x 0,1 --y -0.5,0.5 --format json";
    const Run a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
}

TEST_CASE("config file values are overridden by flags")
{
    const std::string cfg = "test_cli_config.json";
    {
        std::ofstream f(cfg);
        f << R"({"model": {"g": 0.0, "delta": 0.4}, "inputs": {"beta": "1,2"}, "output": {"format": "json"}})";
    }
    const auto a = nlohmann::json::parse(run("partition --config " + cfg).out);
    CHECK(a["results"].size() == 2);
    CHECK(a["params"]["delta"] == 0.4);
    const auto b = nlohmann::json::parse(run("partition --config " + cfg + " --delta 0.1 --beta 1").out);
    CHECK(b["results"].size() == 1);
    const double z = b["results"][0]["Z"];
    CHECK(std::abs(z - 2.0 * std::cosh(0.1) / (1.0 - std::exp(-1.0))) < 1e-13);
    CHECK(run("partition --config missing_file.json").code == 2);
}

TEST_CASE("--out writes the table and its envelope")
{
    const std::string path = "test_cli_out.csv";
    const Run r = run("partition --g 0.5 --delta 0.3 --beta 1 --out " + path);
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    CHECK(read_file(path).rfind("beta,Z,Z_err\n", 0) == 0);
    const auto env = nlohmann::json::parse(read_file(path + ".json"));
    CHECK(env["command"] == "partition");
    CHECK(env["results"].size() == 1);
}

TEST_CASE("eigs agrees with the truncated-Fock columns")
{
    const Run r = run("eigs --g 0.5 --delta 0.3 --lo -1 --hi 2 --oracle-m 200 --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["results"].size() >= 4);
    for (const auto& row : j["results"]) {
        const double lam = row["lambda"], orc = row["oracle_lambda"];
        CHECK(std::abs(lam - orc) < 1e-9);
    }
}

TEST_CASE("verify runs a selected criterion")
{
    const Run r = run("verify --suite 3");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("PASS", 0) == 0);
    CHECK(run("verify --suite 12").code == 2);
}
