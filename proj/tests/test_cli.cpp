#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace {

struct Result {
    int code;
    std::string out;
};

Result run(const std::string& args)
{
    const std::string cmd = std::string(TBETA_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof buf, pipe)) > 0)
        out.append(buf, got);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& text)
{
    std::ofstream(path) << text;
}

} // namespace

TEST_CASE("fit reports the relative humidity estimates")
{
    auto r = run("fit --data rh-may-2007 --support 0.3,1 --json");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["observations"] == 30);
    CHECK(j["theta1"].get<double>() == doctest::Approx(7.448).epsilon(0.01 / 7.448));
    CHECK(j["theta2"].get<double>() == doctest::Approx(2.154).epsilon(0.01 / 2.154));
    CHECK(j["ks"]["statistic"].get<double>() == doctest::Approx(0.1138).epsilon(0.001 / 0.1138));

    r = run("fit --data rh-may-2008 --support 0.3,1 --json --percentile 0.5 --percentile 0.9");
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["theta1"].get<double>() == doctest::Approx(1.344).epsilon(0.01 / 1.344));
    CHECK(j["theta2"].get<double>() == doctest::Approx(1.091).epsilon(0.01 / 1.091));
    CHECK(j["percentiles"].size() == 2);

    r = run("fit --data rh-may-2007 --support 0.3,1");
    CHECK(r.code == 0);
    CHECK(r.out.find("theta1       7.44") != std::string::npos);
}

TEST_CASE("exit codes")
{
    write("cli_empty.csv", "");
    CHECK(run("fit --data cli_empty.csv").code == 2);
    write("cli_bad.csv", "x\n0.4\n0.5,0.6\n");
    CHECK(run("fit --data cli_bad.csv").code == 2);
    write("cli_outside.csv", "0.1\n0.5\n0.9\n");
    CHECK(run("fit --data cli_outside.csv --support 0.3,1").code == 2);
    CHECK(run("fit --data /nonexistent.csv").code == 2);
    CHECK(run("fit").code == 1);
    CHECK(run("fit --data rh-may-2007 --support 0.3").code == 1);
    CHECK(run("fit --data rh-may-2007 --support 0.7,0.2").code == 1);
    CHECK(run("frobnicate").code == 1);
    CHECK(run("limits --data rh-may-2007 --support 0.3,1 --boot-reps 99").code == 1);
    CHECK(run("limits --data rh-may-2007 --support 0.3,1 --subgroup-size 7 --boot-reps 100").code == 2);
    CHECK(run("limits --data rh-may-2007 --support 0.3,1 --boot-mode sideways").code == 1);
    CHECK(run("--help").code == 0);
    std::remove("cli_empty.csv");
    std::remove("cli_bad.csv");
    std::remove("cli_outside.csv");
}

TEST_CASE("limits, chart frame and limits JSON")
{
    auto r = run("limits --data rh-may-2007 --support 0.3,1 --boot-reps 100 --json");
    CHECK(r.code == 0);

    r = run("limits --data rh-may-2007 --support 0.3,1 --boot-reps 300 --far 0.005 --seed 3 --json "
            "--out cli_frame.csv --limits-out cli_limits.json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(nlohmann::json::parse(slurp("cli_limits.json")) == j);
    CHECK(j["lcl"].get<double>() < j["cl"].get<double>());
    CHECK(j["boot_reps"] == 300);

    const std::string frame = slurp("cli_frame.csv");
    CHECK(frame.rfind("index,statistic,lcl,cl,ucl\n1,,", 0) == 0);
    CHECK(std::count(frame.begin(), frame.end(), '\n') == 4);

    r = run("limits --data rh-may-2007 --support 0.3,1 --boot-reps 300 --far 0.002 --seed 3 --json");
    const auto narrow = nlohmann::json::parse(r.out);
    CHECK(narrow["ucl"].get<double>() - narrow["lcl"].get<double>() >
          j["ucl"].get<double>() - j["lcl"].get<double>());
    std::remove("cli_frame.csv");
}

TEST_CASE("monitoring")
{
    REQUIRE(run("limits --data rh-may-2007 --support 0.3,1 --boot-reps 500 --limits-out cli_limits.json").code == 0);

    auto r = run("monitor --data rh-may-2008 --limits cli_limits.json --json --out cli_verdicts.csv");
    REQUIRE(r.code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["verdicts"].size() == 3);
    CHECK(j["p"] == 0.9);
    CHECK(j["support"][0] == 0.3);
    CHECK(slurp("cli_verdicts.csv").rfind("index,statistic,lcl,cl,ucl,breach\n", 0) == 0);

    write("cli_phase1.csv", "0.91\n0.62\n0.85\n0.78\n0.95\n0.88\n0.70\n0.83\n0.93\n0.80\n"
                            "0.86\n0.74\n0.90\n0.67\n0.84\n0.97\n0.81\n0.89\n0.76\n0.92\n");
    REQUIRE(run("limits --data cli_phase1.csv --support 0.3,1 --boot-reps 500 --limits-out cli_own.json").code == 0);
    r = run("monitor --data cli_phase1.csv --limits cli_own.json --json");
    REQUIRE(r.code == 0);
    j = nlohmann::json::parse(r.out);
    CHECK(j["signals"] == 0);
    CHECK(j["first_signal"].is_null());
    std::remove("cli_phase1.csv");
    std::remove("cli_own.json");

    write("cli_single.csv", "0.8\n0.9\n0.85\n0.7\n0.95\n0.91\n0.88\n0.6\n0.83\n0.77\n");
    r = run("monitor --data cli_single.csv --limits 0.7,0.9,0.97 --support 0.3,1 --percentile 0.9");
    REQUIRE(r.code == 0);
    CHECK(r.out.find("first signal:") != std::string::npos);
    CHECK(r.out.find("\n1 ") != std::string::npos);
    CHECK(r.out.find("\n2 ") == std::string::npos);

    r = run("monitor --simulate 5.9,2.154 --count 20 --support 0.3,1 --limits cli_limits.json --seed 4 --json");
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["verdicts"].size() == 20);

    CHECK(run("monitor --data rh-may-2008 --limits 0.9,0.8,0.7").code == 1);
    CHECK(run("monitor --data rh-may-2008 --limits nothing.json").code == 1);
    std::remove("cli_limits.json");
    std::remove("cli_verdicts.csv");
    std::remove("cli_single.csv");
}

TEST_CASE("run-length grid")
{
    const std::string base = "arl --subgroups 5 --boot-reps 100 --replications 6 --run-cap 100 --far 0.05 ";
    auto r = run(base + "--shift 0,0 --shift 0,-3");
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string header, row;
    std::getline(lines, header);
    CHECK(header == "d_theta1,d_theta2,p,nu,arl,sdrl,replications,truncated_runs,failed_replications,error");
    int rows = 0;
    while (std::getline(lines, row))
        ++rows;
    CHECK(rows == 2);

    CHECK(run(base + "--shift 0,0 --out cli_grid.csv").code == 0);
    CHECK(slurp("cli_grid.csv").rfind(header, 0) == 0);
    CHECK(run(base + "--shift=-5,0").code == 1);
    CHECK(run(base + "--desk-scale --paper-scale").code == 1);
    std::remove("cli_grid.csv");
}

TEST_CASE("embedded dataset listing and export")
{
    auto r = run("datasets list");
    CHECK(r.code == 0);
    CHECK(r.out.find("rh-may-2007") != std::string::npos);
    r = run("datasets dump rh-may-2008");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("x\n", 0) == 0);
    CHECK(std::count(r.out.begin(), r.out.end(), '\n') == 32);
    CHECK(run("datasets dump rh-may-2008 --drop-first --out cli_dump.csv").code == 0);
    const auto dropped = run("fit --data rh-may-2008 --support 0.3,1 --json");
    const auto reread = run("fit --data cli_dump.csv --support 0.3,1 --json");
    CHECK(nlohmann::json::parse(dropped.out)["theta1"] == nlohmann::json::parse(reread.out)["theta1"]);
    CHECK(run("datasets dump nope").code == 2);
    std::remove("cli_dump.csv");
}
