#include <catch2/catch_amalgamated.hpp>

#include "weaksync/io.hpp"

#include <json.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
    const char* p = std::getenv("WEAKSYNC_CLI");
    REQUIRE(p != nullptr);
    return p;
}

struct CommandResult {
    int exit_code;
    std::string stdout_text;
};

CommandResult run_cli(const std::string& args, const fs::path& workdir) {
    const fs::path out = workdir / "stdout.txt";
    const std::string cmd = "cd '" + workdir.string() + "' && '" + cli_path() + "' " + args +
                            " > '" + out.string() + "' 2> stderr.txt";
    const int status = std::system(cmd.c_str());
    CommandResult result;
    result.exit_code = WEXITSTATUS(status);
    std::ifstream in(out);
    result.stdout_text.assign(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
    return result;
}

fs::path fresh_dir(const std::string& tag) {
    const fs::path dir = fs::temp_directory_path() / ("weaksync_cli_" + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

const char* kHubGraph = R"({"n": 3, "edges": [
    {"from": 1, "to": 3, "weight": 1.0},
    {"from": 2, "to": 3, "weight": 3.0}]})";

const char* kHubConfig = R"({
  "graph": {"file": "hub_graph.json"},
  "agents": [{"nodes": "all",
              "direct": {"A_t": [[0]], "B_t": [[-1]], "C_t": [[1]], "H_t": [[1]]}}],
  "sim": {"time_domain": "continuous", "step": 0.01, "horizon": 50,
          "initial_state": [2.0, 6.0, 0.0]},
  "criteria": {"epsilon": 1e-4},
  "outputs": ["report", "csv", "plots"]
})";

} // namespace

TEST_CASE("analyze prints the kernel structure", "[cli]") {
    const auto dir = fresh_dir("analyze");
    write(dir / "hub_graph.json", kHubGraph);
    const auto res = run_cli("analyze hub_graph.json", dir);
    REQUIRE(res.exit_code == 0);

    const auto j = nlohmann::json::parse(res.stdout_text);
    REQUIRE(j.at("n") == 3);
    REQUIRE(j.at("k") == 2);
    REQUIRE(j.at("m0") == 1);
    REQUIRE(j.at("spanning_tree") == false);
    REQUIRE(j.at("beta").size() == 1);
    REQUIRE_THAT(j.at("beta")[0][0].get<double>(),
                 Catch::Matchers::WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(j.at("beta")[0][1].get<double>(),
                 Catch::Matchers::WithinAbs(0.75, 1e-12));
    REQUIRE(j.at("reductions").size() == 2);
    REQUIRE(j.at("reductions")[0].at("support") == nlohmann::json::parse("[3, 1]"));
    REQUIRE(j.at("reductions")[0].at("rank") == 1);
}

TEST_CASE("generate is deterministic and loadable", "[cli]") {
    const auto dir = fresh_dir("generate");
    write(dir / "spec.json",
          R"({"basic_sizes": [3, 2], "nonbasic_sizes": [2], "inter_edge_density": 0.5})");
    REQUIRE(run_cli("generate spec.json --seed 9 -o g1.json", dir).exit_code == 0);
    REQUIRE(run_cli("generate spec.json --seed 9 -o g2.json", dir).exit_code == 0);
    REQUIRE(weaksync::read_file((dir / "g1.json").string()) ==
            weaksync::read_file((dir / "g2.json").string()));

    const auto res = run_cli("analyze g1.json", dir);
    REQUIRE(res.exit_code == 0);
    REQUIRE(nlohmann::json::parse(res.stdout_text).at("k") == 2);
}

TEST_CASE("verify reports hub verdicts and exits zero", "[cli]") {
    const auto dir = fresh_dir("verify");
    write(dir / "hub_graph.json", kHubGraph);
    write(dir / "config.json", kHubConfig);
    const auto res = run_cli("verify config.json --out-dir out", dir);
    REQUIRE(res.exit_code == 0);

    const auto rep = nlohmann::json::parse(res.stdout_text);
    REQUIRE(rep.at("network_stable") == true);
    REQUIRE(rep.at("all_pass") == true);
    REQUIRE(rep.at("global_output_sync").at("pass") == false);
    REQUIRE(rep.at("groups").size() == 2);
    REQUIRE_THAT(rep.at("analysis").at("beta")[0][0].get<double>(),
                 Catch::Matchers::WithinAbs(0.25, 1e-12));
    REQUIRE_THAT(rep.at("analysis").at("beta")[0][1].get<double>(),
                 Catch::Matchers::WithinAbs(0.75, 1e-12));

    REQUIRE(fs::exists(dir / "out" / "report.json"));
    REQUIRE(fs::exists(dir / "out" / "trajectory.csv"));
    REQUIRE(fs::exists(dir / "out" / "zeta.svg"));
    REQUIRE(fs::exists(dir / "out" / "bicomponent_1.svg"));
    REQUIRE(fs::exists(dir / "out" / "bicomponent_2.svg"));
}

TEST_CASE("simulate writes the trajectory file", "[cli]") {
    const auto dir = fresh_dir("simulate");
    write(dir / "hub_graph.json", kHubGraph);
    write(dir / "config.json", kHubConfig);
    const auto res = run_cli("simulate config.json --out-dir out", dir);
    REQUIRE(res.exit_code == 0);
    REQUIRE(fs::exists(dir / "out" / "trajectory.csv"));

    std::ifstream in(dir / "out" / "trajectory.csv");
    std::string header;
    std::getline(in, header);
    REQUIRE(header == "t,x[0],x[1],x[2],y[0],y[1],y[2],zeta[0],zeta[1],zeta[2]");

    const auto json_res = run_cli("simulate config.json --out-dir out2 --format json", dir);
    REQUIRE(json_res.exit_code == 0);
    REQUIRE(fs::exists(dir / "out2" / "trajectory.json"));
}

TEST_CASE("dynamic protocols synchronize through the config pipeline", "[cli]") {
    const auto dir = fresh_dir("protocol");
    // scalar agents x' = u with the protocol xi' = -xi + zeta, u = -xi;
    // the pair disagreement obeys a damped second-order system
    write(dir / "config.json", R"({
      "graph": {"n": 2, "edges": [{"from": 1, "to": 2}, {"from": 2, "to": 1}]},
      "agents": [{"nodes": "all",
                  "model": {"A": [[0]], "B": [[1]], "C": [[1]]},
                  "protocol": {"K": [[-1]], "G_zeta": [[1]], "M": [[-1]]}}],
      "sim": {"time_domain": "continuous", "horizon": 60,
              "initial_state": [4.0, 0.0, -2.0, 0.0]},
      "criteria": {"epsilon": 1e-4}
    })");
    const auto res = run_cli("verify config.json", dir);
    REQUIRE(res.exit_code == 0);
    const auto rep = nlohmann::json::parse(res.stdout_text);
    REQUIRE(rep.at("network_stable") == true);
    REQUIRE(rep.at("global_output_sync").at("pass") == true);
}

TEST_CASE("builtin models resolve by name in configs", "[cli]") {
    const auto dir = fresh_dir("builtin");
    // a lone introspective agent: no coupling, so the network is trivially
    // stable whatever the agent does
    write(dir / "config.json", R"({
      "graph": {"n": 1, "edges": []},
      "agents": [{"nodes": [1],
                  "model": "ct2",
                  "protocol": {"K": [[-1, 0], [0, -1]], "G_zeta": [[1], [1]],
                               "G_meas": [[0.1], [0.1]], "M": [[0, 0]]}}],
      "sim": {"time_domain": "continuous", "horizon": 10,
              "initial_state": [0.1, 0.0, 0.0, 0.0, 0.0]},
      "criteria": {"epsilon": 1e-6}
    })");
    const auto res = run_cli("verify config.json", dir);
    REQUIRE(res.exit_code == 0);
    REQUIRE(nlohmann::json::parse(res.stdout_text).at("network_stable") == true);

    // the same config under a discrete sim domain must be rejected
    write(dir / "bad_domain.json", R"({
      "graph": {"n": 1, "edges": []},
      "agents": [{"nodes": [1],
                  "model": "ct2",
                  "protocol": {"K": [[-1, 0], [0, -1]], "G_zeta": [[1], [1]], "M": [[0, 0]]}}],
      "sim": {"time_domain": "discrete", "horizon": 10,
              "initial_state": [0.1, 0.0, 0.0, 0.0, 0.0]}
    })");
    REQUIRE(run_cli("verify bad_domain.json", dir).exit_code == 2);
}

TEST_CASE("config errors exit with status 2", "[cli]") {
    const auto dir = fresh_dir("config_error");
    write(dir / "hub_graph.json", kHubGraph);
    // agent list covers only two of the three nodes
    write(dir / "bad.json", R"({
      "graph": {"file": "hub_graph.json"},
      "agents": [{"nodes": [1, 2],
                  "direct": {"A_t": [[0]], "B_t": [[-1]], "C_t": [[1]], "H_t": [[1]]}}],
      "sim": {"initial_state": [0, 0, 0]}
    })");
    REQUIRE(run_cli("verify bad.json", dir).exit_code == 2);

    REQUIRE(run_cli("verify missing.json", dir).exit_code == 2);
    REQUIRE(run_cli("frobnicate", dir).exit_code == 2);
    REQUIRE(run_cli("demo nosuch", dir).exit_code == 2);
}

TEST_CASE("diverging simulations exit with status 3", "[cli]") {
    const auto dir = fresh_dir("diverge");
    write(dir / "config.json", R"({
      "graph": {"n": 1, "edges": []},
      "agents": [{"nodes": "all",
                  "direct": {"A_t": [[1]], "B_t": [[0]], "C_t": [[1]], "H_t": [[1]]}}],
      "sim": {"time_domain": "continuous", "horizon": 50, "initial_state": [1.0]}
    })");
    REQUIRE(run_cli("verify config.json", dir).exit_code == 3);
}

TEST_CASE("bundled fault-scenario config passes end to end", "[cli]") {
    const char* src = std::getenv("WEAKSYNC_SRC_DIR");
    REQUIRE(src != nullptr);
    const auto dir = fresh_dir("fig4_config");
    const auto res = run_cli("verify '" + std::string(src) +
                                 "/configs/fig4-like.json' --out-dir out",
                             dir);
    REQUIRE(res.exit_code == 0);
    const auto rep = nlohmann::json::parse(res.stdout_text);
    REQUIRE(rep.at("network_stable") == true);
    REQUIRE(rep.at("groups").size() == 3);
    REQUIRE(rep.at("global_output_sync").at("pass") == false);
    REQUIRE(rep.at("convex_limits").at("residuals").size() == 26);
    REQUIRE(rep.at("analysis").at("n") == 68);
    REQUIRE(fs::exists(dir / "out" / "bicomponent_3.svg"));
}

TEST_CASE("demo fig4 confirms the expected verdict pattern", "[cli]") {
    const auto dir = fresh_dir("demo");
    const auto res = run_cli("demo fig4 --out-dir demo_out", dir);
    REQUIRE(res.exit_code == 0);
    REQUIRE(res.stdout_text.find("68 nodes") != std::string::npos);
    REQUIRE(res.stdout_text.find("weak synchronization") != std::string::npos);
    REQUIRE(fs::exists(dir / "demo_out" / "zeta.svg"));
    REQUIRE(fs::exists(dir / "demo_out" / "bicomponent_3.svg"));
    REQUIRE(fs::exists(dir / "demo_out" / "report.json"));
}

TEST_CASE("WEAKSYNC_OUT sets the default output directory", "[cli]") {
    const auto dir = fresh_dir("envvar");
    write(dir / "hub_graph.json", kHubGraph);
    write(dir / "config.json", kHubConfig);
    const fs::path out = dir / "env_out";
    const std::string cmd = "cd '" + dir.string() + "' && WEAKSYNC_OUT='" + out.string() +
                            "' '" + cli_path() + "' simulate config.json > /dev/null 2>&1";
    REQUIRE(WEXITSTATUS(std::system(cmd.c_str())) == 0);
    REQUIRE(fs::exists(out / "trajectory.csv"));
}
