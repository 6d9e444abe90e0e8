#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string bin() {
  const char* b = std::getenv("QPULSE_BIN");
  REQUIRE(b != nullptr);
  return b;
}

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& args) {
  fs::path tmp = fs::temp_directory_path() / "qpulse_cli_out.txt";
  std::string cmd = bin() + " " + args + " >" + tmp.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(tmp);
  std::stringstream ss;
  ss << in.rdbuf();
  r.out = ss.str();
  return r;
}

double grab(const std::string& text, const std::string& key) {
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string k;
    double v;
    if (ls >> k >> v && k == key) return v;
  }
  throw std::runtime_error("key not found: " + key);
}

}  // namespace

TEST_CASE("shape-params on a library shape") {
  RunResult r = run("shape-params --shape 'Q1(180)'");
  REQUIRE(r.code == 0);
  CHECK(std::abs(grab(r.out, "upsilon")) < 1e-6);
  CHECK(std::abs(grab(r.out, "alpha")) < 1e-6);
  CHECK(grab(r.out, "zeta") == Catch::Approx(0.239888).margin(1e-4));
}

TEST_CASE("shape-params for hard and gaussian pulses") {
  RunResult hard = run("shape-params --hard 90");
  REQUIRE(hard.code == 0);
  CHECK(grab(hard.out, "upsilon") == Catch::Approx(std::sqrt(2) / 2).margin(1e-9));
  CHECK(grab(hard.out, "alpha") == Catch::Approx(0.25).margin(1e-9));

  RunResult g = run("shape-params --gaussian 0.1 --angle 90");
  REQUIRE(g.code == 0);
  CHECK(grab(g.out, "upsilon") == Catch::Approx(0.753116).margin(1e-3));
}

TEST_CASE("shape files round trip through the cli") {
  fs::path shape = fs::temp_directory_path() / "qpulse_cli_shape.json";
  {
    nlohmann::json j = {{"label", "custom"},
                        {"phi0_degrees", 180.0},
                        {"L", 1},
                        {"K_claimed", 1},
                        {"coeffs", {-1.2053193822, 0.4796467863, 0.2256725959}}};
    std::ofstream out(shape);
    out << j.dump();
  }
  RunResult r = run("shape-params --shape " + shape.string());
  REQUIRE(r.code == 0);
  CHECK(grab(r.out, "alpha") == Catch::Approx(0.0332661).margin(1e-4));
}

TEST_CASE("usage errors exit with code 1") {
  CHECK(run("no-such-command").code == 1);
  CHECK(run("order-table --n 1").code == 1);
  CHECK(run("order-table --kmax 99").code == 1);
  CHECK(run("scan --kind bogus").code == 1);
  CHECK(run("scan --kind amp_freq --grid nonsense").code == 1);
  CHECK(run("").code == 1);  // a subcommand is required
}

TEST_CASE("missing shape file is a numeric error") {
  CHECK(run("shape-params --shape /nonexistent/shape.json").code == 2);
}

TEST_CASE("order-table text and json output") {
  fs::path out = fs::temp_directory_path() / "qpulse_cli_table.json";
  RunResult r = run("order-table --seq seq4 --shape 'S1(180)' --model ising --n 2 "
                    "--seed 7 --kmax 2 --steps 512 --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.find("model") != std::string::npos);
  CHECK(r.out.find("ising") != std::string::npos);

  std::ifstream in(out);
  nlohmann::json j;
  in >> j;
  CHECK(j["seq"] == "seq4");
  CHECK(j["kmax"] == 2);
  REQUIRE(j["cells"].size() == 1);
  CHECK(j["cells"][0]["model"] == "ising");
  // first-order shape on a pure Ising chain: both probed orders pass
  CHECK(j["cells"][0]["order"] == 2);
  CHECK(j["cells"][0]["saturated"] == true);
}

TEST_CASE("scan produces a csv with a manifest header") {
  fs::path out = fs::temp_directory_path() / "qpulse_cli_scan.csv";
  std::string cmd = "scan --kind amp_freq --composite scrofulous "
                    "--grid -0.1:0.1:3 --grid2 0:0:1 --steps 256 --out " + out.string();
  RunResult r = run(cmd);
  REQUIRE(r.code == 0);

  std::ifstream in(out);
  std::string line;
  int meta = 0, data = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# ", 0) == 0) {
      meta++;
      CHECK(line.find('=') != std::string::npos);
    } else if (line == "f,dtau,infidelity") {
      header = true;
    } else if (!line.empty()) {
      data++;
    }
  }
  CHECK(header);
  CHECK(meta >= 4);
  CHECK(data == 3);

  // determinism: a second run produces identical bytes
  fs::path out2 = fs::temp_directory_path() / "qpulse_cli_scan2.csv";
  std::string cmd2 = "scan --kind amp_freq --composite scrofulous "
                     "--grid -0.1:0.1:3 --grid2 0:0:1 --steps 256 --out " + out2.string();
  REQUIRE(run(cmd2).code == 0);
  std::ifstream a(out), b(out2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  CHECK(sa.str() == sb.str());
}

TEST_CASE("synthesize reports non-convergence with exit 3") {
  RunResult r = run("synthesize --angle 180 --order 1 --harmonics 4 "
                    "--budget 50 --opt-steps 256 --seed 1");
  CHECK(r.code == 3);
  CHECK(r.out.find("converged   no") != std::string::npos);
}
