#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "ffgrad_cli_test";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

fs::path write(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

int run(const std::string& args, const std::string& log = "log.txt") {
  const std::string cmd = std::string("\"") + FFGRAD_CLI_PATH + "\" " + args + " > \"" +
                          (workdir() / log).string() + "\" 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string strip_column(const std::string& csv, std::size_t column) {
  std::istringstream in(csv);
  std::string out;
  for (std::string line; std::getline(in, line);) {
    std::size_t start = 0;
    for (std::size_t c = 0; c < column; ++c) start = line.find(',', start) + 1;
    const std::size_t end = line.find(',', start);
    out += line.substr(0, start) + (end == std::string::npos ? "" : line.substr(end)) + '\n';
  }
  return out;
}

const char* kPulse = R"({
  "dim": 2,
  "drift": {"pauli": "Z", "scale": 0.5},
  "controls": [{"operator": {"pauli": "X", "scale": 0.5}, "amplitudes": [0.8, -0.3, 0.5]}],
  "noises": [{"operator": "Z"}, {"operator": "X"}],
  "dt": [0.5, 0.5, 1.0]
})";

const char* kSpectrum = R"({"type": "pink", "S0": 1e-3, "omega": {"min": 0.01, "max": 100, "n": 40}})";

const char* kProblem = R"({
  "dim": 2,
  "controls": [{"operator": {"pauli": "X", "scale": 0.5}, "amplitudes": [0, 0, 0]},
               {"operator": {"pauli": "Y", "scale": 0.5}, "amplitudes": [0, 0, 0]}],
  "noises": [{"operator": "Z"}],
  "dt": [1, 1, 1],
  "target": "X",
  "bounds": [-2, 2],
  "epsilon": 1e-7,
  "max_iter": 20000,
  "spectrum": {"type": "pink", "S0": 1e-4, "omega": {"min": 0.01, "max": 100, "n": 20}}
})";

}  // namespace

TEST_CASE("help and version exit cleanly") {
  CHECK(run("--help") == 0);
  CHECK(read(workdir() / "log.txt").find("filterfn") != std::string::npos);
  CHECK(run("--version") == 0);
  CHECK(read(workdir() / "log.txt").find("ffgrad ") != std::string::npos);
  CHECK(run("bench --help") == 0);
}

TEST_CASE("usage errors exit with 1") {
  CHECK(run("") == 1);
  CHECK(run("transmogrify") == 1);
  CHECK(run("filterfn --pulse") == 1);
  CHECK(run("bench --param ndt --values 4,x --out a.csv") == 1);
  CHECK(run("optimize --problem nowhere.json --out a.csv") == 1);
}

TEST_CASE("filterfn writes the filter function and infidelities") {
  const fs::path pulse = write("pulse.json", kPulse), spec = write("spec.json", kSpectrum);
  const fs::path out = workdir() / "ff.csv";
  REQUIRE(run("filterfn --pulse " + pulse.string() + " --spectrum " + spec.string() + " --out " + out.string()) == 0);
  const auto ff = lines(out);
  REQUIRE(ff.size() == 41);
  CHECK(ff[0] == "omega,F_0,F_1");
  const auto inf = lines(workdir() / "ff_infidelity.csv");
  REQUIRE(inf.size() == 3);
  CHECK(inf[0] == "alpha,infidelity");
  CHECK(inf[1].rfind("0,", 0) == 0);
  CHECK(std::stod(inf[1].substr(2)) > 0.0);
}

TEST_CASE("gradient rows and finite-difference check") {
  const fs::path pulse = write("pulse.json", kPulse), spec = write("spec.json", kSpectrum);
  const fs::path out = workdir() / "grad.csv";
  REQUIRE(run("gradient --pulse " + pulse.string() + " --spectrum " + spec.string() + " --out " + out.string()) == 0);
  auto rows = lines(out);
  REQUIRE(rows.size() == 1 + 2 * 3);
  CHECK(rows[0] == "alpha,h,g,value");
  CHECK(rows[4].rfind("1,0,0,", 0) == 0);

  REQUIRE(run("gradient --check-fd --pulse " + pulse.string() + " --spectrum " + spec.string() + " --out " +
                  out.string(),
              "fd.txt") == 0);
  rows = lines(out);
  CHECK(rows[0] == "alpha,h,g,value,fd_value,rel_err");
  const std::string log = read(workdir() / "fd.txt");
  const auto pos = log.find("max_rel_err=");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(log.substr(pos + 12)) < 1e-4);
}

TEST_CASE("malformed pulse reports the field path and exits with 2") {
  const fs::path bad = write("bad.json", R"({"dim": 2, "controls": [{"operator": "X", "amplitudes": [1, 2]}],
    "noises": [{"operator": "Z"}], "dt": [1]})");
  const fs::path spec = write("spec.json", kSpectrum);
  CHECK(run("filterfn --pulse " + bad.string() + " --spectrum " + spec.string() + " --out x.csv") == 2);
  CHECK(read(workdir() / "log.txt").find("controls[0].amplitudes") != std::string::npos);
  const fs::path mismatch = write("spec2.json", R"({"omega": [1, 2], "S": [1, 1]})");
  const fs::path pulse = write("pulse.json", kPulse);
  CHECK(run("gradient --pulse " + pulse.string() + " --spectrum " + mismatch.string() + " --out x.csv") == 2);
}

TEST_CASE("optimize is seed-deterministic apart from timing") {
  const fs::path prob = write("problem.json", kProblem);
  const fs::path a = workdir() / "a.csv", b = workdir() / "b.csv", curve = workdir() / "curve.csv";
  const std::string common = "optimize --problem " + prob.string() + " --algo both --runs 2 --seed 5 ";
  REQUIRE(run(common + "--out " + a.string() + " --restart-out " + curve.string()) == 0);
  REQUIRE(run(common + "--out " + b.string()) == 0);
  const auto rows = lines(a);
  REQUIRE(rows.size() == 5);
  CHECK(rows[0] == "algo,seed,iterations,cost_evals,grad_evals,wall_seconds,final_infidelity,termination");
  CHECK(rows[1].rfind("lbfgsb,5,", 0) == 0);
  CHECK(rows[2].rfind("lbfgsb,6,", 0) == 0);
  CHECK(rows[3].rfind("neldermead,5,", 0) == 0);
  CHECK(strip_column(read(a), 5) == strip_column(read(b), 5));
  const auto c = lines(curve);
  REQUIRE(c.size() == 3);
  CHECK(c[0] == "n_restarts,lbfgsb,neldermead");

  const fs::path single = workdir() / "single.csv";
  REQUIRE(run("optimize --problem " + prob.string() + " --algo lbfgsb --runs 1 --seed 5 --out " + single.string()) ==
          0);
  CHECK(lines(single).size() == 2);
}

TEST_CASE("bench writes csv, fit and plot script") {
  const fs::path out = workdir() / "s.csv";
  REQUIRE(run("bench --param ndt --values 4,8,16 --repeats 5 --seed 1 --out " + out.string()) == 0);
  const auto rows = lines(out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "param,value,median_seconds,repeats");
  CHECK(rows[1].rfind("ndt,4,", 0) == 0);
  CHECK(rows[3].substr(rows[3].size() - 2) == ",5");
  CHECK(read(workdir() / "s.fit").find("exponent=") != std::string::npos);
  CHECK(fs::exists(workdir() / "s_plot.py"));
  CHECK(run("bench --param d --values 4,24,32 --repeats 1 --out " + out.string()) == 1);
  CHECK(run("bench --param nc --values 4,2,8 --out " + out.string()) == 1);
}
