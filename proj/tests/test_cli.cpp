// Black-box tests for the bandit_lab executable: exit codes, config
// validation messages, CSV shapes, golden output for the threshold verb, and
// byte-identical reruns under different seeds/thread counts.

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

namespace {

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() /
                 ("banditlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliResult run_cli(const std::string& args) {
  static int counter = 0;
  const fs::path out = scratch_dir() / ("out" + std::to_string(counter));
  const fs::path err = scratch_dir() / ("err" + std::to_string(counter));
  ++counter;
  const std::string cmd = std::string("\"") + BANDITLAB_CLI_PATH + "\" " +
                          args + " > \"" + out.string() + "\" 2> \"" +
                          err.string() + "\"";
  const int status = std::system(cmd.c_str());
  CliResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string config(const std::string& name) {
  return std::string("\"") + BANDITLAB_CONFIG_DIR + "/" + name + "\"";
}

std::string bad_config(const std::string& name) {
  return std::string("\"") + BANDITLAB_BAD_CONFIG_DIR + "/" + name + "\"";
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

std::string first_line(const std::string& s) {
  return s.substr(0, s.find('\n'));
}

}  // namespace

TEST_CASE("every shipped config validates") {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(BANDITLAB_CONFIG_DIR)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  REQUIRE(files.size() >= 10);
  for (const auto& f : files) {
    const auto r =
        run_cli("validate-config -c \"" + f.string() + "\"");
    CAPTURE(f.string());
    CAPTURE(r.err);
    CHECK(r.exit_code == 0);
    CHECK(r.out == "ok: " + f.string() + "\n");
  }
}

TEST_CASE("bad configs are rejected with exit 2 and a pointed message") {
  struct Case {
    const char* file;
    const char* fragment;
  };
  const std::vector<Case> cases = {
      {"01_not_json.json", "is not valid JSON"},
      {"02_unknown_key.json", "unknown key 'bogus'"},
      {"03_missing_std_devs.json", "instance.std_devs is required"},
      {"04_negative_sigma.json", "instance: std_devs must be > 0"},
      {"05_length_mismatch.json", "must have equal length"},
      {"06_bad_lambda.json", "lambda must lie in [0,1]"},
      {"07_reserved_policy.json", "reserved baseline"},
      {"08_estimator_policy_mismatch.json",
       "pcipw is defined by the two-stage pilot"},
      {"09_sarp_bad_p0.json", "sarp: p0 must sum to 1"},
      {"10_zero_reps.json", "reps must be >= 1"},
  };
  for (const auto& c : cases) {
    const auto r = run_cli("validate-config -c " + bad_config(c.file));
    CAPTURE(c.file);
    CAPTURE(r.err);
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "config error"));
    CHECK(contains(r.err, c.fragment));
  }
}

TEST_CASE("thresholds: golden CSV, stable across reruns") {
  const std::string want =
      "k,sigma,n1_min,oracle_gain_pct,error\n"
      "4,1;1;1;5,12,42.8571,\n"
      "4,3;3;3;4,260,1.74419,\n"
      "6,1;1;2;2;3;6,24,31.8182,\n"
      "6,1;1;1;3;3;3,42,20,\n"
      "10,1;1;2;2;3;3;4;4;5;5,80,18.1818,\n"
      "10,1;1;1;1;1;1;1;1;1;10,30,66.8807,\n";
  const auto r1 = run_cli("thresholds -c " + config("thresholds_profiles.json"));
  CAPTURE(r1.err);
  CHECK(r1.exit_code == 0);
  CHECK(r1.out == want);
  const auto r2 = run_cli("thresholds -c " + config("thresholds_profiles.json"));
  CHECK(r2.out == r1.out);
}

TEST_CASE("--raw switches to full-precision floats") {
  const auto raw =
      run_cli("thresholds --raw -c " + config("thresholds_profiles.json"));
  CHECK(raw.exit_code == 0);
  CHECK(contains(raw.out, "42.857142857142"));
  // Integers keep their short form either way.
  CHECK(contains(raw.out, "4,1;1;1;5,12,"));
}

TEST_CASE("--output writes the same bytes to a file, with trailing newline") {
  const fs::path out_file = scratch_dir() / "thresholds.csv";
  const auto to_stdout =
      run_cli("thresholds -c " + config("thresholds_profiles.json"));
  const auto to_file = run_cli("thresholds -c " +
                               config("thresholds_profiles.json") + " -o \"" +
                               out_file.string() + "\"");
  CHECK(to_file.exit_code == 0);
  CHECK(to_file.out.empty());
  const std::string written = slurp(out_file);
  CHECK(written == to_stdout.out);
  REQUIRE(!written.empty());
  CHECK(written.back() == '\n');
  CHECK(first_line(written) == "k,sigma,n1_min,oracle_gain_pct,error");
}

TEST_CASE("joint-compare output is byte-identical across thread counts") {
  const std::string base = "joint-compare -c " + config("smoke.json");
  const auto one = run_cli(base + " --threads 1");
  const auto three = run_cli(base + " --threads 3");
  CAPTURE(one.err);
  CHECK(one.exit_code == 0);
  CHECK(three.exit_code == 0);
  CHECK(one.out == three.out);
  CHECK(first_line(one.out) ==
        "policy,sum_rmse,se_sum_rmse,avg_regret,se_avg_regret,joint_loss,"
        "se_joint_loss");
  CHECK(contains(one.out, "\nuniform,"));
  CHECK(contains(one.out, "\nnarp,"));
}

TEST_CASE("seed handling: reruns match, --seed changes the draw") {
  const std::string base = "inference-sweep -c " + config("smoke.json");
  const auto a = run_cli(base);
  const auto b = run_cli(base);
  const auto c = run_cli(base + " --seed 99");
  CAPTURE(a.err);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(c.exit_code == 0);
  CHECK(c.out != a.out);
  CHECK(first_line(c.out) == first_line(a.out));
}

TEST_CASE("inference-sweep rows and closed-form footers") {
  const auto r = run_cli("inference-sweep -c " + config("smoke.json"));
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) ==
        "row,n1,total_mse,se_total_mse,delta_u,se_delta_paired,"
        "se_delta_unpaired,gain_pct");
  CHECK(contains(r.out, "\nadaptive,10,"));
  CHECK(contains(r.out, "\nadaptive,20,"));
  CHECK(contains(r.out, "\nuniform_mc,,"));
  // K sum(sigma^2) / N = 2*5/200 and (sum sigma)^2 / N = 9/200.
  CHECK(contains(r.out, "\nuniform_closed,,0.05,"));
  CHECK(contains(r.out, "\nneyman_closed,,0.045,"));
}

TEST_CASE("rate-sweep emits data rows and slope rows per policy") {
  const auto r = run_cli("rate-sweep -c " + config("smoke.json"));
  CAPTURE(r.err);
  CHECK(r.exit_code == 0);
  CHECK(first_line(r.out) ==
        "record,policy,n,joint_loss,se_joint_loss,sum_rmse,avg_regret,"
        "slope_joint,slope_sum_rmse,slope_avg_regret");
  CHECK(contains(r.out, "\ndata,uniform,100,"));
  CHECK(contains(r.out, "\ndata,uniform,200,"));
  CHECK(contains(r.out, "\ndata,narp,100,"));
  CHECK(contains(r.out, "\ndata,narp,200,"));
  CHECK(contains(r.out, "\nslope,uniform,"));
  CHECK(contains(r.out, "\nslope,narp,"));
}

TEST_CASE("--set overrides steer the run") {
  const std::string base = "oracle -c " + config("smoke.json");
  const auto plain = run_cli(base);
  const auto tilted = run_cli(base + " --set lambda=0.25");
  CAPTURE(plain.err);
  CHECK(plain.exit_code == 0);
  CHECK(tilted.exit_code == 0);
  CHECK(plain.out != tilted.out);
  CHECK(first_line(plain.out) == first_line(tilted.out));

  // Overrides re-validate: an out-of-range lambda is still rejected.
  const auto bad = run_cli(base + " --set lambda=2");
  CHECK(bad.exit_code == 2);
  CHECK(contains(bad.err, "lambda must lie in [0,1]"));
}

TEST_CASE("a numerically infeasible oracle problem exits 3") {
  const auto r = run_cli("oracle -c " + config("smoke.json") +
                         " --set \"instance.means=[0,1e300]\"");
  CHECK(r.exit_code == 3);
  CHECK(contains(r.err, "numerical failure"));
}

TEST_CASE("usage errors exit 2; help exits 0") {
  CHECK(run_cli("no-such-verb -c x.json").exit_code == 2);
  CHECK(run_cli("thresholds --no-such-flag -c " +
                config("thresholds_profiles.json"))
            .exit_code == 2);
  CHECK(run_cli("thresholds").exit_code == 2);  // missing --config
  CHECK(run_cli("").exit_code == 2);            // missing verb

  const auto missing = run_cli("thresholds -c /nonexistent/nope.json");
  CHECK(missing.exit_code == 2);
  CHECK(contains(missing.err, "cannot open"));

  CHECK(run_cli("--help").exit_code == 0);
  const auto sub_help = run_cli("oracle --help");
  CHECK(sub_help.exit_code == 0);
  CHECK(contains(sub_help.out, "--seed"));
}
