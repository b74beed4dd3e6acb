#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

const fs::path& scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("polarorder-cli-" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path fixture(const std::string& name, const std::string& text) {
  fs::path p = scratch_dir() / name;
  std::ofstream out(p, std::ios::binary);
  out << text;
  return p;
}

RunResult run_cli(const std::string& args) {
  fs::path out_path = scratch_dir() / "stdout.txt";
  fs::path err_path = scratch_dir() / "stderr.txt";
  std::string cmd = std::string(POLARORDER_CLI) + " " + args + " > '" + out_path.string() +
                    "' 2> '" + err_path.string() + "'";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

}  // namespace

TEST_CASE("synth reports the worked erasure example", "[cli]") {
  auto bec = fixture("bec05.json", R"({"bec": 0.5})");
  auto csv_path = scratch_dir() / "synth.csv";
  auto r = run_cli("synth --channel " + q(bec) + " --sequence ++ --exact --output " + q(csv_path));
  REQUIRE(r.exit_code == 0);

  auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["sequence"] == "++");
  CHECK(summary["index"] == 4);
  CHECK(summary["atoms"] == 3);
  CHECK_THAT(summary["mean"].get<double>(), WithinAbs(0.0, 1e-15));
  CHECK_THAT(summary["bhattacharyya"].get<double>(), WithinAbs(0.0625, 1e-15));
  CHECK_THAT(summary["functionals"]["bhattacharyya_complement"].get<double>(),
             WithinAbs(0.9375, 1e-15));
  CHECK(summary["functionals"].size() == 5);

  CHECK(slurp(csv_path) == "value,weight\n-1,0.46875\n0,0.0625\n1,0.46875\n");
}

TEST_CASE("synth with an empty sequence echoes the root", "[cli]") {
  auto bec = fixture("bec05.json", R"({"bec": 0.5})");
  auto csv_path = scratch_dir() / "root.csv";
  auto r = run_cli("synth --channel " + q(bec) + " --exact --output " + q(csv_path));
  REQUIRE(r.exit_code == 0);
  auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["sequence"] == "");
  CHECK(summary["index"] == 1);
  CHECK(summary["atoms"] == 3);
  CHECK(slurp(csv_path) == "value,weight\n-1,0.25\n0,0.5\n1,0.25\n");
}

TEST_CASE("synth respects the quantizer budget", "[cli]") {
  auto z = fixture("z05.json", R"({"z": 0.5})");
  auto csv_path = scratch_dir() / "budget.csv";
  auto r = run_cli("synth --channel " + q(z) + " --sequence +-+-+- --budget 4 --output " +
                   q(csv_path));
  REQUIRE(r.exit_code == 0);
  auto summary = nlohmann::json::parse(r.out);
  CHECK(summary["atoms"].get<int>() <= 4);

  CHECK(run_cli("synth --channel " + q(z) + " --budget 0").exit_code == 2);
}

TEST_CASE("synth exact mode refuses to overflow", "[cli]") {
  auto z = fixture("z05.json", R"({"z": 0.5})");
  auto r = run_cli("synth --channel " + q(z) + " --sequence ++++++++++++ --exact");
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.err, ContainsSubstring("error:"));
  CHECK_THAT(r.err, ContainsSubstring("atoms"));
}

TEST_CASE("order verdicts map to exit codes", "[cli]") {
  auto bsc025 = fixture("bsc025.json", R"({"bsc": 0.25})");
  auto bsc_third = fixture("bsc_third.json", R"({"bsc": 0.3333333333333333})");
  auto z05 = fixture("z05.json", R"({"z": 0.5})");

  auto sym = run_cli("order --lhs " + q(bsc025) + " --rhs " + q(z05) + " --method symmetric");
  REQUIRE(sym.exit_code == 0);
  auto sym_json = nlohmann::json::parse(sym.out);
  CHECK(sym_json["holds"] == true);
  CHECK(sym_json["method"] == "symmetric-convex");

  auto deg_fail = run_cli("order --lhs " + q(bsc025) + " --rhs " + q(z05) + " --method degradation");
  REQUIRE(deg_fail.exit_code == 1);
  CHECK(nlohmann::json::parse(deg_fail.out)["holds"] == false);

  auto deg_ok = run_cli("order --lhs " + q(bsc_third) + " --rhs " + q(z05) + " --method degradation");
  REQUIRE(deg_ok.exit_code == 0);
  auto deg_json = nlohmann::json::parse(deg_ok.out);
  CHECK(deg_json["witness"]["kind"] == "kernel");

  for (const char* method : {"icx", "cx", "cut", "symmetric", "degradation", "blackwell"}) {
    auto self = run_cli("order --lhs " + q(z05) + " --rhs " + q(z05) + " --method " + method);
    INFO(method);
    CHECK(self.exit_code == 0);
    CHECK(nlohmann::json::parse(self.out)["holds"] == true);
  }

  CHECK(run_cli("order --lhs " + q(z05) + " --rhs " + q(z05) + " --method nonsense").exit_code == 2);

  // a generous tolerance turns the failing icx pair into a pass
  auto forced = run_cli("order --lhs " + q(z05) + " --rhs " + q(bsc025) +
                        " --method icx --tol 1");
  CHECK(forced.exit_code == 0);
}

TEST_CASE("infoset output is exact and byte-stable", "[cli]") {
  auto bec = fixture("bec05.json", R"({"bec": 0.5})");
  auto csv_a = scratch_dir() / "report_a.csv";
  auto csv_b = scratch_dir() / "report_b.csv";
  std::string base = "infoset --channel " + q(bec) +
                     " --n 2 --phi bhattacharyya_complement --eps 0.1 --exact --output ";
  auto a = run_cli(base + q(csv_a));
  auto b = run_cli(base + q(csv_b));
  REQUIRE(a.exit_code == 0);
  REQUIRE(b.exit_code == 0);

  auto summary = nlohmann::json::parse(a.out);
  CHECK(summary["n"] == 2);
  CHECK(summary["size"] == 4);
  CHECK(summary["budget"].is_null());
  CHECK(summary["members"] == nlohmann::json::array({"++"}));

  CHECK(a.out == b.out);
  CHECK(slurp(csv_a) ==
        "sequence,index,value,member\n--,1,0.0625,0\n-+,2,0.4375,0\n+-,3,0.5625,0\n++,4,0.9375,1\n");
  CHECK(slurp(csv_a) == slurp(csv_b));
}

TEST_CASE("infoset rejects invalid thresholds without partial output", "[cli]") {
  auto bec = fixture("bec05.json", R"({"bec": 0.5})");
  auto out = scratch_dir() / "never_written.csv";
  auto r = run_cli("infoset --channel " + q(bec) + " --n 2 --phi capacity --eps 1.5 --output " +
                   q(out));
  CHECK(r.exit_code == 2);
  CHECK_THAT(r.err, ContainsSubstring("eps"));
  CHECK_FALSE(fs::exists(out));
}

TEST_CASE("example table prints both routes to the same threshold", "[cli]") {
  auto r = run_cli("example-zbsc --p 0.5");
  REQUIRE(r.exit_code == 0);
  CHECK_THAT(r.out, ContainsSubstring("0.333333"));
  CHECK_THAT(r.out, ContainsSubstring("0.250000"));
  CHECK_THAT(r.out, ContainsSubstring("yes"));

  CHECK(run_cli("example-zbsc --p 1.5").exit_code == 2);
}

TEST_CASE("help and missing subcommands", "[cli]") {
  auto help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK_THAT(help.out, ContainsSubstring("synth"));
  CHECK_THAT(help.out, ContainsSubstring("infoset"));

  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("synth").exit_code == 2);            // missing --channel
  CHECK(run_cli("order --method icx").exit_code == 2);
}
