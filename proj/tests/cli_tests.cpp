// Drives the installed binary end to end: exit codes, report formats,
// determinism, and the file interfaces.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace {

int g_failures = 0;

void expect(bool ok, const std::string& what) {
  if (ok) {
    std::printf("[ ok ] %s\n", what.c_str());
  } else {
    std::printf("[FAIL] %s\n", what.c_str());
    ++g_failures;
  }
}

struct RunResult {
  int exit_code = -1;
  std::string output;
};

std::string g_bin;
std::string g_models;
int g_counter = 0;

RunResult run(const std::string& args) {
  const std::string out_path = "cli_out_" + std::to_string(g_counter++) + ".txt";
  const std::string cmd = g_bin + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  std::ifstream in(out_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  r.output = buf.str();
  return r;
}

std::string model(const std::string& name) { return g_models + "/" + name; }

bool contains(const std::string& hay, const std::string& needle) {
  return hay.find(needle) != std::string::npos;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: cli_tests <binary> <models-dir>\n");
    return 2;
  }
  g_bin = argv[1];
  g_models = argv[2];

  {
    auto r = run("validate --model " + model("product2.json") + " --system all");
    expect(r.exit_code == 0, "validate product model exits 0");
    expect(contains(r.output, "PASS fspec_consistency"), "f-consistency reported");
    expect(contains(r.output, "PASS onedspec_consistency"), "1d-consistency reported");
    expect(contains(r.output, "SUMMARY exit=0"), "summary carries exit code");
  }
  {
    auto r = run("validate --model " + model("random4.json") + " --system f --format json");
    expect(r.exit_code == 0, "validate random field (f) exits 0");
    expect(contains(r.output, "\"check\":\"fspec_consistency\""), "json check line present");
    expect(contains(r.output, "\"version\":"), "json header carries the version");
  }
  {
    auto r = run("validate --model " + model("perturbed3.json") + " --system f");
    expect(r.exit_code == 1, "perturbed table exits 1");
    expect(contains(r.output, "witness="), "failure carries a witness");
  }
  {
    auto r = run("validate --model " + model("malformed.json"));
    expect(r.exit_code == 2, "malformed model exits 2");
  }
  {
    auto r = run("validate --model " + model("explicit2.json") + " --system all");
    expect(r.exit_code == 0, "explicit joint table validates");
    auto bad = run("validate --model " + model("explicit_bad.json"));
    expect(bad.exit_code == 2, "non-normalized explicit table exits 2");
    auto badtol = run("validate --model " + model("explicit2.json") + " --tolerance-eq 0");
    expect(badtol.exit_code == 2, "non-positive tolerance exits 2");
    auto badbudget = run("validate --model " + model("explicit2.json") + " --budget 0");
    expect(badbudget.exit_code == 2, "zero budget exits 2");
  }
  {
    auto r = run("validate --model " + model("does_not_exist.json"));
    expect(r.exit_code == 2, "missing model exits 2");
  }
  {
    auto r = run("validate --model " + model("toobig.json") + " --system f");
    expect(r.exit_code == 3, "state cap overflow exits 3");
  }
  {
    // byte-identical reports for identical inputs and seed
    const std::string args = "validate --model " + model("random4.json") +
                             " --system 1f --seed 123 --format json";
    auto a = run(args);
    auto b = run(args);
    expect(a.exit_code == 0 && b.exit_code == 0, "deterministic runs exit 0");
    expect(a.output == b.output, "reports are byte-identical across runs");
  }
  {
    // --out writes the report to a file
    auto r = run("validate --model " + model("product2.json") + " --system palm --out cli_report.txt");
    expect(r.exit_code == 0, "validate with --out exits 0");
    std::ifstream in("cli_report.txt");
    std::ostringstream buf;
    buf << in.rdbuf();
    expect(contains(buf.str(), "palm_exchange"), "--out file holds the report");
  }
  {
    // environment override drops the budget into sampling territory
    auto r = run("validate --model " + model("random4.json") + " --system f --format json");
    expect(!contains(r.output, "\"sampled\":true"), "default budget runs exhaustively");
    const std::string out_path = "cli_out_env.txt";
    const std::string cmd = "CONDFIELD_BUDGET=200 " + g_bin + " validate --model " +
                            model("random4.json") + " --system f --format json > " + out_path;
    const int status = std::system(cmd.c_str());
    std::ifstream in(out_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    expect(WEXITSTATUS(status) == 0, "tiny budget still exits 0 on a consistent table");
    expect(contains(buf.str(), "\"sampled\":true"), "CONDFIELD_BUDGET forces sampled mode");
    expect(contains(buf.str(), "\"budget\":200"), "env override lands in the header");
  }
  {
    auto r = run("reconstruct --model " + model("random4.json") + " --via f");
    expect(r.exit_code == 0, "reconstruct via f exits 0");
    expect(contains(r.output, "PASS reconstruct_roundtrip_f"), "roundtrip reported");
    auto r1 = run("reconstruct --model " + model("random4.json") + " --via 1f");
    expect(r1.exit_code == 0, "reconstruct via 1f exits 0");
    auto r2 = run("reconstruct --model " + model("random4.json") + " --via palm");
    expect(r2.exit_code == 0, "reconstruct via palm exits 0");
  }
  {
    auto r = run("lift --model " + model("random4.json") + " --route 1f_product");
    expect(r.exit_code == 0, "lift 1f_product exits 0");
    expect(contains(r.output, "lift_vs_ground_truth_1f_product"), "ground-truth comparison reported");
    auto r2 = run("lift --model " + model("random4.json") + " --route 1f_ratio");
    expect(r2.exit_code == 0, "lift 1f_ratio exits 0");
    auto r3 = run("lift --model " + model("random4.json") + " --route palm");
    expect(r3.exit_code == 0, "lift palm exits 0");
  }
  {
    auto r = run("analyze --model " + model("ising_chain4.json") + " --what markov");
    expect(r.exit_code == 0, "markov analysis of an ising chain exits 0");
    expect(contains(r.output, "PASS fspec_markov"), "markov verdict reported");
    auto bad = run("analyze --model " + model("random4.json") + " --what markov");
    expect(bad.exit_code == 1, "markov analysis of a random field exits 1");
  }
  {
    auto r = run("analyze --model " + model("product2.json") + " --what mixing");
    expect(r.exit_code == 0, "mixing analysis exits 0");
    expect(contains(r.output, "VALUE rho_row"), "rho rows serialized");
    expect(contains(r.output, "PASS mixing_bound_sweep"), "bound sweep reported");
  }
  {
    auto r = run("analyze --model " + model("ising_chain4.json") + " --what dobrushin");
    expect(r.exit_code == 0, "dobrushin analysis exits 0");
    expect(contains(r.output, "VALUE dobrushin_coefficient"), "per-site coefficients logged");
    expect(contains(r.output, "volume=finite"), "finite-volume label present");
  }
  {
    auto r = run("analyze --model " + model("random4.json") + " --what sullivan");
    expect(r.exit_code == 0, "sullivan analysis exits 0");
  }
  {
    // derived tables can be dumped in the fixture format
    auto r = run("validate --model " + model("product2.json") + " --system 1f --dump-system cli_dump.jsonl");
    expect(r.exit_code == 0, "dump-system exits 0");
    std::ifstream in("cli_dump.jsonl");
    std::ostringstream buf;
    buf << in.rdbuf();
    expect(contains(buf.str(), "\"spec\":\"1f\""), "dump header present");
    expect(contains(buf.str(), "\"p\":["), "dump rows carry probabilities");
  }

  std::printf("cli_tests: %d failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
