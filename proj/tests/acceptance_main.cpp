// Acceptance suite: one line per criterion, nonzero exit iff any selected
// criterion fails. --criterion N runs a single criterion; --replicates
// overrides the pinned default (for quick local runs only).

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "gdp/suites.hpp"

namespace {

using gdp::SuiteContext;
using gdp::VerificationReport;

struct CriterionResult {
  bool pass;
  std::string detail;
};

long long g_replicates_override = 0;

SuiteContext make_ctx(long long replicates, std::uint64_t seed = 20260809) {
  SuiteContext ctx;
  ctx.replicates =
      g_replicates_override > 0 ? g_replicates_override : replicates;
  ctx.seed = seed;
  return ctx;
}

CriterionResult from_suite(const std::string& name, long long replicates) {
  auto reports = gdp::run_suite(name, make_ctx(replicates));
  int code = gdp::exit_code_for(reports);
  int pass = 0, fail = 0, inconclusive = 0;
  std::string failed_ids;
  for (const auto& r : reports) {
    if (r.satisfied()) {
      ++pass;
    } else if (r.decision == "inconclusive") {
      ++inconclusive;
    } else {
      ++fail;
      if (failed_ids.size() < 160) failed_ids += " | " + r.id;
    }
  }
  char buf[320];
  std::snprintf(buf, sizeof(buf), "%d/%zu reports ok%s%s", pass,
                reports.size(), inconclusive ? ", inconclusive present" : "",
                failed_ids.c_str());
  return {code == 0, buf};
}

#ifndef GDPLAB_BIN
#define GDPLAB_BIN ""
#endif

int run_cli(const std::string& args) {
  std::string bin = GDPLAB_BIN;
  if (bin.empty()) return -1;
  std::string cmd = bin + " " + args;
  int status = std::system(cmd.c_str());
  if (status < 0) return -1;
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::string s((std::istreambuf_iterator<char>(in)),
                std::istreambuf_iterator<char>());
  return s;
}

CriterionResult criterion_reproducibility() {
  // in-process: identical seed, identical serialized reports
  auto ctx = make_ctx(20000, 4242);
  auto a = gdp::reports_to_json(gdp::run_suite("gamma-dirichlet-independence", ctx));
  auto b = gdp::reports_to_json(gdp::run_suite("gamma-dirichlet-independence", ctx));
  if (a != b) return {false, "re-run with the same seed differed in-process"};

  std::string bin = GDPLAB_BIN;
  if (bin.empty()) return {false, "CLI path not configured"};

  // CLI level: byte-identical report files
  int c1 = run_cli("verify --suite ldp --seed 11 --out /tmp/gdp_acc_r1 "
                   "> /dev/null 2>&1");
  int c2 = run_cli("verify --suite ldp --seed 11 --out /tmp/gdp_acc_r2 "
                   "> /dev/null 2>&1");
  if (c1 != 0 || c2 != 0) return {false, "ldp suite via CLI did not pass"};
  if (slurp("/tmp/gdp_acc_r1/ldp.json") != slurp("/tmp/gdp_acc_r2/ldp.json")) {
    return {false, "CLI report files differ between identical runs"};
  }

  // negative controls must fail and surface as exit code 2
  int code = run_cli(
      "verify --suite negative-controls --replicates 20000 --seed 5 "
      "--out /tmp/gdp_acc_nc > /dev/null 2>&1");
  if (code != 2) {
    return {false, "negative-controls exited " + std::to_string(code) +
                       " instead of 2"};
  }

  // malformed configuration: exit 1, message naming the key
  {
    std::ofstream cfg("/tmp/gdp_acc_bad.json");
    cfg << "{\"suite\": \"ldp\", \"params\": {\"theta\": -1.0}}";
  }
  int bad = run_cli("verify --config /tmp/gdp_acc_bad.json "
                    "> /dev/null 2> /tmp/gdp_acc_bad.err");
  if (bad != 1) {
    return {false,
            "malformed config exited " + std::to_string(bad) + " instead of 1"};
  }
  if (slurp("/tmp/gdp_acc_bad.err").find("theta") == std::string::npos) {
    return {false, "config error message does not name the offending key"};
  }
  return {true, "in-process and CLI reruns byte-identical; exit codes 2/1"};
}

struct Criterion {
  int number;
  const char* label;
  CriterionResult (*run)();
};

const Criterion kCriteria[] = {
    {1, "gamma-measure Laplace functional",
     [] { return from_suite("laplace-gamma", 100000); }},
    {2, "radial-angular independence",
     [] { return from_suite("gamma-dirichlet-independence", 100000); }},
    {3, "algebraic identities",
     [] { return from_suite("algebraic-identities", 100000); }},
    {4, "quasi-invariance certification",
     [] { return from_suite("quasi-invariance", 100000); }},
    {5, "theta=0 fixed point and alpha->0 limit",
     [] { return from_suite("theta0-fixed-point", 100000); }},
    {6, "Hamiltonian radial-angular identity",
     [] { return from_suite("hamiltonian", 100000); }},
    {7, "lines-of-descent pmf grid",
     [] { return from_suite("tavare", 100000); }},
    {8, "random time change grid",
     [] { return from_suite("theorem-5.2", 100000); }},
    {9, "transition reversibility and Chapman-Kolmogorov",
     [] { return from_suite("reversibility-5.1", 100000); }},
    {10, "fixed-time identities and lambda independence",
     [] { return from_suite("theorem-5.3", 100000); }},
    {11, "generator identities",
     [] { return from_suite("generator-identities", 100000); }},
    {12, "diffusion-oracle adjudication",
     [] { return from_suite("sde-adjudication", 100000); }},
    {13, "rate functions and contraction",
     [] { return from_suite("ldp", 100000); }},
    {14, "reproducibility and exit codes",
     [] { return criterion_reproducibility(); }},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else if (std::strcmp(argv[i], "--replicates") == 0 && i + 1 < argc) {
      g_replicates_override = std::atoll(argv[++i]);
    } else {
      std::fprintf(stderr,
                   "usage: %s [--criterion N] [--replicates N]\n", argv[0]);
      return 64;
    }
  }
  int failures = 0;
  for (const auto& c : kCriteria) {
    if (only != 0 && c.number != only) continue;
    CriterionResult r{false, "exception"};
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] criterion %02d %-46s %s\n", r.pass ? "PASS" : "FAIL",
                c.number, c.label, r.detail.c_str());
    std::fflush(stdout);
    if (!r.pass) ++failures;
  }
  return failures;
}
