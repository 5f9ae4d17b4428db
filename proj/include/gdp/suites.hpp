#pragma once

#include <map>
#include <string>
#include <vector>

#include "gdp/verify.hpp"

namespace gdp {

// Execution context shared by all suites: replicate budget, master seed,
// and optional parameter overrides (theta, alpha, beta, lambda, t, ...).
struct SuiteContext {
  long long replicates = 100000;
  std::uint64_t seed = 20260809;
  std::map<std::string, double> params;

  double get(const std::string& key, double dflt) const {
    auto it = params.find(key);
    return it == params.end() ? dflt : it->second;
  }
};

struct Suite {
  std::string name;
  std::string anchor;  // which identity of the theory the suite certifies
  std::vector<VerificationReport> (*run)(const SuiteContext&);
};

const std::vector<Suite>& suite_registry();

bool has_suite(const std::string& name);
std::vector<VerificationReport> run_suite(const std::string& name,
                                          const SuiteContext& ctx);

// 0 all pass, 2 any fail, 3 any inconclusive with no fail.
int exit_code_for(const std::vector<VerificationReport>& reports);

}  // namespace gdp
