// Command-line front end: run samplers, evaluate closed forms, and execute
// the named verification suites.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "gdp/densities.hpp"
#include "gdp/dynamics.hpp"
#include "gdp/ldp.hpp"
#include "gdp/lineages.hpp"
#include "gdp/samplers.hpp"
#include "gdp/suites.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitFail = 2;
constexpr int kExitInconclusive = 3;

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& w) : std::runtime_error(w) {}
};

struct Config {
  std::string suite;
  std::uint64_t seed = 20260809;
  long long replicates = 100000;
  std::string out;
  std::string format = "json";
  std::map<std::string, double> params;
  gdp::TruncationPolicy trunc = gdp::TruncationPolicy::tail_mass(1e-8);
  std::vector<double> space_probs;  // empty: unit interval
};

const std::set<std::string> kKnownParams = {
    "theta",  "alpha",  "beta", "lambda", "t",
    "t0",     "a",      "b",    "theta1", "theta2",
    "alpha_limit", "n"};

void validate_param(const std::string& key, double value) {
  auto positive = [&](const char* name) {
    if (!(value > 0.0)) {
      throw ConfigError(std::string("params.") + name + ": must be positive");
    }
  };
  if (key == "theta" || key == "beta" || key == "t" || key == "t0" ||
      key == "a" || key == "b" || key == "theta1" || key == "theta2") {
    positive(key.c_str());
  }
  if (key == "alpha" && !(value > 0.0 && value < 1.0)) {
    throw ConfigError("params.alpha: must lie in (0,1)");
  }
}

Config load_config(const std::string& path) {
  Config cfg;
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  const std::set<std::string> known = {"suite",   "seed",       "replicates",
                                       "out",     "format",     "params",
                                       "base_space", "truncation"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
  if (j.contains("suite")) cfg.suite = j["suite"].get<std::string>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("replicates")) {
    cfg.replicates = j["replicates"].get<long long>();
    if (cfg.replicates < 2) throw ConfigError("replicates: must be >= 2");
  }
  if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  if (j.contains("format")) {
    cfg.format = j["format"].get<std::string>();
    if (cfg.format != "json" && cfg.format != "csv") {
      throw ConfigError("format: must be json or csv");
    }
  }
  if (j.contains("params")) {
    for (const auto& [key, value] : j["params"].items()) {
      if (!kKnownParams.count(key)) {
        throw ConfigError("config: unknown key 'params." + key + "'");
      }
      if (!value.is_number()) {
        throw ConfigError("params." + key + ": must be a number");
      }
      double v = value.get<double>();
      validate_param(key, v);
      cfg.params[key] = v;
    }
  }
  if (j.contains("base_space")) {
    const auto& bs = j["base_space"];
    for (const auto& [key, _] : bs.items()) {
      if (key != "kind" && key != "probs") {
        throw ConfigError("config: unknown key 'base_space." + key + "'");
      }
    }
    std::string kind = bs.value("kind", "unit-interval-uniform");
    if (kind == "finite-discrete") {
      if (!bs.contains("probs")) {
        throw ConfigError("base_space.probs: required for finite-discrete");
      }
      cfg.space_probs = bs["probs"].get<std::vector<double>>();
    } else if (kind != "unit-interval-uniform") {
      throw ConfigError("base_space.kind: unknown kind '" + kind + "'");
    }
  }
  if (j.contains("truncation")) {
    const auto& tr = j["truncation"];
    for (const auto& [key, _] : tr.items()) {
      if (key != "mode" && key != "value") {
        throw ConfigError("config: unknown key 'truncation." + key + "'");
      }
    }
    std::string mode = tr.value("mode", "tail-mass");
    double value = tr.value("value", 1e-8);
    try {
      if (mode == "tail-mass") {
        cfg.trunc = gdp::TruncationPolicy::tail_mass(value);
      } else if (mode == "fixed-count") {
        cfg.trunc = gdp::TruncationPolicy::fixed_count(static_cast<int>(value));
      } else {
        throw ConfigError("truncation.mode: unknown mode '" + mode + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("truncation.value: ") + e.what());
    }
  }
  return cfg;
}

gdp::BaseSpace make_space(const Config& cfg) {
  if (cfg.space_probs.empty()) return gdp::BaseSpace::unit_interval();
  return gdp::BaseSpace::finite_discrete(cfg.space_probs);
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

int cmd_list() {
  for (const auto& s : gdp::suite_registry()) {
    std::printf("%-30s %s\n", s.name.c_str(), s.anchor.c_str());
  }
  return kExitOk;
}

int cmd_verify(const Config& cfg) {
  if (cfg.suite.empty()) throw ConfigError("suite: required for verify");
  if (!gdp::has_suite(cfg.suite)) {
    throw ConfigError("suite: unknown suite '" + cfg.suite + "'");
  }
  gdp::SuiteContext ctx;
  ctx.replicates = cfg.replicates;
  ctx.seed = cfg.seed;
  ctx.params = cfg.params;
  auto reports = gdp::run_suite(cfg.suite, ctx);

  std::string json_text = gdp::reports_to_json(reports);
  std::string csv_text = gdp::reports_to_csv(reports);
  if (!cfg.out.empty()) {
    std::filesystem::create_directories(cfg.out);
    write_file(cfg.out + "/" + cfg.suite + ".json", json_text);
    write_file(cfg.out + "/" + cfg.suite + ".csv", csv_text);
  }
  if (cfg.format == "csv") {
    std::cout << csv_text;
  } else {
    std::cout << json_text << "\n";
  }
  int pass = 0, fail = 0, inconclusive = 0, controls_ok = 0;
  for (const auto& r : reports) {
    if (r.decision == "pass") ++pass;
    if (r.decision == "fail") ++fail;
    if (r.decision == "inconclusive") ++inconclusive;
    if (r.expect_fail && r.decision == "fail") ++controls_ok;
  }
  std::fprintf(stderr,
               "suite %s: %d pass, %d fail (%d expected), %d inconclusive\n",
               cfg.suite.c_str(), pass, fail, controls_ok, inconclusive);
  return gdp::exit_code_for(reports);
}

std::map<std::string, std::vector<double>> parse_eval_args(
    const std::string& text) {
  std::map<std::string, std::vector<double>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("eval: arguments look like k=v;k2=v1,v2");
    }
    std::string key = item.substr(0, eq);
    std::vector<double> vals;
    std::stringstream vs(item.substr(eq + 1));
    std::string v;
    while (std::getline(vs, v, ',')) vals.push_back(std::stod(v));
    out[key] = vals;
  }
  return out;
}

int cmd_eval(const std::string& formula, const std::string& args_text) {
  auto args = parse_eval_args(args_text);
  auto scalar = [&](const std::string& k) {
    auto it = args.find(k);
    if (it == args.end() || it->second.size() != 1) {
      throw ConfigError("eval: missing scalar argument '" + k + "'");
    }
    return it->second[0];
  };
  auto list = [&](const std::string& k) {
    auto it = args.find(k);
    if (it == args.end()) {
      throw ConfigError("eval: missing list argument '" + k + "'");
    }
    return it->second;
  };
  double value = 0.0;
  if (formula == "e1") {
    value = gdp::exp_integral_E1(scalar("x"));
  } else if (formula == "c-factor") {
    value = gdp::c_factor(scalar("lambda"), scalar("t"));
  } else if (formula == "tavare") {
    value = gdp::tavare_pmf(scalar("theta"), scalar("t"),
                            static_cast<long long>(scalar("n")));
  } else if (formula == "death-pmf") {
    value = gdp::death_marginal_pmf(scalar("a"), scalar("lambda"), scalar("t"),
                                    static_cast<long long>(scalar("n")));
  } else if (formula == "phi") {
    value = gdp::phi(scalar("x"));
  } else if (formula == "tilt-constant") {
    value = gdp::tilt_constant(scalar("alpha"), scalar("theta"), scalar("c"));
  } else if (formula == "kingman-rate") {
    value = gdp::kingman_rate(scalar("theta"),
                              static_cast<long long>(scalar("n")));
  } else if (formula == "rate-i") {
    value = gdp::rate(gdp::RateFunction::I, gdp::RatePoint::seq(list("x")));
  } else if (formula == "rate-i1") {
    value = gdp::rate(gdp::RateFunction::I1, gdp::RatePoint::y(scalar("y")));
  } else if (formula == "rate-i2") {
    value = gdp::rate(gdp::RateFunction::I2, gdp::RatePoint::part(list("p")));
  } else if (formula == "rate-i3") {
    value = gdp::rate(gdp::RateFunction::I3, gdp::RatePoint::part(list("p")));
  } else if (formula == "rate-i4") {
    value = gdp::rate(gdp::RateFunction::I4, gdp::RatePoint::y(scalar("y")));
  } else if (formula == "rate-i5") {
    value = gdp::rate(gdp::RateFunction::I5, gdp::RatePoint::seq(list("x")));
  } else if (formula == "contraction") {
    value = gdp::contraction_check(list("x")).infimum;
  } else if (formula == "laplace-gamma-two-point") {
    auto space = gdp::BaseSpace::finite_discrete({scalar("p0"),
                                                  1.0 - scalar("p0")});
    auto g = gdp::TestFunction::from_values({scalar("g0"), scalar("g1")});
    value = gdp::laplace_gamma(scalar("theta"), scalar("beta"), space, g);
  } else {
    throw ConfigError("eval: unknown formula '" + formula + "'");
  }
  std::printf("%.17g\n", value);
  return kExitOk;
}

int cmd_sample(const Config& cfg, const std::string& what, long long count,
               int max_atoms) {
  gdp::RngStream master(cfg.seed, 0);
  auto space = make_space(cfg);
  auto get = [&](const std::string& k, double dflt) {
    auto it = cfg.params.find(k);
    return it == cfg.params.end() ? dflt : it->second;
  };
  std::ostringstream csv;
  auto emit_measure = [&](const gdp::AtomicMeasure& m) {
    csv << m.total_mass();
    int k = 0;
    for (const auto& a : m.atoms()) {
      if (++k > max_atoms) break;
      csv << "," << a.weight << ":" << a.location;
    }
    csv << "\n";
  };
  auto emit_values = [&](const std::vector<double>& v, std::size_t cap) {
    for (std::size_t i = 0; i < v.size() && i < cap; ++i) {
      csv << (i ? "," : "") << v[i];
    }
    csv << "\n";
  };

  for (long long i = 0; i < count; ++i) {
    gdp::RngStream rs = master.child(static_cast<std::uint64_t>(i));
    if (what == "gem") {
      auto s = gdp::sample_gem_sticks(get("theta", 1.0),
                                      static_cast<int>(get("n", 16)), rs);
      emit_values(s.sticks, static_cast<std::size_t>(max_atoms));
    } else if (what == "gem2") {
      auto s = gdp::sample_gem_two_param_sticks(
          get("alpha", 0.5), get("theta", 1.0), static_cast<int>(get("n", 16)),
          rs);
      emit_values(s.sticks, static_cast<std::size_t>(max_atoms));
    } else if (what == "pd") {
      std::optional<double> alpha;
      if (cfg.params.count("alpha")) alpha = cfg.params.at("alpha");
      auto p = gdp::sample_pd(get("theta", 1.0), alpha, cfg.trunc, rs);
      emit_values(p.weights(), static_cast<std::size_t>(max_atoms));
    } else if (what == "gamma-measure") {
      emit_measure(gdp::sample_gamma_measure(get("theta", 1.0), space,
                                             get("beta", 1.0), cfg.trunc, rs));
    } else if (what == "dirichlet-process") {
      emit_measure(
          gdp::sample_dirichlet_process(get("theta", 1.0), space, cfg.trunc,
                                        rs));
    } else if (what == "gamma-jumps") {
      auto jseq = gdp::sample_gamma_jumps_inverse_levy(
          get("theta", 1.0), static_cast<int>(get("n", 16)), rs);
      emit_values(jseq.jumps(), static_cast<std::size_t>(max_atoms));
    } else if (what == "stable-jumps") {
      auto jseq = gdp::sample_stable_jumps(get("alpha", 0.5), get("a", 1.0),
                                           static_cast<int>(get("n", 16)), rs);
      emit_values(jseq.jumps(), static_cast<std::size_t>(max_atoms));
    } else if (what == "dirichlet-vector") {
      auto v = gdp::sample_dirichlet_vector(
          {get("theta1", 1.0), get("theta2", 1.0)}, rs);
      emit_values(v, v.size());
    } else if (what == "kingman-count") {
      csv << gdp::simulate_kingman(get("theta", 1.0), get("t", 0.5), -1, rs)
          << "\n";
    } else if (what == "death-count") {
      csv << gdp::death_count_at(get("a", 1.0), get("lambda", 0.0),
                                 get("t0", 1e-3), get("t", 0.5), rs)
          << "\n";
    } else if (what == "time-change-count") {
      auto r = gdp::death_count_time_changed(get("a", 1.0), get("lambda", 0.0),
                                             get("theta", 1.0),
                                             get("t0", 1e-3), get("t", 0.5),
                                             rs);
      csv << r.count << "\n";
    } else {
      throw ConfigError("sample: unknown object '" + what + "'");
    }
  }
  if (cfg.out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(cfg.out, csv.str());
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gdplab: samplers, closed forms and verification suites for "
               "gamma/Dirichlet random measures and their diffusions"};
  app.require_subcommand(1);

  std::string config_path, suite, out, format, what = "gamma-measure";
  std::string formula, eval_args;
  std::optional<std::uint64_t> seed_flag;
  std::optional<long long> replicates_flag;
  long long count = 10;
  int max_atoms = 32;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON configuration file");
    cmd->add_option("--seed", seed_flag, "master seed (overrides config)");
    cmd->add_option("--replicates", replicates_flag,
                    "replicate count (overrides config)");
    cmd->add_option("--out", out, "output path (overrides config)");
    cmd->add_option("--format", format, "json or csv (overrides config)");
  };

  auto* verify = app.add_subcommand("verify", "run a named verification suite");
  add_common(verify);
  verify->add_option("--suite", suite, "suite name (see `list`)");

  auto* list = app.add_subcommand("list", "enumerate verification suites");

  auto* eval = app.add_subcommand("eval", "evaluate a named closed form");
  eval->add_option("--formula", formula, "formula name")->required();
  eval->add_option("--at", eval_args, "arguments, e.g. x=1.5 or x=0.3,0.2")
      ->required();

  auto* sample = app.add_subcommand("sample", "emit draws as CSV");
  add_common(sample);
  sample->add_option("--what", what,
                     "gem|gem2|pd|gamma-measure|dirichlet-process|gamma-jumps|"
                     "stable-jumps|dirichlet-vector|kingman-count|death-count|"
                     "time-change-count");
  sample->add_option("--n", count, "number of draws");
  sample->add_option("--max-atoms", max_atoms, "flattened atoms per row");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (seed_flag) cfg.seed = *seed_flag;
    if (replicates_flag) {
      if (*replicates_flag < 2) throw ConfigError("replicates: must be >= 2");
      cfg.replicates = *replicates_flag;
    }
    if (!out.empty()) cfg.out = out;
    if (!format.empty()) {
      if (format != "json" && format != "csv") {
        throw ConfigError("format: must be json or csv");
      }
      cfg.format = format;
    }
    if (!suite.empty()) cfg.suite = suite;

    if (list->parsed()) return cmd_list();
    if (verify->parsed()) return cmd_verify(cfg);
    if (eval->parsed()) return cmd_eval(formula, eval_args);
    if (sample->parsed()) return cmd_sample(cfg, what, count, max_atoms);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
