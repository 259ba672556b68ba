// Command-line driver for the experiments.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nashlab/experiments.hpp"
#include "nashlab/report.hpp"

using namespace nashlab;

namespace {

struct Command {
  ExperimentSpec spec;
  std::string q = "8";
  std::string env_csv;
  std::string config;
  double t1 = 10.0;
  double t2 = 20.0;
};

void add_spec_options(CLI::App* sub, Command& c) {
  ExperimentSpec& s = c.spec;
  sub->add_option("--config", c.config, "flat key=value file; keys are the long flag names, flags override it");
  sub->add_option("--dim", s.dim, "lattice dimension")->capture_default_str();
  sub->add_option("--radius", s.radius, "box radius L")->capture_default_str();
  sub->add_option("--rho", s.rho, "exclusion density")->capture_default_str();
  sub->add_option("--law", s.law, "static law: power, constant or trap")->capture_default_str();
  sub->add_option("--eta", s.eta, "power-law exponent eta")->capture_default_str();
  sub->add_option("--level", s.level, "conductance for the constant and trap laws")->capture_default_str();
  sub->add_option("--horizon", s.horizon, "time horizon T")->capture_default_str();
  sub->add_option("--dt", s.dt, "sample step")->capture_default_str();
  sub->add_option("--p", s.p, "moment exponent p")->capture_default_str();
  sub->add_option("--q", c.q, "integrability exponent q (or inf)")->capture_default_str();
  sub->add_option("--theta", s.theta, "interpolation parameter theta")->capture_default_str();
  sub->add_option("--kernel-m", s.kernel_m, "kernel exponent m of k_t = (1+t)^-m")->capture_default_str();
  sub->add_option("--reals", s.reals, "realizations (seeds)")->capture_default_str();
  sub->add_option("--seed", s.seed, "master seed")->capture_default_str();
  sub->add_option("--tmin", s.tmin, "start of the window for sup t^{d/2} E_t")->capture_default_str();
  sub->add_option("--lookahead", s.lookahead, "extra simulated time beyond the horizon")->capture_default_str();
  sub->add_option("--tol", s.tolerance, "uniformization tail tolerance")->capture_default_str();
  sub->add_option("--pointwise", s.pointwise, "compute reversed traces and the pointwise bound")->capture_default_str();
  sub->add_option("--tail-times", s.tail_times, "times for the vanishing-rate tail")->capture_default_str();
  sub->add_option("--corpus", s.corpus, "test functions per inequality sweep")->capture_default_str();
  sub->add_option("--lambdas", s.lambdas, "levels for the weak (1,1) experiment")->capture_default_str();
  sub->add_option("--out", s.out, "output directory");
  sub->add_flag("--svg", s.svg, "also write SVG line charts");
}

void finish_spec(Command& c) {
  c.spec.q = (c.q == "inf" || c.q == "infinity") ? kInf : std::stod(c.q);
}

void emit(const ExperimentSpec& spec, const nlohmann::json& summary) {
  if (spec.out.empty())
    std::cout << summary.dump(2) << '\n';
  else
    std::cout << "wrote " << spec.out << '\n';
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\"'");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\"'");
  return s.substr(a, b - a + 1);
}

// Expands `--config FILE` into flag tokens placed before the command-line
// flags. Keys also given on the command line are dropped, so flags win even
// for list-valued options.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string file;
  std::vector<std::string> given;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config" && i + 1 < args.size()) file = args[i + 1];
    if (a.rfind("--config=", 0) == 0) file = a.substr(9);
    if (a.rfind("--", 0) == 0) given.push_back(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  if (file.empty() || args.empty()) return args;
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config file " + file);
  std::vector<std::string> extra;
  std::string line;
  while (std::getline(in, line)) {
    line = line.substr(0, line.find('#'));
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (!trim(line).empty()) throw std::runtime_error("config line without '=': " + line);
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "config" || std::find(given.begin(), given.end(), key) != given.end()) continue;
    std::string value = line.substr(eq + 1);
    for (char& ch : value)
      if (ch == ',') ch = ' ';
    std::istringstream vs(value);
    std::vector<std::string> parts;
    for (std::string v; vs >> v;) parts.push_back(trim(v));
    if (key == "svg") {
      if (!parts.empty() && (parts[0] == "true" || parts[0] == "1")) extra.push_back("--svg");
      continue;
    }
    extra.push_back("--" + key);
    extra.insert(extra.end(), parts.begin(), parts.end());
  }
  // args[0] is the subcommand; config tokens go right after it.
  args.insert(args.begin() + 1, extra.begin(), extra.end());
  return args;
}

nlohmann::json read_summary(const ExperimentSpec& spec) {
  std::ifstream in(std::filesystem::path(spec.out) / "summary.json");
  return nlohmann::json::parse(in);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchored Nash inequality and heat-kernel experiments on lattices"};
  app.require_subcommand(1);

  Command exps, ineq, stat, dyn, excl, tail, maxi;
  auto* c_exp = app.add_subcommand("exponents", "exponent algebra and kernel constants");
  add_spec_options(c_exp, exps);

  ineq.spec.name = "ineq-suite";
  auto* c_ineq = app.add_subcommand("ineq-suite", "empirical constants of the functional inequalities");
  add_spec_options(c_ineq, ineq);

  stat.spec.name = "static-run";
  stat.spec.radius = 48;
  stat.spec.reals = 20;
  auto* c_stat = app.add_subcommand("static-run", "heat kernel in i.i.d. static environments");
  add_spec_options(c_stat, stat);

  dyn.spec.name = "dynamic-run";
  dyn.spec.radius = 4;
  dyn.spec.horizon = 30;
  dyn.spec.dt = 0.1;
  auto* c_dyn = app.add_subcommand("dynamic-run", "heat kernel in an explicit dynamic environment");
  add_spec_options(c_dyn, dyn);
  c_dyn->add_option("--env-csv", dyn.env_csv, "environment CSV (time,edge_id,new_value); default: the trap scenario");
  c_dyn->add_option("--t1", dyn.t1, "trap scenario: time the pair is broken up")->capture_default_str();
  c_dyn->add_option("--t2", dyn.t2, "trap scenario: time the pair is restored")->capture_default_str();

  excl.spec.name = "exclusion";
  excl.spec.tmin = 25;
  auto* c_excl = app.add_subcommand("exclusion", "walk in the exclusion-process environment");
  add_spec_options(c_excl, excl);

  tail.spec.name = "tail";
  tail.spec.rho = 0.8;
  tail.spec.radius = 8;
  tail.spec.reals = 2000;
  auto* c_tail = app.add_subcommand("tail", "probability that an edge stays mostly closed");
  add_spec_options(c_tail, tail);

  maxi.spec.name = "maximal";
  maxi.spec.radius = 8;
  maxi.spec.reals = 10000;
  auto* c_max = app.add_subcommand("maximal", "weak (1,1) and L^p maximal estimates");
  add_spec_options(c_max, maxi);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }

  try {
    if (*c_exp) {
      finish_spec(exps);
      const ExperimentSpec& s = exps.spec;
      const NashExponents e = nash_exponents(s.dim, s.p, s.q, s.theta);
      nlohmann::json j = {{"d", e.d},           {"p", e.p},         {"q", json_number(e.q)},
                          {"theta", e.theta},   {"theta_c", e.theta_c}, {"alpha", e.alpha},
                          {"beta", e.beta},     {"gamma", e.gamma}};
      const PowerKernel k(s.kernel_m);
      j["K_norm1"] = k.K_norm1();
      j["K_norm01"] = k.K_norm01();
      j["CK"] = e.beta > 0.0 ? json_number(kernel_constants(k, e).CK) : nlohmann::json("undefined (beta = 0)");
      std::cout << j.dump(2) << '\n';
    } else if (*c_ineq) {
      finish_spec(ineq);
      const auto r = run_inequality_suite(ineq.spec);
      nlohmann::json arr = nlohmann::json::array();
      for (const auto& x : r) arr.push_back(to_json(x));
      if (!ineq.spec.out.empty()) write_outputs(ineq.spec.out, ineq.spec, r);
      emit(ineq.spec, arr);
    } else if (*c_stat) {
      finish_spec(stat);
      const auto r = run_static_moment(stat.spec);
      if (!r.warning.empty()) std::cerr << "warning: " << r.warning << '\n';
      if (!stat.spec.out.empty()) write_outputs(stat.spec.out, stat.spec, r);
      emit(stat.spec, to_json(r.summary));
    } else if (*c_dyn) {
      finish_spec(dyn);
      const auto g = make_geometry(dyn.spec.dim, dyn.spec.radius);
      DynamicEnvironment env = [&] {
        if (dyn.env_csv.empty()) return trap_scenario(g, dyn.t1, dyn.t2, dyn.spec.horizon);
        std::ifstream in(dyn.env_csv);
        if (!in) throw std::runtime_error("cannot open " + dyn.env_csv);
        return read_environment_csv(in, g, dyn.spec.horizon);
      }();
      const auto r = run_dynamic(dyn.spec, env);
      if (!dyn.spec.out.empty()) {
        write_outputs(dyn.spec.out, dyn.spec, r);
        std::ostringstream os;
        write_environment_csv(os, env);
        write_text(std::filesystem::path(dyn.spec.out) / "environment.csv", os.str());
      }
      nlohmann::json j = {{"t", json_array(r.trace.t)},
                          {"p00", json_array(r.trace.p00)},
                          {"energy", json_array(r.trace.energy)},
                          {"energy_derivative_max_relative_error", json_number(r.derivative.max_relative_error)}};
      emit(dyn.spec, j);
    } else if (*c_excl) {
      finish_spec(excl);
      const auto r = run_exclusion(excl.spec);
      if (!excl.spec.out.empty()) {
        write_outputs(excl.spec.out, excl.spec, r);
        emit(excl.spec, read_summary(excl.spec));
      } else {
        emit(excl.spec, {{"summary", to_json(r.summary)},
                         {"c_emp_max", json_number(r.c_emp_max)},
                         {"ks_p_value", json_number(r.ks.p_value)}});
      }
    } else if (*c_tail) {
      finish_spec(tail);
      const auto r = run_tail_estimate(tail.spec);
      if (!tail.spec.out.empty()) write_outputs(tail.spec.out, tail.spec, r);
      emit(tail.spec, {{"t", json_array(r.t)},
                       {"probability", json_array(r.probability)},
                       {"stderr", json_array(r.stderr_)},
                       {"u", json_array(r.u)},
                       {"weight_probability", json_array(r.weight_probability)}});
    } else if (*c_max) {
      finish_spec(maxi);
      const auto r = run_maximal(maxi.spec);
      if (!maxi.spec.out.empty()) write_outputs(maxi.spec.out, maxi.spec, r);
      std::ostringstream os;
      write_maximal_csv(os, r.rows);
      if (maxi.spec.out.empty())
        std::cout << os.str() << "jensen failures: " << r.jensen_failures << " / " << r.jensen_fields << '\n';
      else
        std::cout << "wrote " << maxi.spec.out << '\n';
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 1;
  }
  return 0;
}
