#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "alphasr/distribution.hpp"
#include "alphasr/empirical.hpp"
#include "alphasr/experiments.hpp"
#include "alphasr/harness.hpp"
#include "alphasr/json_io.hpp"

using namespace alphasr;

namespace {

double evaluate(const Distribution& d, const std::string& what, double v) {
  if (what == "cdf") return d.cdf(v);
  if (what == "pdf") return d.density(v);
  if (what == "phi") return d.virtual_valuation(v);
  if (what == "hazard") return d.hazard_rate(v);
  if (what == "H") return d.cumulative_hazard(v);
  if (what == "reserve") return d.reserve_price();
  if (what == "cr") return d.revenue_curve(v).cr;
  if (what == "welfare") return d.posted_price_welfare(v);
  if (what == "q") return d.quantile_of_value(v);
  if (what == "v") return d.value_of_quantile(v);
  throw std::invalid_argument("unknown quantity '" + what + "'");
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int report_exit(const Report& rep, const std::string& out) {
  emit(to_csv(rep), out);
  for (const auto& note : rep.notes) std::cerr << "note: " << note << '\n';
  std::cerr << rep.experiment_id << ": " << (rep.passed() ? "all verdicts pass" : "some verdicts fail") << " ("
            << rep.runtime_seconds << " s)\n";
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"alphasr: strongly regular distributions, empirical reserves and auction experiments"};
  app.require_subcommand(1);

  auto* dist = app.add_subcommand("dist", "Distribution queries");
  auto* eval = dist->add_subcommand("eval", "Evaluate a derived quantity");
  dist->require_subcommand(1);
  std::string spec;
  double v = 0.0;
  std::string what = "cdf";
  eval->add_option("--spec", spec, "distribution JSON (inline or file)")->required();
  eval->add_option("--v", v, "value (or quantile for cr and v)");
  eval->add_option("--what", what, "cdf|pdf|phi|hazard|H|reserve|cr|welfare|q|v")
      ->check(CLI::IsMember({"cdf", "pdf", "phi", "hazard", "H", "reserve", "cr", "welfare", "q", "v"}));

  auto* samp = app.add_subcommand("sample", "Draw samples to CSV");
  std::size_t m = 0;
  std::uint64_t seed = 1;
  std::string out;
  samp->add_option("--spec", spec, "distribution JSON (inline or file)")->required();
  samp->add_option("--m", m, "sample count")->required();
  samp->add_option("--seed", seed, "master seed");
  samp->add_option("--out", out, "output CSV path");

  auto* emp = app.add_subcommand("empirical", "Empirical models");
  auto* build = emp->add_subcommand("build", "Build an empirical model from samples");
  emp->require_subcommand(1);
  std::string in;
  SampleParams params;
  std::string report_path;
  build->add_option("--in", in, "sample CSV")->required();
  build->add_option("--m", params.m, "number of samples to use (default: all)");
  build->add_option("--gamma", params.gamma);
  build->add_option("--xi", params.xi);
  build->add_option("--delta", params.delta);
  build->add_option("--report", report_path, "output JSON path");

  auto* mech = app.add_subcommand("mech", "Mechanism runs");
  auto* run = mech->add_subcommand("run", "Monte Carlo run of one mechanism");
  mech->require_subcommand(1);
  std::string mech_name;
  std::string config;
  std::uint64_t trials = 100000;
  run->add_option("--mech", mech_name)->required()->check(CLI::IsMember(list_mechanism_names()));
  run->add_option("--config", config, "instance JSON (inline or file)")->required();
  run->add_option("--trials", trials);
  run->add_option("--seed", seed);
  run->add_option("--out", out, "output CSV path");

  auto* exp = app.add_subcommand("experiment", "Run a registered experiment");
  std::string id;
  bool list = false;
  exp->add_option("id", id, "experiment id");
  exp->add_option("--config", config, "config JSON (inline or file)");
  exp->add_option("--out", out, "output CSV path");
  exp->add_flag("--list", list, "list experiment ids");

  CLI11_PARSE(app, argc, argv);

  try {
    if (eval->parsed()) {
      Distribution d = distribution_from_json(parse_json_argument(spec));
      std::printf("%.12g\n", evaluate(d, what, v));
      return 0;
    }
    if (samp->parsed()) {
      Distribution d = distribution_from_json(parse_json_argument(spec));
      auto rng = make_stream(seed, 0);
      std::vector<double> xs = sample(d, rng, m);
      if (out.empty()) {
        for (double x : xs) std::printf("%.17g\n", x);
      } else {
        write_samples_csv(out, xs);
      }
      return 0;
    }
    if (build->parsed()) {
      std::vector<double> xs = read_samples_csv(in);
      if (params.m > 0 && params.m < xs.size()) xs.resize(params.m);
      EmpiricalModel em = build_empirical(xs, params);
      ParamValidity validity = validate_params(em.params);
      for (const auto& p : validity.problems) std::cerr << "warning: " << p << '\n';
      emit(empirical_to_json(em).dump(2) + "\n", report_path);
      return 0;
    }
    if (run->parsed()) return report_exit(run_mechanism(mech_name, parse_json_argument(config), trials, seed), out);
    if (exp->parsed()) {
      if (list || id.empty()) {
        for (const auto& x : list_experiment_ids()) std::cout << x << '\n';
        return list ? 0 : 2;
      }
      Json cfg = config.empty() ? Json::object() : parse_json_argument(config);
      return report_exit(run_experiment(id, cfg), out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
