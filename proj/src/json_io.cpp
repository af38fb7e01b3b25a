#include "alphasr/json_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace alphasr {

Distribution distribution_from_json(const Json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "falpha") return Distribution::falpha(j.at("alpha").get<double>(), j.value("scale", 1.0));
  if (kind == "exponential") return Distribution::exponential(j.value("rate", 1.0));
  if (kind == "discrete")
    return Distribution::discrete(j.at("support").get<std::vector<double>>(), j.at("pmf").get<std::vector<double>>());
  throw std::invalid_argument("unknown distribution kind '" + kind + "'");
}

Json distribution_to_json(const Distribution& d) {
  switch (d.kind()) {
    case Distribution::Kind::FAlpha:
      return {{"kind", "falpha"}, {"alpha", d.alpha()}, {"scale", d.scale()}};
    case Distribution::Kind::Exponential:
      return {{"kind", "exponential"}, {"rate", d.rate()}};
    case Distribution::Kind::Discrete:
      return {{"kind", "discrete"}, {"support", d.support()}, {"pmf", d.pmf()}};
  }
  return {};
}

Environment environment_from_json(const Json& j, std::size_t bidders) {
  if (j.is_null()) return Environment::single_item(bidders);
  std::string type = j.value("type", "k_uniform");
  if (type == "k_uniform") return Environment::k_uniform(bidders, j.value("k", 1));
  if (type == "explicit") return Environment::explicit_sets(bidders, j.at("sets").get<std::vector<std::vector<int>>>());
  throw std::invalid_argument("unknown environment type '" + type + "'");
}

MultiItemInstance instance_from_json(const Json& j) {
  std::vector<std::vector<Distribution>> dists;
  for (const Json& row : j.at("dists")) {
    std::vector<Distribution> r;
    for (const Json& spec : row) r.push_back(distribution_from_json(spec));
    dists.push_back(std::move(r));
  }
  return MultiItemInstance::make(dists, j.at("budgets").get<std::vector<double>>(),
                                 j.at("limits").get<std::vector<int>>(), j.value("truncate", true));
}

SampleParams sample_params_from_json(const Json& j) {
  SampleParams p;
  p.m = j.value("m", std::size_t{0});
  p.gamma = j.value("gamma", p.gamma);
  p.xi = j.value("xi", p.xi);
  p.delta = j.value("delta", p.delta);
  return p;
}

Json empirical_to_json(const EmpiricalModel& em) {
  Json quantiles = Json::array();
  Json values = Json::array();
  for (const auto& pt : em.quantile_points) {
    quantiles.push_back(pt.q);
    values.push_back(pt.v);
  }
  Json hull = Json::array();
  for (const auto& pt : em.envelope) hull.push_back({pt.q, pt.r});
  ParamValidity validity = validate_params(em.params);
  return {{"quantiles", quantiles},
          {"values", values},
          {"hull_vertices", hull},
          {"reserve", em.reserve},
          {"reserve_quantile", em.reserve_quantile},
          {"xi_bar", em.xi_bar},
          {"point_mass_value", em.point_mass_value},
          {"kept_from", em.kept_from},
          {"m", em.params.m},
          {"gamma", em.params.gamma},
          {"xi", em.params.xi},
          {"delta", em.params.delta},
          {"lemma_grade", validity.lemma_grade},
          {"theorem_grade", validity.theorem_grade},
          {"required_m", validity.required_m}};
}

std::vector<double> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<double> out;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::string cell = line.substr(0, line.find(','));
    try {
      std::size_t used = 0;
      double v = std::stod(cell, &used);
      out.push_back(v);
    } catch (const std::invalid_argument&) {
      if (!first) throw std::runtime_error("non-numeric sample line in " + path + ": " + line);
    }
    first = false;
  }
  return out;
}

void write_samples_csv(const std::string& path, const std::vector<double>& values) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "value\n";
  char buf[32];
  for (double v : values) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << '\n';
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return Json::parse(in);
}

Json parse_json_argument(const std::string& text_or_path) {
  auto first = text_or_path.find_first_not_of(" \t\n");
  if (first != std::string::npos && (text_or_path[first] == '{' || text_or_path[first] == '['))
    return Json::parse(text_or_path);
  return read_json_file(text_or_path);
}

}  // namespace alphasr
