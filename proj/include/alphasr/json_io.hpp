#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "alphasr/distribution.hpp"
#include "alphasr/empirical.hpp"
#include "alphasr/environment.hpp"
#include "alphasr/lp.hpp"

namespace alphasr {

using Json = nlohmann::json;

// {"kind":"falpha","alpha":0.5,"scale":1.0}, {"kind":"exponential","rate":1.0}
// or {"kind":"discrete","support":[1,2],"pmf":[0.5,0.5]}.
Distribution distribution_from_json(const Json& j);
Json distribution_to_json(const Distribution& d);

// {"type":"k_uniform","k":2} or {"type":"explicit","sets":[[0],[1],[0,1]]};
// a missing object means a single item.
Environment environment_from_json(const Json& j, std::size_t bidders);

// {"dists":[[spec, ...], ...], "budgets":[...], "limits":[...], "truncate":true}
MultiItemInstance instance_from_json(const Json& j);

SampleParams sample_params_from_json(const Json& j);

// {quantiles, values, hull_vertices, reserve, xi_bar} plus bookkeeping fields.
Json empirical_to_json(const EmpiricalModel& em);

// Single-column CSV; a non-numeric first line is treated as a header.
std::vector<double> read_samples_csv(const std::string& path);
void write_samples_csv(const std::string& path, const std::vector<double>& values);

Json read_json_file(const std::string& path);
// Accepts inline JSON text or a path to a JSON file.
Json parse_json_argument(const std::string& text_or_path);

}  // namespace alphasr
