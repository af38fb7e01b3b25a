#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "alphasr/harness.hpp"
#include "alphasr/json_io.hpp"

namespace alphasr {

class UnknownExperiment : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

std::vector<std::string> list_experiment_ids();

// Runs one registered experiment. Every config key is optional; missing keys
// take the desk-scale defaults. Throws UnknownExperiment for unknown ids.
Report run_experiment(const std::string& id, const Json& config);

std::vector<std::string> list_mechanism_names();

// Monte Carlo run of a single mechanism on the instance described by config.
Report run_mechanism(const std::string& mech, const Json& config, std::uint64_t trials, std::uint64_t seed);

}  // namespace alphasr
