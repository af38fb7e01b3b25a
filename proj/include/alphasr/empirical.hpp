#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "alphasr/distribution.hpp"

namespace alphasr {

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SampleParams {
  std::size_t m = 0;
  double gamma = 0.1;
  double xi = 0.01;
  double delta = 0.01;
};

struct ParamValidity {
  bool lemma_grade = false;
  bool theorem_grade = false;
  std::size_t required_m = 0;  // smallest m that is theorem-grade for (gamma, xi, delta)
  std::vector<std::string> problems;
};

ParamValidity validate_params(const SampleParams& p);

struct CurvePoint {
  double q;
  double r;
};

// Sample-based model of one bidder class. All fields are fixed at build time.
struct EmpiricalModel {
  SampleParams params;
  std::vector<double> sorted_samples;  // descending
  std::size_t kept_from = 1;           // 1-based index of the largest retained sample
  std::vector<QuantileValuePair> quantile_points;
  std::vector<CurvePoint> revenue_points;  // includes the anchors (0,0) and (1,0)
  std::vector<CurvePoint> envelope;        // least concave majorant, vertices only
  double xi_bar = 0.0;
  double point_mass_value = 0.0;
  double reserve = 0.0;
  double reserve_quantile = 0.0;
};

EmpiricalModel build_empirical(std::vector<double> samples, const SampleParams& p);

const std::vector<CurvePoint>& concave_envelope(const EmpiricalModel& em);

// Raw piecewise-linear empirical revenue curve R(q).
double raw_revenue(const EmpiricalModel& em, double q);
// Envelope value CR(q).
double envelope_revenue(const EmpiricalModel& em, double q);
// Envelope slope at q (right-hand slope; the last segment at q = 1).
double empirical_virtual(const EmpiricalModel& em, double q);
double empirical_reserve(const EmpiricalModel& em);

// v(q) = R(q)/q, clipped to the point mass below xi_bar.
double value_at_quantile(const EmpiricalModel& em, double q);
// Largest q in [xi_bar, 1] with v(q) >= v; xi_bar for values above the point
// mass and 1 for nonpositive values.
double quantile_of_value(const EmpiricalModel& em, double v);

// True iff every retained sample value v satisfies
// q(v) in [qbar(v)/(1+gamma)^2, qbar(v)(1+gamma)^2].
bool coverage_event_holds(const EmpiricalModel& em, const Distribution& d, double gamma);

}  // namespace alphasr
