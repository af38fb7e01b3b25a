#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <random>

#include "alphasr/empirical.hpp"
#include "alphasr/harness.hpp"
#include "alphasr/json_io.hpp"
#include "alphasr/lemmas.hpp"

using namespace alphasr;
using doctest::Approx;

namespace {

SampleParams params(double xi, double gamma = 0.1, double delta = 0.01) {
  SampleParams p;
  p.xi = xi;
  p.gamma = gamma;
  p.delta = delta;
  return p;
}

EmpiricalModel five_three_one() { return build_empirical({1, 5, 3}, params(0.4)); }

}  // namespace

TEST_CASE("validate_params") {
  SampleParams p = params(0.1, 0.2, 0.1);
  ParamValidity v = validate_params(p);
  double direct = 6.0 * 1.2 / (0.04 * 0.1) * std::max(std::log(3.0) / 0.2, std::log(30.0));
  CHECK(v.required_m == static_cast<std::size_t>(std::ceil(direct)));
  CHECK(v.required_m == 9888);
  p.m = 9888;
  CHECK(validate_params(p).theorem_grade);
  p.m = 9887;
  CHECK_FALSE(validate_params(p).theorem_grade);

  SampleParams wide = params(0.1, 0.3, 0.1);
  wide.m = 1000000;
  CHECK_FALSE(validate_params(wide).lemma_grade);
  CHECK_FALSE(validate_params(wide).theorem_grade);

  SampleParams few = params(0.1, 0.2, 0.1);
  few.m = 100;
  ParamValidity fv = validate_params(few);
  CHECK_FALSE(fv.lemma_grade);
  CHECK_FALSE(fv.problems.empty());
}

TEST_CASE("build_empirical on three samples") {
  EmpiricalModel em = five_three_one();
  REQUIRE(em.quantile_points.size() == 3);
  CHECK(em.quantile_points[0].q == Approx(1.0 / 6));
  CHECK(em.quantile_points[0].v == 5.0);
  CHECK(em.quantile_points[1].q == Approx(0.5));
  CHECK(em.quantile_points[1].v == 3.0);
  CHECK(em.quantile_points[2].q == Approx(5.0 / 6));
  CHECK(em.quantile_points[2].v == 1.0);
  CHECK(raw_revenue(em, 0.5) == Approx(1.5));
  CHECK(raw_revenue(em, 0.0) == 0.0);
  CHECK(raw_revenue(em, 1.0) == 0.0);
  CHECK(em.sorted_samples == std::vector<double>{5, 3, 1});

  EmpiricalModel single = build_empirical({7}, params(0.5));
  CHECK(raw_revenue(single, 0.5) == Approx(3.5));
  CHECK_THROWS_AS(build_empirical({}, params(0.1)), InsufficientSamples);
}

TEST_CASE("discarding the largest samples") {
  std::vector<double> s;
  for (int k = 1; k <= 100; ++k) s.push_back(k);
  EmpiricalModel em = build_empirical(s, params(0.05));
  // floor(xi m) = 5, so samples 100..97 are dropped and 96 is the top retained value.
  CHECK(em.kept_from == 5);
  CHECK(em.quantile_points.front().v == 96.0);
  CHECK(em.xi_bar >= 0.05 - 1.0 / 100);
  CHECK(em.xi_bar == Approx(9.0 / 200));
}

TEST_CASE("concave envelope") {
  EmpiricalModel em = five_three_one();
  const auto& h = concave_envelope(em);
  REQUIRE(h.size() == 5);
  std::vector<std::pair<double, double>> expect = {{0, 0}, {1.0 / 6, 5.0 / 6}, {0.5, 1.5}, {5.0 / 6, 5.0 / 6}, {1, 0}};
  for (std::size_t k = 0; k < h.size(); ++k) {
    CHECK(h[k].q == Approx(expect[k].first));
    CHECK(h[k].r == Approx(expect[k].second));
  }
  CHECK(empirical_virtual(em, 0.1) == Approx(5.0));
  CHECK(empirical_virtual(em, 0.3) == Approx(2.0));
  CHECK(empirical_virtual(em, 0.6) == Approx(-2.0));
  CHECK(empirical_virtual(em, 0.9) == Approx(-5.0));

  EmpiricalModel one = build_empirical({4}, params(0.5));
  REQUIRE(one.envelope.size() == 3);
  CHECK(one.envelope[1].q == 0.5);
  CHECK(one.envelope[1].r == 2.0);

  EmpiricalModel flat = build_empirical({2, 2, 2, 2}, params(0.2));
  CHECK(flat.envelope.size() == 3);
}

TEST_CASE("envelope invariants on sampled data") {
  std::mt19937_64 rng(3);
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> s(500);
  for (double& x : s) x = ex(rng);
  EmpiricalModel em = build_empirical(s, params(0.02));
  for (std::size_t k = 0; k < em.envelope.size(); ++k) {
    bool input = false;
    for (const CurvePoint& p : em.revenue_points) input |= (p.q == em.envelope[k].q && p.r == em.envelope[k].r);
    CHECK(input);
  }
  double prev_slope = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < em.envelope.size(); ++k) {
    double slope = (em.envelope[k + 1].r - em.envelope[k].r) / (em.envelope[k + 1].q - em.envelope[k].q);
    CHECK(slope <= prev_slope);
    prev_slope = slope;
  }
  double prev_phi = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= 1000; ++k) {
    double q = k / 1000.0;
    CHECK(envelope_revenue(em, q) >= raw_revenue(em, q) - 1e-12);
    double phi = empirical_virtual(em, q);
    CHECK(phi <= prev_phi);
    prev_phi = phi;
  }
}

TEST_CASE("empirical reserve") {
  CHECK(empirical_reserve(five_three_one()) == Approx(3.0));
  CHECK(empirical_reserve(build_empirical({6}, params(0.5))) == Approx(6.0));
  // R(1/4) = 3/4 = R(3/4): the smaller quantile (value 3) wins the tie.
  CHECK(empirical_reserve(build_empirical({3, 1}, params(0.4))) == Approx(3.0));
}

TEST_CASE("value and quantile maps") {
  EmpiricalModel em = five_three_one();
  CHECK(value_at_quantile(em, 0.5) == Approx(3.0));
  for (const QuantileValuePair& p : em.quantile_points) {
    CHECK(value_at_quantile(em, p.q) == Approx(p.v));
    CHECK(quantile_of_value(em, p.v) == Approx(p.q));
  }
  CHECK(quantile_of_value(em, 100.0) == Approx(em.xi_bar));
  CHECK(quantile_of_value(em, 0.0) == 1.0);
  CHECK(value_at_quantile(em, em.xi_bar / 2) == Approx(em.point_mass_value));
}

TEST_CASE("coverage event") {
  Distribution d = Distribution::falpha(0.5);
  const int m = 200;
  std::vector<double> exact;
  for (int j = 1; j <= m; ++j) exact.push_back(d.value_of_quantile((2.0 * j - 1.0) / (2.0 * m)));
  EmpiricalModel em = build_empirical(exact, params(0.02));
  CHECK(coverage_event_holds(em, d, 0.1));

  std::vector<double> moved = exact;
  moved[0] = d.value_of_quantile((1.0 / (2.0 * m)) / std::pow(1.1, 3));
  CHECK_FALSE(coverage_event_holds(build_empirical(moved, params(0.001)), d, 0.1));
}

TEST_CASE("conditional lemmas on one theorem-grade build") {
  Distribution d = Distribution::falpha(0.5);
  SampleParams p = params(0.01, 0.1, 0.01);
  p.m = validate_params(p).required_m;
  std::mt19937_64 rng = make_stream(99, 0);
  EmpiricalModel em = build_empirical(sample(d, rng, p.m), p);
  REQUIRE(coverage_event_holds(em, d, p.gamma));
  CHECK(lemma_empreserve(em, d).margin >= -1e-9);
  for (const LemmaMargin& m : lemma_empquant(em, d, 300)) CHECK(m.margin >= -1e-9);
  CHECK(lemma_reservequant(em, d, 0.5).margin >= -1e-9);
}

TEST_CASE("build is a pure function of samples and params") {
  std::vector<double> s = {0.3, 2.2, 1.1, 0.7, 5.0, 2.2};
  EmpiricalModel a = build_empirical(s, params(0.2));
  EmpiricalModel b = build_empirical(s, params(0.2));
  CHECK(empirical_to_json(a).dump() == empirical_to_json(b).dump());
  CHECK(a.reserve == b.reserve);
}

TEST_CASE("sample CSV round trip and JSON export") {
  std::filesystem::path path = std::filesystem::temp_directory_path() / "alphasr_test_samples.csv";
  std::vector<double> s = {0.1, 1.0 / 3.0, 12345.678901234567};
  write_samples_csv(path.string(), s);
  CHECK(read_samples_csv(path.string()) == s);
  std::filesystem::remove(path);

  Json j = empirical_to_json(five_three_one());
  for (const char* key : {"quantiles", "values", "hull_vertices", "reserve", "xi_bar"}) CHECK(j.contains(key));
  CHECK(j["reserve"].get<double>() == Approx(3.0));
  CHECK(j["hull_vertices"].size() == 5);
}
