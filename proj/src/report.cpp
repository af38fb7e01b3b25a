#include <cmath>
#include <cstdio>
#include <sstream>

#include "alphasr/harness.hpp"

namespace alphasr {
namespace {

std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

}  // namespace

bool Report::passed() const {
  for (const MetricRow& r : rows)
    if (!r.verdict) return false;
  return true;
}

void Report::add_exact(const std::string& metric, double value, double target, bool verdict) {
  MetricRow row;
  row.metric = metric;
  row.value = value;
  row.ci_lo = row.ci_hi = value;
  row.target = target;
  row.has_target = true;
  row.verdict = verdict;
  rows.push_back(row);
}

void Report::add_stats(const std::string& metric, const MetricStats& s, double target, bool has_target,
                       bool verdict) {
  MetricRow row;
  row.metric = metric;
  row.value = s.mean;
  row.std_error = s.std_error;
  row.ci_lo = s.ci_lo;
  row.ci_hi = s.ci_hi;
  row.target = target;
  row.has_target = has_target;
  row.verdict = verdict;
  rows.push_back(row);
}

std::string csv_header() { return "experiment_id,metric,value,stderr,ci_lo,ci_hi,target,verdict,seed,trials\n"; }

std::string to_csv(const Report& r, bool header) {
  std::ostringstream os;
  if (header) os << csv_header();
  for (const MetricRow& row : r.rows) {
    os << r.experiment_id << ',' << row.metric << ',' << num(row.value) << ',' << num(row.std_error) << ','
       << num(row.ci_lo) << ',' << num(row.ci_hi) << ',' << (row.has_target ? num(row.target) : std::string())
       << ',' << (row.verdict ? "pass" : "fail") << ',' << r.seed << ',' << r.trials << '\n';
  }
  return os.str();
}

}  // namespace alphasr
