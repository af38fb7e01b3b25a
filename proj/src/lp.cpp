#include "alphasr/lp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace alphasr {
namespace {

struct Atom {
  double value;
  double mass;
  double phi;
};

LpProblem assemble(LpTag tag, const MultiItemInstance& inst, const std::vector<std::vector<Atom>>& atoms) {
  LpProblem out;
  out.tag = tag;
  out.bidders = inst.bidders;
  out.items = inst.items;
  out.pair_offset.push_back(0);
  for (std::size_t i = 0; i < inst.bidders; ++i) {
    for (std::size_t j = 0; j < inst.items; ++j) {
      const auto& list = atoms[i * inst.items + j];
      if (list.empty()) throw std::invalid_argument("LP build: empty support");
      for (const Atom& a : list) out.vars.push_back({i, j, a.value, a.mass, a.phi});
      out.pair_offset.push_back(out.vars.size());
    }
  }
  const std::size_t n = out.vars.size();
  const std::size_t rows = 2 * inst.bidders + inst.items;
  out.lp.c.resize(n);
  out.lp.A.assign(rows, std::vector<double>(n, 0.0));
  out.lp.b.resize(rows);
  for (std::size_t k = 0; k < n; ++k) {
    const LpVariable& v = out.vars[k];
    out.lp.c[k] = v.mass * v.virtual_value;
    out.lp.A[out.count_row(v.bidder)][k] = v.mass;
    out.lp.A[out.budget_row(v.bidder)][k] = v.mass * v.virtual_value;
    out.lp.A[out.supply_row(v.item)][k] = v.mass;
  }
  for (std::size_t i = 0; i < inst.bidders; ++i) {
    out.lp.b[out.count_row(i)] = inst.limits[i];
    out.lp.b[out.budget_row(i)] = inst.budgets[i];
    out.row_names.push_back("count[" + std::to_string(i) + "]");
  }
  for (std::size_t i = 0; i < inst.bidders; ++i) out.row_names.push_back("budget[" + std::to_string(i) + "]");
  for (std::size_t j = 0; j < inst.items; ++j) {
    out.lp.b[out.supply_row(j)] = 1.0;
    out.row_names.push_back("supply[" + std::to_string(j) + "]");
  }
  return out;
}

void fill_threshold(const LpProblem& lp, std::size_t pair, double x, PairAggregate& agg) {
  std::size_t lo = lp.pair_offset[pair];
  std::size_t hi = lp.pair_offset[pair + 1];
  agg.threshold_x.assign(hi - lo, 0.0);
  double remaining = x;
  agg.threshold_index = 0;
  agg.threshold_weight = 0.0;
  for (std::size_t k = lo; k < hi; ++k) {
    double mass = lp.vars[k].mass;
    double take = mass > 0.0 ? std::min(1.0, std::max(0.0, remaining / mass)) : 0.0;
    agg.threshold_x[k - lo] = take;
    remaining -= take * mass;
    if (take > 0.0) {
      agg.threshold_index = k - lo;
      agg.threshold_weight = take;
    }
  }
}

std::vector<PriceVertex> hull_without_origin(std::vector<CurvePoint> pts) {
  std::sort(pts.begin(), pts.end(), [](const CurvePoint& a, const CurvePoint& b) { return a.q < b.q; });
  std::vector<CurvePoint> hull{{0.0, 0.0}};
  for (const CurvePoint& p : pts) {
    while (hull.size() >= 2) {
      const CurvePoint& o = hull[hull.size() - 2];
      const CurvePoint& a = hull.back();
      double cr = (a.q - o.q) * (p.r - o.r) - (a.r - o.r) * (p.q - o.q);
      if (cr >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  std::vector<PriceVertex> out;
  for (std::size_t k = 1; k < hull.size(); ++k) out.push_back({hull[k].q, hull[k].r / hull[k].q});
  return out;
}

}  // namespace

MultiItemInstance MultiItemInstance::make(const std::vector<std::vector<Distribution>>& dists,
                                          std::vector<double> budgets, std::vector<int> limits, bool truncate) {
  MultiItemInstance inst;
  inst.bidders = dists.size();
  if (inst.bidders == 0) throw std::invalid_argument("MultiItemInstance: no bidders");
  inst.items = dists.front().size();
  if (budgets.size() != inst.bidders || limits.size() != inst.bidders)
    throw std::invalid_argument("MultiItemInstance: budgets/limits size mismatch");
  for (std::size_t i = 0; i < inst.bidders; ++i) {
    if (dists[i].size() != inst.items) throw std::invalid_argument("MultiItemInstance: ragged distribution table");
    if (!(budgets[i] > 0.0)) throw std::invalid_argument("MultiItemInstance: budgets must be positive");
    if (limits[i] < 0) throw std::invalid_argument("MultiItemInstance: limits must be nonnegative");
    for (const Distribution& d : dists[i]) {
      if (d.is_continuous()) throw std::invalid_argument("MultiItemInstance: distributions must be discrete");
      inst.dists.push_back(truncate ? truncate_at(d, budgets[i]) : d);
    }
  }
  inst.budgets = std::move(budgets);
  inst.limits = std::move(limits);
  return inst;
}

LpProblem build_lp2(const MultiItemInstance& inst) {
  std::vector<std::vector<Atom>> atoms;
  for (const Distribution& d : inst.dists) {
    std::vector<Atom> list;
    for (std::size_t k = d.support().size(); k-- > 0;)
      list.push_back({d.support()[k], d.pmf()[k], d.virtual_valuation(d.support()[k])});
    atoms.push_back(std::move(list));
  }
  return assemble(LpTag::LP2, inst, atoms);
}

LpProblem build_lp3(const MultiItemInstance& inst, const std::vector<EmpiricalModel>& models,
                    const SampleParams& /*p*/) {
  if (models.size() != inst.bidders * inst.items)
    throw std::invalid_argument("build_lp3: one empirical model per pair required");
  std::vector<std::vector<Atom>> atoms;
  for (const EmpiricalModel& em : models) {
    const auto& h = em.envelope;
    std::vector<Atom> list;
    for (std::size_t k = 1; k < h.size(); ++k) {
      double mass = h[k].q - h[k - 1].q;
      if (mass <= 0.0) continue;
      double slope = (h[k].r - h[k - 1].r) / mass;
      list.push_back({h[k].r / h[k].q, mass, slope});
    }
    atoms.push_back(std::move(list));
  }
  return assemble(LpTag::LP3, inst, atoms);
}

LpSolution solve(const LpProblem& lp, double tol) { return solve_box_lp(lp.lp, tol); }

std::string to_string(const LpProblem& lp) {
  std::ostringstream os;
  os.precision(10);
  os << (lp.tag == LpTag::LP2 ? "LP2" : "LP3") << " maximize\n";
  for (std::size_t k = 0; k < lp.vars.size(); ++k) {
    const LpVariable& v = lp.vars[k];
    os << "  x" << k << " [i=" << v.bidder << " j=" << v.item << " r=" << v.value << "] c=" << lp.lp.c[k]
       << " bounds [0,1]\n";
  }
  for (std::size_t r = 0; r < lp.lp.A.size(); ++r) {
    os << lp.row_names[r] << ":";
    for (std::size_t k = 0; k < lp.vars.size(); ++k)
      if (lp.lp.A[r][k] != 0.0) os << " " << lp.lp.A[r][k] << "*x" << k;
    os << " <= " << lp.lp.b[r] << "\n";
  }
  return os.str();
}

double pair_revenue_curve(const LpProblem& lp, std::size_t pair, double x) {
  double remaining = x;
  double total = 0.0;
  for (std::size_t k = lp.pair_offset[pair]; k < lp.pair_offset[pair + 1] && remaining > 0.0; ++k) {
    const LpVariable& v = lp.vars[k];
    double take = std::min(v.mass, remaining);
    total += take * v.virtual_value;
    remaining -= take;
  }
  return total;
}

QuantileSolution aggregate(const LpSolution& sol, const LpProblem& lp) {
  QuantileSolution out;
  const std::size_t pairs = lp.pair_offset.size() - 1;
  for (std::size_t p = 0; p < pairs; ++p) {
    PairAggregate agg;
    for (std::size_t k = lp.pair_offset[p]; k < lp.pair_offset[p + 1]; ++k) {
      agg.raw_x_star += lp.vars[k].mass * sol.x[k];
      agg.contribution += lp.vars[k].mass * lp.vars[k].virtual_value * sol.x[k];
    }
    double c = agg.contribution;
    if (std::abs(pair_revenue_curve(lp, p, agg.raw_x_star) - c) <= 1e-9 * std::max(1.0, std::abs(c))) {
      agg.x_star = agg.raw_x_star;
    } else if (c <= 0.0) {
      agg.x_star = 0.0;
    } else {
      // Smallest aggregate on the increasing part of the curve reaching c.
      double acc = 0.0;
      double q = 0.0;
      for (std::size_t k = lp.pair_offset[p]; k < lp.pair_offset[p + 1]; ++k) {
        const LpVariable& v = lp.vars[k];
        if (v.virtual_value <= 0.0) break;
        double gain = v.mass * v.virtual_value;
        if (acc + gain >= c) {
          q += (c - acc) / v.virtual_value;
          acc = c;
          break;
        }
        acc += gain;
        q += v.mass;
      }
      agg.x_star = q;
    }
    fill_threshold(lp, p, agg.x_star, agg);
    out.objective += pair_revenue_curve(lp, p, agg.x_star);
    out.pairs.push_back(std::move(agg));
  }
  return out;
}

std::vector<PriceVertex> price_vertices(const Distribution& d) {
  if (d.is_continuous()) throw std::invalid_argument("price_vertices: discrete distribution required");
  std::vector<CurvePoint> pts;
  for (double s : d.support()) {
    double q = d.quantile_of_value(s);
    pts.push_back({q, q * s});
  }
  return hull_without_origin(std::move(pts));
}

std::vector<PriceVertex> price_vertices(const EmpiricalModel& em) {
  std::vector<PriceVertex> out;
  for (std::size_t k = 1; k < em.envelope.size(); ++k)
    out.push_back({em.envelope[k].q, em.envelope[k].r / em.envelope[k].q});
  return out;
}

PriceLottery decompose_value(double v) {
  double r = std::floor(v);
  return {r, r + 1.0, 1.0 - (v - r)};
}

PriceLottery decompose_quantile(const std::vector<PriceVertex>& vertices, double q) {
  if (vertices.empty()) throw std::invalid_argument("decompose_quantile: empty curve");
  const PriceVertex& first = vertices.front();
  if (q <= first.q) return {first.price, first.price + 1.0, std::max(0.0, q / first.q)};
  for (std::size_t k = 0; k + 1 < vertices.size(); ++k) {
    const PriceVertex& a = vertices[k];
    const PriceVertex& b = vertices[k + 1];
    if (q <= b.q) {
      double w = (q - a.q) / (b.q - a.q);
      if (w > 1.0 - 1e-12) return {b.price, b.price + 1.0, 1.0};
      return {b.price, a.price, w};
    }
  }
  const PriceVertex& last = vertices.back();
  return {last.price, last.price + 1.0, 1.0};
}

PriceLottery decompose_quantile(const Distribution& d, double q) { return decompose_quantile(price_vertices(d), q); }

PriceLottery decompose_quantile(const EmpiricalModel& em, double q) {
  return decompose_quantile(price_vertices(em), q);
}

double lottery_sale_probability(const Distribution& d, const PriceLottery& lot) {
  return lot.w * d.quantile_of_value(lot.low) + (1.0 - lot.w) * d.quantile_of_value(lot.high);
}

namespace {

void fill_witness(const MultiItemInstance& inst, double scale, PricingPlan& plan) {
  LpProblem lp2 = build_lp2(inst);
  plan.y_bar.assign(lp2.vars.size(), 0.0);
  plan.y_star.assign(inst.bidders * inst.items, 0.0);
  for (std::size_t p = 0; p + 1 < lp2.pair_offset.size(); ++p) {
    const PriceLottery& lot = plan.lotteries[p];
    for (std::size_t k = lp2.pair_offset[p]; k < lp2.pair_offset[p + 1]; ++k) {
      double r = lp2.vars[k].value;
      double level = r >= lot.high - 1e-12 ? 1.0 : (r >= lot.low - 1e-12 ? lot.w : 0.0);
      plan.y_bar[k] = scale * level;
    }
    plan.y_star[p] = scale * lottery_sale_probability(inst.dists[p], lot);
  }
}

}  // namespace

PricingPlan make_pricing_plan(const LpSolution& lp3_solution, const LpProblem& lp3, const MultiItemInstance& inst,
                              const std::vector<EmpiricalModel>& models, const SampleParams& p) {
  if (models.size() != inst.bidders * inst.items)
    throw std::invalid_argument("make_pricing_plan: one empirical model per pair required");
  PricingPlan plan;
  plan.bidders = inst.bidders;
  plan.items = inst.items;
  plan.gamma = p.gamma;
  for (const EmpiricalModel& em : models) plan.xi_bar = std::max(plan.xi_bar, em.xi_bar);
  double g2 = (1.0 + p.gamma) * (1.0 + p.gamma);
  double width = static_cast<double>(std::max(inst.bidders, inst.items));
  plan.c = width * g2 * g2;
  plan.c_prime = width * g2;
  plan.p_offer = (1.0 - plan.c * plan.xi_bar) / (4.0 * g2);
  QuantileSolution qs = aggregate(lp3_solution, lp3);
  for (std::size_t k = 0; k < models.size(); ++k) {
    double x = qs.pairs[k].x_star;
    double z = std::min(1.0, std::max(x, plan.xi_bar * g2));
    plan.x_star.push_back(x);
    plan.z_star.push_back(z);
    plan.lotteries.push_back(decompose_quantile(models[k], z));
  }
  fill_witness(inst, (1.0 - plan.c * plan.xi_bar) / g2, plan);
  return plan;
}

PricingPlan make_full_info_plan(const LpSolution& lp2_solution, const LpProblem& lp2, const MultiItemInstance& inst) {
  PricingPlan plan;
  plan.bidders = inst.bidders;
  plan.items = inst.items;
  plan.p_offer = 0.25;
  QuantileSolution qs = aggregate(lp2_solution, lp2);
  for (std::size_t k = 0; k < inst.dists.size(); ++k) {
    double x = qs.pairs[k].x_star;
    plan.x_star.push_back(x);
    plan.z_star.push_back(x);
    plan.lotteries.push_back(decompose_quantile(inst.dists[k], x));
  }
  fill_witness(inst, 1.0, plan);
  return plan;
}

SlackReport check_lp2_feasible(const std::vector<double>& point, const LpProblem& lp2, double tol) {
  if (point.size() != lp2.vars.size()) throw std::invalid_argument("check_lp2_feasible: point size mismatch");
  SlackReport rep;
  auto slack = [&](std::size_t row) {
    double lhs = 0.0;
    for (std::size_t k = 0; k < point.size(); ++k) lhs += lp2.lp.A[row][k] * point[k];
    return lp2.lp.b[row] - lhs;
  };
  for (std::size_t i = 0; i < lp2.bidders; ++i) {
    rep.count_slack.push_back(slack(lp2.count_row(i)));
    rep.budget_slack.push_back(slack(lp2.budget_row(i)));
  }
  for (std::size_t j = 0; j < lp2.items; ++j) rep.supply_slack.push_back(slack(lp2.supply_row(j)));
  rep.box_slack = point.empty() ? 0.0 : 1.0;
  for (double x : point) rep.box_slack = std::min({rep.box_slack, x, 1.0 - x});
  rep.min_slack = rep.box_slack;
  for (double s : rep.count_slack) rep.min_slack = std::min(rep.min_slack, s);
  for (double s : rep.budget_slack) rep.min_slack = std::min(rep.min_slack, s);
  for (double s : rep.supply_slack) rep.min_slack = std::min(rep.min_slack, s);
  rep.feasible = rep.min_slack >= -tol;
  return rep;
}

}  // namespace alphasr
