#include "fedbai/theory.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fedbai/errors.hpp"
#include "fedbai/local_elim.hpp"

namespace fedbai {

namespace {

constexpr double kIndexTolerance = 1e-9;
constexpr double kInvE = 1.0 / std::numbers::e;

bool at_most_one(double sigma) { return sigma <= 1.0 + kIndexTolerance; }

}  // namespace

double lambert_w_minus1(double x) {
  if (!(x < 0.0) || x < -kInvE * (1.0 + 1e-15))
    throw Error(ErrorCode::OutOfDomain, "W_{-1} is defined on [-1/e, 0)");
  if (x <= -kInvE) return -1.0;

  // Initial guess: branch-point series near -1/e, log asymptotics elsewhere.
  double w;
  if (x < -0.25) {
    const double p = -std::sqrt(2.0 * (1.0 + std::numbers::e * x));
    w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
  } else {
    const double l1 = std::log(-x);
    w = l1 - std::log(-l1);
  }

  // g(w) = w e^w - x is decreasing on (-inf, -1]; keep a bracket [lo, hi]
  // with g(lo) > 0 >= g(hi).
  auto g = [x](double v) { return v * std::exp(v) - x; };
  double hi = -1.0;
  double lo = -2.0;
  while (g(lo) <= 0.0) lo *= 2.0;
  w = std::clamp(w, lo, hi);

  for (int it = 0; it < 200; ++it) {
    const double gw = g(w);
    if (gw == 0.0) return w;
    if (gw > 0.0) lo = w; else hi = w;
    const double dg = std::exp(w) * (1.0 + w);
    double next = dg != 0.0 ? w - gw / dg : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - w) <= 1e-16 * std::fabs(w) || hi - lo <= 1e-16 * std::fabs(lo)) {
      w = next;
      break;
    }
    w = next;
  }
  return w;
}

std::pair<double, double> w_minus1_bounds(double x) {
  const double lo_x = -1.0 / (std::numbers::e * std::numbers::e);
  if (!(x < 0.0) || x < lo_x * (1.0 + 1e-15))
    throw Error(ErrorCode::OutOfDomain, "bounds hold on [-1/e^2, 0)");
  const double l = std::log(-x);
  const double ll = std::log(-l);
  return {l - 4.0 * ll, l - 0.25 * ll};
}

double crossing_time(double theta, double cbar) {
  if (!(cbar > std::numbers::e) || !(theta > 0.0))
    throw Error(ErrorCode::PreconditionViolated, "crossing time needs theta > 0 and cbar > e");
  const double z = -theta * theta / (2.0 * cbar);
  return -2.0 / (theta * theta) * lambert_w_minus1(z);
}

double crossing_time_gap_bound(double gap, double sigma, double cbar) {
  if (!(gap > 0.0 && gap < 1.0) || !(sigma > 1.0) || !(sigma * gap <= 1.0) ||
      !(cbar > std::numbers::e))
    throw Error(ErrorCode::PreconditionViolated,
                "need gap in (0,1), sigma > 1, sigma*gap <= 1 and cbar > e");
  const double d2 = gap * gap;
  const double s2 = sigma * sigma;
  const double a = 128.0 * cbar / d2;
  const double b = 128.0 * cbar / (s2 * d2);
  const double first = 128.0 / d2 * std::log(a) - 128.0 / (s2 * d2) * std::log(b);
  const double second =
      512.0 / d2 * std::log(std::log(a)) - 32.0 / (s2 * d2) * std::log(std::log(b));
  return first + second;
}

namespace {

// Rounds bound for one ordered pair: `gap` is the cross gap, `own_gap` the
// local gap of the set whose radius drives elimination.
double pair_rounds(double sigma, double own_gap, double gap, double cbar, int H) {
  if (at_most_one(sigma)) return 1.0;
  const double d2 = gap * gap;
  const double s2 = sigma * sigma;
  const double own2 = own_gap * own_gap;
  const double a = 128.0 * cbar / d2;
  const double b = 128.0 * cbar / (s2 * d2);
  const double dominant = 128.0 / own2 * (s2 - 1.0) * std::log(a) + 256.0 / own2 * std::log(sigma);
  const double remainder =
      512.0 / d2 * std::log(std::log(a)) - 32.0 / (s2 * d2) * std::log(std::log(b)) + 2.0;
  return (dominant + remainder) / H + 1.0;
}

// Smallest integer t >= 1 with alpha(t) <= target (alpha is decreasing).
std::int64_t first_time_below(const ElimParams& p, double target) {
  if (alpha(p, 1.0) <= target) return 1;
  std::int64_t lo = 1, hi = 2;
  while (alpha(p, static_cast<double>(hi)) > target) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    if (alpha(p, static_cast<double>(mid)) <= target) hi = mid; else lo = mid;
  }
  return hi;
}

}  // namespace

TheoryReport round_bounds(const ProblemInstance& inst, double c) {
  TheoryReport rep;
  rep.best_set = inst.best_set();
  rep.comm_period = inst.comm_period();
  rep.c = c;
  const int b = rep.best_set;
  const int H = inst.comm_period();
  const double top = inst.mean(inst.best_arm());

  rep.sets.resize(static_cast<std::size_t>(inst.num_sets()));
  rep.min_cross_gap = 1.0;
  for (int j = 0; j < inst.num_sets(); ++j) {
    SetBounds& s = rep.sets[j];
    s.set = j;
    s.cbar = std::sqrt(4.0 * inst.num_clients() * inst.set_size(j) / inst.delta());
    s.local_gap = inst.local_gap(j);
    s.cross_gap = top - inst.mean({j, inst.local_best(j)});

    ElimParams p;
    p.c = c;
    p.num_clients = inst.num_clients();
    p.set_size = inst.set_size(j);
    p.delta = inst.delta();
    const double best_mean = inst.mean({j, inst.local_best(j)});
    std::int64_t sum = 0, mx = 0;
    for (int a = 0; a < inst.set_size(j); ++a) {
      if (a == inst.local_best(j)) {
        s.arm_pull_bounds.push_back(0);
        continue;
      }
      const std::int64_t t = first_time_below(p, (best_mean - inst.mean({j, a})) / (c + 2.0));
      s.arm_pull_bounds.push_back(t);
      sum += t;
      mx = std::max(mx, t);
    }
    // The best arm is pulled until the last competitor is gone.
    s.arm_pull_bounds[inst.local_best(j)] = mx;
    s.phase1_pull_bound = sum + mx;
    if (j != b) rep.min_cross_gap = std::min(rep.min_cross_gap, s.cross_gap);
  }

  rep.rounds_bound = 1.0;
  rep.single_round_regime = true;
  const SetBounds& best = rep.sets[b];
  for (int j = 0; j < inst.num_sets(); ++j) {
    if (j == b) continue;
    SetBounds& s = rep.sets[j];
    s.sigma_to_best = heterogeneity_index(inst, j, b);
    s.sigma_from_best = heterogeneity_index(inst, b, j);
    s.rounds_to_best = pair_rounds(s.sigma_to_best, s.local_gap, s.cross_gap, s.cbar, H);
    s.rounds_from_best = pair_rounds(s.sigma_from_best, best.local_gap, s.cross_gap, best.cbar, H);
    s.rounds = std::max(s.rounds_to_best, s.rounds_from_best);
    rep.rounds_bound = std::max(rep.rounds_bound, s.rounds);
    rep.single_round_regime = rep.single_round_regime && at_most_one(s.sigma_to_best) &&
                              at_most_one(s.sigma_from_best);
  }
  rep.sets[b].rounds = rep.rounds_bound;
  rep.bits_bound = inst.num_sets() > 1
                       ? static_cast<int>(std::ceil(std::log2(8.0 / rep.min_cross_gap))) + 1
                       : 0;
  return rep;
}

bool single_round_regime(const ProblemInstance& inst) {
  const int b = inst.best_set();
  for (int j = 0; j < inst.num_sets(); ++j) {
    if (j == b) continue;
    if (!at_most_one(heterogeneity_index(inst, j, b)) ||
        !at_most_one(heterogeneity_index(inst, b, j)))
      return false;
  }
  return true;
}

}  // namespace fedbai
