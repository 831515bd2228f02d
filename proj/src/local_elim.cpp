#include "fedbai/local_elim.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fedbai/errors.hpp"

namespace fedbai {

ElimParams elim_params_for(const ProblemInstance& inst, int client, double c,
                           std::int64_t epoch_cap) {
  ElimParams p;
  p.c = c;
  p.num_clients = inst.num_clients();
  p.set_size = inst.set_size(inst.set_of(client));
  p.delta = inst.delta();
  p.epoch_cap = epoch_cap;
  return p;
}

double alpha(const ElimParams& p, double t) {
  return std::sqrt(std::log(4.0 * p.num_clients * p.set_size * t * t / p.delta) / t);
}

LocalElimState::LocalElimState(int set_size)
    : active(set_size), pulls(set_size, 0), means(set_size, 0.0) {
  std::iota(active.begin(), active.end(), 0);
}

void LocalElimState::record(int arm, double x, MeanTrace* trace) {
  const std::int64_t n = ++pulls[arm];
  means[arm] += (x - means[arm]) / static_cast<double>(n);
  if (trace) (*trace)[arm].push_back(means[arm]);
}

int leader(const LocalElimState& s) {
  int best = s.active.front();
  for (int a : s.active)
    if (s.means[a] > s.means[best] || (s.means[a] == s.means[best] && a < best)) best = a;
  return best;
}

void eliminate(LocalElimState& s, const ElimParams& p) {
  const double beta = p.c * alpha(p, static_cast<double>(s.epoch));
  const double top = s.means[leader(s)];
  std::erase_if(s.active, [&](int a) { return !(top - s.means[a] < beta); });
}

void check_can_run_epoch(const LocalElimState& s) {
  if (s.active.size() < 2)
    throw Error(ErrorCode::PreconditionViolated, "an epoch needs at least two active arms");
}

void run_epoch(LocalElimState& s, const ElimParams& p, RewardStream& stream, int client,
               MeanTrace* trace) {
  const int set = stream.instance().set_of(client);
  run_epoch(s, p, [&](int arm) { return stream.sample(client, {set, arm}); }, trace);
}

namespace {

// Epoch loop with the substreams resolved once up front.
void run_epochs_fast(LocalElimState& s, const ElimParams& p, RewardStream& stream, int client,
                     MeanTrace* trace) {
  const int set = stream.instance().set_of(client);
  std::vector<RewardStream::Substream*> subs;
  for (int a = 0; a < static_cast<int>(s.pulls.size()); ++a)
    subs.push_back(&stream.substream(client, {set, a}));
  while (!s.done()) {
    if (s.epoch >= p.epoch_cap)
      throw Error(ErrorCode::EpochCapExceeded,
                  "local elimination did not finish within " + std::to_string(p.epoch_cap) +
                      " epochs",
                  client);
    run_epoch(s, p, [&](int arm) { return subs[arm]->draw(); }, trace);
  }
}

}  // namespace

LocalReport report_of(const LocalElimState& s) {
  const int a = leader(s);
  return {a, s.means[a], s.epoch};
}

LocalReport run_to_termination(LocalElimState& s, const ElimParams& p, RewardStream& stream,
                               int client, MeanTrace* trace) {
  run_epochs_fast(s, p, stream, client, trace);
  return report_of(s);
}

LocalReport run_to_termination(const ElimParams& p, RewardStream& stream, int client,
                               MeanTrace* trace) {
  LocalElimState s(p.set_size);
  if (trace) trace->assign(p.set_size, {});
  return run_to_termination(s, p, stream, client, trace);
}

}  // namespace fedbai
