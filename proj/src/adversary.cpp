#include "fedbai/adversary.hpp"

#include <algorithm>
#include <cstdlib>

#include "fedbai/errors.hpp"
#include "fedbai/rng.hpp"
#include "fedbai/transcript.hpp"

namespace fedbai {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

int worst_arm(const ProblemInstance& inst, int set) {
  const auto& arms = inst.arm_set(set);
  int w = 0;
  for (int a = 1; a < static_cast<int>(arms.size()); ++a)
    if (arms[a].mean < arms[w].mean) w = a;
  return w;
}

double parse_amount(const std::string& text, const std::string& spec) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || *end != '\0' || !(v >= 0.0 && v <= 1.0))
    throw Error(ErrorCode::InvalidConfig, "bad amount in adversary '" + spec + "'");
  return v;
}

}  // namespace

AdversaryStrategy AdversaryStrategy::parse(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  AdversaryStrategy s;
  if (head == "silent") {
    s.kind = AdversaryKind::Silent;
  } else if (head == "wrong-arm") {
    s.kind = AdversaryKind::WrongArmCollusion;
    if (!arg.empty()) {
      char* end = nullptr;
      const long v = std::strtol(arg.c_str(), &end, 10);
      if (*end != '\0' || v < 0)
        throw Error(ErrorCode::InvalidConfig, "bad target arm in adversary '" + spec + "'");
      s.target = static_cast<int>(v);
    }
  } else if (head == "inflate" || head == "deflate") {
    s.kind = head == "inflate" ? AdversaryKind::InflateMean : AdversaryKind::DeflateMean;
    if (!arg.empty()) s.amount = parse_amount(arg, spec);
  } else if (head == "random") {
    s.kind = AdversaryKind::RandomGarbage;
  } else {
    throw Error(ErrorCode::InvalidConfig, "unknown adversary strategy '" + spec + "'");
  }
  if (!arg.empty() && (s.kind == AdversaryKind::Silent || s.kind == AdversaryKind::RandomGarbage))
    throw Error(ErrorCode::InvalidConfig, "strategy '" + head + "' takes no argument");
  return s;
}

std::string AdversaryStrategy::name() const {
  switch (kind) {
    case AdversaryKind::Silent: return "silent";
    case AdversaryKind::WrongArmCollusion:
      return target < 0 ? "wrong-arm" : "wrong-arm:" + std::to_string(target);
    case AdversaryKind::InflateMean: return "inflate:" + format_real(amount);
    case AdversaryKind::DeflateMean: return "deflate:" + format_real(amount);
    case AdversaryKind::RandomGarbage: return "random";
  }
  return "?";
}

bool AdversaryStrategy::needs_shadow() const {
  return kind == AdversaryKind::InflateMean || kind == AdversaryKind::DeflateMean;
}

std::optional<Forgery> act(const AdversaryStrategy& s, const AdversaryContext& ctx,
                           std::uint64_t seed) {
  if (!ctx.inst) throw Error(ErrorCode::InvalidConfig, "adversary context without instance");
  const ProblemInstance& inst = *ctx.inst;
  Forgery f;
  switch (s.kind) {
    case AdversaryKind::Silent:
      return std::nullopt;

    case AdversaryKind::WrongArmCollusion: {
      const int n = inst.set_size(ctx.set);
      f.arm = s.target >= 0 && s.target < n ? s.target : worst_arm(inst, ctx.set);
      f.mean = 1.0;
      f.epochs = 1;
      f.arrival = 0;
      return f;
    }

    case AdversaryKind::InflateMean:
    case AdversaryKind::DeflateMean: {
      const double sign = s.kind == AdversaryKind::InflateMean ? 1.0 : -1.0;
      if (ctx.phase == AttackPhase::PeerReport) {
        // Full knowledge: perturb the true best arm's mean.
        f.arm = inst.local_best(ctx.set);
        f.mean = clamp01(inst.mean({ctx.set, f.arm}) + sign * s.amount);
        f.epochs = 1;
        f.arrival = 0;
        return f;
      }
      if (!ctx.shadow) return std::nullopt;
      f.arm = ctx.shadow->arm;
      f.epochs = ctx.shadow->epochs;
      f.arrival = ctx.shadow_arrival;
      const double honest =
          ctx.phase == AttackPhase::Estimate ? ctx.shadow_estimate : ctx.shadow->mean_estimate;
      f.mean = clamp01(honest + sign * s.amount);
      return f;
    }

    case AdversaryKind::RandomGarbage: {
      Xoshiro256 g(mix_seed({seed, static_cast<std::uint64_t>(ctx.phase),
                             static_cast<std::uint64_t>(ctx.round),
                             static_cast<std::uint64_t>(ctx.client),
                             static_cast<std::uint64_t>(ctx.set),
                             static_cast<std::uint64_t>(ctx.receiver + 2)}));
      f.arm = static_cast<int>(g.below(static_cast<std::uint64_t>(inst.set_size(ctx.set))));
      f.mean = g.uniform();
      f.epochs = 1 + static_cast<std::int64_t>(g.below(std::uint64_t{1} << 20));
      f.arrival = 0;
      return f;
    }
  }
  return std::nullopt;
}

}  // namespace fedbai
