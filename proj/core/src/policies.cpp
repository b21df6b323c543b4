#include "speedscale/policies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "speedscale/errors.hpp"

namespace speedscale {

namespace {

struct KindName {
  PolicyKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {PolicyKind::SrptSpeedScaling, "srpt-speedscale"},
    {PolicyKind::RoundRobinUnit, "round-robin-unit"},
    {PolicyKind::GreedyLeastWorkload, "greedy-least-workload"},
    {PolicyKind::GreedyLeastDispatched, "greedy-least-dispatched"},
    {PolicyKind::JoinShortestQueue, "jsq"},
    {PolicyKind::NonmigratorySrpt, "nonmigratory-srpt"},
    {PolicyKind::RandomGatedStatic, "random-gated-static"},
};

std::vector<std::vector<const ActiveJob*>> jobs_per_server(const SystemState& state) {
  std::vector<std::vector<const ActiveJob*>> out(state.servers);
  for (const ActiveJob& j : state.active) {
    if (!j.dispatched) throw PolicyError("job " + std::to_string(j.id) + " was never dispatched");
    out[*j.dispatched].push_back(&j);
  }
  return out;
}

}  // namespace

std::string to_string(PolicyKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

PolicyKind parse_policy_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  throw std::invalid_argument("unknown policy kind '" + name + "'");
}

const std::vector<PolicyKind>& all_policy_kinds() {
  static const std::vector<PolicyKind> kinds = [] {
    std::vector<PolicyKind> v;
    for (const auto& kn : kKindNames) v.push_back(kn.kind);
    return v;
  }();
  return kinds;
}

PolicyConfig parse_policy_config(const std::string& text) {
  PolicyConfig config;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') {
    config.kind = parse_policy_kind(text.substr(first == std::string::npos ? 0 : first));
    return config;
  }
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
    config.kind = parse_policy_kind(doc.at("kind").get<std::string>());
    if (doc.contains("params")) {
      const auto& params = doc.at("params");
      if (params.contains("speed")) config.speed = params.at("speed").get<double>();
      if (params.contains("seed")) config.seed = params.at("seed").get<std::uint64_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("bad policy config: ") + e.what());
  }
  return config;
}

std::string dump_policy_config(const PolicyConfig& config) {
  nlohmann::json doc = {{"kind", to_string(config.kind)}, {"params", nlohmann::json::object()}};
  if (config.kind == PolicyKind::RandomGatedStatic) {
    doc["params"] = {{"speed", config.speed}, {"seed", config.seed}};
  }
  return doc.dump();
}

std::unique_ptr<Policy> make_policy(const PolicyConfig& config) {
  switch (config.kind) {
    case PolicyKind::SrptSpeedScaling:
      return std::make_unique<SrptSpeedScaling>();
    case PolicyKind::RoundRobinUnit:
      return std::make_unique<RoundRobinUnit>();
    case PolicyKind::GreedyLeastWorkload:
      return std::make_unique<GreedyLeastWorkload>();
    case PolicyKind::GreedyLeastDispatched:
      return std::make_unique<GreedyLeastDispatched>();
    case PolicyKind::JoinShortestQueue:
      return std::make_unique<JoinShortestQueue>();
    case PolicyKind::NonmigratorySrpt:
      return std::make_unique<NonmigratorySrpt>();
    case PolicyKind::RandomGatedStatic:
      return std::make_unique<RandomGatedStatic>(config.speed, config.seed);
  }
  throw std::invalid_argument("unhandled policy kind");
}

std::vector<const ActiveJob*> by_remaining(const SystemState& state) {
  std::vector<const ActiveJob*> order;
  order.reserve(state.active.size());
  for (const ActiveJob& j : state.active) order.push_back(&j);
  std::sort(order.begin(), order.end(), [](const ActiveJob* a, const ActiveJob* b) {
    return a->remaining != b->remaining ? a->remaining < b->remaining : a->id < b->id;
  });
  return order;
}

PolicyDecision SrptSpeedScaling::decide(const SystemState& state) {
  PolicyDecision decision;
  const std::size_t n = state.active.size();
  if (n == 0) return decision;
  const std::size_t m = state.servers;
  const double speed = n >= m ? state.power.inverse(static_cast<double>(n) / static_cast<double>(m))
                              : state.power.inverse(1.0);
  auto order = by_remaining(state);
  order.resize(std::min(m, n));

  // Keep a served job on its previous server; fill the rest lowest-index first.
  std::vector<bool> taken(m, false);
  std::vector<std::optional<ServerId>> server(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (order[i]->last_server && !taken[*order[i]->last_server]) {
      server[i] = order[i]->last_server;
      taken[*server[i]] = true;
    }
  }
  ServerId next_free = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (!server[i]) {
      while (taken[next_free]) ++next_free;
      server[i] = next_free;
      taken[next_free] = true;
    }
    decision.running.push_back({order[i]->id, *server[i], speed});
  }
  return decision;
}

void RoundRobinUnit::reset(const Instance& instance) {
  if (!instance.all_sizes_equal()) {
    throw PolicyError("round-robin-unit requires all job sizes to be equal");
  }
}

std::optional<ServerId> RoundRobinUnit::route(const SystemState& state, const Job& arrival) {
  return arrival.id % state.servers;
}

PolicyDecision RoundRobinUnit::decide(const SystemState& state) {
  PolicyDecision decision;
  const auto per_server = jobs_per_server(state);
  for (ServerId k = 0; k < state.servers; ++k) {
    const auto& jobs = per_server[k];
    if (jobs.empty()) continue;
    // `active` is ordered by id, which is arrival order.
    decision.running.push_back({jobs.front()->id, k, state.power.inverse(static_cast<double>(jobs.size()))});
  }
  return decision;
}

std::optional<ServerId> DispatchPolicy::route(const SystemState& state, const Job& arrival) {
  return choose_server(state, arrival);
}

PolicyDecision DispatchPolicy::decide(const SystemState& state) {
  PolicyDecision decision;
  const auto per_server = jobs_per_server(state);
  for (ServerId k = 0; k < state.servers; ++k) {
    const auto& jobs = per_server[k];
    if (jobs.empty()) continue;
    const ActiveJob* best = *std::min_element(jobs.begin(), jobs.end(), [](const ActiveJob* a, const ActiveJob* b) {
      return a->remaining != b->remaining ? a->remaining < b->remaining : a->id < b->id;
    });
    decision.running.push_back({best->id, k, state.power.inverse(static_cast<double>(jobs.size()))});
  }
  return decision;
}

ServerId GreedyLeastWorkload::choose_server(const SystemState& state, const Job&) {
  std::vector<double> load(state.servers, 0.0);
  for (const ActiveJob& j : state.active) {
    if (j.dispatched) load[*j.dispatched] += j.remaining;
  }
  return static_cast<ServerId>(std::min_element(load.begin(), load.end()) - load.begin());
}

void GreedyLeastDispatched::reset(const Instance& instance) { dispatched_.assign(instance.servers(), 0.0); }

ServerId GreedyLeastDispatched::choose_server(const SystemState& state, const Job& arrival) {
  if (dispatched_.size() != state.servers) dispatched_.assign(state.servers, 0.0);
  const auto k = static_cast<ServerId>(std::min_element(dispatched_.begin(), dispatched_.end()) - dispatched_.begin());
  dispatched_[k] += arrival.size;
  return k;
}

ServerId JoinShortestQueue::choose_server(const SystemState& state, const Job&) {
  std::vector<std::size_t> count(state.servers, 0);
  for (const ActiveJob& j : state.active) {
    if (j.dispatched) ++count[*j.dispatched];
  }
  return static_cast<ServerId>(std::min_element(count.begin(), count.end()) - count.begin());
}

ServerId NonmigratorySrpt::choose_server(const SystemState& state, const Job& arrival) {
  std::vector<double> least(state.servers, 0.0);
  std::vector<bool> busy(state.servers, false);
  for (const ActiveJob& j : state.active) {
    if (!j.dispatched) continue;
    const ServerId k = *j.dispatched;
    least[k] = busy[k] ? std::min(least[k], j.remaining) : j.remaining;
    busy[k] = true;
  }
  for (ServerId k = 0; k < state.servers; ++k) {
    if (least[k] > arrival.size) return k;
  }
  for (ServerId k = 0; k < state.servers; ++k) {
    if (!busy[k]) return k;
  }
  return 0;
}

RandomGatedStatic::RandomGatedStatic(double speed, std::uint64_t seed) : speed_(speed), seed_(seed), rng_(seed) {
  if (!(speed > 0.0) || !std::isfinite(speed)) {
    throw std::invalid_argument("random-gated-static needs a positive finite speed");
  }
}

void RandomGatedStatic::reset(const Instance&) { rng_.seed(seed_); }

std::optional<ServerId> RandomGatedStatic::route(const SystemState& state, const Job&) {
  std::uniform_int_distribution<ServerId> pick(0, state.servers - 1);
  return pick(rng_);
}

PolicyDecision RandomGatedStatic::decide(const SystemState& state) {
  PolicyDecision decision;
  const auto per_server = jobs_per_server(state);
  for (ServerId k = 0; k < state.servers; ++k) {
    const auto& jobs = per_server[k];
    const double share = speed_ / static_cast<double>(jobs.size());
    for (const ActiveJob* j : jobs) decision.running.push_back({j->id, k, share});
  }
  return decision;
}

}  // namespace speedscale
