#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "speedscale/policy.hpp"

namespace speedscale {

enum class PolicyKind {
  SrptSpeedScaling,
  RoundRobinUnit,
  GreedyLeastWorkload,
  GreedyLeastDispatched,
  JoinShortestQueue,
  NonmigratorySrpt,
  RandomGatedStatic,
};

std::string to_string(PolicyKind kind);
/// Accepts the CLI names ("srpt-speedscale", "jsq", ...). Throws std::invalid_argument.
PolicyKind parse_policy_kind(const std::string& name);
const std::vector<PolicyKind>& all_policy_kinds();

struct PolicyConfig {
  PolicyKind kind = PolicyKind::SrptSpeedScaling;
  double speed = 0.0;       // random-gated-static: fixed busy speed
  std::uint64_t seed = 0;   // random-gated-static: routing seed
};

/// Parses either a bare kind name or {"kind": string, "params": {"speed": x, "seed": n}}.
PolicyConfig parse_policy_config(const std::string& text);
std::string dump_policy_config(const PolicyConfig& config);
/// Throws std::invalid_argument when parameters are invalid for the kind.
std::unique_ptr<Policy> make_policy(const PolicyConfig& config);

/// Serves the min(m, n) jobs of least remaining work (ties by lowest id), each
/// at P^{-1}(n/m) when n >= m and at P^{-1}(1) otherwise, so total power equals
/// n. Migratory; a job keeps its previous server when that server is still in use.
class SrptSpeedScaling : public Policy {
 public:
  std::string name() const override { return "srpt-speedscale"; }
  bool migratory() const override { return true; }
  PolicyDecision decide(const SystemState& state) override;
};

/// Unit-size jobs only: job j goes to server j mod m, and each server runs
/// its oldest job at P^{-1}(n_k).
class RoundRobinUnit : public Policy {
 public:
  std::string name() const override { return "round-robin-unit"; }
  void reset(const Instance& instance) override;
  std::optional<ServerId> route(const SystemState& state, const Job& arrival) override;
  PolicyDecision decide(const SystemState& state) override;
};

/// Immediate dispatch with no migration. Each server runs SRPT over its own
/// jobs at speed P^{-1}(n_k). Subclasses choose the server.
class DispatchPolicy : public Policy {
 public:
  std::optional<ServerId> route(const SystemState& state, const Job& arrival) override;
  PolicyDecision decide(const SystemState& state) override;

 protected:
  virtual ServerId choose_server(const SystemState& state, const Job& arrival) = 0;
};

/// Routes to the server with the least unfinished assigned work.
class GreedyLeastWorkload : public DispatchPolicy {
 public:
  std::string name() const override { return "greedy-least-workload"; }

 protected:
  ServerId choose_server(const SystemState& state, const Job& arrival) override;
};

/// Routes to the server with the least cumulative dispatched work, counting
/// completed jobs.
class GreedyLeastDispatched : public DispatchPolicy {
 public:
  std::string name() const override { return "greedy-least-dispatched"; }
  void reset(const Instance& instance) override;

 protected:
  ServerId choose_server(const SystemState& state, const Job& arrival) override;

 private:
  std::vector<double> dispatched_;
};

/// Routes to the server with the fewest unfinished jobs.
class JoinShortestQueue : public DispatchPolicy {
 public:
  std::string name() const override { return "jsq"; }

 protected:
  ServerId choose_server(const SystemState& state, const Job& arrival) override;
};

/// Let y_k be the least remaining work at server k (0 if idle). An arrival of
/// size x goes to the lowest k with y_k > x, else the lowest idle server, else
/// server 0.
class NonmigratorySrpt : public DispatchPolicy {
 public:
  std::string name() const override { return "nonmigratory-srpt"; }

 protected:
  ServerId choose_server(const SystemState& state, const Job& arrival) override;
};

/// Uniform random routing; a busy server runs at the fixed speed s shared
/// equally among its jobs (processor sharing), an idle one at speed 0.
class RandomGatedStatic : public Policy {
 public:
  RandomGatedStatic(double speed, std::uint64_t seed);

  std::string name() const override { return "random-gated-static"; }
  bool shares_servers() const override { return true; }
  void reset(const Instance& instance) override;
  std::optional<ServerId> route(const SystemState& state, const Job& arrival) override;
  PolicyDecision decide(const SystemState& state) override;

  double speed() const { return speed_; }

 private:
  double speed_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Jobs of `state` ordered by (remaining, id).
std::vector<const ActiveJob*> by_remaining(const SystemState& state);

}  // namespace speedscale
