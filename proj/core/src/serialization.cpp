#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "speedscale/errors.hpp"
#include "speedscale/simulator.hpp"
#include "speedscale/workload.hpp"

namespace speedscale {

using nlohmann::json;

namespace {

std::size_t line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Best-effort location of a field for diagnostics: the line of the first
// occurrence of its quoted key, or 0 if absent.
std::size_t line_of_field(const std::string& text, const std::string& field) {
  const auto pos = text.find("\"" + field + "\"");
  return pos == std::string::npos ? 0 : line_of_offset(text, pos);
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), line_of_offset(text, e.byte), "");
  }
}

const json& require(const json& obj, const std::string& field, const std::string& text) {
  if (!obj.is_object() || !obj.contains(field)) {
    throw ParseError("missing field '" + field + "'", line_of_field(text, field), field);
  }
  return obj.at(field);
}

double require_number(const json& obj, const std::string& field, const std::string& text) {
  const json& v = require(obj, field, text);
  if (!v.is_number()) throw ParseError("field '" + field + "' must be a number", line_of_field(text, field), field);
  return v.get<double>();
}

PowerFunction parse_power(const json& doc, const std::string& text) {
  const json& p = require(doc, "power", text);
  const double alpha = require_number(p, "alpha", text);
  const double coefficient = p.contains("coefficient") ? require_number(p, "coefficient", text) : 1.0;
  try {
    return PowerFunction(alpha, coefficient);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what(), line_of_field(text, "alpha"), "power");
  }
}

SizeDistribution parse_size_dist(const json& d, const std::string& text) {
  const json& kind_v = require(d, "kind", text);
  if (!kind_v.is_string()) throw ParseError("size_dist.kind must be a string", line_of_field(text, "kind"), "kind");
  const auto kind = kind_v.get<std::string>();
  if (kind == "deterministic") return DeterministicSize{require_number(d, "value", text)};
  if (kind == "exponential") return ExponentialSize{require_number(d, "mean", text)};
  if (kind == "bounded-pareto") {
    return BoundedParetoSize{require_number(d, "shape", text), require_number(d, "low", text),
                             require_number(d, "high", text)};
  }
  throw ParseError("unknown size distribution '" + kind + "'", line_of_field(text, "kind"), "kind");
}

json size_dist_to_json(const SizeDistribution& dist) {
  return std::visit(
      [](const auto& d) -> json {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, DeterministicSize>) {
          return {{"kind", "deterministic"}, {"value", d.value}};
        } else if constexpr (std::is_same_v<T, ExponentialSize>) {
          return {{"kind", "exponential"}, {"mean", d.mean}};
        } else {
          return {{"kind", "bounded-pareto"}, {"shape", d.shape}, {"low", d.low}, {"high", d.high}};
        }
      },
      dist);
}

}  // namespace

LoadedInstance parse_instance(const std::string& text) {
  const json doc = parse_document(text);
  if (!doc.is_object()) throw ParseError("instance must be a JSON object", 1, "");

  const json& m_v = require(doc, "m", text);
  if (!m_v.is_number_integer() || m_v.get<std::int64_t>() < 1) {
    throw ParseError("field 'm' must be a positive integer", line_of_field(text, "m"), "m");
  }
  const PowerFunction power = parse_power(doc, text);

  const json& jobs_v = require(doc, "jobs", text);
  if (!jobs_v.is_array()) throw ParseError("field 'jobs' must be an array", line_of_field(text, "jobs"), "jobs");

  std::vector<std::pair<double, double>> arrivals;
  arrivals.reserve(jobs_v.size());
  for (std::size_t i = 0; i < jobs_v.size(); ++i) {
    const json& j = jobs_v[i];
    const std::string where = "jobs[" + std::to_string(i) + "]";
    if (!j.is_object() || !j.contains("arrival") || !j.contains("size") || !j["arrival"].is_number() ||
        !j["size"].is_number()) {
      throw ParseError(where + " needs numeric 'arrival' and 'size'", line_of_field(text, "jobs"), where);
    }
    arrivals.emplace_back(j["arrival"].get<double>(), j["size"].get<double>());
  }

  LoadedInstance out{Instance(1, power), {}};
  if (!std::is_sorted(arrivals.begin(), arrivals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; })) {
    out.warnings.emplace_back("arrivals were not sorted; jobs re-sorted by arrival time");
  }
  try {
    out.instance = Instance::from_arrivals(static_cast<std::size_t>(m_v.get<std::int64_t>()), power, arrivals);
  } catch (const InvalidInstance& e) {
    throw ParseError(e.what(), line_of_field(text, "jobs"), "jobs");
  }
  return out;
}

LoadedInstance load_instance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file " + path.string(), 0, "");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_instance(buf.str());
}

std::string dump_instance(const Instance& instance) {
  json jobs = json::array();
  for (const Job& j : instance.jobs()) jobs.push_back({{"arrival", j.arrival}, {"size", j.size}});
  json doc = {{"m", instance.servers()},
              {"power", {{"alpha", instance.power().alpha()}, {"coefficient", instance.power().coefficient()}}},
              {"jobs", jobs}};
  return doc.dump(2);
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file " + path.string());
  out << dump_instance(instance) << '\n';
}

StochasticSpec parse_stochastic_spec(const std::string& text) {
  const json doc = parse_document(text);
  StochasticSpec spec;
  spec.lambda = require_number(doc, "lambda", text);
  spec.size_dist = parse_size_dist(require(doc, "size_dist", text), text);
  spec.horizon = require_number(doc, "horizon", text);
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      throw ParseError("field 'seed' must be a nonnegative integer", line_of_field(text, "seed"), "seed");
    }
    spec.seed = doc["seed"].get<std::uint64_t>();
  }
  return spec;
}

std::string dump_stochastic_spec(const StochasticSpec& spec) {
  json doc = {{"lambda", spec.lambda},
              {"size_dist", size_dist_to_json(spec.size_dist)},
              {"horizon", spec.horizon},
              {"seed", spec.seed}};
  return doc.dump(2);
}

void write_trajectory_jsonl(const Trajectory& trajectory, std::ostream& out) {
  json jobs = json::array();
  for (const Job& j : trajectory.jobs) jobs.push_back({j.arrival, j.size});
  out << json{{"type", "header"}, {"servers", trajectory.servers}, {"jobs", jobs}}.dump() << '\n';
  for (const Segment& s : trajectory.segments) {
    json seg_jobs = json::array();
    for (const SegmentJob& j : s.jobs) {
      seg_jobs.push_back({{"id", j.id},
                          {"remaining", j.remaining},
                          {"speed", j.speed},
                          {"server", j.server ? json(*j.server) : json(nullptr)}});
    }
    out << json{{"type", "segment"}, {"start", s.start}, {"end", s.end}, {"jobs", seg_jobs}}.dump() << '\n';
  }
  for (const TrajectoryEvent& e : trajectory.events) {
    out << json{{"type", "event"},
                {"time", e.time},
                {"kind", e.kind == EventKind::Arrival ? "arrival" : "departure"},
                {"job", e.job}}
               .dump()
        << '\n';
  }
}

Trajectory read_trajectory_jsonl(std::istream& in) {
  Trajectory traj;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
      const auto type = rec.at("type").get<std::string>();
      if (type == "header") {
        traj.servers = rec.at("servers").get<std::size_t>();
        traj.jobs.clear();
        for (const json& j : rec.at("jobs")) {
          traj.jobs.push_back(Job{traj.jobs.size(), j.at(0).get<double>(), j.at(1).get<double>()});
        }
        have_header = true;
      } else if (type == "segment") {
        Segment s{rec.at("start").get<double>(), rec.at("end").get<double>(), {}};
        for (const json& j : rec.at("jobs")) {
          SegmentJob sj{j.at("id").get<JobId>(), j.at("remaining").get<double>(), j.at("speed").get<double>(),
                        std::nullopt};
          if (!j.at("server").is_null()) sj.server = j.at("server").get<ServerId>();
          s.jobs.push_back(sj);
        }
        traj.segments.push_back(std::move(s));
      } else if (type == "event") {
        const auto kind = rec.at("kind").get<std::string>();
        traj.events.push_back({rec.at("time").get<double>(),
                               kind == "arrival" ? EventKind::Arrival : EventKind::Departure,
                               rec.at("job").get<JobId>()});
      } else {
        throw ParseError("unknown record type '" + type + "'", lineno, "type");
      }
    } catch (const json::exception& e) {
      throw ParseError(std::string("bad trajectory record: ") + e.what(), lineno, "");
    }
  }
  if (!have_header && !traj.segments.empty()) throw ParseError("trajectory has no header record", 1, "type");
  return traj;
}

std::string cost_to_json(const CostBreakdown& cost) {
  json doc = {{"flow_time", cost.flow_time},
              {"energy", cost.energy},
              {"total", cost.total},
              {"per_job_flow", cost.per_job_flow}};
  return doc.dump(2);
}

}  // namespace speedscale
