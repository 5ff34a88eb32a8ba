#include "fencesim/motion.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"

namespace fencesim {

void TrajectoryScript::validate() const {
  const std::string where = "trajectory[" + id + "]";
  if (id.empty()) throw ValidationError("trajectory.id", "must not be empty");
  if (waypoints.size() < 2) throw ValidationError(where + ".waypoints", "needs at least 2 waypoints");
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    const auto& w = waypoints[i];
    if (!std::isfinite(w.x) || !std::isfinite(w.y) || !std::isfinite(w.t))
      throw ValidationError(where + ".waypoints", "non-finite value at index " + std::to_string(i));
    if (i > 0 && !(w.t > waypoints[i - 1].t))
      throw ValidationError(where + ".waypoints", "times must be strictly increasing at index " + std::to_string(i));
  }
}

Point positionAt(const TrajectoryScript& script, double t) {
  const auto& w = script.waypoints;
  if (w.empty() || t < w.front().t || t > w.back().t)
    throw ValidationError("t", "outside the span of trajectory " + script.id);
  auto it = std::upper_bound(w.begin(), w.end(), t, [](double v, const Waypoint& p) { return v < p.t; });
  if (it == w.end()) return {w.back().x, w.back().y};
  const Waypoint& b = *it;
  const Waypoint& a = *(it - 1);
  if (t == a.t) return {a.x, a.y};
  const double u = (t - a.t) / (b.t - a.t);
  return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
}

TrajectoryScript reversed(const TrajectoryScript& script) {
  TrajectoryScript out{script.id + "-rev", {}};
  const double t0 = script.startTime(), t1 = script.endTime();
  for (auto it = script.waypoints.rbegin(); it != script.waypoints.rend(); ++it)
    out.waypoints.push_back({it->x, it->y, t0 + (t1 - it->t)});
  return out;
}

TrajectoryScript timeScaled(const TrajectoryScript& script, double factor) {
  if (!(factor > 0.0)) throw ValidationError("factor", "must be positive");
  TrajectoryScript out = script;
  for (auto& w : out.waypoints) w.t *= factor;
  return out;
}

void DetectionParams::validate() const {
  if (!(sampleStep > 0.0)) throw ValidationError("detection.sampleStep", "must be positive");
  if (!(retrigger >= sampleStep)) throw ValidationError("detection.retrigger", "must be >= sampleStep");
}

std::vector<DetectionEvent> generateDetections(const TrajectoryScript& script, const SensorLayout& layout,
                                               const PositionMap& positions, const DetectionParams& params) {
  script.validate();
  params.validate();
  // Work in integer sample indices so retrigger spacing is exact.
  const auto steps = static_cast<long long>(std::floor((script.endTime() - script.startTime()) / params.sampleStep + 1e-9));
  const auto retriggerSteps = std::max(1LL, std::llround(params.retrigger / params.sampleStep));

  std::vector<DetectionEvent> events;
  Signature lastSig;
  long long lastK = 0;
  for (long long k = 0; k <= steps; ++k) {
    const double t = std::min(script.startTime() + static_cast<double>(k) * params.sampleStep, script.endTime());
    const Point p = positionAt(script, t);
    Signature sig = coveringSensors(layout, p);
    if (sig.empty()) continue;
    if (sig != lastSig || k - lastK >= retriggerSteps) {
      events.push_back({sig, positions.lookup(sig), t, p});
      lastSig = std::move(sig);
      lastK = k;
    }
  }
  return events;
}

std::vector<TrajectoryScript> parseTrajectories(const nlohmann::json& doc) {
  auto parseOne = [](const nlohmann::json& j) {
    if (!j.is_object()) throw ValidationError("trajectory", "expected an object");
    for (const auto& [key, _] : j.items()) {
      if (key != "id" && key != "waypoints" && key != "description")
        throw ValidationError("trajectory." + key, "unknown key");
    }
    if (!j.contains("id") || !j["id"].is_string()) throw ValidationError("trajectory.id", "missing string id");
    TrajectoryScript s;
    s.id = j["id"].get<std::string>();
    if (!j.contains("waypoints") || !j["waypoints"].is_array())
      throw ValidationError("trajectory[" + s.id + "].waypoints", "missing array");
    for (const auto& w : j["waypoints"]) {
      if (!w.is_array() || w.size() != 3 || !w[0].is_number() || !w[1].is_number() || !w[2].is_number())
        throw ValidationError("trajectory[" + s.id + "].waypoints", "each waypoint must be [x, y, t]");
      s.waypoints.push_back({w[0].get<double>(), w[1].get<double>(), w[2].get<double>()});
    }
    s.validate();
    return s;
  };
  std::vector<TrajectoryScript> out;
  if (doc.is_array()) {
    for (const auto& j : doc) out.push_back(parseOne(j));
  } else {
    out.push_back(parseOne(doc));
  }
  return out;
}

std::vector<TrajectoryScript> loadTrajectories(const std::filesystem::path& path) {
  const std::string text = readFile(path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return parseTrajectories(doc);
}

std::string detectionsCsv(const std::string& scriptId, const std::vector<DetectionEvent>& events,
                          const SensorLayout& layout) {
  std::string out = csvRow({"scriptId", "eventIndex", "sensorIds", "repX", "repY", "trueX", "trueY", "trueTime"});
  for (std::size_t i = 0; i < events.size(); ++i) {
    const auto& e = events[i];
    out += csvRow({scriptId, std::to_string(i), signatureName(e.sensorIds, layout), fixed(e.regionRepresentative.x),
                   fixed(e.regionRepresentative.y), fixed(e.truePosition.x), fixed(e.truePosition.y),
                   fixed(e.trueTime)});
  }
  return out;
}

}  // namespace fencesim
