#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fencesim/geometry.hpp"

namespace fencesim {

struct Waypoint {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
};

/// Piecewise-linear animal path.
struct TrajectoryScript {
  std::string id;
  std::vector<Waypoint> waypoints;

  void validate() const;
  double startTime() const { return waypoints.front().t; }
  double endTime() const { return waypoints.back().t; }
};

/// Throws ValidationError when t lies outside the script's time span.
Point positionAt(const TrajectoryScript& script, double t);

/// Same path walked backwards over the same time span.
TrajectoryScript reversed(const TrajectoryScript& script);
/// Every waypoint time multiplied by `factor` (> 0).
TrajectoryScript timeScaled(const TrajectoryScript& script, double factor);

struct DetectionEvent {
  Signature sensorIds;
  Point regionRepresentative;
  double trueTime = 0.0;
  Point truePosition;
};

struct DetectionParams {
  double sampleStep = 0.1;
  double retrigger = 5.0;

  void validate() const;
};

/// Samples the script every `sampleStep` seconds and emits an event when the
/// covering signature changes, or every `retrigger` seconds while it stays
/// the same. An event that would repeat the previous event's signature
/// within `retrigger` is suppressed.
std::vector<DetectionEvent> generateDetections(const TrajectoryScript& script, const SensorLayout& layout,
                                               const PositionMap& positions, const DetectionParams& params);

/// Accepts a single {"id", "waypoints": [[x, y, t], ...]} object or an array
/// of them.
std::vector<TrajectoryScript> parseTrajectories(const nlohmann::json& doc);
std::vector<TrajectoryScript> loadTrajectories(const std::filesystem::path& path);

std::string detectionsCsv(const std::string& scriptId, const std::vector<DetectionEvent>& events,
                          const SensorLayout& layout);

}  // namespace fencesim
