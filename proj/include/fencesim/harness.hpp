#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fencesim/budget.hpp"
#include "fencesim/camera.hpp"
#include "fencesim/evaluation.hpp"
#include "fencesim/link.hpp"
#include "fencesim/motion.hpp"
#include "fencesim/predictor.hpp"
#include "fencesim/scenario.hpp"

namespace fencesim {

/// One pan-capture-recognise cycle of the camera node.
struct CameraStep {
  std::uint32_t sessionId = 0;
  double instructedAt = 0.0;  // instruction reached the camera
  double startedAt = 0.0;     // later than instructedAt if the camera was busy
  double fromBearing = 0.0;
  double toBearing = 0.0;
  double captureAt = 0.0;
  double doneAt = 0.0;
  Point predicted;
  Point actual;
  bool withinFov = false;
  PixelFootprint pixels;
  bool identified = false;
  double basisStart = 0.0;  // sensing time of the oldest reading behind the instruction
  double basisEnd = 0.0;    // and of the newest
};

struct ConfirmedTiming {
  std::uint32_t sessionId = 0;
  double firstSensing = 0.0;
  double lastSensing = 0.0;
  double emittedAt = 0.0;
  double endToEnd = 0.0;
  bool withinBudget = false;
};

struct MovementResult {
  std::string id;
  std::vector<DetectionEvent> detections;
  std::vector<LinkTraceRecord> linkTrace;
  LinkStats link;
  std::vector<Session> sessions;
  std::vector<Prediction> predictions;
  std::vector<Alert> alerts;
  std::vector<CameraStep> cameraSteps;
  std::vector<ConfirmedTiming> confirmed;
  std::vector<OffsetSample> offsets;
  std::optional<double> averageOffset;  // nullopt: insufficient readings
  std::size_t stale = 0;
  std::size_t rejected = 0;
  std::size_t decodeErrors = 0;
  std::size_t securityRejected = 0;

  /// Observations of all sessions in sensing order.
  std::vector<TimedPoint> acceptedReadings() const;
};

struct SimReport {
  std::string scenario;
  LayoutKind layout = LayoutKind::A;
  std::uint64_t seed = 0;
  std::size_t sensorCount = 0;
  std::vector<std::string> sensorNames;  // indexed by SensorId
  std::size_t regionCount = 0;
  double bandDepth = 0.0;
  double blindBand = 0.0;
  double blindFraction = 0.0;
  PlacementResult placement;
  std::string cameraModel;
  double captureTime = 0.0;
  double recognitionLatency = 0.0;
  std::vector<MovementResult> movements;
  std::vector<AccuracyRow> accuracy;
  LatencyBudget latency;
  CostSheet cost;

  std::size_t sessionCount() const;
  std::size_t alertCount(AlertKind kind) const;
  std::size_t insufficientCount() const;
  LinkStats linkTotals() const;
};

/// Runs every trajectory of the scenario through sensing, the LoRa link,
/// the fog-node predictor and the camera node, then builds the evaluation
/// tables. Each trajectory is an independent episode with its own random
/// stream, so the result depends only on the scenario and its seed.
SimReport runScenario(const Scenario& scenario);

/// Names of the files writeReport produces.
std::vector<std::string> reportFileNames();

/// Writes report.json and the CSV tables into `dir`, each file atomically.
void writeReport(const SimReport& report, const std::filesystem::path& dir);

/// Serialised report.json contents.
std::string reportJson(const SimReport& report);

}  // namespace fencesim
