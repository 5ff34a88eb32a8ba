#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "fencesim/budget.hpp"
#include "fencesim/camera.hpp"
#include "fencesim/geometry.hpp"
#include "fencesim/link.hpp"
#include "fencesim/motion.hpp"
#include "fencesim/predictor.hpp"

namespace fencesim {

inline constexpr int kScenarioVersion = 1;

struct LinkConfig {
  std::map<Side, LinkProfile> uplink;  // one end node per side
  LinkProfile downlink;                // fog node to camera
  LinkProfile resultUplink;            // camera back to fog node
  double slotDuration = 0.25;
  std::size_t queueCapacity = 16;
};

LinkConfig defaultLinkConfig();

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;

  FieldSpec field;
  PirSpec pir;
  LayoutKind layoutKind = LayoutKind::A;
  LayoutParams layoutParams = defaultLayoutParams(LayoutKind::A);
  double gridResolution = 0.25;
  double blindBand = 2.5;  // outward depth used for the blind-area figure

  std::vector<TrajectoryScript> trajectories;
  std::filesystem::path trajectoriesPath;  // as resolved, empty when inline
  DetectionParams detection;

  LinkConfig link = defaultLinkConfig();
  PredictorConfig predictor;
  double computeTime = 0.01;         // prediction step on the fog node
  std::size_t cameraMinReadings = 3; // readings in a session before the camera is pointed

  CameraSpec camera;
  double cameraInitialBearingDeg = 0.0;
  AnimalSize animal;
  std::string species = "wild boar";
  double lteDelay = 0.1;

  std::vector<double> cameraDistances{5.0, 10.0, 15.0};
  std::vector<double> pixelDistances{10, 20, 30, 40, 50, 60, 70, 80};
  std::vector<LatencyStep> latencySteps = defaultLatencySteps();
  std::vector<CostItem> costItems = defaultCostItems();

  std::filesystem::path outputDir;  // empty: caller decides

  void validate() const;
};

/// Parses a version-1 scenario document. Relative paths resolve against
/// `baseDir`. Unknown keys raise ValidationError naming the offending field.
Scenario scenarioFromJson(const nlohmann::json& doc, const std::filesystem::path& baseDir);

/// Reads and parses a scenario file. Throws IoError when the file cannot be
/// read or is not valid JSON.
Scenario loadScenario(const std::filesystem::path& path);

/// FENCESIM_SEED, when set to an unsigned integer. Throws ValidationError
/// for any other value.
std::optional<std::uint64_t> seedFromEnvironment();

}  // namespace fencesim
