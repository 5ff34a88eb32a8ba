#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fencesim/geometry.hpp"

namespace fencesim {

struct RecognitionModel {
  std::string name;
  int minPixels = 0;                     // square crop side the model needs
  std::optional<double> measuredLatency;  // seconds on the camera node, when measured
};

/// GoogLeNet, SqueezeNet1_1, DenseNet201, VGG16/19, MobileNet.
std::span<const RecognitionModel> recognitionModels();
/// Throws ValidationError for an unknown name.
const RecognitionModel& recognitionModel(std::string_view name);
/// Measured per-image inference latency for the benchmarked models
/// (VGG16, ResNet50, ResNet50V2, InceptionV3, MobileNet, MobileNetV2,
/// EfficientNetB0).
std::optional<double> inferenceLatency(std::string_view name);

struct PixelSample {
  double distance = 0.0;
  int pixels = 0;
};

/// Published vertical footprints of a 1.5 m tall animal at 10..80 m.
std::span<const PixelSample> publishedVerticalPixels();
/// Published horizontal footprints of a 2 m long animal at 10..80 m.
std::span<const PixelSample> publishedHorizontalPixels();

/// Least-squares fit of the pinhole field of view (degrees) to footprint
/// samples of an object of the given size on a sensor axis of `resolution`
/// pixels.
double fitFieldOfView(std::span<const PixelSample> samples, int resolution, double objectSize);

/// Vertical field of view fitted to the published vertical footprints.
double defaultVerticalFov();

struct AnimalSize {
  double length = 2.0;
  double height = 1.5;
};

struct CameraSpec {
  Point position;
  double hfovDeg = 105.0;
  double vfovDeg = defaultVerticalFov();
  int resolutionW = 2592;
  int resolutionH = 1944;
  double angularSpeedDeg = 90.0;
  double captureTime = 1.0;
  std::string model = "MobileNet";
  double recognitionLatency = 1.64;

  void validate() const;
};

struct PointingResult {
  Point predicted;
  Point actual;
  double distancePC = 0.0;
  double offset = 0.0;
  double beta = 0.0;  // radians
  bool withinFov = false;
};

/// Conservative accuracy test: the actual position is taken perpendicular to
/// the camera-to-prediction ray, so beta = atan(offset / |CP|) is maximal.
/// Throws ValidationError when the prediction coincides with the camera.
PointingResult evaluatePointing(const CameraSpec& cam, Point predicted, Point actual);

/// Bearing of `to` seen from `from`, radians in (-pi, pi].
double bearing(Point from, Point to);
/// Shortest-arc pan time between two bearings.
double rotationTime(const CameraSpec& cam, double fromBearing, double toBearing);
/// Pan, capture and recognition for one pointing step.
double stepTime(const CameraSpec& cam, double fromBearing, double toBearing);

struct PixelFootprint {
  int width = 0;
  int height = 0;
  friend bool operator==(PixelFootprint, PixelFootprint) = default;
};

/// Pinhole footprint, rounded half up. Throws ValidationError for distance <= 0.
PixelFootprint pixelOccupancy(const CameraSpec& cam, double distance, AnimalSize animal = {});

/// True when both footprint axes reach the model's minimum crop.
bool recognitionGate(PixelFootprint pixels, std::string_view model);

struct PlacementResult {
  double maxDistance = 0.0;
  bool tooFar = false;   // beyond the 80 m limit of the weakest usable models
  bool optimal = false;  // within 40 m, where every listed model works
};

inline constexpr double kMaxCameraDistance = 80.0;
inline constexpr double kOptimalCameraDistance = 40.0;

/// Farthest point of the outer band edge (depth `bandDepth`) along the given
/// sides, measured from the panning camera.
PlacementResult placementCheck(const CameraSpec& cam, const FieldSpec& field, double bandDepth,
                               std::span<const Side> sides = kAllSides);
PlacementResult placementCheck(const CameraSpec& cam, const SensorLayout& layout);

}  // namespace fencesim
