#include "fencesim/camera.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fencesim/error.hpp"

namespace fencesim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

double wrapPi(double a) {
  a = std::remainder(a, 2.0 * std::numbers::pi);
  return a;
}

}  // namespace

std::span<const RecognitionModel> recognitionModels() {
  static const std::array<RecognitionModel, 5> models{{
      {"GoogLeNet", 15, std::nullopt},
      {"SqueezeNet1_1", 17, std::nullopt},
      {"DenseNet201", 29, std::nullopt},
      {"VGG16/19", 32, 2.27},
      {"MobileNet", 32, 1.64},
  }};
  return models;
}

const RecognitionModel& recognitionModel(std::string_view name) {
  for (const auto& m : recognitionModels()) {
    if (m.name == name) return m;
  }
  throw ValidationError("camera.model", "unknown recognition model '" + std::string(name) + "'");
}

std::optional<double> inferenceLatency(std::string_view name) {
  static const std::array<std::pair<std::string_view, double>, 7> table{{
      {"VGG16", 2.27},
      {"ResNet50", 3.75},
      {"ResNet50V2", 3.34},
      {"InceptionV3", 4.75},
      {"MobileNet", 1.64},
      {"MobileNetV2", 2.74},
      {"EfficientNetB0", 5.07},
  }};
  for (const auto& [n, s] : table) {
    if (n == name) return s;
  }
  return std::nullopt;
}

std::span<const PixelSample> publishedVerticalPixels() {
  static const std::array<PixelSample, 8> rows{
      {{10, 151}, {20, 76}, {30, 50}, {40, 38}, {50, 30}, {60, 25}, {70, 22}, {80, 19}}};
  return rows;
}

std::span<const PixelSample> publishedHorizontalPixels() {
  static const std::array<PixelSample, 8> rows{
      {{10, 199}, {20, 99}, {30, 66}, {40, 50}, {50, 40}, {60, 33}, {70, 28}, {80, 25}}};
  return rows;
}

double fitFieldOfView(std::span<const PixelSample> samples, int resolution, double objectSize) {
  if (samples.empty()) throw ValidationError("samples", "need at least one footprint sample");
  // pixels = k / distance with k = resolution * size / (2 tan(fov / 2));
  // minimising the squared pixel error gives k = sum(p / D) / sum(1 / D^2).
  double num = 0.0, den = 0.0;
  for (const auto& s : samples) {
    if (!(s.distance > 0.0)) throw ValidationError("samples.distance", "must be positive");
    num += s.pixels / s.distance;
    den += 1.0 / (s.distance * s.distance);
  }
  const double k = num / den;
  return 2.0 * std::atan(resolution * objectSize / (2.0 * k)) / kDeg;
}

double defaultVerticalFov() {
  static const double fov = fitFieldOfView(publishedVerticalPixels(), 1944, 1.5);
  return fov;
}

void CameraSpec::validate() const {
  if (!(hfovDeg > 0.0 && hfovDeg < 180.0)) throw ValidationError("camera.hfov", "must be in (0, 180)");
  if (!(vfovDeg > 0.0 && vfovDeg < 180.0)) throw ValidationError("camera.vfov", "must be in (0, 180)");
  if (resolutionW <= 0 || resolutionH <= 0) throw ValidationError("camera.resolution", "must be positive");
  if (!(angularSpeedDeg > 0.0)) throw ValidationError("camera.angularSpeed", "must be positive");
  if (!(captureTime >= 0.0)) throw ValidationError("camera.captureTime", "must be >= 0");
  if (!(recognitionLatency >= 0.0)) throw ValidationError("camera.recognitionLatency", "must be >= 0");
  recognitionModel(model);
}

PointingResult evaluatePointing(const CameraSpec& cam, Point predicted, Point actual) {
  PointingResult r;
  r.predicted = predicted;
  r.actual = actual;
  r.distancePC = distance(cam.position, predicted);
  if (r.distancePC == 0.0) throw ValidationError("predicted", "coincides with the camera position");
  r.offset = distance(predicted, actual);
  r.beta = std::atan(r.offset / r.distancePC);
  // Compare in degrees with a hair of slack so the exact boundary counts as inside.
  r.withinFov = r.beta / kDeg <= cam.hfovDeg / 2.0 + 1e-9;
  return r;
}

double bearing(Point from, Point to) { return std::atan2(to.y - from.y, to.x - from.x); }

double rotationTime(const CameraSpec& cam, double fromBearing, double toBearing) {
  const double arc = std::abs(wrapPi(toBearing - fromBearing));
  return arc / (cam.angularSpeedDeg * kDeg);
}

double stepTime(const CameraSpec& cam, double fromBearing, double toBearing) {
  return rotationTime(cam, fromBearing, toBearing) + cam.captureTime + cam.recognitionLatency;
}

PixelFootprint pixelOccupancy(const CameraSpec& cam, double distance, AnimalSize animal) {
  if (!(distance > 0.0)) throw ValidationError("distance", "must be positive");
  const double w = cam.resolutionW * animal.length / (2.0 * distance * std::tan(cam.hfovDeg * kDeg / 2.0));
  const double h = cam.resolutionH * animal.height / (2.0 * distance * std::tan(cam.vfovDeg * kDeg / 2.0));
  return {static_cast<int>(std::floor(w + 0.5)), static_cast<int>(std::floor(h + 0.5))};
}

bool recognitionGate(PixelFootprint pixels, std::string_view model) {
  const int need = recognitionModel(model).minPixels;
  return std::min(pixels.width, pixels.height) >= need;
}

PlacementResult placementCheck(const CameraSpec& cam, const FieldSpec& field, double bandDepth,
                               std::span<const Side> sides) {
  if (bandDepth < 0.0) throw ValidationError("bandDepth", "must be >= 0");
  // The outer band edge of a side is a segment parallel to it, extended over
  // the corner squares; the farthest point of a segment is an endpoint.
  double maxD = 0.0;
  for (Side side : sides) {
    const Point dir = field.sideDirection(side);
    const Point out = field.outwardNormal(side);
    const Point a = field.sideStart(side) + bandDepth * out - bandDepth * dir;
    const Point b = field.sideStart(side) + (field.sideLength(side) + bandDepth) * dir + bandDepth * out;
    maxD = std::max({maxD, distance(cam.position, a), distance(cam.position, b)});
  }
  return {maxD, maxD > kMaxCameraDistance, maxD <= kOptimalCameraDistance};
}

PlacementResult placementCheck(const CameraSpec& cam, const SensorLayout& layout) {
  return placementCheck(cam, layout.field, layout.bandDepth);
}

}  // namespace fencesim
