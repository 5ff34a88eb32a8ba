#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "fencesim/camera.hpp"
#include "fencesim/error.hpp"
#include "fencesim/rng.hpp"

using namespace fencesim;

namespace {

constexpr double kPi = std::numbers::pi;

// Published footprints, distance -> (w, h).
const int kTable[8][3] = {{10, 199, 151}, {20, 99, 76}, {30, 66, 50}, {40, 50, 38},
                          {50, 40, 30},   {60, 33, 25}, {70, 28, 22}, {80, 25, 19}};

}  // namespace

TEST_CASE("fitted vertical field of view") {
  // Closed-form least squares for p = k / D: k = sum(p / D) / sum(1 / D^2),
  // vfov = 2 atan(res * h / (2 k)).
  double num = 0;
  double den = 0;
  for (const auto& row : kTable) {
    num += row[2] / static_cast<double>(row[0]);
    den += 1.0 / (row[0] * static_cast<double>(row[0]));
  }
  const double k = num / den;
  const double oracle = 2.0 * std::atan(1944 * 1.5 / (2.0 * k)) * 180.0 / kPi;
  CHECK(defaultVerticalFov() == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(defaultVerticalFov() == doctest::Approx(87.9403).epsilon(1e-6));
}

TEST_CASE("pixel table reproduces the published footprints") {
  CameraSpec cam;
  for (const auto& row : kTable) {
    const auto px = pixelOccupancy(cam, row[0]);
    CHECK(std::abs(px.width - row[1]) <= 1);
    CHECK(std::abs(px.height - row[2]) <= 1);
  }
  CHECK(pixelOccupancy(cam, 10) == PixelFootprint{199, 151});
  CHECK(pixelOccupancy(cam, 40) == PixelFootprint{50, 38});
  CHECK(pixelOccupancy(cam, 80) == PixelFootprint{25, 19});
  CHECK(pixelOccupancy(cam, 10, {0, 0}) == PixelFootprint{0, 0});
  CHECK_THROWS_AS(pixelOccupancy(cam, 0), ValidationError);
}

TEST_CASE("pixels fall with distance and scale inversely") {
  CameraSpec cam;
  Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double d = rng.uniform(1, 200);
    const double d2 = d * rng.uniform(1.2, 3);
    const auto a = pixelOccupancy(cam, d);
    const auto b = pixelOccupancy(cam, d2);
    REQUIRE(b.width <= a.width);
    REQUIRE(b.height <= a.height);
    // pixels x distance constant within one rounding unit scaled by distance
    REQUIRE(std::abs(a.width * d - b.width * d2) <= 0.5 * (d + d2) + 1e-9);
  }
}

TEST_CASE("recognition gates at 40 and 80 m") {
  CameraSpec cam;
  const std::vector<std::string> names{"GoogLeNet", "SqueezeNet1_1", "DenseNet201", "VGG16/19", "MobileNet"};
  for (const auto& n : names) CHECK(recognitionGate(pixelOccupancy(cam, 40), n));
  std::set<std::string> at80;
  for (const auto& n : names)
    if (recognitionGate(pixelOccupancy(cam, 80), n)) at80.insert(n);
  CHECK(at80 == std::set<std::string>{"GoogLeNet", "SqueezeNet1_1"});
  CHECK(recognitionGate({15, 15}, "GoogLeNet"));
  CHECK_FALSE(recognitionGate({15, 14}, "GoogLeNet"));
  CHECK_THROWS_AS(recognitionGate({15, 15}, "AlexNet"), ValidationError);
}

TEST_CASE("gate is monotone in distance") {
  CameraSpec cam;
  for (const auto& m : recognitionModels()) {
    bool seenFail = false;
    for (double d = 1; d <= 150; d += 0.5) {
      const bool ok = recognitionGate(pixelOccupancy(cam, d), m.name);
      if (!ok) seenFail = true;
      REQUIRE_FALSE((seenFail && ok));
    }
  }
}

TEST_CASE("pointing criterion") {
  CameraSpec cam;
  cam.position = {0, 0};
  // D = 5, offset placed perpendicular to CP.
  auto r = evaluatePointing(cam, {5, 0}, {5, 5 * std::tan(52.5 * kPi / 180)});
  CHECK(r.offset == doctest::Approx(6.516).epsilon(1e-3));
  CHECK(r.beta == doctest::Approx(52.5 * kPi / 180));
  CHECK(r.withinFov);
  r = evaluatePointing(cam, {5, 0}, {5, 0});
  CHECK(r.beta == 0);
  CHECK(r.withinFov);
  r = evaluatePointing(cam, {5, 0}, {5, 10});
  CHECK(r.beta == doctest::Approx(std::atan(2.0)));
  CHECK_FALSE(r.withinFov);
  CHECK_THROWS_AS(evaluatePointing(cam, {0, 0}, {1, 1}), ValidationError);
}

TEST_CASE("pointing accuracy grows with camera distance for a fixed offset") {
  CameraSpec cam;
  cam.position = {0, 0};
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    const double offset = rng.uniform(0, 30);
    const double d1 = rng.uniform(0.5, 40);
    const double d2 = d1 + rng.uniform(0, 40);
    const bool near = evaluatePointing(cam, {d1, 0}, {d1, offset}).withinFov;
    const bool far = evaluatePointing(cam, {d2, 0}, {d2, offset}).withinFov;
    REQUIRE((!near || far));
  }
}

TEST_CASE("rotation timing") {
  CameraSpec cam;
  CHECK(rotationTime(cam, 1.0, 1.0) == 0.0);
  CHECK(rotationTime(cam, 0.0, kPi) == doctest::Approx(2.0));
  CHECK(rotationTime(cam, -3.0, 3.0) == doctest::Approx((2 * kPi - 6.0) / (kPi / 2)));
  Rng rng(6);
  for (int i = 0; i < 1000; ++i) {
    const double a = rng.uniform(-10, 10);
    const double b = rng.uniform(-10, 10);
    REQUIRE(rotationTime(cam, a, b) == doctest::Approx(rotationTime(cam, b, a)));
    REQUIRE(rotationTime(cam, a, b) <= 2.0 + 1e-12);
  }
  // Worst case with MobileNet: 2 s pan + 1 s capture + 1.64 s inference.
  const double worst = stepTime(cam, 0.0, kPi);
  CHECK(worst == doctest::Approx(4.64));
  CHECK(worst >= 4.0);
  CHECK(worst <= 7.0);
  CHECK(bearing({0, 0}, {0, 1}) == doctest::Approx(kPi / 2));
}

TEST_CASE("model tables") {
  CHECK(recognitionModel("DenseNet201").minPixels == 29);
  CHECK(recognitionModel("MobileNet").minPixels == 32);
  CHECK(inferenceLatency("MobileNet") == 1.64);
  CHECK(inferenceLatency("VGG16") == 2.27);
  CHECK(inferenceLatency("EfficientNetB0") == 5.07);
  CHECK_FALSE(inferenceLatency("GoogLeNet"));
}

TEST_CASE("camera placement") {
  CameraSpec cam;
  cam.position = {12.5, -12.5};
  const FieldSpec field;
  const auto centred = placementCheck(cam, field, 7.0);
  CHECK(centred.maxDistance <= std::hypot(12.5, 12.5) + 7.0 * std::sqrt(2.0) + 1e-9);
  CHECK(centred.optimal);
  CHECK_FALSE(centred.tooFar);

  cam.position = {0, 0};
  const auto big = placementCheck(cam, FieldSpec{200, 200}, 5.0);
  CHECK(big.tooFar);
  CHECK_FALSE(big.optimal);

  cam.position = {12.5, 0};
  const std::array<Side, 1> onlyA{Side::A};
  CHECK(placementCheck(cam, field, 0.0, onlyA).maxDistance == doctest::Approx(12.5));
}

TEST_CASE("camera spec validation") {
  CameraSpec cam;
  cam.hfovDeg = 180;
  CHECK_THROWS_AS(cam.validate(), ValidationError);
  cam = {};
  cam.model = "InceptionV3";  // measured latency but no minimum-pixel figure
  CHECK_THROWS_AS(cam.validate(), ValidationError);
}
