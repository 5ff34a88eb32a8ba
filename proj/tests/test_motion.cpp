#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "fencesim/error.hpp"
#include "fencesim/motion.hpp"

using namespace fencesim;

namespace {

SensorLayout layoutB() { return buildLayout(FieldSpec{}, PirSpec{}, LayoutKind::B, defaultLayoutParams(LayoutKind::B)); }

TrajectoryScript line(Point a, Point b, double t0, double t1, std::string id = "T") {
  return {std::move(id), {{a.x, a.y, t0}, {b.x, b.y, t1}}};
}

}  // namespace

TEST_CASE("piecewise-linear interpolation") {
  TrajectoryScript s{"S", {{0, 0, 0}, {10, 0, 10}, {10, 5, 15}}};
  CHECK(positionAt(s, 0) == Point{0, 0});
  CHECK(positionAt(s, 5).x == doctest::Approx(5));
  CHECK(positionAt(s, 12.5).y == doctest::Approx(2.5));
  CHECK(positionAt(s, 15) == Point{10, 5});
  CHECK_THROWS_AS(positionAt(s, 15.5), ValidationError);
  CHECK_THROWS_AS(positionAt(s, -0.1), ValidationError);
}

TEST_CASE("script validation") {
  CHECK_THROWS_AS((TrajectoryScript{"S", {{0, 0, 0}}}.validate()), ValidationError);
  CHECK_THROWS_AS((TrajectoryScript{"S", {{0, 0, 1}, {1, 1, 1}}}.validate()), ValidationError);
  CHECK_THROWS_AS((TrajectoryScript{"", {{0, 0, 0}, {1, 1, 1}}}.validate()), ValidationError);
}

TEST_CASE("reversed and time-scaled scripts") {
  TrajectoryScript s{"S", {{0, 0, 2}, {4, 0, 4}, {4, 3, 10}}};
  const auto r = reversed(s);
  for (double t : {2.0, 3.0, 5.5, 10.0}) {
    const Point a = positionAt(r, t);
    const Point b = positionAt(s, 12.0 - t);
    CHECK(a.x == doctest::Approx(b.x));
    CHECK(a.y == doctest::Approx(b.y));
  }
  const auto fast = timeScaled(s, 0.5);
  CHECK(fast.endTime() == doctest::Approx(5.0));
  CHECK(positionAt(fast, 2.0).x == doctest::Approx(positionAt(s, 4.0).x));
  CHECK_THROWS_AS(timeScaled(s, 0.0), ValidationError);
}

TEST_CASE("a path that never enters the band produces no detections") {
  const auto layout = layoutB();
  const auto map = buildPositionMap(layout, 0.25);
  const auto events = generateDetections(line({5, -10}, {20, -10}, 0, 15), layout, map, {});
  CHECK(events.empty());
}

TEST_CASE("dwelling in one region retriggers every retrigger period") {
  const auto layout = layoutB();
  const auto map = buildPositionMap(layout, 0.25);
  TrajectoryScript s{"D", {{15, 2, 0}, {15, 2, 12}}};
  const auto events = generateDetections(s, layout, map, {0.1, 5});
  REQUIRE(events.size() == 3);
  CHECK(events[0].trueTime == doctest::Approx(0));
  CHECK(events[1].trueTime == doctest::Approx(5));
  CHECK(events[2].trueTime == doctest::Approx(10));
  for (const auto& e : events) {
    CHECK(e.sensorIds == Signature{layout.find(Side::A, 6)->id});
    CHECK(e.regionRepresentative.x == 15.0);
  }
}

TEST_CASE("every event carries the exact covering signature of the true position") {
  const auto layout = layoutB();
  const auto map = buildPositionMap(layout, 0.25);
  const auto events = generateDetections(line({1, 2}, {24, 5}, 0, 23), layout, map, {});
  REQUIRE(events.size() > 5);
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(events[i].sensorIds == coveringSensors(layout, events[i].truePosition));
    CHECK(events[i].regionRepresentative == map.lookup(events[i].sensorIds));
    if (i > 0) CHECK(events[i].trueTime > events[i - 1].trueTime);
  }
}

TEST_CASE("consecutive equal signatures are spaced by at least the retrigger period") {
  const auto layout = buildLayout(FieldSpec{}, PirSpec{}, LayoutKind::A, defaultLayoutParams(LayoutKind::A));
  const auto map = buildPositionMap(layout, 0.25);
  const auto events = generateDetections(line({1, 1}, {24, 1}, 0, 46), layout, map, {0.1, 5});
  for (std::size_t i = 1; i < events.size(); ++i) {
    if (events[i].sensorIds == events[i - 1].sensorIds)
      CHECK(events[i].trueTime - events[i - 1].trueTime >= 5.0 - 1e-9);
  }
}

TEST_CASE("trajectory json parsing") {
  auto doc = nlohmann::json::parse(R"([{"id": "M1", "waypoints": [[0, 1, 0], [5, 1, 5]]},
                                        {"id": "M2", "description": "x", "waypoints": [[0, 1, 0], [1, 1, 2]]}])");
  const auto scripts = parseTrajectories(doc);
  REQUIRE(scripts.size() == 2);
  CHECK(scripts[1].id == "M2");
  CHECK(scripts[0].waypoints[1].x == 5);
  CHECK(parseTrajectories(doc[0]).size() == 1);
  CHECK_THROWS_AS(parseTrajectories(nlohmann::json::parse(R"({"id": "M1", "speed": 1, "waypoints": []})")),
                  ValidationError);
  CHECK_THROWS_AS(parseTrajectories(nlohmann::json::parse(R"({"id": "M1", "waypoints": [[0, 1]]})")),
                  ValidationError);
}

TEST_CASE("trajectory files") {
  const auto dir = std::filesystem::temp_directory_path() / "fencesim_motion_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "bad.json") << "[{\"id\": ";
  }
  CHECK_THROWS_AS(loadTrajectories(dir / "bad.json"), IoError);
  CHECK_THROWS_AS(loadTrajectories(dir / "missing.json"), IoError);
  const auto corpus = loadTrajectories("data/movements.json");
  CHECK(corpus.size() == 18);
  std::filesystem::remove_all(dir);
}

TEST_CASE("detections csv") {
  const auto layout = layoutB();
  const auto map = buildPositionMap(layout, 0.25);
  TrajectoryScript s{"D", {{15, 2, 0}, {15, 2, 1}}};
  const std::string csv = detectionsCsv("D", generateDetections(s, layout, map, {}), layout);
  CHECK(csv.find("A6") != std::string::npos);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
