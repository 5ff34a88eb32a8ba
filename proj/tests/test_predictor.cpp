#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fencesim/error.hpp"
#include "fencesim/predictor.hpp"
#include "fencesim/rng.hpp"

using namespace fencesim;

namespace {

Predictor rawPredictor(PredictorConfig cfg = {}) {
  // Readings carry their representative directly: x in the bitmap, y in the sequence.
  return Predictor(cfg, [](const ReadingMessage& m) {
    return Point{static_cast<double>(m.sensorBits), static_cast<double>(m.sequence)};
  });
}

Point rotate90(Point p) { return {-p.y, p.x}; }

}  // namespace

TEST_CASE("worked examples") {
  auto p = predict({{15, 3.5}, 5}, {{20, 3.5}, 0}, 5.0);
  CHECK(p.predicted.x == doctest::Approx(10.0));
  CHECK(p.predicted.y == doctest::Approx(3.5));
  CHECK(p.speed == doctest::Approx(1.0));

  p = predict({{3, 4}, 1}, {{0, 0}, 0}, 1.0);
  CHECK(p.speed == doctest::Approx(5.0));
  CHECK(p.leadDistance == doctest::Approx(5.0));
  CHECK(p.predicted.x == doctest::Approx(6.0));
  CHECK(p.predicted.y == doctest::Approx(8.0));

  p = predict({{15, 3.5}, 10}, {{15, 3.5}, 5}, 5.0);
  CHECK(p.predicted == Point{15, 3.5});
  CHECK(p.speed == 0.0);
  CHECK(p.heading == 0.0);

  CHECK_THROWS_AS(predict({{1, 1}, 1}, {{0, 0}, 1}, 5.0), ValidationError);
}

TEST_CASE("uniform motion is predicted exactly in raw coordinates") {
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    const Point origin{rng.uniform(-50, 50), rng.uniform(-50, 50)};
    const Point v{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double t0 = rng.uniform(0, 100);
    const double dt = rng.uniform(0.05, 30);
    const double lead = rng.uniform(0.1, 20);
    auto at = [&](double t) { return origin + (t - t0) * v; };
    const auto p = predict({at(t0 + dt), t0 + dt}, {at(t0), t0}, lead);
    if (norm(v) * dt < 1e-6) continue;
    REQUIRE(distance(p.predicted, at(t0 + dt + lead)) < 1e-9);
  }
}

TEST_CASE("translation, rotation and speed-scaling invariants") {
  Rng rng(12);
  for (int i = 0; i < 2000; ++i) {
    const TimedPoint prev{{rng.uniform(-40, 40), rng.uniform(-40, 40)}, rng.uniform(0, 50)};
    const TimedPoint cur{{rng.uniform(-40, 40), rng.uniform(-40, 40)}, prev.t + rng.uniform(0.05, 20)};
    const double lead = rng.uniform(0.1, 10);
    const auto base = predict(cur, prev, lead);

    const Point shift{rng.uniform(-100, 100), rng.uniform(-100, 100)};
    const auto moved = predict({cur.position + shift, cur.t}, {prev.position + shift, prev.t}, lead);
    REQUIRE(distance(moved.predicted, base.predicted + shift) < 1e-9);

    const auto turned = predict({rotate90(cur.position), cur.t}, {rotate90(prev.position), prev.t}, lead);
    REQUIRE(distance(turned.predicted, rotate90(base.predicted)) < 1e-9);

    // Same displacement in half the time: twice the speed and lead distance.
    const double mid = prev.t + (cur.t - prev.t) / 2;
    const auto quick = predict({cur.position, mid}, prev, lead);
    REQUIRE(std::abs(quick.speed - 2 * base.speed) <= 1e-9 * std::max(1.0, base.speed));
    REQUIRE(std::abs(quick.leadDistance - 2 * base.leadDistance) <= 1e-9 * std::max(1.0, base.leadDistance));

    // The prediction lies on the ray from previous through current.
    const Point d = cur.position - prev.position;
    const Point e = base.predicted - cur.position;
    REQUIRE(std::abs(cross(d, e)) <= 1e-9 * std::max(1.0, norm(d) * norm(e)));
    REQUIRE(dot(d, e) >= 0.0);
    REQUIRE(base.leadDistance == doctest::Approx(lead * base.speed));
  }
}

TEST_CASE("sessions start after a silence longer than the threshold") {
  auto pr = rawPredictor();
  CHECK(pr.admitObservation({20, 3.5}, 0, 1).kind == AdmitKind::NewSession);
  auto r = pr.admitObservation({15, 3.5}, 5, 6);
  CHECK(r.kind == AdmitKind::Accepted);
  REQUIRE(r.prediction);
  CHECK(r.prediction->predicted.x == doctest::Approx(10));
  r = pr.admitObservation({10, 3.5}, 126, 127);
  CHECK(r.kind == AdmitKind::NewSession);
  CHECK_FALSE(r.prediction);
  CHECK(r.sessionId == 2);
  r = pr.admitObservation({5, 3.5}, 131, 132);
  REQUIRE(r.prediction);
  // Session isolation: the basis never mixes sessions.
  CHECK(r.prediction->previous.t == 126);
  CHECK(pr.sessions().size() == 2);
  CHECK(pr.sessions()[0].history.size() == 2);
}

TEST_CASE("readings inside the tolerance window are fused") {
  auto pr = rawPredictor();
  pr.admitObservation({0, 0}, 10, 11);
  CHECK(pr.admitObservation({4, 2}, 20.00, 21).kind == AdmitKind::Accepted);
  const auto r = pr.admitObservation({6, 2}, 20.05, 21.2);
  CHECK(r.kind == AdmitKind::Fused);
  CHECK(r.point.position == Point{5, 2});
  CHECK(r.point.t == 20.00);
  REQUIRE(r.prediction);
  CHECK(r.prediction->current.position == Point{5, 2});
  CHECK(pr.sessions().back().history.size() == 2);
}

TEST_CASE("fusion ignores arrival order") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::pair<Point, double>> members;
    const int n = 2 + static_cast<int>(rng.canonical() * 4);
    for (int i = 0; i < n; ++i)
      members.push_back({{rng.uniform(0, 25), rng.uniform(0, 7)}, 30.0 + rng.uniform(0, 0.099)});
    std::optional<Point> reference;
    std::optional<double> referenceT;
    for (int perm = 0; perm < 5; ++perm) {
      std::vector<std::pair<Point, double>> order = members;
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[static_cast<std::size_t>(rng.canonical() * static_cast<double>(i))]);
      auto pr = rawPredictor();
      pr.admitObservation({0, 0}, 1, 1);
      // Enforce a span below the tolerance by construction.
      AdmitResult last;
      for (const auto& [p, t] : order) last = pr.admitObservation(p, t, 31);
      if (!reference) {
        reference = last.point.position;
        referenceT = last.point.t;
      }
      REQUIRE(distance(*reference, last.point.position) < 1e-9);
      REQUIRE(*referenceT == last.point.t);
    }
  }
}

TEST_CASE("stale and rejected readings") {
  auto pr = rawPredictor();
  pr.admitObservation({0, 0}, 10, 10);
  pr.admitObservation({1, 0}, 15, 16);
  const auto r = pr.admitObservation({2, 0}, 12, 17);
  CHECK(r.kind == AdmitKind::Stale);
  CHECK(pr.staleCount() == 1);

  const auto layout = buildLayout(FieldSpec{}, PirSpec{}, LayoutKind::B, defaultLayoutParams(LayoutKind::B));
  const auto map = buildPositionMap(layout, 0.25);
  Predictor real(PredictorConfig{}, layout, map);
  const auto bad = real.admit(makeReading(Side::A, 1u << 30, 1.0), 1.5);
  CHECK(bad.kind == AdmitKind::Rejected);
  CHECK(real.rejectedCount() == 1);
  const auto ok = real.admit(makeReading(Side::A, 1u << 6, 2.0), 2.5);
  CHECK(ok.kind == AdmitKind::NewSession);
  CHECK(ok.point.position.x == 15.0);
}

TEST_CASE("history times stay strictly increasing under random arrivals") {
  Rng rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    auto pr = rawPredictor();
    double t = 0;
    for (int i = 0; i < 60; ++i) {
      t += rng.canonical() < 0.3 ? rng.uniform(0, 0.12) : rng.uniform(0, 10);
      const double sensed = t - rng.uniform(0, 0.5);
      pr.admitObservation({rng.uniform(0, 25), rng.uniform(0, 7)}, std::max(0.0, sensed), t + 1);
    }
    for (const auto& s : pr.sessions()) {
      for (std::size_t i = 1; i < s.history.size(); ++i) REQUIRE(s.history[i].t > s.history[i - 1].t);
    }
  }
}

TEST_CASE("config validation") {
  PredictorConfig c;
  c.timeTolerance = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.timeThreshold = 0.05;
  CHECK_THROWS_AS(c.validate(), ValidationError);
  c = {};
  c.latency = 0;
  CHECK_THROWS_AS(c.validate(), ValidationError);
}

TEST_CASE("alerts") {
  Notifier n(0.1);
  const auto& a = n.emit(AlertKind::PossibleInvasion, 1, {5, 3}, Side::A, std::nullopt, 10.0);
  CHECK(a.emittedAt == doctest::Approx(10.1));
  CHECK_THROWS_AS(n.emit(AlertKind::Confirmed, 1, {5, 3}, Side::A, std::nullopt, 11.0), ValidationError);
  CHECK_THROWS_AS(n.emit(AlertKind::PossibleInvasion, 1, {5, 3}, Side::A, "boar", 11.0), ValidationError);
  Notifier immediate(0.0);
  CHECK(immediate.emit(AlertKind::Confirmed, 1, {5, 3}, Side::A, "boar", 12.0).emittedAt == 12.0);
  CHECK_THROWS_AS(Notifier(-1.0), ValidationError);
  const std::string csv = alertsCsv(n.log(), "M1");
  CHECK(csv.find("M1,possibleInvasion,1,10.100000") != std::string::npos);
}

TEST_CASE("security filter") {
  SecurityFilter f({Side::A, Side::C});
  CHECK(f.admit(Side::A));
  CHECK_FALSE(f.admit(Side::B));
  CHECK(f.rejected() == 1);
}

TEST_CASE("nearest side") {
  FieldSpec f;
  CHECK(nearestSide(f, {12, 3}) == Side::A);
  CHECK(nearestSide(f, {27, -12}) == Side::B);
  CHECK(nearestSide(f, {12, -27}) == Side::C);
  CHECK(nearestSide(f, {-2, -12}) == Side::D);
}
