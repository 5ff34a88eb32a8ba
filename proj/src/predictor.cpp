#include "fencesim/predictor.hpp"

#include <algorithm>
#include <cmath>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"

namespace fencesim {

void PredictorConfig::validate() const {
  if (!(timeTolerance > 0.0)) throw ValidationError("predictor.timeTolerance", "must be positive");
  if (!(timeThreshold > timeTolerance))
    throw ValidationError("predictor.timeThreshold", "must exceed timeTolerance");
  if (!(latency > 0.0)) throw ValidationError("predictor.latency", "must be positive");
  if (!(zeroMotionEpsilon >= 0.0)) throw ValidationError("predictor.zeroMotionEpsilon", "must be >= 0");
}

Prediction predict(const TimedPoint& current, const TimedPoint& previous, double latency, double zeroMotionEpsilon) {
  const double dt = current.t - previous.t;
  if (!(dt > 0.0)) throw ValidationError("prediction", "current reading must be strictly later than the previous one");

  Prediction p;
  p.previous = previous;
  p.current = current;
  const double dx = current.position.x - previous.position.x;
  const double dy = current.position.y - previous.position.y;
  const double dist = std::hypot(dx, dy);
  if (dist < zeroMotionEpsilon) {
    p.predicted = current.position;
    return p;
  }
  p.speed = dist / dt;
  p.heading = std::atan2(dy, dx);
  p.leadDistance = latency * p.speed;
  p.predicted = {current.position.x + p.leadDistance * std::cos(p.heading),
                 current.position.y + p.leadDistance * std::sin(p.heading)};
  return p;
}

const char* admitKindName(AdmitKind kind) {
  switch (kind) {
    case AdmitKind::NewSession: return "newSession";
    case AdmitKind::Accepted: return "accepted";
    case AdmitKind::Fused: return "fused";
    case AdmitKind::Stale: return "stale";
    case AdmitKind::Rejected: return "rejected";
  }
  return "?";
}

Predictor::Predictor(PredictorConfig cfg, Resolver resolver) : cfg_(cfg), resolver_(std::move(resolver)) {
  cfg_.validate();
}

Predictor::Predictor(PredictorConfig cfg, const SensorLayout& layout, const PositionMap& positions)
    : Predictor(cfg, [&layout, &positions](const ReadingMessage& msg) {
        return positions.lookup(signatureFor(layout, msg.side, msg.sensorBits));
      }) {}

AdmitResult Predictor::admit(const ReadingMessage& msg, double now) {
  Point rep;
  try {
    rep = resolver_(msg);
  } catch (const ValidationError& e) {
    ++rejected_;
    AdmitResult r;
    r.kind = AdmitKind::Rejected;
    r.reason = e.what();
    return r;
  }
  return admitObservation(rep, msg.timestamp(), now);
}

std::optional<Prediction> Predictor::predictFromHistory(double now) {
  const Session& s = sessions_.back();
  if (s.history.size() < 2) return std::nullopt;
  Prediction p = predict(s.history.back(), s.history[s.history.size() - 2], cfg_);
  p.sessionId = s.id;
  p.issuedAt = now;
  predictions_.push_back(p);
  return p;
}

AdmitResult Predictor::admitObservation(Point representative, double timestamp, double now) {
  AdmitResult result;

  const bool haveSession = !sessions_.empty();
  const double tPrev = haveSession ? sessions_.back().history.back().t : 0.0;
  if (!haveSession || timestamp - tPrev > cfg_.timeThreshold) {
    Session s;
    s.id = static_cast<std::uint32_t>(sessions_.size() + 1);
    s.history.push_back({representative, timestamp});
    sessions_.push_back(std::move(s));
    window_ = {timestamp, timestamp, {representative}};
    result.kind = AdmitKind::NewSession;
    result.sessionId = sessions_.back().id;
    result.point = sessions_.back().history.back();
    return result;
  }

  Session& session = sessions_.back();
  result.sessionId = session.id;
  const double lo = std::min(window_.first, timestamp);
  const double hi = std::max(window_.last, timestamp);
  if (hi - lo < cfg_.timeTolerance) {
    // Same observation seen by several sensors: centroid of their
    // representatives at the earliest sensing time.
    window_.first = lo;
    window_.last = hi;
    window_.members.push_back(representative);
    Point sum;
    for (const Point& m : window_.members) sum = sum + m;
    const TimedPoint fused{(1.0 / static_cast<double>(window_.members.size())) * sum, lo};
    session.history.back() = fused;
    result.kind = AdmitKind::Fused;
    result.point = fused;
    result.prediction = predictFromHistory(now);
    return result;
  }

  if (timestamp < tPrev) {
    ++stale_;
    result.kind = AdmitKind::Stale;
    result.reason = "sensing time precedes the current observation";
    result.point = session.history.back();
    return result;
  }

  session.history.push_back({representative, timestamp});
  window_ = {timestamp, timestamp, {representative}};
  result.kind = AdmitKind::Accepted;
  result.point = session.history.back();
  result.prediction = predictFromHistory(now);
  return result;
}

const char* alertKindName(AlertKind kind) {
  return kind == AlertKind::PossibleInvasion ? "possibleInvasion" : "confirmed";
}

Notifier::Notifier(double lteDelay) : lteDelay_(lteDelay) {
  if (!(lteDelay >= 0.0)) throw ValidationError("notification.lteDelay", "must be >= 0");
}

const Alert& Notifier::emit(AlertKind kind, std::uint32_t sessionId, Point position, Side side,
                            std::optional<std::string> species, double now) {
  if (kind == AlertKind::Confirmed && !species)
    throw ValidationError("alert.species", "confirmed alerts need a recognised species");
  if (kind == AlertKind::PossibleInvasion && species)
    throw ValidationError("alert.species", "possible-invasion alerts carry no species");
  log_.push_back({kind, sessionId, position, side, std::move(species), now + lteDelay_});
  return log_.back();
}

Side nearestSide(const FieldSpec& field, Point p) {
  // Signed outward distance from each side's line; the largest wins.
  const double d[4] = {p.y, p.x - field.width, -field.height - p.y, -p.x};
  return static_cast<Side>(std::max_element(d, d + 4) - d);
}

std::string predictionsCsv(const std::vector<Prediction>& predictions, const std::string& scope) {
  std::string out = csvRow({"scope", "sessionId", "tPrev", "tCur", "xCur", "yCur", "speed", "thetaRadians",
                            "xPredict", "yPredict"});
  for (const auto& p : predictions) {
    out += csvRow({scope, std::to_string(p.sessionId), fixed(p.previous.t), fixed(p.current.t),
                   fixed(p.current.position.x), fixed(p.current.position.y), fixed(p.speed), fixed(p.heading),
                   fixed(p.predicted.x), fixed(p.predicted.y)});
  }
  return out;
}

std::string alertsCsv(const std::vector<Alert>& alerts, const std::string& scope) {
  std::string out = csvRow({"scope", "kind", "sessionId", "emittedAt", "x", "y", "side", "species"});
  for (const auto& a : alerts) {
    out += csvRow({scope, alertKindName(a.kind), std::to_string(a.sessionId), fixed(a.emittedAt), fixed(a.position.x),
                   fixed(a.position.y), std::string(1, sideLabel(a.side)), a.species.value_or("")});
  }
  return out;
}

}  // namespace fencesim
