#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fencesim/geometry.hpp"
#include "fencesim/link.hpp"

namespace fencesim {

struct TimedPoint {
  Point position;
  double t = 0.0;
};

struct PredictorConfig {
  double timeThreshold = 120.0;  // silence that ends an intrusion session
  double timeTolerance = 0.1;    // readings closer than this are one observation
  double latency = 5.0;          // detection-to-pointing lead time
  double zeroMotionEpsilon = 1e-6;

  void validate() const;
};

struct Prediction {
  std::uint32_t sessionId = 0;
  TimedPoint previous;
  TimedPoint current;
  double speed = 0.0;
  double heading = 0.0;  // radians, atan2(dy, dx); 0 when stationary
  double leadDistance = 0.0;
  Point predicted;
  double issuedAt = 0.0;
};

/// Dead-reckoning step: extrapolates from `previous` through `current` for
/// `latency` seconds at the observed average speed. Displacements below
/// `zeroMotionEpsilon` predict the current position. Throws ValidationError
/// unless current.t > previous.t.
Prediction predict(const TimedPoint& current, const TimedPoint& previous, double latency,
                   double zeroMotionEpsilon = 1e-6);
inline Prediction predict(const TimedPoint& current, const TimedPoint& previous, const PredictorConfig& cfg) {
  return predict(current, previous, cfg.latency, cfg.zeroMotionEpsilon);
}

enum class AdmitKind { NewSession, Accepted, Fused, Stale, Rejected };

const char* admitKindName(AdmitKind kind);

struct AdmitResult {
  AdmitKind kind = AdmitKind::Rejected;
  std::uint32_t sessionId = 0;
  TimedPoint point;  // the session's current observation after admission
  std::optional<Prediction> prediction;
  std::string reason;  // set for Stale and Rejected
};

struct Session {
  std::uint32_t id = 0;
  std::vector<TimedPoint> history;  // accepted observations, strictly increasing t
};

/// Allow-list of end nodes whose frames are passed on to prediction.
class SecurityFilter {
 public:
  SecurityFilter() = default;
  explicit SecurityFilter(std::set<Side> allowed) : allowed_(std::move(allowed)) {}

  bool admit(Side side) {
    if (allowed_.count(side)) return true;
    ++rejected_;
    return false;
  }
  std::size_t rejected() const { return rejected_; }

 private:
  std::set<Side> allowed_{Side::A, Side::B, Side::C, Side::D};
  std::size_t rejected_ = 0;
};

/// Fog-side location predictor. Readings are admitted in arrival order; each
/// one joins the current observation when its sensing time lies within the
/// tolerance window of that observation, otherwise it becomes a new
/// observation. Observations more than `timeThreshold` apart start a new
/// session. Every observation after the first of a session yields a
/// prediction from the last two observations.
class Predictor {
 public:
  using Resolver = std::function<Point(const ReadingMessage&)>;

  Predictor(PredictorConfig cfg, Resolver resolver);
  /// Resolves representatives through the layout's position map.
  Predictor(PredictorConfig cfg, const SensorLayout& layout, const PositionMap& positions);

  AdmitResult admit(const ReadingMessage& msg, double now);
  /// Admission of an already resolved observation.
  AdmitResult admitObservation(Point representative, double timestamp, double now);

  const PredictorConfig& config() const { return cfg_; }
  const std::vector<Session>& sessions() const { return sessions_; }
  const std::vector<Prediction>& predictions() const { return predictions_; }
  std::size_t staleCount() const { return stale_; }
  std::size_t rejectedCount() const { return rejected_; }

 private:
  struct Window {
    double first = 0.0;
    double last = 0.0;
    std::vector<Point> members;
  };

  std::optional<Prediction> predictFromHistory(double now);

  PredictorConfig cfg_;
  Resolver resolver_;
  std::vector<Session> sessions_;
  Window window_;
  std::vector<Prediction> predictions_;
  std::size_t stale_ = 0;
  std::size_t rejected_ = 0;
};

enum class AlertKind { PossibleInvasion, Confirmed };

const char* alertKindName(AlertKind kind);

struct Alert {
  AlertKind kind = AlertKind::PossibleInvasion;
  std::uint32_t sessionId = 0;
  Point position;
  Side side = Side::A;
  std::optional<std::string> species;
  double emittedAt = 0.0;
};

/// Notification log. Each alert leaves `lteDelay` seconds after it is raised.
class Notifier {
 public:
  explicit Notifier(double lteDelay = 0.1);

  /// Throws ValidationError if a confirmed alert lacks a species or a
  /// possible-invasion alert carries one.
  const Alert& emit(AlertKind kind, std::uint32_t sessionId, Point position, Side side,
                    std::optional<std::string> species, double now);

  const std::vector<Alert>& log() const { return log_; }
  double lteDelay() const { return lteDelay_; }

 private:
  double lteDelay_;
  std::vector<Alert> log_;
};

/// Side whose outward band is nearest to `p`.
Side nearestSide(const FieldSpec& field, Point p);

std::string predictionsCsv(const std::vector<Prediction>& predictions, const std::string& scope = {});
std::string alertsCsv(const std::vector<Alert>& alerts, const std::string& scope = {});

}  // namespace fencesim
