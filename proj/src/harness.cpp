#include "fencesim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <queue>
#include <set>
#include <variant>

#include <nlohmann/json.hpp>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"
#include "fencesim/rng.hpp"

namespace fencesim {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

struct FrameArrival {
  Frame frame;
  double enqueuedAt = 0.0;
};

struct CameraInstruction {
  std::uint32_t sessionId = 0;
  Point predicted;
  double basisStart = 0.0;
  double basisEnd = 0.0;
};

struct CameraDone {
  std::size_t step = 0;
};

struct ResultArrival {
  std::size_t step = 0;
};

struct Event {
  double time = 0.0;
  std::uint64_t order = 0;
  std::variant<FrameArrival, CameraInstruction, CameraDone, ResultArrival> payload;
};

struct Later {
  bool operator()(const Event& a, const Event& b) const {
    if (a.time != b.time) return a.time > b.time;
    return a.order > b.order;
  }
};

class Episode {
 public:
  Episode(const Scenario& sc, const SensorLayout& layout, const PositionMap& positions, const LatencyBudget& budget,
          const TrajectoryScript& script, std::uint64_t seed)
      : sc_(sc),
        layout_(layout),
        script_(script),
        budget_(budget),
        rng_(seed),
        gateway_(GatewaySchedule{{0, 1, 2, 3}, sc.link.slotDuration}, sc.link.queueCapacity),
        predictor_(sc.predictor, layout, positions),
        notifier_(sc.lteDelay),
        bearing_(sc.cameraInitialBearingDeg * kDeg) {
    result_.id = script.id;
    result_.detections = generateDetections(script, layout, positions, sc.detection);
  }

  MovementResult run() {
    sendFrames();
    while (!queue_.empty()) {
      Event ev = queue_.top();
      queue_.pop();
      std::visit([&](auto& p) { handle(p, ev.time); }, ev.payload);
    }
    result_.linkTrace = gateway_.trace();
    result_.link = gateway_.stats();
    result_.sessions = predictor_.sessions();
    result_.predictions = predictor_.predictions();
    result_.alerts = notifier_.log();
    result_.stale = predictor_.staleCount();
    result_.rejected = predictor_.rejectedCount();
    result_.securityRejected = security_.rejected();
    evaluate();
    return std::move(result_);
  }

 private:
  void push(double t, auto payload) { queue_.push(Event{t, order_++, std::move(payload)}); }

  // One frame per side whose sensors fired; the gateway is polled per node.
  void sendFrames() {
    std::array<std::uint16_t, 4> seq{};
    for (const auto& det : result_.detections) {
      for (Side side : kAllSides) {
        const std::uint32_t bits = sensorBitsFor(layout_, det.sensorIds, side);
        if (!bits) continue;
        const auto node = static_cast<NodeId>(side);
        const ReadingMessage msg = makeReading(side, bits, det.trueTime, seq[node]++);
        auto arrival = gateway_.deliver(node, msg, sc_.link.uplink.at(side), det.trueTime, rng_);
        if (arrival) push(*arrival, FrameArrival{encodeFrame(msg), det.trueTime});
      }
    }
  }

  void handle(const FrameArrival& ev, double now) {
    ReadingMessage msg;
    try {
      msg = decodeFrame(ev.frame);
    } catch (const DecodeError&) {
      ++result_.decodeErrors;
      return;
    }
    if (!security_.admit(msg.side)) return;
    const AdmitResult r = predictor_.admit(msg, now);
    if (!r.prediction) return;
    const Prediction& p = *r.prediction;
    if (alerted_.insert(p.sessionId).second) {
      notifier_.emit(AlertKind::PossibleInvasion, p.sessionId, p.predicted, nearestSide(sc_.field, p.predicted),
                     std::nullopt, now);
    }
    const auto& history = predictor_.sessions().back().history;
    if (history.size() < sc_.cameraMinReadings) return;
    CameraInstruction instr{p.sessionId, p.predicted, history[history.size() - sc_.cameraMinReadings].t,
                            history.back().t};
    push(now + sc_.computeTime + sampleLatency(sc_.link.downlink, rng_), instr);
  }

  void handle(const CameraInstruction& ev, double now) {
    if (busyUntil_ && *busyUntil_ > now) {
      pending_ = ev;  // only the newest instruction is worth acting on
      pendingAt_ = now;
      return;
    }
    startStep(ev, now, now);
  }

  void startStep(const CameraInstruction& ev, double instructedAt, double now) {
    const CameraSpec& cam = sc_.camera;
    CameraStep step;
    step.sessionId = ev.sessionId;
    step.instructedAt = instructedAt;
    step.startedAt = now;
    step.basisStart = ev.basisStart;
    step.basisEnd = ev.basisEnd;
    step.predicted = ev.predicted;
    step.fromBearing = bearing_;
    const bool degenerate = distance(ev.predicted, cam.position) <= 0.0;
    step.toBearing = degenerate ? bearing_ : bearing(cam.position, ev.predicted);
    step.captureAt = now + rotationTime(cam, step.fromBearing, step.toBearing);
    const double tc = std::clamp(step.captureAt, script_.startTime(), script_.endTime());
    step.actual = positionAt(script_, tc);
    const double range = distance(cam.position, step.actual);
    if (!degenerate && range > 0.0) {
      step.withinFov = evaluatePointing(cam, ev.predicted, step.actual).withinFov;
      step.pixels = pixelOccupancy(cam, range, sc_.animal);
      step.identified = step.withinFov && recognitionGate(step.pixels, cam.model);
    }
    step.doneAt = step.captureAt + cam.captureTime + cam.recognitionLatency;
    bearing_ = step.toBearing;
    busyUntil_ = step.doneAt;
    result_.cameraSteps.push_back(step);
    push(step.doneAt, CameraDone{result_.cameraSteps.size() - 1});
  }

  void handle(const CameraDone& ev, double now) {
    push(now + sampleLatency(sc_.link.resultUplink, rng_), ResultArrival{ev.step});
    if (pending_) {
      CameraInstruction next = *pending_;
      pending_.reset();
      startStep(next, pendingAt_, now);
    }
  }

  void handle(const ResultArrival& ev, double now) {
    const CameraStep& step = result_.cameraSteps[ev.step];
    if (!step.identified || !confirmed_.insert(step.sessionId).second) return;
    const Alert& a = notifier_.emit(AlertKind::Confirmed, step.sessionId, step.actual,
                                    nearestSide(sc_.field, step.actual), sc_.species, now);
    ConfirmedTiming t;
    t.sessionId = step.sessionId;
    t.firstSensing = step.basisStart;
    t.lastSensing = step.basisEnd;
    t.emittedAt = a.emittedAt;
    t.endToEnd = a.emittedAt - step.basisStart;
    t.withinBudget = t.endToEnd >= budget_.totalMin - 1e-9 && t.endToEnd <= budget_.totalMax + 1e-9;
    result_.confirmed.push_back(t);
  }

  void evaluate() {
    double sum = 0.0;
    for (const auto& s : result_.sessions) {
      TripletResult tr = tripletOffsets(result_.id, s.history);
      for (auto& o : tr.samples) {
        sum += o.offset;
        result_.offsets.push_back(o);
      }
    }
    if (!result_.offsets.empty()) result_.averageOffset = sum / static_cast<double>(result_.offsets.size());
  }

  const Scenario& sc_;
  const SensorLayout& layout_;
  const TrajectoryScript& script_;
  const LatencyBudget& budget_;
  Rng rng_;
  Gateway gateway_;
  SecurityFilter security_;
  Predictor predictor_;
  Notifier notifier_;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::uint64_t order_ = 0;
  double bearing_ = 0.0;
  std::optional<double> busyUntil_;
  std::optional<CameraInstruction> pending_;
  double pendingAt_ = 0.0;
  std::set<std::uint32_t> alerted_;
  std::set<std::uint32_t> confirmed_;
  MovementResult result_;
};

void appendCsv(std::string& acc, const std::string& csv) {
  if (acc.empty()) {
    acc = csv;
    return;
  }
  acc.append(csv, csv.find('\n') + 1, std::string::npos);
}

nlohmann::json linkJson(const LinkStats& s) {
  return {{"sent", s.sent},
          {"delivered", s.delivered},
          {"dropped", s.dropped},
          {"meanLatency", s.meanLatency},
          {"maxLatency", s.maxLatency}};
}

}  // namespace

std::vector<TimedPoint> MovementResult::acceptedReadings() const {
  std::vector<TimedPoint> out;
  for (const auto& s : sessions) out.insert(out.end(), s.history.begin(), s.history.end());
  return out;
}

std::size_t SimReport::sessionCount() const {
  std::size_t n = 0;
  for (const auto& m : movements) n += m.sessions.size();
  return n;
}

std::size_t SimReport::alertCount(AlertKind kind) const {
  std::size_t n = 0;
  for (const auto& m : movements)
    n += static_cast<std::size_t>(std::count_if(m.alerts.begin(), m.alerts.end(),
                                                [&](const Alert& a) { return a.kind == kind; }));
  return n;
}

std::size_t SimReport::insufficientCount() const {
  return static_cast<std::size_t>(
      std::count_if(movements.begin(), movements.end(), [](const MovementResult& m) { return !m.averageOffset; }));
}

LinkStats SimReport::linkTotals() const {
  LinkStats t;
  double latencySum = 0.0;
  for (const auto& m : movements) {
    t.sent += m.link.sent;
    t.delivered += m.link.delivered;
    t.dropped += m.link.dropped;
    latencySum += m.link.meanLatency * static_cast<double>(m.link.delivered);
    t.maxLatency = std::max(t.maxLatency, m.link.maxLatency);
  }
  if (t.delivered) t.meanLatency = latencySum / static_cast<double>(t.delivered);
  return t;
}

SimReport runScenario(const Scenario& sc) {
  sc.validate();
  SimReport report;
  report.scenario = sc.name;
  report.layout = sc.layoutKind;
  report.seed = sc.seed;

  const SensorLayout layout = buildLayout(sc.field, sc.pir, sc.layoutKind, sc.layoutParams);
  const PositionMap positions = buildPositionMap(layout, sc.gridResolution);
  report.sensorCount = layout.sensors.size();
  for (const auto& sensor : layout.sensors) report.sensorNames.push_back(sensorName(sensor));
  report.regionCount = positions.regions().size();
  report.bandDepth = layout.bandDepth;
  report.blindBand = sc.blindBand;
  report.blindFraction = blindAreaFraction(layout, sc.blindBand, sc.gridResolution);
  report.placement = placementCheck(sc.camera, layout);
  report.cameraModel = sc.camera.model;
  report.captureTime = sc.camera.captureTime;
  report.recognitionLatency = sc.camera.recognitionLatency;
  report.latency = latencyBudget(sc.latencySteps);
  report.cost = costSheet(sc.costItems);

  std::vector<std::optional<double>> averages;
  for (std::size_t i = 0; i < sc.trajectories.size(); ++i) {
    Episode ep(sc, layout, positions, report.latency, sc.trajectories[i], Rng::mix(sc.seed, i));
    report.movements.push_back(ep.run());
    averages.push_back(report.movements.back().averageOffset);
  }
  report.accuracy = accuracyTable(averages, sc.cameraDistances, sc.camera.hfovDeg);
  return report;
}

std::vector<std::string> reportFileNames() {
  return {"report.json",  "readings.csv",    "detections.csv", "offsets.csv", "accuracy.csv", "latency.csv",
          "cost.csv",     "alerts.csv",      "predictions.csv", "link.csv",   "camera.csv"};
}

std::string reportJson(const SimReport& r) {
  using nlohmann::json;
  json movements = json::array();
  for (const auto& m : r.movements) {
    json readings = json::array();
    for (const auto& p : m.acceptedReadings()) readings.push_back({p.position.x, p.position.y, p.t});
    std::size_t possible = 0;
    std::size_t confirmed = 0;
    for (const auto& a : m.alerts) (a.kind == AlertKind::Confirmed ? confirmed : possible)++;
    movements.push_back({{"id", m.id},
                         {"detections", m.detections.size()},
                         {"sessions", m.sessions.size()},
                         {"readings", readings},
                         {"samples", m.offsets.size()},
                         {"averageOffset", m.averageOffset ? json(*m.averageOffset) : json(nullptr)},
                         {"insufficientReadings", !m.averageOffset},
                         {"predictions", m.predictions.size()},
                         {"cameraSteps", m.cameraSteps.size()},
                         {"possibleInvasionAlerts", possible},
                         {"confirmedAlerts", confirmed},
                         {"staleReadings", m.stale},
                         {"rejectedReadings", m.rejected},
                         {"link", linkJson(m.link)}});
  }
  json accuracy = json::array();
  for (const auto& a : r.accuracy)
    accuracy.push_back({{"cameraDistance", a.cameraDistance},
                        {"accurate", a.accurate},
                        {"total", a.total},
                        {"percent", a.percent}});
  json steps = json::array();
  for (const auto& s : r.latency.steps) steps.push_back({{"name", s.name}, {"min", s.minSeconds}, {"max", s.maxSeconds}});
  json items = json::array();
  for (const auto& c : r.cost.items)
    items.push_back({{"device", c.device}, {"unitCost", c.unitCost}, {"quantity", c.quantity}, {"lineTotal", c.lineTotal()}});

  json timings = json::array();
  std::size_t within = 0;
  for (const auto& m : r.movements)
    for (const auto& t : m.confirmed) {
      within += t.withinBudget ? 1 : 0;
      timings.push_back({{"movement", m.id}, {"sessionId", t.sessionId}, {"endToEnd", t.endToEnd},
                         {"withinBudget", t.withinBudget}});
    }

  json doc = {
      {"scenario", r.scenario},
      {"layout", std::string(1, layoutLabel(r.layout))},
      {"seed", r.seed},
      {"sensors", r.sensorCount},
      {"regions", r.regionCount},
      {"bandDepth", r.bandDepth},
      {"blindBand", r.blindBand},
      {"blindFraction", r.blindFraction},
      {"cameraPlacement",
       {{"maxDistance", r.placement.maxDistance}, {"tooFar", r.placement.tooFar}, {"optimal", r.placement.optimal}}},
      {"movements", movements},
      {"insufficientMovements", r.insufficientCount()},
      {"accuracy", accuracy},
      {"latencyBudget", {{"steps", steps}, {"totalMin", r.latency.totalMin}, {"totalMax", r.latency.totalMax}}},
      {"cost", {{"items", items}, {"total", r.cost.total}}},
      {"alerts",
       {{"sessions", r.sessionCount()},
        {"possibleInvasion", r.alertCount(AlertKind::PossibleInvasion)},
        {"confirmed", r.alertCount(AlertKind::Confirmed)},
        {"confirmedWithinBudget", within},
        {"confirmedTimings", timings}}},
      {"link", linkJson(r.linkTotals())},
  };
  return doc.dump(2) + "\n";
}

void writeReport(const SimReport& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  std::string readings = csvRow({"movementId", "sessionId", "index", "x", "y", "t"});
  std::string detections, offsets, alerts, predictions, link;
  std::string camera = csvRow({"movementId", "sessionId", "issuedAt", "startedAt", "bearingFrom", "bearingTo",
                               "rotateS", "captureS", "recognizeS", "withinFov", "pixelsW", "pixelsH", "model",
                               "identified", "predictedX", "predictedY", "actualX", "actualY"});
  for (const auto& m : r.movements) {
    for (const auto& s : m.sessions)
      for (std::size_t i = 0; i < s.history.size(); ++i)
        readings += csvRow({m.id, std::to_string(s.id), std::to_string(i), fixed(s.history[i].position.x),
                            fixed(s.history[i].position.y), fixed(s.history[i].t)});
    std::string det = csvRow({"movementId", "trueTime", "trueX", "trueY", "repX", "repY", "sensors"});
    for (const auto& d : m.detections) {
      std::string ids;
      for (const auto& id : d.sensorIds) {
        if (!ids.empty()) ids += ';';
        ids += id.value < r.sensorNames.size() ? r.sensorNames[id.value] : std::to_string(id.value);
      }
      det += csvRow({m.id, fixed(d.trueTime), fixed(d.truePosition.x), fixed(d.truePosition.y),
                     fixed(d.regionRepresentative.x), fixed(d.regionRepresentative.y), ids});
    }
    appendCsv(detections, det);
    appendCsv(offsets, offsetsCsv(m.offsets));
    appendCsv(alerts, alertsCsv(m.alerts, m.id));
    appendCsv(predictions, predictionsCsv(m.predictions, m.id));
    appendCsv(link, linkTraceCsv(m.linkTrace, m.id));
    for (const auto& c : m.cameraSteps)
      camera += csvRow({m.id, std::to_string(c.sessionId), fixed(c.instructedAt), fixed(c.startedAt),
                        fixed(c.fromBearing), fixed(c.toBearing), fixed(c.captureAt - c.startedAt),
                        fixed(r.captureTime), fixed(r.recognitionLatency), c.withinFov ? "1" : "0",
                        std::to_string(c.pixels.width), std::to_string(c.pixels.height), r.cameraModel,
                        c.identified ? "1" : "0", fixed(c.predicted.x), fixed(c.predicted.y), fixed(c.actual.x),
                        fixed(c.actual.y)});
  }
  if (detections.empty()) detections = csvRow({"movementId", "trueTime", "trueX", "trueY", "repX", "repY", "sensors"});
  if (offsets.empty()) offsets = offsetsCsv({});
  if (alerts.empty()) alerts = alertsCsv({});
  if (predictions.empty()) predictions = predictionsCsv({});
  if (link.empty()) link = linkTraceCsv({});

  writeFileAtomic(dir / "report.json", reportJson(r));
  writeFileAtomic(dir / "readings.csv", readings);
  writeFileAtomic(dir / "detections.csv", detections);
  writeFileAtomic(dir / "offsets.csv", offsets);
  writeFileAtomic(dir / "accuracy.csv", accuracyCsv(r.accuracy));
  writeFileAtomic(dir / "latency.csv", latencyCsv(r.latency));
  writeFileAtomic(dir / "cost.csv", costCsv(r.cost));
  writeFileAtomic(dir / "alerts.csv", alerts);
  writeFileAtomic(dir / "predictions.csv", predictions);
  writeFileAtomic(dir / "link.csv", link);
  writeFileAtomic(dir / "camera.csv", camera);
}

}  // namespace fencesim
