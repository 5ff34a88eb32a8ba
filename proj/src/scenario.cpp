#include "fencesim/scenario.hpp"

#include <cmath>
#include <algorithm>
#include <cstdlib>
#include <initializer_list>
#include <set>

#include <nlohmann/json.hpp>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"

namespace fencesim {

using nlohmann::json;

namespace {

void checkKeys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ValidationError(where, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, value] : j.items()) {
    if (!ok.count(key)) throw ValidationError(where.empty() ? key : where + "." + key, "unknown key");
  }
}

std::string join(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

double getNumber(const json& j, const std::string& where, const std::string& key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ValidationError(join(where, key), "expected a number");
  double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(join(where, key), "must be finite");
  return d;
}

std::size_t getCount(const json& j, const std::string& where, const std::string& key, std::size_t fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<std::int64_t>() >= 0))
    throw ValidationError(join(where, key), "expected a non-negative integer");
  return v.get<std::size_t>();
}

std::string getString(const json& j, const std::string& where, const std::string& key, std::string fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_string()) throw ValidationError(join(where, key), "expected a string");
  return j.at(key).get<std::string>();
}

std::vector<double> getNumbers(const json& j, const std::string& where, const std::string& key,
                               std::vector<double> fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array()) throw ValidationError(join(where, key), "expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ValidationError(join(where, key), "expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Point getPoint(const json& j, const std::string& where, const std::string& key, Point fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
    throw ValidationError(join(where, key), "expected [x, y]");
  return {v[0].get<double>(), v[1].get<double>()};
}

// A link profile is either the name of a measured configuration or an object
// that may start from one ("base") and override individual fields.
LinkProfile parseProfile(const json& j, const std::string& where, const LinkProfile& fallback) {
  LinkProfile p = fallback;
  if (j.is_string()) {
    try {
      p = measuredProfile(j.get<std::string>());
    } catch (const ValidationError& e) {
      throw ValidationError(where, e.detail());
    }
  } else {
    checkKeys(j, where,
              {"base", "name", "senderHeightFt", "receiverHeightFt", "distanceM", "baseLatency", "jitterFraction"});
    if (j.contains("base")) p = parseProfile(j.at("base"), where + ".base", fallback);
    p.name = getString(j, where, "name", p.name);
    p.senderHeightFt = getNumber(j, where, "senderHeightFt", p.senderHeightFt);
    p.receiverHeightFt = getNumber(j, where, "receiverHeightFt", p.receiverHeightFt);
    p.distanceM = getNumber(j, where, "distanceM", p.distanceM);
    p.baseLatency = getNumber(j, where, "baseLatency", p.baseLatency);
    p.jitterFraction = getNumber(j, where, "jitterFraction", p.jitterFraction);
  }
  try {
    p.validate();
  } catch (const ValidationError& e) {
    throw ValidationError(where + "." + e.field(), e.detail());
  }
  return p;
}

LinkConfig parseLink(const json& j, LinkConfig cfg) {
  const std::string w = "link";
  checkKeys(j, w, {"uplink", "uplinkBySide", "downlink", "resultUplink", "slotDuration", "queueCapacity", "jitterFraction"});
  if (j.contains("uplink")) {
    LinkProfile p = parseProfile(j.at("uplink"), "link.uplink", cfg.uplink.at(Side::A));
    for (Side s : kAllSides) cfg.uplink[s] = p;
  }
  if (j.contains("uplinkBySide")) {
    const auto& bySide = j.at("uplinkBySide");
    checkKeys(bySide, "link.uplinkBySide", {"A", "B", "C", "D"});
    for (const auto& [key, value] : bySide.items()) {
      Side s = *sideFromLabel(key[0]);
      cfg.uplink[s] = parseProfile(value, "link.uplinkBySide." + key, cfg.uplink.at(s));
    }
  }
  if (j.contains("downlink")) cfg.downlink = parseProfile(j.at("downlink"), "link.downlink", cfg.downlink);
  if (j.contains("resultUplink"))
    cfg.resultUplink = parseProfile(j.at("resultUplink"), "link.resultUplink", cfg.resultUplink);
  // Convenience override applied after the profiles, e.g. 0 for exact runs.
  if (j.contains("jitterFraction")) {
    double jf = getNumber(j, w, "jitterFraction", 0.0);
    for (auto& [s, p] : cfg.uplink) p.jitterFraction = jf;
    cfg.downlink.jitterFraction = jf;
    cfg.resultUplink.jitterFraction = jf;
    if (!(jf >= 0.0 && jf <= 0.5)) throw ValidationError("link.jitterFraction", "must be in [0, 0.5]");
  }
  cfg.slotDuration = getNumber(j, w, "slotDuration", cfg.slotDuration);
  cfg.queueCapacity = getCount(j, w, "queueCapacity", cfg.queueCapacity);
  return cfg;
}

}  // namespace

LinkConfig defaultLinkConfig() {
  LinkConfig cfg;
  for (Side s : kAllSides) cfg.uplink[s] = measuredProfile("row2");
  cfg.downlink = LinkProfile{"instruction", 4.0, 35.0, 25.0, 1.0, 0.1};
  cfg.resultUplink = LinkProfile{"result", 35.0, 4.0, 25.0, 1.0, 0.1};
  return cfg;
}

void Scenario::validate() const {
  auto checkProfile = [](const LinkProfile& p, const std::string& where) {
    try {
      p.validate();
    } catch (const ValidationError& e) {
      throw ValidationError(where + "." + e.field(), e.detail());
    }
  };
  field.validate();
  pir.validate();
  if (!(gridResolution > 0.0)) throw ValidationError("gridResolution", "must be positive");
  if (!(blindBand > 0.0)) throw ValidationError("blindBand", "must be positive");
  for (const auto& t : trajectories) t.validate();
  detection.validate();
  for (const auto& [s, p] : link.uplink) checkProfile(p, std::string("link.uplinkBySide.") + sideLabel(s));
  checkProfile(link.downlink, "link.downlink");
  checkProfile(link.resultUplink, "link.resultUplink");
  if (!(link.slotDuration > 0.0)) throw ValidationError("link.slotDuration", "must be positive");
  if (link.queueCapacity < 1) throw ValidationError("link.queueCapacity", "must be at least 1");
  predictor.validate();
  if (!(computeTime >= 0.0)) throw ValidationError("predictor.computeTime", "must be >= 0");
  if (cameraMinReadings < 2) throw ValidationError("predictor.cameraMinReadings", "must be at least 2");
  camera.validate();
  if (!(animal.length >= 0.0) || !(animal.height >= 0.0)) throw ValidationError("animal", "sizes must be >= 0");
  if (species.empty()) throw ValidationError("animal.species", "must not be empty");
  if (!(lteDelay >= 0.0)) throw ValidationError("alerts.lteDelay", "must be >= 0");
  for (double d : cameraDistances)
    if (!(d > 0.0)) throw ValidationError("evaluation.cameraDistances", "must be positive");
  for (double d : pixelDistances)
    if (!(d > 0.0)) throw ValidationError("pixelTable.distances", "must be positive");
  latencyBudget(latencySteps);
  costSheet(costItems);
}

Scenario scenarioFromJson(const json& doc, const std::filesystem::path& baseDir) {
  checkKeys(doc, "",
            {"version", "name", "description", "seed", "field", "pir", "layout", "gridResolution", "blindBand",
             "trajectories", "movements", "detection", "link", "predictor", "camera", "animal", "alerts",
             "evaluation", "pixelTable", "budget", "output"});
  if (!doc.contains("version")) throw ValidationError("version", "missing");
  if (!doc.at("version").is_number_integer() || doc.at("version").get<int>() != kScenarioVersion)
    throw ValidationError("version", "unsupported version, expected " + std::to_string(kScenarioVersion));

  Scenario sc;
  sc.name = getString(doc, "", "name", "scenario");
  getString(doc, "", "description", "");
  if (doc.contains("seed")) {
    const auto& s = doc.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<std::int64_t>() >= 0))
      throw ValidationError("seed", "expected a non-negative integer");
    sc.seed = s.get<std::uint64_t>();
  }

  if (doc.contains("field")) {
    const auto& j = doc.at("field");
    checkKeys(j, "field", {"width", "height"});
    sc.field.width = getNumber(j, "field", "width", sc.field.width);
    sc.field.height = getNumber(j, "field", "height", sc.field.height);
  }
  if (doc.contains("pir")) {
    const auto& j = doc.at("pir");
    checkKeys(j, "pir", {"maxDistance", "baseDiameter"});
    sc.pir.maxDistance = getNumber(j, "pir", "maxDistance", sc.pir.maxDistance);
    sc.pir.baseDiameter = getNumber(j, "pir", "baseDiameter", sc.pir.baseDiameter);
  }
  if (doc.contains("layout")) {
    const auto& j = doc.at("layout");
    checkKeys(j, "layout", {"kind", "spacing", "verticalHeight", "horizontalHeight", "maxGap"});
    std::string kind = getString(j, "layout", "kind", "A");
    auto k = kind.size() == 1 ? layoutFromLabel(kind[0]) : std::nullopt;
    if (!k) throw ValidationError("layout.kind", "expected one of A, B, C");
    sc.layoutKind = *k;
    sc.layoutParams = defaultLayoutParams(*k);
    sc.layoutParams.spacing = getNumber(j, "layout", "spacing", sc.layoutParams.spacing);
    sc.layoutParams.verticalHeight = getNumber(j, "layout", "verticalHeight", sc.layoutParams.verticalHeight);
    sc.layoutParams.horizontalHeight = getNumber(j, "layout", "horizontalHeight", sc.layoutParams.horizontalHeight);
    sc.layoutParams.maxGap = getNumber(j, "layout", "maxGap", sc.layoutParams.maxGap);
  }
  sc.gridResolution = getNumber(doc, "", "gridResolution", sc.gridResolution);
  sc.blindBand = getNumber(doc, "", "blindBand", sc.blindBand);

  if (doc.contains("trajectories")) {
    const auto& t = doc.at("trajectories");
    try {
      if (t.is_string()) {
        sc.trajectoriesPath = baseDir / t.get<std::string>();
        sc.trajectories = loadTrajectories(sc.trajectoriesPath);
      } else {
        sc.trajectories = parseTrajectories(t);
      }
    } catch (const ValidationError& e) {
      throw ValidationError("trajectories." + e.field(), e.detail());
    }
  }
  if (doc.contains("movements")) {
    const auto& m = doc.at("movements");
    if (!m.is_array()) throw ValidationError("movements", "expected an array of trajectory ids");
    std::vector<TrajectoryScript> picked;
    for (const auto& id : m) {
      if (!id.is_string()) throw ValidationError("movements", "expected an array of trajectory ids");
      auto it = std::find_if(sc.trajectories.begin(), sc.trajectories.end(),
                             [&](const TrajectoryScript& s) { return s.id == id.get<std::string>(); });
      if (it == sc.trajectories.end()) throw ValidationError("movements", "unknown trajectory " + id.get<std::string>());
      picked.push_back(*it);
    }
    sc.trajectories = std::move(picked);
  }

  if (doc.contains("detection")) {
    const auto& j = doc.at("detection");
    checkKeys(j, "detection", {"sampleStep", "retrigger"});
    sc.detection.sampleStep = getNumber(j, "detection", "sampleStep", sc.detection.sampleStep);
    sc.detection.retrigger = getNumber(j, "detection", "retrigger", sc.detection.retrigger);
  }
  if (doc.contains("link")) sc.link = parseLink(doc.at("link"), sc.link);
  if (doc.contains("predictor")) {
    const auto& j = doc.at("predictor");
    const std::string w = "predictor";
    checkKeys(j, w, {"timeThreshold", "timeTolerance", "latency", "zeroMotionEpsilon", "computeTime", "cameraMinReadings"});
    sc.predictor.timeThreshold = getNumber(j, w, "timeThreshold", sc.predictor.timeThreshold);
    sc.predictor.timeTolerance = getNumber(j, w, "timeTolerance", sc.predictor.timeTolerance);
    sc.predictor.latency = getNumber(j, w, "latency", sc.predictor.latency);
    sc.predictor.zeroMotionEpsilon = getNumber(j, w, "zeroMotionEpsilon", sc.predictor.zeroMotionEpsilon);
    sc.computeTime = getNumber(j, w, "computeTime", sc.computeTime);
    sc.cameraMinReadings = getCount(j, w, "cameraMinReadings", sc.cameraMinReadings);
  }
  sc.camera.position = {sc.field.width / 2.0, -sc.field.height / 2.0};
  if (doc.contains("camera")) {
    const auto& j = doc.at("camera");
    const std::string w = "camera";
    checkKeys(j, w, {"position", "hfov", "vfov", "resolution", "angularSpeed", "captureTime", "model",
                     "recognitionLatency", "initialBearing"});
    auto& c = sc.camera;
    c.position = getPoint(j, w, "position", c.position);
    c.hfovDeg = getNumber(j, w, "hfov", c.hfovDeg);
    c.vfovDeg = getNumber(j, w, "vfov", c.vfovDeg);
    if (j.contains("resolution")) {
      const auto& r = j.at("resolution");
      if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
        throw ValidationError("camera.resolution", "expected [width, height] in pixels");
      c.resolutionW = r[0].get<int>();
      c.resolutionH = r[1].get<int>();
    }
    c.angularSpeedDeg = getNumber(j, w, "angularSpeed", c.angularSpeedDeg);
    c.captureTime = getNumber(j, w, "captureTime", c.captureTime);
    c.model = getString(j, w, "model", c.model);
    std::optional<double> measured = inferenceLatency(c.model);
    c.recognitionLatency = getNumber(j, w, "recognitionLatency", measured.value_or(c.recognitionLatency));
    if (!j.contains("recognitionLatency") && !measured)
      throw ValidationError("camera.recognitionLatency", "no measured latency for model " + c.model);
    sc.cameraInitialBearingDeg = getNumber(j, w, "initialBearing", sc.cameraInitialBearingDeg);
  }
  if (doc.contains("animal")) {
    const auto& j = doc.at("animal");
    checkKeys(j, "animal", {"length", "height", "species"});
    sc.animal.length = getNumber(j, "animal", "length", sc.animal.length);
    sc.animal.height = getNumber(j, "animal", "height", sc.animal.height);
    sc.species = getString(j, "animal", "species", sc.species);
  }
  if (doc.contains("alerts")) {
    const auto& j = doc.at("alerts");
    checkKeys(j, "alerts", {"lteDelay"});
    sc.lteDelay = getNumber(j, "alerts", "lteDelay", sc.lteDelay);
  }
  if (doc.contains("evaluation")) {
    const auto& j = doc.at("evaluation");
    checkKeys(j, "evaluation", {"cameraDistances"});
    sc.cameraDistances = getNumbers(j, "evaluation", "cameraDistances", sc.cameraDistances);
  }
  if (doc.contains("pixelTable")) {
    const auto& j = doc.at("pixelTable");
    checkKeys(j, "pixelTable", {"distances"});
    sc.pixelDistances = getNumbers(j, "pixelTable", "distances", sc.pixelDistances);
  }
  if (doc.contains("budget")) {
    const auto& j = doc.at("budget");
    checkKeys(j, "budget", {"latency", "cost"});
    if (j.contains("latency")) {
      const auto& arr = j.at("latency");
      if (!arr.is_array()) throw ValidationError("budget.latency", "expected an array");
      sc.latencySteps.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = "budget.latency[" + std::to_string(i) + "]";
        checkKeys(arr[i], w, {"name", "min", "max"});
        LatencyStep s;
        s.name = getString(arr[i], w, "name", "step " + std::to_string(i + 1));
        s.minSeconds = getNumber(arr[i], w, "min", 0.0);
        s.maxSeconds = getNumber(arr[i], w, "max", s.minSeconds);
        sc.latencySteps.push_back(s);
      }
    }
    if (j.contains("cost")) {
      const auto& arr = j.at("cost");
      if (!arr.is_array()) throw ValidationError("budget.cost", "expected an array");
      sc.costItems.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string w = "budget.cost[" + std::to_string(i) + "]";
        checkKeys(arr[i], w, {"device", "unitCost", "quantity"});
        CostItem c;
        c.device = getString(arr[i], w, "device", "item " + std::to_string(i + 1));
        c.unitCost = getNumber(arr[i], w, "unitCost", 0.0);
        c.quantity = getNumber(arr[i], w, "quantity", 1.0);
        sc.costItems.push_back(c);
      }
    }
  }
  if (doc.contains("output")) sc.outputDir = baseDir / getString(doc, "", "output", "");

  sc.validate();
  return sc;
}

Scenario loadScenario(const std::filesystem::path& path) {
  const std::string text = readFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw IoError("malformed JSON in " + path.string() + ": " + e.what());
  }
  return scenarioFromJson(doc, path.parent_path());
}

std::optional<std::uint64_t> seedFromEnvironment() {
  const char* raw = std::getenv("FENCESIM_SEED");
  if (!raw || !*raw) return std::nullopt;
  std::string s(raw);
  if (s.find_first_not_of("0123456789") != std::string::npos)
    throw ValidationError("FENCESIM_SEED", "expected an unsigned integer");
  try {
    return std::stoull(s);
  } catch (const std::exception&) {
    throw ValidationError("FENCESIM_SEED", "out of range");
  }
}

}  // namespace fencesim
