#include "fencesim/cli.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "fencesim/camera.hpp"
#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"
#include "fencesim/harness.hpp"
#include "fencesim/scenario.hpp"

namespace fencesim {

namespace {

std::string orientationName(Orientation o) {
  return o == Orientation::VerticalDown ? "verticalDown" : "horizontalOutward";
}

std::string shapeName(const CoverageShape& c) { return c.isDisk() ? "disk" : "triangle"; }

std::vector<std::string> signatureNames(const Signature& sig, const SensorLayout& layout) {
  std::vector<std::string> names;
  for (const auto& id : sig) names.push_back(sensorName(layout.sensor(id)));
  return names;
}

std::uint64_t effectiveSeed(const Scenario& sc, std::optional<std::uint64_t> flag) {
  if (flag) return *flag;
  if (auto env = seedFromEnvironment()) return *env;
  return sc.seed;
}

int simulate(const std::vector<std::string>& paths, const std::string& outDir, std::optional<std::uint64_t> seed,
             unsigned jobs, std::ostream& out) {
  // Load everything first so a bad file aborts before any output is written.
  std::vector<Scenario> scenarios;
  for (const auto& p : paths) {
    scenarios.push_back(loadScenario(p));
    scenarios.back().seed = effectiveSeed(scenarios.back(), seed);
  }
  std::vector<std::filesystem::path> dirs;
  for (const auto& sc : scenarios) {
    std::filesystem::path dir;
    if (!outDir.empty())
      dir = scenarios.size() == 1 ? std::filesystem::path(outDir) : std::filesystem::path(outDir) / sc.name;
    else
      dir = sc.outputDir.empty() ? std::filesystem::path("out") / sc.name : sc.outputDir;
    dirs.push_back(dir);
  }
  for (std::size_t i = 0; i < dirs.size(); ++i)
    for (std::size_t j = i + 1; j < dirs.size(); ++j)
      if (dirs[i] == dirs[j]) throw ValidationError("output", "scenarios share output directory " + dirs[i].string());

  std::vector<std::optional<SimReport>> reports(scenarios.size());
  std::vector<std::exception_ptr> failures(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        SimReport r = runScenario(scenarios[i]);
        writeReport(r, dirs[i]);
        reports[i] = std::move(r);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(scenarios.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  for (std::size_t i = 0; i < reports.size(); ++i) {
    const SimReport& r = *reports[i];
    out << fmt::format("{}: layout {} seed {}, {} movements, {} insufficient, {} sessions, {} possible / {} confirmed alerts -> {}\n",
                       r.scenario, layoutLabel(r.layout), r.seed, r.movements.size(), r.insufficientCount(),
                       r.sessionCount(), r.alertCount(AlertKind::PossibleInvasion), r.alertCount(AlertKind::Confirmed),
                       dirs[i].string());
  }
  return kExitOk;
}

int pixelTable(const std::string& config, std::optional<std::vector<double>> distances,
               std::optional<std::vector<double>> animalSize, std::ostream& out) {
  CameraSpec cam;
  AnimalSize animal;
  std::vector<double> ds{10, 20, 30, 40, 50, 60, 70, 80};
  if (!config.empty()) {
    const Scenario sc = loadScenario(config);
    cam = sc.camera;
    animal = sc.animal;
    ds = sc.pixelDistances;
  }
  if (distances) ds = *distances;
  if (animalSize) {
    animal.length = (*animalSize)[0];
    animal.height = (*animalSize)[1];
  }
  if (!(animal.length >= 0.0) || !(animal.height >= 0.0)) throw ValidationError("animal", "sizes must be >= 0");
  std::string csv = csvRow({"distance", "pixelsW", "pixelsH"});
  for (double d : ds) {
    if (!(d > 0.0)) throw ValidationError("distances", "must be positive, got " + fixed(d, 3));
    const PixelFootprint px = pixelOccupancy(cam, d, animal);
    csv += csvRow({fmt::format("{:g}", d), std::to_string(px.width), std::to_string(px.height)});
  }
  out << csv;
  return kExitOk;
}

int layoutCmd(const std::string& path, const std::string& exportPath, const std::string& format, std::ostream& out) {
  const Scenario sc = loadScenario(path);
  const SensorLayout layout = buildLayout(sc.field, sc.pir, sc.layoutKind, sc.layoutParams);
  const PositionMap positions = buildPositionMap(layout, sc.gridResolution);
  const double blind = blindAreaFraction(layout, sc.blindBand, sc.gridResolution);

  std::string fmtName = format;
  if (fmtName.empty()) {
    fmtName = std::filesystem::path(exportPath).extension() == ".csv" ? "csv" : "json";
  }
  const std::string text = fmtName == "csv" ? layoutCsv(layout, positions, sc.blindBand, blind)
                                            : layoutJson(layout, positions, sc.blindBand, blind);
  if (exportPath.empty()) {
    out << text;
  } else {
    writeFileAtomic(exportPath, text);
    out << fmt::format("layout {}: {} sensors, {} regions, blind fraction {:.4f} over band {:g} m -> {}\n",
                       layoutLabel(layout.kind), layout.sensors.size(), positions.regions().size(), blind,
                       sc.blindBand, exportPath);
  }
  return kExitOk;
}

int budgetCmd(const std::string& config, std::ostream& out) {
  std::vector<LatencyStep> steps = defaultLatencySteps();
  std::vector<CostItem> items = defaultCostItems();
  if (!config.empty()) {
    const Scenario sc = loadScenario(config);
    steps = sc.latencySteps;
    items = sc.costItems;
  }
  const LatencyBudget lb = latencyBudget(steps);
  const CostSheet cs = costSheet(items);
  out << latencyCsv(lb) << "\n" << costCsv(cs);
  return kExitOk;
}

}  // namespace

std::string layoutJson(const SensorLayout& layout, const PositionMap& positions, double blindBand,
                       double blindFraction) {
  using nlohmann::json;
  json sensors = json::array();
  for (const auto& s : layout.sensors) {
    json shape;
    if (s.coverage.isDisk()) {
      const Disk& d = s.coverage.disk();
      shape = {{"type", "disk"}, {"center", {d.center.x, d.center.y}}, {"radius", d.radius}};
    } else {
      json verts = json::array();
      for (const Point& v : s.coverage.triangle().vertices()) verts.push_back({v.x, v.y});
      shape = {{"type", "triangle"}, {"vertices", verts}};
    }
    sensors.push_back({{"id", s.id.value},
                       {"name", sensorName(s)},
                       {"side", std::string(1, sideLabel(s.pose.side))},
                       {"index", s.pose.indexOnSide},
                       {"position", {s.pose.position.x, s.pose.position.y}},
                       {"mountHeight", s.pose.mountHeight},
                       {"orientation", orientationName(s.pose.orientation)},
                       {"coverage", shape}});
  }
  json regions = json::array();
  const double cellArea = positions.resolution() * positions.resolution();
  for (const auto& r : positions.regions()) {
    regions.push_back({{"id", r.id},
                       {"signature", signatureNames(r.signature, layout)},
                       {"representative", {r.representative.x, r.representative.y}},
                       {"cells", r.cells.size()},
                       {"area", static_cast<double>(r.cells.size()) * cellArea}});
  }
  json perSide = json::object();
  for (Side side : kAllSides) perSide[std::string(1, sideLabel(side))] = layout.countOnSide(side);
  json doc = {{"layout", std::string(1, layoutLabel(layout.kind))},
              {"field", {{"width", layout.field.width}, {"height", layout.field.height}}},
              {"spacing", layout.spacing},
              {"rows", layout.rows},
              {"bandDepth", layout.bandDepth},
              {"gridResolution", positions.resolution()},
              {"sensorsPerSide", perSide},
              {"blindBand", blindBand},
              {"blindFraction", blindFraction},
              {"sensors", sensors},
              {"regions", regions}};
  return doc.dump(2) + "\n";
}

std::string layoutCsv(const SensorLayout& layout, const PositionMap& positions, double blindBand,
                      double blindFraction) {
  std::string out = csvRow({"record", "id", "name", "side", "index", "x", "y", "shape", "cells", "signature"});
  for (const auto& s : layout.sensors) {
    out += csvRow({"sensor", std::to_string(s.id.value), sensorName(s), std::string(1, sideLabel(s.pose.side)),
                   std::to_string(s.pose.indexOnSide), fixed(s.pose.position.x), fixed(s.pose.position.y),
                   shapeName(s.coverage), "", ""});
  }
  for (const auto& r : positions.regions()) {
    out += csvRow({"region", std::to_string(r.id), "", "", "", fixed(r.representative.x), fixed(r.representative.y),
                   "", std::to_string(r.cells.size()), signatureName(r.signature, layout)});
  }
  out += csvRow({"blindFraction", "", "", "", "", fixed(blindBand), fixed(blindFraction), "", "", ""});
  return out;
}

int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fog-based animal intrusion simulator", "fencesim"};
  app.require_subcommand(1);

  std::vector<std::string> simPaths;
  std::string simOut;
  std::optional<std::uint64_t> simSeed;
  unsigned simJobs = 1;
  auto* sim = app.add_subcommand("simulate", "Run scenarios and write report files");
  sim->add_option("scenarios", simPaths, "Scenario files")->required();
  sim->add_option("--out", simOut, "Output directory (one subdirectory per scenario when several are given)");
  sim->add_option("--seed", simSeed, "Override the scenario seed and FENCESIM_SEED");
  sim->add_option("--jobs", simJobs, "Scenarios run in parallel")->check(CLI::PositiveNumber);

  std::optional<std::vector<double>> ptDistances;
  std::optional<std::vector<double>> ptAnimal;
  std::string ptConfig;
  auto* pt = app.add_subcommand("pixel-table", "Print the pixel footprint of an animal at several distances");
  pt->add_option("--distances", ptDistances, "Distances in meters")->delimiter(',')->allow_extra_args(true);
  pt->add_option("--animal", ptAnimal, "Animal length and height in meters")->expected(2);
  pt->add_option("--config", ptConfig, "Scenario file providing camera, animal and distances");

  std::string lyPath;
  std::string lyExport;
  std::string lyFormat;
  auto* ly = app.add_subcommand("layout", "Export sensor poses, coverage regions and blind-area fraction");
  ly->add_option("scenario", lyPath, "Scenario file")->required();
  ly->add_option("--export", lyExport, "Output file (.json or .csv); stdout when omitted");
  ly->add_option("--format", lyFormat, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  std::string bgConfig;
  auto* bg = app.add_subcommand("budget", "Print the latency budget and cost sheet");
  bg->add_option("--config", bgConfig, "Scenario file with a budget section");

  std::vector<std::string> reversedArgs(args.rbegin(), args.rend());
  try {
    app.parse(reversedArgs);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  try {
    if (*sim) return simulate(simPaths, simOut, simSeed, simJobs, out);
    if (*pt) return pixelTable(ptConfig, ptDistances, ptAnimal, out);
    if (*ly) return layoutCmd(lyPath, lyExport, lyFormat, out);
    if (*bg) return budgetCmd(bgConfig, out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: invalid " << e.field() << ": " << e.detail() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace fencesim
