#include "fencesim/evaluation.hpp"

#include <cmath>
#include <numbers>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"

namespace fencesim {

PredictFn algorithmPredictor() {
  return [](const TimedPoint& previous, const TimedPoint& current, double lead) {
    return predict(current, previous, lead).predicted;
  };
}

TripletResult tripletOffsets(const std::string& movementId, std::span<const TimedPoint> readings,
                             const PredictFn& predictFn) {
  TripletResult out;
  const std::size_t n = readings.size();
  if (n < 3) {
    out.insufficient = true;
    return out;
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(readings[i].t > readings[i - 1].t))
      throw ValidationError("readings", "must be strictly time-ordered");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      for (std::size_t k = j + 1; k < n; ++k) {
        OffsetSample s;
        s.movementId = movementId;
        s.triplet = {i, j, k};
        s.readings = {readings[i], readings[j], readings[k]};
        s.predicted = predictFn(readings[i], readings[j], readings[k].t - readings[j].t);
        s.actual = readings[k].position;
        s.offset = distance(s.predicted, s.actual);
        out.samples.push_back(s);
      }
    }
  }
  return out;
}

std::vector<AccuracyRow> accuracyTable(std::span<const std::optional<double>> avgOffsets,
                                       std::span<const double> cameraDistances, double hfovDeg) {
  if (!(hfovDeg > 0.0 && hfovDeg < 180.0)) throw ValidationError("hfov", "must be in (0, 180)");
  const double half = hfovDeg / 2.0 * std::numbers::pi / 180.0;
  std::vector<AccuracyRow> rows;
  for (double d : cameraDistances) {
    if (!(d > 0.0)) throw ValidationError("cameraDistances", "must be positive");
    AccuracyRow row;
    row.cameraDistance = d;
    row.total = avgOffsets.size();
    for (const auto& off : avgOffsets) {
      if (off && std::atan(*off / d) <= half + 1e-12) ++row.accurate;
    }
    row.percent = row.total ? 100.0 * static_cast<double>(row.accurate) / static_cast<double>(row.total) : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::string offsetsCsv(const std::vector<OffsetSample>& samples) {
  std::string out = csvRow({"movementId", "i", "j", "k", "xi", "yi", "ti", "xj", "yj", "tj", "tk", "predictedX",
                            "predictedY", "actualX", "actualY", "offset"});
  for (const auto& s : samples) {
    const auto& [ri, rj, rk] = s.readings;
    out += csvRow({s.movementId, std::to_string(s.triplet[0]), std::to_string(s.triplet[1]),
                   std::to_string(s.triplet[2]), fixed(ri.position.x), fixed(ri.position.y), fixed(ri.t),
                   fixed(rj.position.x), fixed(rj.position.y), fixed(rj.t), fixed(rk.t), fixed(s.predicted.x),
                   fixed(s.predicted.y), fixed(s.actual.x), fixed(s.actual.y), fixed(s.offset)});
  }
  return out;
}

std::string accuracyCsv(const std::vector<AccuracyRow>& rows) {
  std::string out = csvRow({"cameraDistance", "accurate", "total", "percent"});
  for (const auto& r : rows)
    out += csvRow({fixed(r.cameraDistance, 2), std::to_string(r.accurate), std::to_string(r.total),
                   fixed(r.percent, 2)});
  return out;
}

}  // namespace fencesim
