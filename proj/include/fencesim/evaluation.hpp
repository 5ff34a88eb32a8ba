#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fencesim/predictor.hpp"

namespace fencesim {

struct OffsetSample {
  std::string movementId;
  std::array<std::size_t, 3> triplet{};  // i < j < k
  std::array<TimedPoint, 3> readings{};
  Point predicted;
  Point actual;
  double offset = 0.0;
};

/// Predicts where the target is `lead` seconds after `current`.
using PredictFn = std::function<Point(const TimedPoint& previous, const TimedPoint& current, double lead)>;

/// The dead-reckoning predictor with the lead time supplied per call.
PredictFn algorithmPredictor();

struct TripletResult {
  std::vector<OffsetSample> samples;
  bool insufficient = false;  // fewer than three readings
};

/// For every i < j < k predicts reading k's position from readings i and j
/// with lead time t_k - t_j, yielding C(n, 3) samples.
TripletResult tripletOffsets(const std::string& movementId, std::span<const TimedPoint> readings,
                             const PredictFn& predictFn = algorithmPredictor());

struct AccuracyRow {
  double cameraDistance = 0.0;
  std::size_t accurate = 0;
  std::size_t total = 0;
  double percent = 0.0;
};

/// A movement counts as accurate at distance D when its average offset is
/// defined and atan(offset / D) <= hfov / 2. Movements without an average
/// (insufficient readings) count as failures at every distance.
std::vector<AccuracyRow> accuracyTable(std::span<const std::optional<double>> avgOffsets,
                                       std::span<const double> cameraDistances, double hfovDeg);

std::string offsetsCsv(const std::vector<OffsetSample>& samples);
std::string accuracyCsv(const std::vector<AccuracyRow>& rows);

}  // namespace fencesim
