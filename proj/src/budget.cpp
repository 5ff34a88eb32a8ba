#include "fencesim/budget.hpp"

#include <cmath>

#include "fencesim/csv.hpp"
#include "fencesim/error.hpp"

namespace fencesim {

std::vector<LatencyStep> defaultLatencySteps() {
  return {
      {"Transmission of 3 sets of data via LoRa", 3.0, 9.0},
      {"Latency between 3 readings", 10.0, 10.0},
      {"Prediction", 0.01, 0.01},
      {"Instruction sent to camera via LoRa", 1.0, 1.0},
      {"Camera rotation, image capture and processing", 4.0, 7.0},
      {"Results sent back to fog server via LoRa", 1.0, 1.0},
      {"Alert sent to farmer via LTE", 0.1, 0.6},
  };
}

LatencyBudget latencyBudget(std::span<const LatencyStep> steps) {
  LatencyBudget b;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    const std::string field = "budget.latency[" + std::to_string(i) + "]";
    if (!(s.minSeconds >= 0.0) || !(s.maxSeconds >= 0.0)) throw ValidationError(field, "negative latency");
    if (s.minSeconds > s.maxSeconds) throw ValidationError(field, "min exceeds max");
    b.steps.push_back(s);
    b.totalMin += s.minSeconds;
    b.totalMax += s.maxSeconds;
  }
  return b;
}

std::vector<CostItem> defaultCostItems() {
  return {
      {"Arduino Shield for LoRa", 28.0, 2.0},
      {"Raspberry Pi 4", 95.0, 1.0},
      {"GPS Concentrator", 120.0, 1.0},
      {"PIR Sensor", 0.75, 36.0},
      {"Camera", 25.0, 1.0},
      {"Laptop", 500.0, 1.0},
  };
}

CostSheet costSheet(std::span<const CostItem> items) {
  CostSheet sheet;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    const std::string field = "budget.cost[" + std::to_string(i) + "]";
    if (!(it.quantity >= 0.0)) throw ValidationError(field + ".quantity", "must be >= 0");
    if (!(it.unitCost >= 0.0)) throw ValidationError(field + ".unitCost", "must be >= 0");
    sheet.items.push_back(it);
    sheet.total += it.lineTotal();
  }
  return sheet;
}

std::string latencyCsv(const LatencyBudget& budget) {
  std::string out = csvRow({"step", "minSeconds", "maxSeconds"});
  for (const auto& s : budget.steps) out += csvRow({s.name, fixed(s.minSeconds, 2), fixed(s.maxSeconds, 2)});
  out += csvRow({"In total", fixed(budget.totalMin, 2), fixed(budget.totalMax, 2)});
  return out;
}

std::string costCsv(const CostSheet& sheet) {
  std::string out = csvRow({"device", "unitCost", "quantity", "lineTotal"});
  for (const auto& it : sheet.items)
    out += csvRow({it.device, fixed(it.unitCost, 2), fixed(it.quantity, 0), fixed(it.lineTotal(), 2)});
  out += csvRow({"In Total", "", "", fixed(sheet.total, 2)});
  return out;
}

}  // namespace fencesim
