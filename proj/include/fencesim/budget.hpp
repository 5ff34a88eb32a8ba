#pragma once

#include <span>
#include <string>
#include <vector>

namespace fencesim {

struct LatencyStep {
  std::string name;
  double minSeconds = 0.0;
  double maxSeconds = 0.0;
};

struct LatencyBudget {
  std::vector<LatencyStep> steps;
  double totalMin = 0.0;
  double totalMax = 0.0;
};

/// Detection-to-alert steps of the deployed system, in pipeline order.
std::vector<LatencyStep> defaultLatencySteps();
/// Throws ValidationError for negative entries or min > max.
LatencyBudget latencyBudget(std::span<const LatencyStep> steps);

struct CostItem {
  std::string device;
  double unitCost = 0.0;
  double quantity = 1.0;

  double lineTotal() const { return unitCost * quantity; }
};

struct CostSheet {
  std::vector<CostItem> items;
  double total = 0.0;
};

/// Bill of materials for the 25 m x 25 m test field.
std::vector<CostItem> defaultCostItems();
/// Throws ValidationError for negative quantities or unit costs.
CostSheet costSheet(std::span<const CostItem> items);

std::string latencyCsv(const LatencyBudget& budget);
std::string costCsv(const CostSheet& sheet);

}  // namespace fencesim
