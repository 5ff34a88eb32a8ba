#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fencesim/geometry.hpp"

namespace fencesim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // unexpected internal error
inline constexpr int kExitIo = 2;
inline constexpr int kExitValidation = 3;

/// Entry point of the fencesim tool. `args` excludes the program name.
/// Diagnostics go to `err`; tables and summaries go to `out`.
int runCli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string layoutJson(const SensorLayout& layout, const PositionMap& positions, double blindBand,
                       double blindFraction);
std::string layoutCsv(const SensorLayout& layout, const PositionMap& positions, double blindBand,
                      double blindFraction);

}  // namespace fencesim
