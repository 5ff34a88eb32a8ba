#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace fencesim {

/// RFC 4180 field quoting: fields containing a comma, quote, CR or LF are
/// wrapped in quotes with embedded quotes doubled.
std::string csvEscape(std::string_view field);

std::string csvRow(const std::vector<std::string>& fields);

/// Formats with a fixed number of decimals; "-0.000000" is normalised to
/// "0.000000" so that report bytes do not depend on the sign of zero.
std::string fixed(double value, int decimals = 6);

/// Writes via a temporary sibling file and rename, so readers never observe a
/// partially written file. Throws IoError.
void writeFileAtomic(const std::filesystem::path& path, std::string_view content);

std::string readFile(const std::filesystem::path& path);

}  // namespace fencesim
