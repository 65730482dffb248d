#pragma once

#include <string>
#include <vector>

namespace mmdscan {

// Reads a single-column series: one real per line, blank lines ignored.
std::vector<double> read_series_file(const std::string& path);

}  // namespace mmdscan
