#include "mmdscan/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>

#include "mmdscan/errors.hpp"

namespace mmdscan {

std::vector<double> read_series_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        raise(ErrorCode::io, "cannot open series file '" + path + "'");
    }
    std::vector<double> values;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        std::size_t begin = 0;
        std::size_t end = line.size();
        while (begin < end && std::isspace(static_cast<unsigned char>(line[begin]))) ++begin;
        while (end > begin && std::isspace(static_cast<unsigned char>(line[end - 1]))) --end;
        if (begin == end) continue;
        const std::string token = line.substr(begin, end - begin);
        char* parsed_end = nullptr;
        const double value = std::strtod(token.c_str(), &parsed_end);
        if (parsed_end != token.c_str() + token.size() || !std::isfinite(value)) {
            raise(ErrorCode::parse, "series file '" + path + "' line " +
                                        std::to_string(line_number) +
                                        ": expected one finite real, got '" + token + "'");
        }
        values.push_back(value);
    }
    return values;
}

}  // namespace mmdscan
