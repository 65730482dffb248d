#pragma once

#include <random>
#include <vector>

#include "mmdscan/errors.hpp"

namespace testutil {

// Runs fn and reports the library error code it throws (0 when it does not).
template <typename Fn>
int error_code_of(Fn&& fn) {
    try {
        fn();
    } catch (const mmdscan::Error& e) {
        return static_cast<int>(e.code());
    }
    return 0;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t count,
                                         double low = -3.0, double high = 3.0) {
    std::uniform_real_distribution<double> dist(low, high);
    std::vector<double> out(count);
    for (auto& v : out) v = dist(rng);
    return out;
}

}  // namespace testutil
