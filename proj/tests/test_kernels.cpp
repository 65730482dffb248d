#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "mmdscan/errors.hpp"
#include "mmdscan/kernels.hpp"
#include "test_util.hpp"

using mmdscan::ErrorCode;
using mmdscan::Kernel;

TEST_CASE("gaussian kernel matches its defining formula") {
    const Kernel k = Kernel::gaussian(1.0);
    CHECK(k.evaluate(3.7, 3.7) == doctest::Approx(1.0));
    CHECK(k.evaluate(0.0, 1.0) == doctest::Approx(std::exp(-0.5)));
    CHECK(k.bound() == 1.0);

    const Kernel wide = Kernel::gaussian(2.0);
    CHECK(wide.evaluate(0.0, 2.0) == doctest::Approx(std::exp(-0.5)));
}

TEST_CASE("laplace kernel matches its defining formula") {
    const Kernel k = Kernel::laplace(1.0);
    CHECK(k.evaluate(0.0, 2.0) == doctest::Approx(std::exp(-1.0)));
    CHECK(k.evaluate(-1.0, -1.0) == doctest::Approx(1.0));
    CHECK(k.bound() == 1.0);
}

TEST_CASE("kernel rejects bad construction and non-finite inputs") {
    CHECK(testutil::error_code_of([] { Kernel::gaussian(0.0); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([] { Kernel::laplace(-1.0); }) ==
          static_cast<int>(ErrorCode::invalid_argument));

    const Kernel k = Kernel::gaussian(1.0);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK(testutil::error_code_of([&] { k.evaluate(nan, 0.0); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([&] { k.evaluate(0.0, inf); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("kernel symmetry and boundedness over random pairs") {
    std::mt19937_64 rng(7);
    for (const auto& k : {Kernel::gaussian(0.9), Kernel::laplace(1.3)}) {
        for (int i = 0; i < 1000; ++i) {
            const auto pair = testutil::random_vector(rng, 2, -50.0, 50.0);
            const double ab = k.evaluate(pair[0], pair[1]);
            const double ba = k.evaluate(pair[1], pair[0]);
            CHECK(ab == ba);  // exact, not approximate
            CHECK(ab >= 0.0);
            CHECK(ab <= 1.0);
            CHECK(k.evaluate(pair[0], pair[0]) == 1.0);
        }
    }
}

TEST_CASE("kernel values decay with distance") {
    std::mt19937_64 rng(11);
    for (const auto& k : {Kernel::gaussian(1.0), Kernel::laplace(0.7)}) {
        for (int rep = 0; rep < 20; ++rep) {
            const double x = testutil::random_vector(rng, 1, -5.0, 5.0)[0];
            auto offsets = testutil::random_vector(rng, 40, 0.0, 10.0);
            std::sort(offsets.begin(), offsets.end());
            double previous = k.evaluate(x, x + offsets.front());
            for (std::size_t i = 1; i < offsets.size(); ++i) {
                const double current = k.evaluate(x, x + offsets[i]);
                CHECK(current <= previous + 1e-15);
                previous = current;
            }
        }
    }
}
