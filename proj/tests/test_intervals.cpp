#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "mmdscan/errors.hpp"
#include "mmdscan/intervals.hpp"
#include "test_util.hpp"

using mmdscan::CandidateIntervals;
using mmdscan::DyadicGrid;
using mmdscan::ErrorCode;
using mmdscan::ExtensionSet;
using mmdscan::Interval;

namespace {

// Union of all extension families of a grid, deduplicated.
std::set<Interval> full_extension_union(const DyadicGrid& grid, int level) {
    std::set<Interval> all;
    for (std::size_t j = 0; j < grid.level_count(); ++j) {
        for (const Interval& base : grid.level(j)) {
            const ExtensionSet set = mmdscan::extensions(base, level, grid);
            all.insert(set.members().begin(), set.members().end());
        }
    }
    return all;
}

}  // namespace

TEST_CASE("dyadic grid sizes and clipping") {
    const DyadicGrid g8(8);
    CHECK(g8.total_count() == 15);
    CHECK(g8.level(0).size() == 8);
    CHECK(g8.level(3).size() == 1);

    const DyadicGrid g16(16);
    CHECK(g16.total_count() == 31);

    const DyadicGrid g12(12);
    CHECK(g12.padded_size() == 16);
    for (const Interval& block : g12.all()) {
        CHECK(block.length >= 1);
        CHECK(block.end() <= 12);
    }

    CHECK(testutil::error_code_of([] { DyadicGrid grid(1); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("dyadic grid enumeration is deterministic") {
    const DyadicGrid a(24);
    const DyadicGrid b(24);
    CHECK(a.all() == b.all());
}

TEST_CASE("max dyadic block within an interval") {
    const DyadicGrid grid(16);
    CHECK(max_dyadic_within(Interval{0, 8}, grid) == Interval{0, 8});
    // {2..10} inclusive, i.e. [2, 11): the largest aligned block is [4, 8).
    CHECK(max_dyadic_within(Interval{2, 9}, grid) == Interval{4, 4});
}

TEST_CASE("max dyadic block covers at least a quarter on power-of-two grids") {
    const DyadicGrid grid(256);
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> start_dist(0, 255);
    for (int i = 0; i < 500; ++i) {
        const std::size_t start = start_dist(rng);
        std::uniform_int_distribution<std::size_t> len_dist(1, 256 - start);
        const Interval interval{start, len_dist(rng)};
        const Interval block = max_dyadic_within(interval, grid);
        CHECK(interval.contains(block));
        CHECK(4 * block.length >= interval.length);

        // Cross-check against a direct scan of the whole grid.
        Interval expected{0, 0};
        for (const Interval& candidate : grid.all()) {
            if (!interval.contains(candidate)) continue;
            if (candidate.length > expected.length ||
                (candidate.length == expected.length && candidate.start < expected.start)) {
                expected = candidate;
            }
        }
        CHECK(block == expected);
    }
}

TEST_CASE("level-0 extensions are the seeds") {
    const DyadicGrid grid(16);
    const ExtensionSet even = mmdscan::extensions(Interval{4, 2}, 0, grid);  // offset 2
    CHECK(even.members() == std::vector<Interval>{Interval{4, 2}});

    const ExtensionSet odd = mmdscan::extensions(Interval{2, 2}, 0, grid);  // offset 1
    CHECK(odd.members() == std::vector<Interval>{Interval{2, 2}, Interval{2, 4}});
}

TEST_CASE("extensions reject a non-dyadic base") {
    const DyadicGrid grid(16);
    CHECK(testutil::error_code_of([&] { mmdscan::extensions(Interval{1, 3}, 1, grid); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([&] { mmdscan::extensions(Interval{2, 2}, -1, grid); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}

TEST_CASE("extension members contain the base and stay in range") {
    const DyadicGrid grid(64);
    for (std::size_t j = 0; j < grid.level_count(); ++j) {
        for (const Interval& base : grid.level(j)) {
            const ExtensionSet set = mmdscan::extensions(base, 3, grid);
            for (const Interval& member : set.members()) {
                CHECK(member.contains(base));
                CHECK(member.end() <= 64);
                CHECK(member.length <= 4 * base.length);
            }
        }
    }
}

TEST_CASE("extension family size bound") {
    for (std::size_t n : {16, 64}) {
        const DyadicGrid grid(n);
        for (int level = 1; level <= 3; ++level) {
            const auto family = full_extension_union(grid, level);
            const double cap = static_cast<double>(n) * std::pow(4.0, level + 1);
            CHECK(static_cast<double>(family.size()) <= cap);
        }
    }
}

TEST_CASE("some extension member approximates every interval from inside") {
    const std::size_t n = 64;
    const DyadicGrid grid(n);
    for (int level = 1; level <= 4; ++level) {
        for (std::size_t start = 0; start < n; ++start) {
            for (std::size_t length = 4; start + length <= n; ++length) {
                const Interval target{start, length};
                const Interval core = max_dyadic_within(target, grid);
                const ExtensionSet set = mmdscan::extensions(core, level, grid);
                double best_deficit = static_cast<double>(n);
                for (const Interval& member : set.members()) {
                    if (!target.contains(member)) continue;
                    best_deficit = std::min(
                        best_deficit, static_cast<double>(target.length - member.length));
                }
                const double allowed =
                    std::pow(2.0, -(level - 1)) * static_cast<double>(core.length);
                CHECK(best_deficit <= allowed);
            }
        }
    }
}

TEST_CASE("candidate interval enumeration") {
    CHECK(mmdscan::candidate_intervals(4, 2).count() == 6);
    CHECK(mmdscan::candidate_intervals(4, 4).count() == 1);
    CHECK(mmdscan::candidate_intervals(100, 50).count() == 1326);

    const CandidateIntervals range(6, 3);
    std::vector<Interval> seen(range.begin(), range.end());
    CHECK(seen.size() == range.count());
    // (length, start) order.
    CHECK(seen.front() == Interval{0, 3});
    CHECK(seen[1] == Interval{1, 3});
    CHECK(seen.back() == Interval{0, 6});
    CHECK(std::is_sorted(seen.begin(), seen.end(), mmdscan::IntervalLengthStartLess{}));

    std::vector<Interval> again(range.begin(), range.end());
    CHECK(seen == again);

    CHECK(testutil::error_code_of([] { mmdscan::candidate_intervals(8, 1); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
    CHECK(testutil::error_code_of([] { mmdscan::candidate_intervals(8, 9); }) ==
          static_cast<int>(ErrorCode::invalid_argument));
}
