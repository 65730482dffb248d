#include "mmdscan/intervals.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <tuple>

#include "mmdscan/errors.hpp"

namespace mmdscan {

namespace {

std::size_t next_power_of_two(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

DyadicGrid::DyadicGrid(std::size_t n) : n_(n) {
    if (n < 2) {
        raise(ErrorCode::invalid_argument, "dyadic grid requires n >= 2");
    }
    padded_ = next_power_of_two(n);
    for (std::size_t block = 1;; block <<= 1) {
        std::vector<Interval> row;
        for (std::size_t start = 0; start < padded_; start += block) {
            if (start >= n_) break;
            const std::size_t end = std::min(start + block, n_);
            row.push_back(Interval{start, end - start});
        }
        levels_.push_back(std::move(row));
        if (block >= padded_) break;
    }
}

DyadicGrid dyadic_grid(std::size_t n) { return DyadicGrid(n); }

std::vector<Interval> DyadicGrid::all() const {
    std::vector<Interval> out;
    out.reserve(total_count());
    for (const auto& row : levels_) {
        out.insert(out.end(), row.begin(), row.end());
    }
    return out;
}

std::size_t DyadicGrid::total_count() const {
    std::size_t count = 0;
    for (const auto& row : levels_) count += row.size();
    return count;
}

bool DyadicGrid::is_dyadic(const Interval& interval) const {
    if (interval.length == 0 || interval.end() > n_) return false;
    for (std::size_t j = 0; j < levels_.size(); ++j) {
        const std::size_t block = std::size_t{1} << j;
        if (interval.start % block != 0) continue;
        const std::size_t clipped_end = std::min(interval.start + block, n_);
        if (clipped_end == interval.end()) return true;
    }
    return false;
}

Interval max_dyadic_within(const Interval& interval, const DyadicGrid& grid) {
    if (interval.length < 1 || interval.end() > grid.size()) {
        raise(ErrorCode::bounds, "interval out of range of the grid");
    }
    Interval best{0, 0};
    for (std::size_t j = grid.level_count(); j-- > 0;) {
        for (const Interval& block : grid.level(j)) {
            if (!interval.contains(block)) continue;
            if (block.length > best.length ||
                (block.length == best.length && block.start < best.start)) {
                best = block;
            }
        }
        if (best.length > 0 && (std::size_t{1} << j) <= best.length) break;
    }
    if (best.length == 0) {
        // Level 0 partitions [0, n), so any nonempty interval contains a block.
        raise(ErrorCode::internal, "no dyadic block found");
    }
    return best;
}

namespace {

struct ExtensionShapeKey {
    std::size_t block;   // nominal base length 2^j
    std::size_t step;    // finest attachment granularity
    bool has_union;
    auto operator<=>(const ExtensionShapeKey&) const = default;
};

// Member spans relative to the base start, on the unclipped grid.
struct RelativeSpan {
    std::size_t left;    // indices extended to the left of the base start
    std::size_t length;  // raw member length before clipping
    auto operator<=>(const RelativeSpan&) const = default;
};

// Geometry of a family depends only on the base length, the attachment
// granularity and whether the odd-offset union seed exists, so shapes are
// shared across bases and translated.
const std::vector<RelativeSpan>& extension_shape(const ExtensionShapeKey& key) {
    static std::mutex mutex;
    static std::map<ExtensionShapeKey, std::vector<RelativeSpan>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;

    std::vector<std::size_t> attachments{0};
    if (key.step > 0) {
        for (std::size_t v = key.step; v < key.block; v += key.step) attachments.push_back(v);
    }
    std::vector<std::size_t> seeds{key.block};
    if (key.has_union) seeds.push_back(2 * key.block);

    std::vector<RelativeSpan> spans;
    for (std::size_t seed_length : seeds) {
        for (std::size_t left : attachments) {
            for (std::size_t right : attachments) {
                spans.push_back(RelativeSpan{left, left + seed_length + right});
            }
        }
    }
    std::sort(spans.begin(), spans.end());
    spans.erase(std::unique(spans.begin(), spans.end()), spans.end());
    return cache.emplace(key, std::move(spans)).first->second;
}

}  // namespace

ExtensionSet::ExtensionSet(const Interval& base, int level, const DyadicGrid& grid)
    : base_(base), level_(level) {
    if (level < 0) {
        raise(ErrorCode::invalid_argument, "extension level must be >= 0");
    }

    // Locate the base on the grid; the base may be a clipped block.
    std::size_t base_level = 0;
    bool found = false;
    for (std::size_t j = 0; j < grid.level_count() && !found; ++j) {
        const std::size_t block = std::size_t{1} << j;
        if (base.start % block != 0) continue;
        const std::size_t clipped_end = std::min(base.start + block, grid.size());
        if (base.end() == clipped_end) {
            base_level = j;
            found = true;
        }
    }
    if (!found) {
        raise(ErrorCode::invalid_argument, "extension base is not a dyadic block of the grid");
    }

    const std::size_t block = std::size_t{1} << base_level;
    const std::size_t offset = base.start / block;
    const bool odd = (offset % 2) == 1;
    const bool has_union = odd && (offset + 1) * block < grid.padded_size();
    // Attachment rounds halve the block length; rounds finer than one index
    // are inert, so the granularity bottoms out at 1.
    const std::size_t rounds =
        std::min<std::size_t>(static_cast<std::size_t>(level), base_level);
    const std::size_t step = rounds == 0 ? 0 : block >> rounds;

    const auto& spans = extension_shape(ExtensionShapeKey{block, step, has_union});
    members_.reserve(spans.size());
    for (const RelativeSpan& span : spans) {
        if (span.left > base.start) {
            // Clamp at the left edge of the network.
            const std::size_t overshoot = span.left - base.start;
            if (span.length <= overshoot) continue;
            members_.push_back(Interval{0, std::min(span.length - overshoot, grid.size())});
        } else {
            const std::size_t start = base.start - span.left;
            if (start >= grid.size()) continue;
            const std::size_t end = std::min(start + span.length, grid.size());
            members_.push_back(Interval{start, end - start});
        }
    }
    std::sort(members_.begin(), members_.end(), IntervalLengthStartLess{});
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

ExtensionSet extensions(const Interval& base, int level, const DyadicGrid& grid) {
    return ExtensionSet(base, level, grid);
}

CandidateIntervals::CandidateIntervals(std::size_t n, std::size_t i_min)
    : n_(n), i_min_(i_min) {
    if (i_min < 2) {
        raise(ErrorCode::invalid_argument,
              "candidate minimum length must be >= 2 (the statistic needs two samples)");
    }
    if (i_min > n) {
        raise(ErrorCode::invalid_argument, "candidate minimum length exceeds the network size");
    }
}

std::uint64_t CandidateIntervals::count() const {
    const std::uint64_t m = n_ - i_min_ + 1;
    return m * (m + 1) / 2;
}

CandidateIntervals candidate_intervals(std::size_t n, std::size_t i_min) {
    return CandidateIntervals(n, i_min);
}

}  // namespace mmdscan
