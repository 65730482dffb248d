#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <iterator>
#include <vector>

namespace mmdscan {

// Half-open contiguous index range [start, start + length).
struct Interval {
    std::size_t start = 0;
    std::size_t length = 0;

    std::size_t end() const { return start + length; }
    bool contains(const Interval& other) const {
        return other.start >= start && other.end() <= end();
    }
    auto operator<=>(const Interval&) const = default;
};

// Orders by (length, start); used wherever a deterministic enumeration or
// tie-break over intervals is required.
struct IntervalLengthStartLess {
    bool operator()(const Interval& a, const Interval& b) const {
        if (a.length != b.length) return a.length < b.length;
        return a.start < b.start;
    }
};

// All power-of-two-aligned blocks over [0, n). The grid is built on the
// padded size 2^ceil(log2 n) and clipped to [0, n); empty clips are dropped.
// Level j holds blocks of nominal length 2^j in ascending offset order.
class DyadicGrid {
public:
    explicit DyadicGrid(std::size_t n);

    std::size_t size() const { return n_; }
    std::size_t padded_size() const { return padded_; }
    std::size_t level_count() const { return levels_.size(); }
    const std::vector<Interval>& level(std::size_t j) const { return levels_[j]; }

    // Flattened view in (level, offset) order.
    std::vector<Interval> all() const;
    std::size_t total_count() const;

    // True if the interval equals one of the grid blocks (possibly clipped).
    bool is_dyadic(const Interval& interval) const;

private:
    std::size_t n_ = 0;
    std::size_t padded_ = 0;
    std::vector<std::vector<Interval>> levels_;

    friend class ExtensionSet;
};

DyadicGrid dyadic_grid(std::size_t n);

// Largest grid block contained in the interval, ties broken by smallest
// start. On an unclipped power-of-two grid the result covers at least a
// quarter of the input.
Interval max_dyadic_within(const Interval& interval, const DyadicGrid& grid);

// Family of intervals grown from a dyadic base block. Seeds are the base
// itself and, when the base sits at an odd offset of its level, the union
// with the next block. Each round q = 1..level may append a block of length
// |base| / 2^q at either end, both ends, or neither; rounds whose block
// length would fall below one index contribute nothing. Members are
// deduplicated, clipped to [0, n) and sorted by (length, start).
class ExtensionSet {
public:
    ExtensionSet(const Interval& base, int level, const DyadicGrid& grid);

    const Interval& base() const { return base_; }
    int level() const { return level_; }
    const std::vector<Interval>& members() const { return members_; }

private:
    Interval base_;
    int level_ = 0;
    std::vector<Interval> members_;
};

ExtensionSet extensions(const Interval& base, int level, const DyadicGrid& grid);

// Lazily enumerates every interval with length >= i_min over [0, n) in
// (length, start) order.
class CandidateIntervals {
public:
    CandidateIntervals(std::size_t n, std::size_t i_min);

    std::size_t network_size() const { return n_; }
    std::size_t min_length() const { return i_min_; }
    std::uint64_t count() const;

    class iterator {
    public:
        using value_type = Interval;
        using difference_type = std::ptrdiff_t;
        using reference = Interval;
        using pointer = const Interval*;
        using iterator_category = std::input_iterator_tag;

        iterator(std::size_t n, std::size_t length, std::size_t start)
            : n_(n), current_{start, length} {}

        Interval operator*() const { return current_; }
        iterator& operator++() {
            if (current_.start + current_.length < n_) {
                ++current_.start;
            } else {
                ++current_.length;
                current_.start = 0;
            }
            return *this;
        }
        iterator operator++(int) {
            iterator copy = *this;
            ++(*this);
            return copy;
        }
        bool operator==(const iterator& other) const = default;

    private:
        std::size_t n_;
        Interval current_;
    };

    iterator begin() const { return iterator(n_, i_min_, 0); }
    iterator end() const { return iterator(n_, n_ + 1, 0); }

private:
    std::size_t n_ = 0;
    std::size_t i_min_ = 0;
};

CandidateIntervals candidate_intervals(std::size_t n, std::size_t i_min);

}  // namespace mmdscan
