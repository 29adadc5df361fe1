#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "atch/time.hpp"

namespace atch {

// Immutable interval index: items sorted by start form an implicit balanced
// binary tree (node i at level k has its children at i -/+ 2^(k-1)), each
// node augmented with the maximum end of its subtree. Overlap and stabbing
// queries run in O(log n + k). Intervals are closed.
template <typename Payload>
class IntervalIndex {
public:
    struct Item {
        TimeInterval interval;
        Payload payload;
        Timestamp max_end;
    };

    IntervalIndex() = default;

    explicit IntervalIndex(std::vector<Item> items) : items_(std::move(items)) { build(); }

    std::size_t size() const { return items_.size(); }
    const std::vector<Item>& items() const { return items_; }

    // Appends the payload of every item whose interval intersects [lo, hi],
    // in start order.
    template <typename Out>
    void overlapping(Timestamp lo, Timestamp hi, Out&& emit) const {
        if (items_.empty()) return;
        struct Cell {
            int level;
            std::size_t node;
            bool left_done;
        };
        Cell stack[64];
        int top = 0;
        stack[top++] = {max_level_, (std::size_t{1} << max_level_) - 1, false};
        const std::size_t n = items_.size();
        while (top > 0) {
            Cell c = stack[--top];
            if (c.level <= 3) {
                std::size_t first = c.node >> c.level << c.level;
                std::size_t last = first + (std::size_t{1} << (c.level + 1)) - 1;
                if (last > n) last = n;
                for (std::size_t i = first; i < last && items_[i].interval.start <= hi; ++i) {
                    if (lo <= items_[i].interval.end) emit(items_[i].payload);
                }
            } else if (!c.left_done) {
                std::size_t left = c.node - (std::size_t{1} << (c.level - 1));
                stack[top++] = {c.level, c.node, true};
                if (left >= n || items_[left].max_end >= lo) stack[top++] = {c.level - 1, left, false};
            } else if (c.node < n && items_[c.node].interval.start <= hi) {
                if (lo <= items_[c.node].interval.end) emit(items_[c.node].payload);
                stack[top++] = {c.level - 1, c.node + (std::size_t{1} << (c.level - 1)), false};
            }
        }
    }

    template <typename Out>
    void stabbing(Timestamp t, Out&& emit) const {
        overlapping(t, t, std::forward<Out>(emit));
    }

private:
    void build() {
        std::stable_sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) {
            if (a.interval.start != b.interval.start) return a.interval.start < b.interval.start;
            return a.interval.end < b.interval.end;
        });
        const std::size_t n = items_.size();
        if (n == 0) {
            max_level_ = -1;
            return;
        }
        std::size_t last_i = 0;
        Timestamp last;
        for (std::size_t i = 0; i < n; i += 2) {
            last_i = i;
            last = items_[i].max_end = items_[i].interval.end;
        }
        int k = 1;
        for (; (std::size_t{1} << k) <= n; ++k) {
            std::size_t x = std::size_t{1} << (k - 1);
            std::size_t first = (x << 1) - 1;
            std::size_t step = x << 2;
            for (std::size_t i = first; i < n; i += step) {
                Timestamp left = items_[i - x].max_end;
                Timestamp right = i + x < n ? items_[i + x].max_end : last;
                Timestamp e = items_[i].interval.end;
                if (left > e) e = left;
                if (right > e) e = right;
                items_[i].max_end = e;
            }
            last_i = (last_i >> k & 1) ? last_i : last_i - x;
            if (last_i < n && items_[last_i].max_end > last) last = items_[last_i].max_end;
        }
        max_level_ = k - 1;
    }

    std::vector<Item> items_;
    int max_level_ = -1;
};

}  // namespace atch
