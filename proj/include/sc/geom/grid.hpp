#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "sc/geom/vec2.hpp"

namespace sc::geom {

/// Uniform spatial hash over a point set. Cell size should be on the order of
/// the typical query radius; lookups then touch O(1) cells.
class PointGrid {
public:
    PointGrid() = default;
    PointGrid(const std::vector<Vec2>& points, double cell_size);

    void rebuild(const std::vector<Vec2>& points, double cell_size);
    void insert(std::size_t index, const Vec2& p);

    /// Indices of all stored points within `radius` of `p` (inclusive).
    std::vector<std::size_t> query_radius(const Vec2& p, double radius) const;

    /// Index of the nearest stored point to `p`, or npos when empty.
    /// Ties are broken toward the lowest index.
    std::size_t nearest(const Vec2& p, double* dist_out = nullptr) const;

    /// k nearest stored indices ordered by (distance, index). `skip` is excluded.
    std::vector<std::size_t> nearest_k(const Vec2& p, std::size_t k,
                                       std::size_t skip = npos) const;

    std::size_t size() const { return points_.size(); }
    const Vec2& point(std::size_t i) const { return points_[i]; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct CellKey {
        std::int64_t cx = 0;
        std::int64_t cy = 0;
        bool operator==(const CellKey& o) const { return cx == o.cx && cy == o.cy; }
    };
    struct CellHash {
        std::size_t operator()(const CellKey& k) const {
            // 64-bit mix of the two cell coordinates
            std::uint64_t h = static_cast<std::uint64_t>(k.cx) * 0x9E3779B97F4A7C15ull;
            h ^= static_cast<std::uint64_t>(k.cy) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    CellKey key_of(const Vec2& p) const {
        return {static_cast<std::int64_t>(std::floor(p.x / cell_)),
                static_cast<std::int64_t>(std::floor(p.y / cell_))};
    }

    double cell_ = 1.0;
    std::vector<Vec2> points_;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

/// Spatial hash over line segments (boundary-element chords). Supports
/// conservative retrieval of segments near an axis-aligned box.
class SegmentGrid {
public:
    SegmentGrid() = default;
    void rebuild(const std::vector<std::pair<Vec2, Vec2>>& segments, double cell_size);

    /// Indices of segments whose cells intersect the box [lo, hi] (superset).
    std::vector<std::size_t> query_box(const Vec2& lo, const Vec2& hi) const;

    std::size_t size() const { return segments_.size(); }
    const std::pair<Vec2, Vec2>& segment(std::size_t i) const { return segments_[i]; }

private:
    struct CellKey {
        std::int64_t cx = 0;
        std::int64_t cy = 0;
        bool operator==(const CellKey& o) const { return cx == o.cx && cy == o.cy; }
    };
    struct CellHash {
        std::size_t operator()(const CellKey& k) const {
            std::uint64_t h = static_cast<std::uint64_t>(k.cx) * 0x9E3779B97F4A7C15ull;
            h ^= static_cast<std::uint64_t>(k.cy) + 0x9E3779B97F4A7C15ull + (h << 6) + (h >> 2);
            return static_cast<std::size_t>(h);
        }
    };

    double cell_ = 1.0;
    std::vector<std::pair<Vec2, Vec2>> segments_;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellHash> cells_;
};

}  // namespace sc::geom
