#include "sc/geom/grid.hpp"

#include <algorithm>
#include <limits>

namespace sc::geom {

PointGrid::PointGrid(const std::vector<Vec2>& points, double cell_size) {
    rebuild(points, cell_size);
}

void PointGrid::rebuild(const std::vector<Vec2>& points, double cell_size) {
    cell_ = cell_size > 0.0 ? cell_size : 1.0;
    points_ = points;
    cells_.clear();
    cells_.reserve(points.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
        cells_[key_of(points_[i])].push_back(i);
    }
}

void PointGrid::insert(std::size_t index, const Vec2& p) {
    if (index >= points_.size()) points_.resize(index + 1);
    points_[index] = p;
    cells_[key_of(p)].push_back(index);
}

std::vector<std::size_t> PointGrid::query_radius(const Vec2& p, double radius) const {
    std::vector<std::size_t> out;
    if (radius < 0.0) return out;
    const std::int64_t cx0 = static_cast<std::int64_t>(std::floor((p.x - radius) / cell_));
    const std::int64_t cx1 = static_cast<std::int64_t>(std::floor((p.x + radius) / cell_));
    const std::int64_t cy0 = static_cast<std::int64_t>(std::floor((p.y - radius) / cell_));
    const std::int64_t cy1 = static_cast<std::int64_t>(std::floor((p.y + radius) / cell_));
    const double r2 = radius * radius;
    for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
            auto it = cells_.find(CellKey{cx, cy});
            if (it == cells_.end()) continue;
            for (std::size_t i : it->second) {
                if ((points_[i] - p).squared_norm() <= r2) out.push_back(i);
            }
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t PointGrid::nearest(const Vec2& p, double* dist_out) const {
    if (points_.empty()) return npos;
    // Expanding ring search over cells.
    double best = std::numeric_limits<double>::max();
    std::size_t best_i = npos;
    const CellKey c0 = key_of(p);
    for (std::int64_t ring = 0;; ++ring) {
        bool any_cell = false;
        for (std::int64_t cx = c0.cx - ring; cx <= c0.cx + ring; ++cx) {
            for (std::int64_t cy = c0.cy - ring; cy <= c0.cy + ring; ++cy) {
                if (std::max(std::abs(cx - c0.cx), std::abs(cy - c0.cy)) != ring) continue;
                auto it = cells_.find(CellKey{cx, cy});
                if (it == cells_.end()) continue;
                any_cell = true;
                for (std::size_t i : it->second) {
                    const double d = (points_[i] - p).squared_norm();
                    if (d < best || (d == best && i < best_i)) {
                        best = d;
                        best_i = i;
                    }
                }
            }
        }
        // Once a candidate exists, one more ring guarantees correctness:
        // anything in farther rings is at least ring*cell away.
        if (best_i != npos) {
            const double ring_min = static_cast<double>(ring) * cell_;
            if (ring_min * ring_min > best) break;
        }
        if (!any_cell && ring > 1 && static_cast<std::size_t>(ring) > points_.size() + 2 &&
            best_i != npos)
            break;
        if (ring > 4096) break;  // degenerate guard
    }
    if (dist_out) *dist_out = std::sqrt(best);
    return best_i;
}

std::vector<std::size_t> PointGrid::nearest_k(const Vec2& p, std::size_t k,
                                              std::size_t skip) const {
    std::vector<std::pair<double, std::size_t>> found;
    if (k == 0 || points_.empty()) return {};
    double radius = cell_;
    const std::size_t want = std::min(k, points_.size() - (skip != npos ? 1 : 0));
    for (int iter = 0; iter < 64; ++iter) {
        found.clear();
        auto ids = query_radius(p, radius);
        for (std::size_t i : ids) {
            if (i == skip) continue;
            found.emplace_back((points_[i] - p).squared_norm(), i);
        }
        if (found.size() >= want) {
            std::sort(found.begin(), found.end());
            // All k found must genuinely be the nearest: the k-th distance
            // must not exceed the searched radius.
            if (std::sqrt(found[want - 1].first) <= radius) break;
        }
        radius *= 2.0;
    }
    std::sort(found.begin(), found.end());
    std::vector<std::size_t> out;
    out.reserve(want);
    for (std::size_t i = 0; i < std::min(want, found.size()); ++i) out.push_back(found[i].second);
    return out;
}

void SegmentGrid::rebuild(const std::vector<std::pair<Vec2, Vec2>>& segments, double cell_size) {
    cell_ = cell_size > 0.0 ? cell_size : 1.0;
    segments_ = segments;
    cells_.clear();
    for (std::size_t i = 0; i < segments_.size(); ++i) {
        const auto& [a, b] = segments_[i];
        const std::int64_t cx0 = static_cast<std::int64_t>(std::floor(std::min(a.x, b.x) / cell_));
        const std::int64_t cx1 = static_cast<std::int64_t>(std::floor(std::max(a.x, b.x) / cell_));
        const std::int64_t cy0 = static_cast<std::int64_t>(std::floor(std::min(a.y, b.y) / cell_));
        const std::int64_t cy1 = static_cast<std::int64_t>(std::floor(std::max(a.y, b.y) / cell_));
        for (std::int64_t cx = cx0; cx <= cx1; ++cx)
            for (std::int64_t cy = cy0; cy <= cy1; ++cy) cells_[CellKey{cx, cy}].push_back(i);
    }
}

std::vector<std::size_t> SegmentGrid::query_box(const Vec2& lo, const Vec2& hi) const {
    std::vector<std::size_t> out;
    const std::int64_t cx0 = static_cast<std::int64_t>(std::floor(lo.x / cell_));
    const std::int64_t cx1 = static_cast<std::int64_t>(std::floor(hi.x / cell_));
    const std::int64_t cy0 = static_cast<std::int64_t>(std::floor(lo.y / cell_));
    const std::int64_t cy1 = static_cast<std::int64_t>(std::floor(hi.y / cell_));
    for (std::int64_t cx = cx0; cx <= cx1; ++cx) {
        for (std::int64_t cy = cy0; cy <= cy1; ++cy) {
            auto it = cells_.find(CellKey{cx, cy});
            if (it == cells_.end()) continue;
            out.insert(out.end(), it->second.begin(), it->second.end());
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace sc::geom
