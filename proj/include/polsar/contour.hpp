#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <queue>
#include <stdexcept>
#include <utility>
#include <vector>

#include "bspline.hpp"
#include "core.hpp"
#include "estimation.hpp"

namespace polsar {

using Point2 = std::array<double, 2>;
using Pixel = std::array<int, 2>;
using Polygon = std::vector<Point2>;

// ---------------------------------------------------------------------------
// Plane geometry helpers
// ---------------------------------------------------------------------------

namespace geom {

inline double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Monotone chain; returns the hull in counterclockwise order without
// repeating the first point.
inline Polygon convex_hull(Polygon pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    const std::size_t n = pts.size();
    if (n < 3) return pts;
    Polygon hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    const std::size_t lower = k + 1;
    for (std::size_t i = n - 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
        hull[k++] = pts[i];
    }
    hull.resize(k - 1);
    return hull;
}

inline double polygon_area(const Polygon& p) {
    double acc = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = p[i];
        const Point2& b = p[(i + 1) % n];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    return 0.5 * acc;
}

inline Point2 polygon_centroid(const Polygon& p) {
    const double area = polygon_area(p);
    if (std::abs(area) < 1e-12) {
        // degenerate polygon: fall back to the vertex mean
        Point2 m{0.0, 0.0};
        for (const auto& v : p) {
            m[0] += v[0];
            m[1] += v[1];
        }
        m[0] /= static_cast<double>(p.size());
        m[1] /= static_cast<double>(p.size());
        return m;
    }
    double cx = 0.0, cy = 0.0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = p[i];
        const Point2& b = p[(i + 1) % n];
        const double w = a[0] * b[1] - b[0] * a[1];
        cx += (a[0] + b[0]) * w;
        cy += (a[1] + b[1]) * w;
    }
    return {cx / (6.0 * area), cy / (6.0 * area)};
}

inline bool point_in_polygon(const Polygon& poly, double x, double y) {
    bool inside = false;
    const std::size_t n = poly.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const bool crosses = (poly[i][1] > y) != (poly[j][1] > y);
        if (crosses) {
            const double t = (y - poly[j][1]) / (poly[i][1] - poly[j][1]);
            if (x < poly[j][0] + t * (poly[i][0] - poly[j][0])) inside = !inside;
        }
    }
    return inside;
}

// Largest t >= 0 with origin + t*dir on the polygon boundary; the exit
// distance for interior origins. Returns nullopt if the ray never meets
// the boundary.
inline std::optional<double> ray_polygon_exit(const Point2& origin, double dx, double dy,
                                              const Polygon& poly) {
    std::optional<double> best;
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = poly[i];
        const Point2& b = poly[(i + 1) % n];
        const double ex = b[0] - a[0];
        const double ey = b[1] - a[1];
        const double den = dx * ey - dy * ex;
        if (std::abs(den) < 1e-14) continue;
        const double t = ((a[0] - origin[0]) * ey - (a[1] - origin[1]) * ex) / den;
        const double s = ((a[0] - origin[0]) * dy - (a[1] - origin[1]) * dx) / den;
        if (t >= 0.0 && s >= -1e-12 && s <= 1.0 + 1e-12) {
            if (!best || t > *best) best = t;
        }
    }
    return best;
}

inline std::vector<Pixel> bresenham(Pixel a, Pixel b) {
    std::vector<Pixel> out;
    int x0 = a[0], y0 = a[1];
    const int dx = std::abs(b[0] - x0), sx = x0 < b[0] ? 1 : -1;
    const int dy = -std::abs(b[1] - y0), sy = y0 < b[1] ? 1 : -1;
    int err = dx + dy;
    while (true) {
        out.push_back({x0, y0});
        if (x0 == b[0] && y0 == b[1]) break;
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
    return out;
}

// Pixels whose integer coordinates fall inside the polygon (even-odd rule),
// found by horizontal scanline spans.
inline std::vector<Pixel> polygon_interior_pixels(const Polygon& poly, int width, int height) {
    std::vector<Pixel> out;
    if (poly.size() < 3) return out;
    double ylo = std::numeric_limits<double>::max(), yhi = std::numeric_limits<double>::lowest();
    for (const auto& p : poly) {
        ylo = std::min(ylo, p[1]);
        yhi = std::max(yhi, p[1]);
    }
    const int y0 = std::max(0, static_cast<int>(std::ceil(ylo)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(yhi)));
    std::vector<double> xs;
    const std::size_t n = poly.size();
    for (int y = y0; y <= y1; ++y) {
        xs.clear();
        const double yc = static_cast<double>(y);
        for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
            const double yi = poly[i][1], yj = poly[j][1];
            if ((yi > yc) != (yj > yc)) {
                const double t = (yc - yj) / (yi - yj);
                xs.push_back(poly[j][0] + t * (poly[i][0] - poly[j][0]));
            }
        }
        std::sort(xs.begin(), xs.end());
        for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
            const int xa = std::max(0, static_cast<int>(std::ceil(xs[k])));
            const int xb = std::min(width - 1, static_cast<int>(std::floor(xs[k + 1])));
            for (int x = xa; x <= xb; ++x) out.push_back({x, y});
        }
    }
    return out;
}

}  // namespace geom

// ---------------------------------------------------------------------------
// Region seeds
// ---------------------------------------------------------------------------

struct AutoRegionParams {
    double t_r_lo = 0.0;  // half-open roughness band [t_r_lo, t_r_hi)
    double t_r_hi = 0.0;
    int t_s = 4;      // minimum component size in blocks
    int block = 11;   // block side in pixels
};

struct RegionSeed {
    Polygon polygon;
    Point2 centroid{};
};

namespace detail {

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len2 = ex * ex + ey * ey;
    double t = 0.0;
    if (len2 > 0.0) t = std::clamp(((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2, 0.0, 1.0);
    const double qx = a[0] + t * ex - p[0];
    const double qy = a[1] + t * ey - p[1];
    return std::sqrt(qx * qx + qy * qy);
}

inline double distance_to_boundary(const Polygon& poly, const Point2& p) {
    double best = std::numeric_limits<double>::max();
    const std::size_t n = poly.size();
    for (std::size_t i = 0; i < n; ++i)
        best = std::min(best, point_segment_distance(p, poly[i], poly[(i + 1) % n]));
    return best;
}

// Interior point farthest from the boundary, approximated by a grid scan
// over the bounding box. Used when a non-convex polygon's centroid falls
// outside it.
inline Point2 pole_of_inaccessibility(const Polygon& poly) {
    double xlo = std::numeric_limits<double>::max(), xhi = std::numeric_limits<double>::lowest();
    double ylo = xlo, yhi = xhi;
    for (const auto& v : poly) {
        xlo = std::min(xlo, v[0]);
        xhi = std::max(xhi, v[0]);
        ylo = std::min(ylo, v[1]);
        yhi = std::max(yhi, v[1]);
    }
    constexpr int kGrid = 64;
    Point2 best{};
    double best_d = -1.0;
    for (int iy = 0; iy <= kGrid; ++iy)
        for (int ix = 0; ix <= kGrid; ++ix) {
            const Point2 p{xlo + (xhi - xlo) * ix / kGrid, ylo + (yhi - ylo) * iy / kGrid};
            if (!geom::point_in_polygon(poly, p[0], p[1])) continue;
            const double d = distance_to_boundary(poly, p);
            if (d > best_d) {
                best_d = d;
                best = p;
            }
        }
    if (best_d < 0.0) throw std::invalid_argument("pole_of_inaccessibility: polygon has no interior");
    return best;
}

}  // namespace detail

// Manual region: polygon supplied by the caller. Rays are cast from the
// centroid; when a non-convex polygon places the centroid outside, the
// pole of inaccessibility stands in so the cast origin is always interior.
inline RegionSeed make_manual_seed(const Polygon& polygon) {
    if (polygon.size() < 3) throw std::invalid_argument("make_manual_seed: polygon needs >= 3 vertices");
    RegionSeed seed;
    seed.polygon = polygon;
    seed.centroid = geom::polygon_centroid(polygon);
    if (!geom::point_in_polygon(polygon, seed.centroid[0], seed.centroid[1]))
        seed.centroid = detail::pole_of_inaccessibility(polygon);
    return seed;
}

// Coarse localization: block-wise roughness, threshold band, 4-connected
// components of at least t_s blocks, each reported as the convex hull of
// its blocks' corner points (centroid of a convex hull is always interior).
inline std::vector<RegionSeed> find_initial_regions(const PolSarImage& img, const AutoRegionParams& p) {
    if (!(p.t_r_hi > p.t_r_lo)) throw std::invalid_argument("find_initial_regions: empty roughness band");
    if (p.t_s < 1) throw std::invalid_argument("find_initial_regions: t_s must be >= 1");
    const BlockGrid grid = block_grid_omega(img, p.block);

    std::vector<char> marked(static_cast<std::size_t>(grid.cols) * grid.rows, 0);
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
            const auto& w = grid.at(c, r);
            if (w && *w >= p.t_r_lo && *w < p.t_r_hi)
                marked[static_cast<std::size_t>(r) * grid.cols + c] = 1;
        }

    std::vector<int> comp(marked.size(), -1);
    std::vector<RegionSeed> seeds;
    int next = 0;
    for (int r = 0; r < grid.rows; ++r) {
        for (int c = 0; c < grid.cols; ++c) {
            const std::size_t start = static_cast<std::size_t>(r) * grid.cols + c;
            if (!marked[start] || comp[start] >= 0) continue;
            std::vector<std::array<int, 2>> cells;
            std::queue<std::array<int, 2>> bfs;
            bfs.push({c, r});
            comp[start] = next;
            while (!bfs.empty()) {
                const auto [cc, cr] = bfs.front();
                bfs.pop();
                cells.push_back({cc, cr});
                const int dx[4] = {1, -1, 0, 0};
                const int dy[4] = {0, 0, 1, -1};
                for (int k = 0; k < 4; ++k) {
                    const int nc = cc + dx[k], nr = cr + dy[k];
                    if (nc < 0 || nc >= grid.cols || nr < 0 || nr >= grid.rows) continue;
                    const std::size_t ni = static_cast<std::size_t>(nr) * grid.cols + nc;
                    if (!marked[ni] || comp[ni] >= 0) continue;
                    comp[ni] = next;
                    bfs.push({nc, nr});
                }
            }
            ++next;
            if (cells.size() < static_cast<std::size_t>(p.t_s)) continue;
            Polygon corners;
            corners.reserve(cells.size() * 4);
            for (const auto& cell : cells) {
                const double x0 = static_cast<double>(cell[0]) * p.block;
                const double y0 = static_cast<double>(cell[1]) * p.block;
                const double x1 = x0 + p.block;
                const double y1 = y0 + p.block;
                corners.push_back({x0, y0});
                corners.push_back({x1, y0});
                corners.push_back({x0, y1});
                corners.push_back({x1, y1});
            }
            RegionSeed seed;
            seed.polygon = geom::convex_hull(corners);
            seed.centroid = geom::polygon_centroid(seed.polygon);
            seeds.push_back(std::move(seed));
        }
    }
    return seeds;
}

// ---------------------------------------------------------------------------
// Radial fan
// ---------------------------------------------------------------------------

struct Ray {
    double angle = 0.0;
    std::vector<Pixel> path;  // from the centroid pixel outward
};

struct RadialFan {
    Point2 center{};
    std::vector<Ray> rays;
};

// n_rays equally spaced rays from the seed centroid, each extended to
// reach times the centroid-to-polygon distance along that direction and
// truncated at the image border.
inline RadialFan build_fan(int width, int height, const RegionSeed& seed, int n_rays, double reach) {
    if (n_rays < 3) throw std::invalid_argument("build_fan: need at least 3 rays");
    if (!(reach > 1.0)) throw std::invalid_argument("build_fan: reach must exceed 1");
    RadialFan fan;
    fan.center = seed.centroid;
    fan.rays.reserve(static_cast<std::size_t>(n_rays));
    for (int i = 0; i < n_rays; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / n_rays;
        const double dx = std::cos(angle);
        const double dy = std::sin(angle);
        const auto exit = geom::ray_polygon_exit(seed.centroid, dx, dy, seed.polygon);
        if (!exit) throw std::invalid_argument("build_fan: centroid is not interior to the polygon");
        double t_end = reach * *exit;
        // clip against the border so the path's last pixel stays on-image
        if (dx > 1e-12) t_end = std::min(t_end, (width - 1 - seed.centroid[0]) / dx);
        if (dx < -1e-12) t_end = std::min(t_end, (0.0 - seed.centroid[0]) / dx);
        if (dy > 1e-12) t_end = std::min(t_end, (height - 1 - seed.centroid[1]) / dy);
        if (dy < -1e-12) t_end = std::min(t_end, (0.0 - seed.centroid[1]) / dy);
        t_end = std::max(t_end, 0.0);
        Ray ray;
        ray.angle = angle;
        const Pixel start{static_cast<int>(std::lround(seed.centroid[0])),
                          static_cast<int>(std::lround(seed.centroid[1]))};
        const Pixel stop{static_cast<int>(std::lround(seed.centroid[0] + t_end * dx)),
                         static_cast<int>(std::lround(seed.centroid[1] + t_end * dy))};
        ray.path = geom::bresenham(start, stop);
        fan.rays.push_back(std::move(ray));
    }
    return fan;
}

// ---------------------------------------------------------------------------
// Transition detection
// ---------------------------------------------------------------------------

struct TransitionResult {
    std::size_t index = 0;
    double position = 0.0;
    double response = 0.0;  // signed mask response at the chosen entry
    bool edge = false;
};

// Step-mask scan over a (position, value) series: at entry s the response is
// mean(value[s .. s+mask_half-1]) - mean(value[s-mask_half .. s-1]); the
// entry with the largest |response| wins, ties going to the smaller
// position. A constant series has zero response everywhere and reports "no
// edge". Adding a constant to all values leaves the result unchanged.
inline TransitionResult detect_transition(const std::vector<std::pair<double, double>>& series,
                                          int mask_half) {
    if (mask_half < 1) throw std::invalid_argument("detect_transition: mask_half must be >= 1");
    const std::size_t n = series.size();
    if (n < 2 * static_cast<std::size_t>(mask_half))
        throw std::invalid_argument("detect_transition: series shorter than the mask");
    TransitionResult best;
    for (std::size_t s = static_cast<std::size_t>(mask_half); s + mask_half <= n; ++s) {
        double right = 0.0, left = 0.0;
        for (int k = 0; k < mask_half; ++k) {
            right += series[s + static_cast<std::size_t>(k)].second;
            left += series[s - static_cast<std::size_t>(mask_half) + static_cast<std::size_t>(k)].second;
        }
        const double response = (right - left) / mask_half;
        if (std::abs(response) > std::abs(best.response)) {
            best.index = s;
            best.position = series[s].first;
            best.response = response;
            best.edge = true;
        }
    }
    if (best.response == 0.0) best.edge = false;
    return best;
}

// ---------------------------------------------------------------------------
// Series conditioning
// ---------------------------------------------------------------------------

enum class SeriesChannel { HH = 0, HV = 1, VV = 2, Combined = 3 };

// Prepares a raw windowed series for the step mask. Estimates at or above
// omega_max signal homogeneity beyond the model's resolving range and are
// treated exactly like invalid entries: interior runs are linearly
// interpolated from the nearest usable neighbors and head/tail runs take
// the nearest usable value. An all-unusable series returns empty (no edge
// can be claimed from it).
inline std::vector<std::pair<double, double>> conditioned_series(const std::vector<SeriesEntry>& raw,
                                                                 SeriesChannel channel,
                                                                 double omega_max) {
    const std::size_t n = raw.size();
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    std::vector<std::size_t> valid_idx;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& e = raw[i];
        const std::optional<double>& v =
            channel == SeriesChannel::Combined ? e.omega : e.omega_channel[static_cast<int>(channel)];
        const bool usable = v && *v < omega_max;
        out.emplace_back(e.position, usable ? *v : 0.0);
        if (usable) valid_idx.push_back(i);
    }
    if (valid_idx.empty()) return {};
    std::size_t prev = valid_idx.front();
    for (std::size_t i = 0; i < prev; ++i) out[i].second = out[prev].second;  // head run
    for (std::size_t vi = 1; vi < valid_idx.size(); ++vi) {
        const std::size_t next = valid_idx[vi];
        for (std::size_t i = prev + 1; i < next; ++i) {
            const double t = static_cast<double>(i - prev) / static_cast<double>(next - prev);
            out[i].second = (1.0 - t) * out[prev].second + t * out[next].second;
        }
        prev = next;
    }
    for (std::size_t i = prev + 1; i < n; ++i) out[i].second = out[prev].second;  // tail run
    return out;
}

// ---------------------------------------------------------------------------
// Boundary detection
// ---------------------------------------------------------------------------

struct ContourParams {
    int n_rays = 16;
    double reach = 1.8;
    WindowParams window{};
    int mask_half = 5;
    int degree = 3;
    double omega_max = 100.0;
    // Soft cap applied to the series before the step mask: w -> w/(1+w/c).
    // Roughness contrasts live at small omega while plateau noise grows
    // with omega, so compressing the top of the scale sharpens the mask
    // response at a texture edge without inventing spurious ones.
    double saturation = 8.0;
};

namespace detail {

// Monotone compression of the roughness scale; near-identity below the
// saturation constant, asymptotically flat above it.
inline double saturate_omega(double w, double c) { return w / (1.0 + w / c); }

}  // namespace detail

struct RegionBoundary {
    bool detected = false;
    std::vector<Point2> border_points;  // angular order of the surviving rays
    BSplineContour contour;
    std::optional<double> omega;  // combined roughness of the enclosed pixels
    int rays_used = 0;
    int rays_total = 0;
};

namespace detail {

inline std::optional<Point2> ray_border_point(const PolSarImage& img, const Ray& ray,
                                              const ContourParams& params) {
    if (ray.path.size() < static_cast<std::size_t>(params.window.win_len)) return std::nullopt;
    const std::vector<SeriesEntry> raw = windowed_omega_series(img, ray.path, params.window);
    std::vector<std::pair<double, double>> series =
        conditioned_series(raw, SeriesChannel::Combined, params.omega_max);
    if (series.size() < 2 * static_cast<std::size_t>(params.mask_half)) return std::nullopt;
    if (params.saturation > 0.0)
        for (auto& pv : series) pv.second = saturate_omega(pv.second, params.saturation);
    const TransitionResult tr = detect_transition(series, params.mask_half);
    if (!tr.edge) return std::nullopt;
    const auto idx = static_cast<std::size_t>(std::llround(tr.position));
    if (idx >= ray.path.size()) return std::nullopt;
    return Point2{static_cast<double>(ray.path[idx][0]), static_cast<double>(ray.path[idx][1])};
}

}  // namespace detail

// Full boundary pipeline for one seed: radial fan, per-ray windowed series,
// step-mask transition, closed B-spline through the surviving border
// points, then a roughness fit of the enclosed pixels. Rays whose series
// yields no edge are dropped; the region fails when fewer than degree+1
// border points survive.
inline RegionBoundary detect_region_boundary(const PolSarImage& img, const RegionSeed& seed,
                                             const ContourParams& params) {
    RegionBoundary rb;
    const RadialFan fan = build_fan(img.width, img.height, seed, params.n_rays, params.reach);
    rb.rays_total = static_cast<int>(fan.rays.size());
    for (const Ray& ray : fan.rays) {
        const auto pt = detail::ray_border_point(img, ray, params);
        if (pt) rb.border_points.push_back(*pt);
    }
    rb.rays_used = static_cast<int>(rb.border_points.size());
    if (rb.border_points.size() < static_cast<std::size_t>(params.degree) + 1) return rb;

    rb.contour = bspline_interpolate_closed(rb.border_points, params.degree);
    rb.detected = true;

    const Polygon outline = sample_contour(rb.contour, std::max(256, 16 * rb.rays_used));
    const std::vector<Pixel> inside = geom::polygon_interior_pixels(outline, img.width, img.height);
    if (!inside.empty()) {
        SampleMoments m = collect_moments(img, inside);
        bool usable = true;
        for (int c = 0; c < 3; ++c)
            if (!(m.channel[c].m1 > 0.0) || !(m.channel[c].m2 > 0.0)) usable = false;
        if (usable) {
            std::array<std::optional<double>, 3> per;
            for (int c = 0; c < 3; ++c) per[c] = estimate_omega_channel(m.channel[c], img.looks);
            rb.omega = combine_mean(per);
        }
    }
    return rb;
}

inline std::vector<RegionBoundary> detect_boundaries(const PolSarImage& img,
                                                     const std::vector<RegionSeed>& seeds,
                                                     const ContourParams& params) {
    std::vector<RegionBoundary> out;
    out.reserve(seeds.size());
    for (const RegionSeed& s : seeds) out.push_back(detect_region_boundary(img, s, params));
    return out;
}

}  // namespace polsar
