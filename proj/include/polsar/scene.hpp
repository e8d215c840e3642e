#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "contour.hpp"
#include "core.hpp"
#include "distributions.hpp"
#include "rng.hpp"

namespace polsar {

// ---------------------------------------------------------------------------
// Synthetic multi-region scenes
// ---------------------------------------------------------------------------
// A scene is a background texture plus inserts (rectangle, disk, or
// polygon), each with its own model parameters. Where inserts overlap, the
// later one owns the pixel. Rendering emits run-length ground-truth masks so
// downstream evaluation never re-derives the geometry.

struct SceneInsert {
    enum class Shape { Rect, Disk, Polygon };
    Shape shape = Shape::Rect;
    // rect (pixel-aligned, half-open)
    int x = 0, y = 0, w = 0, h = 0;
    // disk
    double cx = 0.0, cy = 0.0, radius = 0.0;
    // polygon (even-odd rule)
    Polygon vertices;
    GphParams params;
};

struct SceneSpec {
    int width = 0;
    int height = 0;
    int looks = 1;
    GphParams background;
    std::vector<SceneInsert> inserts;
};

// Ground-truth ownership as half-open horizontal runs [y, x0, x1).
// Region 0 is the background; insert i owns region i+1.
struct RegionMask {
    int id = 0;
    std::vector<std::array<int, 3>> runs;
};

struct RenderedScene {
    PolSarImage image;
    std::vector<RegionMask> masks;
};

namespace detail {

inline bool insert_contains(const SceneInsert& ins, int px, int py) {
    switch (ins.shape) {
        case SceneInsert::Shape::Rect:
            return px >= ins.x && px < ins.x + ins.w && py >= ins.y && py < ins.y + ins.h;
        case SceneInsert::Shape::Disk: {
            const double dx = px - ins.cx;
            const double dy = py - ins.cy;
            return dx * dx + dy * dy <= ins.radius * ins.radius;
        }
        case SceneInsert::Shape::Polygon:
            return geom::point_in_polygon(ins.vertices, static_cast<double>(px),
                                          static_cast<double>(py));
    }
    return false;
}

inline void check_insert_bounds(const SceneSpec& spec, const SceneInsert& ins, std::size_t index) {
    const auto fail = [index](const char* what) {
        throw std::invalid_argument("scene insert " + std::to_string(index) + ": " + what);
    };
    switch (ins.shape) {
        case SceneInsert::Shape::Rect:
            if (ins.w < 1 || ins.h < 1) fail("empty rectangle");
            if (ins.x < 0 || ins.y < 0 || ins.x + ins.w > spec.width || ins.y + ins.h > spec.height)
                fail("rectangle out of bounds");
            break;
        case SceneInsert::Shape::Disk:
            if (!(ins.radius > 0.0)) fail("disk radius must be > 0");
            if (ins.cx - ins.radius < 0.0 || ins.cx + ins.radius > spec.width - 1 ||
                ins.cy - ins.radius < 0.0 || ins.cy + ins.radius > spec.height - 1)
                fail("disk out of bounds");
            break;
        case SceneInsert::Shape::Polygon:
            if (ins.vertices.size() < 3) fail("polygon needs >= 3 vertices");
            for (const auto& v : ins.vertices)
                if (v[0] < 0.0 || v[0] > spec.width - 1 || v[1] < 0.0 || v[1] > spec.height - 1)
                    fail("polygon vertex out of bounds");
            break;
    }
}

}  // namespace detail

inline void validate_scene(const SceneSpec& spec) {
    if (spec.width < 1 || spec.height < 1) throw std::invalid_argument("scene: bad dimensions");
    if (spec.looks < 1) throw std::invalid_argument("scene: looks must be >= 1");
    for (std::size_t i = 0; i < spec.inserts.size(); ++i)
        detail::check_insert_bounds(spec, spec.inserts[i], i);
}

// Deterministic for (spec, rng seed): ownership is resolved first, then
// pixels are sampled row-major from their owner's texture.
inline RenderedScene render_scene(const SceneSpec& spec, RngState& rng) {
    validate_scene(spec);
    const std::size_t npix = static_cast<std::size_t>(spec.width) * spec.height;
    std::vector<int> owner(npix, 0);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            int o = 0;
            for (std::size_t i = 0; i < spec.inserts.size(); ++i)
                if (detail::insert_contains(spec.inserts[i], x, y)) o = static_cast<int>(i) + 1;
            owner[static_cast<std::size_t>(y) * spec.width + x] = o;
        }

    std::vector<GphSampler> samplers;
    samplers.reserve(spec.inserts.size() + 1);
    samplers.emplace_back(spec.background, spec.looks);
    for (const auto& ins : spec.inserts) samplers.emplace_back(ins.params, spec.looks);

    RenderedScene out;
    out.image = PolSarImage(spec.width, spec.height, spec.looks);
    for (int y = 0; y < spec.height; ++y)
        for (int x = 0; x < spec.width; ++x) {
            const int o = owner[static_cast<std::size_t>(y) * spec.width + x];
            out.image.at(x, y) = samplers[static_cast<std::size_t>(o)].sample(rng);
        }

    out.masks.resize(spec.inserts.size() + 1);
    for (std::size_t r = 0; r < out.masks.size(); ++r) out.masks[r].id = static_cast<int>(r);
    for (int y = 0; y < spec.height; ++y) {
        int x = 0;
        while (x < spec.width) {
            const int o = owner[static_cast<std::size_t>(y) * spec.width + x];
            int x1 = x + 1;
            while (x1 < spec.width && owner[static_cast<std::size_t>(y) * spec.width + x1] == o) ++x1;
            out.masks[static_cast<std::size_t>(o)].runs.push_back({y, x, x1});
            x = x1;
        }
    }
    return out;
}

// Pixels owned by one region, for estimation on ground truth.
inline std::vector<Pixel> mask_pixels(const RegionMask& mask) {
    std::vector<Pixel> out;
    for (const auto& run : mask.runs)
        for (int x = run[1]; x < run[2]; ++x) out.push_back({x, run[0]});
    return out;
}

}  // namespace polsar
