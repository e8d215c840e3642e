#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include <polsar/bspline.hpp>
#include <polsar/contour.hpp>
#include <polsar/rng.hpp>

using namespace polsar;

namespace {

Polygon circle_points(int n, double cx, double cy, double r) {
    Polygon pts(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double a = 2.0 * std::numbers::pi * i / n;
        pts[static_cast<std::size_t>(i)] = {cx + r * std::cos(a), cy + r * std::sin(a)};
    }
    return pts;
}

Polygon random_points(int n, std::uint64_t seed) {
    RngState rng(seed);
    Polygon pts(static_cast<std::size_t>(n));
    for (auto& p : pts) p = {10.0 * rng.uniform(), 10.0 * rng.uniform()};
    return pts;
}

}  // namespace

TEST_CASE("cubic curve value at a knot is the (1,4,1)/6 average") {
    BSplineContour c;
    c.degree = 3;
    c.ctrl = random_points(9, 101u);
    const int m = static_cast<int>(c.ctrl.size());
    for (int j = 0; j < m; ++j) {
        const auto at = bspline_evaluate(c, static_cast<double>(j) / m);
        for (int k = 0; k < 2; ++k) {
            const double expect = (c.ctrl[static_cast<std::size_t>(((j - 3) % m + m) % m)][k] +
                                   4.0 * c.ctrl[static_cast<std::size_t>(((j - 2) % m + m) % m)][k] +
                                   c.ctrl[static_cast<std::size_t>(((j - 1) % m + m) % m)][k]) /
                                  6.0;
            REQUIRE(at[k] == Catch::Approx(expect).margin(1e-12));
        }
    }
}

TEST_CASE("quadratic curve value at a knot midpoint is the (1,6,1)/8 average") {
    BSplineContour c;
    c.degree = 2;
    c.ctrl = random_points(8, 103u);
    const int m = static_cast<int>(c.ctrl.size());
    for (int j = 0; j < m; ++j) {
        const auto at = bspline_evaluate(c, (j + 0.5) / m);
        for (int k = 0; k < 2; ++k) {
            const double expect = (c.ctrl[static_cast<std::size_t>(((j - 2) % m + m) % m)][k] +
                                   6.0 * c.ctrl[static_cast<std::size_t>(((j - 1) % m + m) % m)][k] +
                                   c.ctrl[static_cast<std::size_t>(j)][k]) /
                                  8.0;
            REQUIRE(at[k] == Catch::Approx(expect).margin(1e-12));
        }
    }
}

TEST_CASE("closed interpolation passes through its input points") {
    for (int degree : {3, 4}) {
        const Polygon pts = random_points(12, 107u + static_cast<std::uint64_t>(degree));
        const BSplineContour c = bspline_interpolate_closed(pts, degree);
        REQUIRE(c.degree == degree);
        REQUIRE(c.ctrl.size() == pts.size());
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double t =
                bspline_interpolation_parameter(static_cast<int>(k), static_cast<int>(pts.size()), degree);
            const auto at = bspline_evaluate(c, t);
            REQUIRE(std::hypot(at[0] - pts[k][0], at[1] - pts[k][1]) < 1e-6);
        }
    }
}

TEST_CASE("sixteen circle samples reproduce the circle to half a pixel") {
    const double r = 50.0;
    const BSplineContour c = bspline_interpolate_closed(circle_points(16, 60.0, 60.0, r), 3);
    for (const auto& p : sample_contour(c, 1000)) {
        const double rad = std::hypot(p[0] - 60.0, p[1] - 60.0);
        REQUIRE(std::abs(rad - r) < 0.5);
    }
}

TEST_CASE("curve parameter wraps around the closed contour") {
    BSplineContour c;
    c.degree = 3;
    c.ctrl = random_points(7, 109u);
    for (double t : {0.0, 0.13, 0.77}) {
        const auto a = bspline_evaluate(c, t);
        const auto b = bspline_evaluate(c, t + 1.0);
        const auto d = bspline_evaluate(c, t - 1.0);
        REQUIRE(a[0] == Catch::Approx(b[0]).margin(1e-9));
        REQUIRE(a[1] == Catch::Approx(b[1]).margin(1e-9));
        REQUIRE(a[0] == Catch::Approx(d[0]).margin(1e-9));
        REQUIRE(a[1] == Catch::Approx(d[1]).margin(1e-9));
    }
    const auto start = bspline_evaluate(c, 0.0);
    const auto end = bspline_evaluate(c, 1.0 - 1e-12);
    REQUIRE(std::hypot(start[0] - end[0], start[1] - end[1]) < 1e-9);
}

TEST_CASE("curve stays inside the dilated control hull") {
    BSplineContour c;
    c.degree = 3;
    c.ctrl = random_points(10, 113u);
    Polygon hull = geom::convex_hull(c.ctrl);
    const Point2 center = geom::polygon_centroid(hull);
    for (auto& v : hull) {
        v[0] = center[0] + (v[0] - center[0]) * (1.0 + 1e-9);
        v[1] = center[1] + (v[1] - center[1]) * (1.0 + 1e-9);
    }
    for (const auto& p : sample_contour(c, 1000)) REQUIRE(geom::point_in_polygon(hull, p[0], p[1]));
}

TEST_CASE("interpolation commutes with translation") {
    const Polygon pts = random_points(11, 127u);
    Polygon moved = pts;
    for (auto& p : moved) {
        p[0] += 13.5;
        p[1] -= 4.25;
    }
    const BSplineContour a = bspline_interpolate_closed(pts, 3);
    const BSplineContour b = bspline_interpolate_closed(moved, 3);
    for (std::size_t k = 0; k < a.ctrl.size(); ++k) {
        REQUIRE(b.ctrl[k][0] == Catch::Approx(a.ctrl[k][0] + 13.5).margin(1e-9));
        REQUIRE(b.ctrl[k][1] == Catch::Approx(a.ctrl[k][1] - 4.25).margin(1e-9));
    }
}

TEST_CASE("spline argument validation") {
    BSplineContour c;
    c.degree = 1;
    c.ctrl = random_points(5, 131u);
    REQUIRE_THROWS_AS(bspline_evaluate(c, 0.5), std::invalid_argument);

    BSplineContour few;
    few.degree = 3;
    few.ctrl = random_points(3, 137u);
    REQUIRE_THROWS_AS(bspline_evaluate(few, 0.5), std::invalid_argument);

    REQUIRE_THROWS_AS(bspline_interpolate_closed(random_points(3, 139u), 3), std::invalid_argument);
    REQUIRE_THROWS_AS(bspline_interpolate_closed(random_points(8, 149u), 1), std::invalid_argument);
}
