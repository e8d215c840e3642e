#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace polsar {

// Closed (periodic) uniform B-spline curve in the plane. Control points
// wrap around; the curve parameter t lives on [0, 1) and maps onto the
// knot parameter u = t * ctrl.size() with integer knots.
struct BSplineContour {
    int degree = 3;
    std::vector<std::array<double, 2>> ctrl;
};

namespace detail {

// Cox-de Boor basis N_{i,d}(u) on the infinite uniform knot vector t_j = j.
// Direct recursion; only used to assemble small interpolation systems.
inline double bspline_basis(int i, int d, double u) {
    if (d == 0) return (u >= i && u < i + 1) ? 1.0 : 0.0;
    const double left = (u - i) / d * bspline_basis(i, d - 1, u);
    const double right = (i + d + 1 - u) / d * bspline_basis(i + 1, d - 1, u);
    return left + right;
}

// Dense LU solve with partial pivoting for the cyclic interpolation system;
// b holds nrhs right-hand sides column-major. Returns false when singular.
inline bool lu_solve(std::vector<double>& a, int n, std::vector<double>& b, int nrhs) {
    auto A = [&](int r, int c) -> double& { return a[static_cast<std::size_t>(r) * n + c]; };
    auto B = [&](int r, int k) -> double& { return b[static_cast<std::size_t>(k) * n + r]; };
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A(r, col)) > std::abs(A(piv, col))) piv = r;
        if (std::abs(A(piv, col)) < 1e-14) return false;
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(A(piv, c), A(col, c));
            for (int k = 0; k < nrhs; ++k) std::swap(B(piv, k), B(col, k));
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = A(r, col) / A(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) A(r, c) -= f * A(col, c);
            for (int k = 0; k < nrhs; ++k) B(r, k) -= f * B(col, k);
        }
    }
    for (int col = n - 1; col >= 0; --col) {
        for (int k = 0; k < nrhs; ++k) {
            double acc = B(col, k);
            for (int c = col + 1; c < n; ++c) acc -= A(col, c) * b[static_cast<std::size_t>(k) * n + c];
            B(col, k) = acc / A(col, col);
        }
    }
    return true;
}

inline void check_contour(const BSplineContour& s) {
    if (s.degree < 2) throw std::invalid_argument("bspline: degree must be >= 2");
    if (s.ctrl.size() < static_cast<std::size_t>(s.degree) + 1)
        throw std::invalid_argument("bspline: needs at least degree+1 control points");
}

}  // namespace detail

// Point on the closed curve at t in [0, 1); values outside are wrapped.
// de Boor's algorithm on integer knots with periodic control indices.
inline std::array<double, 2> bspline_evaluate(const BSplineContour& s, double t) {
    detail::check_contour(s);
    const int m = static_cast<int>(s.ctrl.size());
    double frac = t - std::floor(t);
    double u = frac * m;
    if (u >= m) u = 0.0;  // guard the t = 1-epsilon rounding edge
    const int j = static_cast<int>(u);
    const int d = s.degree;

    std::vector<std::array<double, 2>> pt(static_cast<std::size_t>(d) + 1);
    for (int k = 0; k <= d; ++k) {
        const int idx = ((j - d + k) % m + m) % m;
        pt[static_cast<std::size_t>(k)] = s.ctrl[static_cast<std::size_t>(idx)];
    }
    for (int r = 1; r <= d; ++r) {
        for (int k = d; k >= r; --k) {
            const double knot = static_cast<double>(j - d + k);
            const double alpha = (u - knot) / static_cast<double>(d - r + 1);
            for (int c = 0; c < 2; ++c)
                pt[static_cast<std::size_t>(k)][c] = (1.0 - alpha) * pt[static_cast<std::size_t>(k - 1)][c] +
                                                     alpha * pt[static_cast<std::size_t>(k)][c];
        }
    }
    return pt[static_cast<std::size_t>(d)];
}

inline std::vector<std::array<double, 2>> sample_contour(const BSplineContour& s, int count) {
    std::vector<std::array<double, 2>> pts(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
        pts[static_cast<std::size_t>(i)] = bspline_evaluate(s, static_cast<double>(i) / count);
    return pts;
}

// Closed curve through the given points, in order. Point k is assigned the
// knot parameter k for odd degrees and k + 1/2 for even degrees (cardinal
// interpolation at knots is singular for even degrees; midpoints restore a
// diagonally dominant system). Solved as one dense cyclic-banded system per
// coordinate. Throws when fewer than degree+1 points are supplied or the
// system is singular.
inline BSplineContour bspline_interpolate_closed(const std::vector<std::array<double, 2>>& points,
                                                 int degree) {
    if (degree < 2) throw std::invalid_argument("bspline_interpolate_closed: degree must be >= 2");
    const int m = static_cast<int>(points.size());
    if (m < degree + 1)
        throw std::invalid_argument("bspline_interpolate_closed: needs at least degree+1 points");

    const double shift = (degree % 2 == 0) ? 0.5 : 0.0;
    std::vector<double> a(static_cast<std::size_t>(m) * m, 0.0);
    for (int k = 0; k < m; ++k) {
        const double u = k + shift;
        for (int i = 0; i < m; ++i) {
            double v = detail::bspline_basis(i, degree, u);
            v += detail::bspline_basis(i - m, degree, u);
            v += detail::bspline_basis(i + m, degree, u);
            a[static_cast<std::size_t>(k) * m + i] = v;
        }
    }
    std::vector<double> rhs(static_cast<std::size_t>(m) * 2);
    for (int k = 0; k < m; ++k) {
        rhs[static_cast<std::size_t>(k)] = points[static_cast<std::size_t>(k)][0];
        rhs[static_cast<std::size_t>(m) + k] = points[static_cast<std::size_t>(k)][1];
    }
    if (!detail::lu_solve(a, m, rhs, 2))
        throw std::runtime_error("bspline_interpolate_closed: singular interpolation system");

    BSplineContour s;
    s.degree = degree;
    s.ctrl.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k)
        s.ctrl[static_cast<std::size_t>(k)] = {rhs[static_cast<std::size_t>(k)],
                                               rhs[static_cast<std::size_t>(m) + k]};
    return s;
}

// Parameter at which interpolation point k is met (matches the assignment
// used by bspline_interpolate_closed, normalized to [0, 1)).
inline double bspline_interpolation_parameter(int k, int point_count, int degree) {
    const double shift = (degree % 2 == 0) ? 0.5 : 0.0;
    return (k + shift) / static_cast<double>(point_count);
}

}  // namespace polsar
