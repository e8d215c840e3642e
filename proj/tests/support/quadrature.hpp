#pragma once

// Numerical scaffolding used only by the test suite: adaptive quadrature
// wrappers, CDF tables for KS statistics, and point-set distances. Nothing
// here is part of the library's public surface.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace testsupport {

inline double integrate(const std::function<double(double)>& f, double a, double b) {
    boost::math::quadrature::gauss_kronrod<double, 31> q;
    return q.integrate(f, a, b, 12, 1e-12);
}

// Integrates f over (0, inf) for unimodal positive integrands. Scans a log
// grid for the peak, brackets the range where x*f(x) is within a factor
// 1e-18 of its peak, and integrates in log space; the substitution keeps
// polynomially decaying tails short where a linear-axis panel count would
// blow up.
inline double integrate_positive_axis(const std::function<double(double)>& f) {
    auto g = [&](double u) {
        const double x = std::exp(u);
        return f(x) * x;
    };
    double peak_u = 0.0;
    double peak_v = 0.0;
    for (double u = -27.0; u <= 27.0; u += 0.1) {
        const double v = g(u);
        if (v > peak_v) {
            peak_v = v;
            peak_u = u;
        }
    }
    if (peak_v <= 0.0) throw std::runtime_error("integrand vanishes on scan grid");
    const double floor = peak_v * 1e-18;
    double lo = peak_u;
    while (lo > -690.0 && g(lo) > floor) lo -= 1.0;
    double hi = peak_u;
    while (hi < 690.0 && g(hi) > floor) hi += 1.0;
    return integrate(g, lo, hi);
}

// Piecewise-linear CDF built from per-cell quadrature of a density. Query
// values outside the table clamp to 0 or 1.
class CdfTable {
  public:
    CdfTable(std::vector<double> x, std::vector<double> cdf)
        : x_(std::move(x)), cdf_(std::move(cdf)) {
        if (x_.size() != cdf_.size() || x_.size() < 2)
            throw std::invalid_argument("cdf table needs matching grids of size >= 2");
    }

    double operator()(double v) const {
        if (v <= x_.front()) return 0.0;
        if (v >= x_.back()) return cdf_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), v);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin());
        const double t = (v - x_[i - 1]) / (x_[i] - x_[i - 1]);
        return cdf_[i - 1] + t * (cdf_[i] - cdf_[i - 1]);
    }

  private:
    std::vector<double> x_;
    std::vector<double> cdf_;
};

// Tabulates the CDF of `pdf` on [lo, hi] with `cells` geometric cells. The
// density must be effectively supported inside [lo, hi].
inline CdfTable make_cdf_table(const std::function<double(double)>& pdf, double lo, double hi,
                               int cells = 400) {
    if (!(lo > 0.0) || !(hi > lo)) throw std::invalid_argument("bad cdf table range");
    std::vector<double> x(static_cast<std::size_t>(cells) + 1);
    const double r = std::pow(hi / lo, 1.0 / cells);
    x[0] = lo;
    for (int i = 1; i <= cells; ++i) x[static_cast<std::size_t>(i)] = x[static_cast<std::size_t>(i - 1)] * r;
    std::vector<double> cdf(x.size(), 0.0);
    for (std::size_t i = 1; i < x.size(); ++i)
        cdf[i] = cdf[i - 1] + integrate(pdf, x[i - 1], x[i]);
    return CdfTable(std::move(x), std::move(cdf));
}

// Kolmogorov-Smirnov statistic of `samples` against the CDF `F`.
inline double ks_statistic(std::vector<double> samples, const std::function<double(double)>& F) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double c = F(samples[i]);
        d = std::max(d, std::abs(c - static_cast<double>(i) / n));
        d = std::max(d, std::abs(c - static_cast<double>(i + 1) / n));
    }
    return d;
}

struct Point2 {
    double x;
    double y;
};

inline double hausdorff(const std::vector<Point2>& a, const std::vector<Point2>& b) {
    auto directed = [](const std::vector<Point2>& from, const std::vector<Point2>& to) {
        double worst = 0.0;
        for (const auto& p : from) {
            double best = 1e300;
            for (const auto& q : to) best = std::min(best, std::hypot(p.x - q.x, p.y - q.y));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

}  // namespace testsupport
