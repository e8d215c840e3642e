#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace polsar {

// Modified Bessel function of the second kind at half-integer order,
//
//   K_{p+1/2}(nu) = sqrt(pi / (2 nu)) e^{-nu}
//                   sum_{k=0}^{p} (p+k)! / (k! (p-k)! (2 nu)^k),
//
// for integer p >= 0 and nu > 0. Every order the multi-look densities need
// lands on this form, so the general-order machinery is bypassed entirely.
//
// The sum has positive terms only; it is evaluated with the term ratio
//   t_{k+1}/t_k = (p+k+1)(p-k) / ((k+1) 2 nu)
// which is exact in exact arithmetic and loses nothing to cancellation.
// For very small nu the sum overflows; the linear-space function then
// returns +infinity (the true value is astronomically large, not undefined)
// and log_bessel_k_half stays finite and should be used instead.

namespace detail {

inline void check_k_half_args(int p, double nu) {
    if (p < 0) throw std::invalid_argument("bessel_k_half: order index p must be >= 0");
    if (!(nu > 0.0)) throw std::domain_error("bessel_k_half: argument nu must be > 0");
}

}  // namespace detail

inline double bessel_k_half(int p, double nu) {
    detail::check_k_half_args(p, nu);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 0; k < p; ++k) {
        term *= static_cast<double>(p + k + 1) * static_cast<double>(p - k) /
                (static_cast<double>(k + 1) * 2.0 * nu);
        sum += term;
    }
    return std::sqrt(std::numbers::pi / (2.0 * nu)) * std::exp(-nu) * sum;
}

inline double log_bessel_k_half(int p, double nu) {
    detail::check_k_half_args(p, nu);
    // log-sum-exp over log t_k = lgamma(p+k+1) - lgamma(k+1) - lgamma(p-k+1) - k log(2 nu)
    const double l2nu = std::log(2.0 * nu);
    double peak = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(static_cast<std::size_t>(p) + 1);
    for (int k = 0; k <= p; ++k) {
        const double lt = std::lgamma(static_cast<double>(p + k + 1)) -
                          std::lgamma(static_cast<double>(k + 1)) -
                          std::lgamma(static_cast<double>(p - k + 1)) - k * l2nu;
        logs[static_cast<std::size_t>(k)] = lt;
        peak = std::max(peak, lt);
    }
    double acc = 0.0;
    for (double lt : logs) acc += std::exp(lt - peak);
    return 0.5 * (std::log(std::numbers::pi) - l2nu) - nu + peak + std::log(acc);
}

}  // namespace polsar
