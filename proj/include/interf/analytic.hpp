#pragma once

// Closed-form expectations and sensitivities for the coherent-state
// interferometer.  Factorial and exponential composites are combined in the
// log domain so nothing overflows for nbar up to several hundred.

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include <boost/math/tools/minima.hpp>

#include "interf/errors.hpp"

namespace interf::analytic {

namespace detail {

inline void require_power(double nbar) {
    if (!std::isfinite(nbar) || nbar < 0.0)
        throw domain_error("nbar must be finite and non-negative");
}

inline void require_order(int N) {
    if (N < 0)
        throw domain_error("order must be non-negative");
}

// log( e^{-nbar} (nbar/2)^N / N! ), -inf when nbar = 0 < N.
inline double log_poisson_half(double nbar, int N) {
    if (N == 0)
        return -nbar;
    if (nbar == 0.0)
        return -INFINITY;
    return -nbar + N * std::log(0.5 * nbar) - std::lgamma(N + 1.0);
}

// Slopes closer to zero than this are stationary points.
inline constexpr double stationary_floor = 1e-12;

inline std::optional<double> finite_or_empty(double x) {
    if (std::isfinite(x))
        return x;
    return std::nullopt;
}

} // namespace detail

// -- reference curves -------------------------------------------------------

inline double snl_sq(double nbar) { return 1.0 / nbar; }
inline double hl_sq(double nbar) { return 1.0 / (nbar * nbar); }

/// Normalized two-port difference fringe.
inline double classical_fringe(double phi) { return 0.5 * (1.0 + std::cos(phi)); }
inline double classical_sensitivity_sq(double nbar) { return snl_sq(nbar); }

// -- N00N projector ---------------------------------------------------------

/// 2 e^{-nbar} (nbar/2)^N cos(N phi) / N!
inline double noon_expectation(double nbar, int N, double phi) {
    detail::require_power(nbar);
    detail::require_order(N);
    return 2.0 * std::exp(detail::log_poisson_half(nbar, N)) * std::cos(N * phi);
}

inline double noon_second_moment(double nbar, int N) {
    detail::require_power(nbar);
    detail::require_order(N);
    const double p = std::exp(detail::log_poisson_half(nbar, N));
    return N == 0 ? 4.0 * p : 2.0 * p;
}

inline double noon_dmean_dphi(double nbar, int N, double phi) {
    detail::require_power(nbar);
    detail::require_order(N);
    return -2.0 * N * std::exp(detail::log_poisson_half(nbar, N)) * std::sin(N * phi);
}

/// (2^N e^nbar N! - 2 nbar^N cos^2 N phi) / (2 nbar^N sin^2 N phi) / N^2.
inline std::optional<double> noon_sensitivity_sq(double nbar, int N, double phi) {
    detail::require_power(nbar);
    detail::require_order(N);
    const double s = std::sin(N * phi);
    if (N == 0 || nbar == 0.0 || std::abs(s) < detail::stationary_floor)
        return std::nullopt;
    const double c = std::cos(N * phi);
    // 2^N e^nbar N! / (2 nbar^N) = 1 / (2 e^{-nbar} (nbar/2)^N / N!)
    const double lead = std::exp(-std::log(2.0) - detail::log_poisson_half(nbar, N));
    return detail::finite_or_empty((lead - c * c) / (s * s * N * N));
}

struct OptimalNoon {
    double exact;
    double stirling;
};

/// Sensitivity at N = nbar and N phi = pi/2, exact and with Stirling's n!.
inline OptimalNoon noon_sensitivity_optimal(int nbar) {
    if (nbar < 1)
        throw domain_error("optimal N00N sensitivity needs nbar >= 1");
    const double n = nbar;
    const double ln2 = std::log(2.0);
    const double log_exact = n * ln2 + n + std::lgamma(n + 1.0) - ln2 - n * std::log(n) - 2.0 * std::log(n);
    const double log_stirling = 0.5 * std::log(0.5 * std::numbers::pi) + n * ln2 - 1.5 * std::log(n);
    return {std::exp(log_exact), std::exp(log_stirling)};
}

/// Interferogram amplitude 2 e^{-nbar} (nbar/2)^N / N!.
inline double noon_visibility(double nbar, int N) {
    detail::require_power(nbar);
    if (N < 1)
        throw domain_error("visibility needs N >= 1");
    return 2.0 * std::exp(detail::log_poisson_half(nbar, N));
}

/// Return power that maximizes the N00N visibility, found numerically.
inline double optimal_nbar_for_N(int N) {
    if (N < 1)
        throw domain_error("visibility needs N >= 1");
    auto neg_log_vis = [N](double x) { return -(N * std::log(x) - x); };
    const double hi = 4.0 * N + 10.0;
    auto r = boost::math::tools::brent_find_minima(neg_log_vis, 1e-9, hi, std::numeric_limits<double>::digits);
    return r.first;
}

// -- nu: sum of N00N projectors --------------------------------------------

enum class NuForm { exact, small_angle };

/// 2 e^{-nbar + nbar cos(phi)/2} cos(nbar sin(phi)/2), or near the origin
/// 2 e^{-nbar/2} cos(nbar phi / 2).
inline double nu_expectation(double nbar, double phi, NuForm form = NuForm::exact) {
    detail::require_power(nbar);
    if (form == NuForm::small_angle)
        return 2.0 * std::exp(-0.5 * nbar) * std::cos(0.5 * nbar * phi);
    return 2.0 * std::exp(-nbar + 0.5 * nbar * std::cos(phi)) * std::cos(0.5 * nbar * std::sin(phi));
}

inline double nu_second_moment(double nbar) {
    detail::require_power(nbar);
    return 2.0 * std::exp(-0.5 * nbar) + 2.0 * std::exp(-nbar);
}

inline double nu_dmean_dphi(double nbar, double phi) {
    detail::require_power(nbar);
    return -nbar * std::exp(-nbar + 0.5 * nbar * std::cos(phi)) *
           std::sin(phi + 0.5 * nbar * std::sin(phi));
}

/// {e^nbar + e^{3 nbar/2} - e^{nbar cos phi}[1 + cos(nbar sin phi)]}
///   e^{-nbar cos phi} csc^2(phi + nbar sin(phi)/2) 2 / nbar^2.
inline std::optional<double> nu_sensitivity_sq(double nbar, double phi) {
    detail::require_power(nbar);
    const double theta = phi + 0.5 * nbar * std::sin(phi);
    const double s = std::sin(theta);
    if (nbar == 0.0 || std::abs(s) < detail::stationary_floor)
        return std::nullopt;
    const double c = std::cos(phi);
    // factor the largest exponential e^{nbar (3/2 - cos phi)} out of the braces
    const double big = nbar * (1.5 - c);
    const double braces = 1.0 + std::exp(-0.5 * nbar) - (1.0 + std::cos(nbar * std::sin(phi))) * std::exp(-big);
    const double log_val = big + std::log(braces) + std::log(2.0) - 2.0 * std::log(nbar) - 2.0 * std::log(std::abs(s));
    return detail::finite_or_empty(std::exp(log_val));
}

/// Large-nbar value near phi = pi / (2 nbar): 16 pi e^{nbar/2} / (2 nbar + pi)^2.
inline double nu_sensitivity_min(double nbar) {
    if (!(nbar > 0.0) || !std::isfinite(nbar))
        throw domain_error("nbar must be positive");
    const double d = 2.0 * nbar + std::numbers::pi;
    return 16.0 * std::numbers::pi * std::exp(0.5 * nbar) / (d * d);
}

// -- mu: sum of MM' projectors (mode swap) ----------------------------------

/// e^{-2 nbar sin^2(phi/2)}
inline double mu_expectation(double nbar, double phi) {
    detail::require_power(nbar);
    const double s = std::sin(0.5 * phi);
    return std::exp(-2.0 * nbar * s * s);
}

/// Gaussian e^{-nbar phi^2 / 2} of width 1 / sqrt(nbar).
inline double mu_small_angle(double nbar, double phi) {
    detail::require_power(nbar);
    return std::exp(-0.5 * nbar * phi * phi);
}

inline double mu_second_moment(double nbar) {
    detail::require_power(nbar);
    return 1.0;
}

inline double mu_dmean_dphi(double nbar, double phi) {
    return -nbar * std::sin(phi) * mu_expectation(nbar, phi);
}

inline constexpr double mu_series_switch = 1e-3;

/// (e^{4 nbar sin^2(phi/2)} - 1) / (nbar^2 sin^2 phi).  The removable
/// singularity at the origin is replaced by its Taylor series for
/// |phi| <= phi_switch (phi reduced to (-pi, pi]).
inline std::optional<double> mu_sensitivity_sq(double nbar, double phi,
                                               double phi_switch = mu_series_switch) {
    detail::require_power(nbar);
    if (nbar == 0.0)
        return std::nullopt;
    const double x = std::remainder(phi, 2.0 * std::numbers::pi);
    if (std::abs(x) <= phi_switch) {
        const double n = nbar;
        const double x2 = x * x;
        const double c2 = 0.5 + 1.0 / (4.0 * n);
        const double c4 = n / 6.0 + 1.0 / 12.0 + 1.0 / (24.0 * n);
        const double c6 = n * n / 24.0 + n / 72.0 + 17.0 / 1440.0 + 17.0 / (2880.0 * n);
        return 1.0 / n + x2 * (c2 + x2 * (c4 + x2 * c6));
    }
    const double sx = std::sin(x);
    if (std::abs(sx) < detail::stationary_floor)
        return std::nullopt;
    const double h = std::sin(0.5 * x);
    return detail::finite_or_empty(std::expm1(4.0 * nbar * h * h) / (nbar * nbar * sx * sx));
}

} // namespace interf::analytic
