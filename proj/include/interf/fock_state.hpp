#pragma once

// Truncated two-mode Fock-space states.
//
// A state is a dense (K+1) x (K+1) grid of complex amplitudes c(n, m) =
// <n, m|psi>, n photons in mode A and m photons in mode B, 0 <= n, m <= K.
// States are immutable once built; every transform returns a new state.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "interf/errors.hpp"

namespace interf {

using complex = std::complex<double>;

inline constexpr double default_tail_tol = 1e-12;

/// Scalar source settings: return power nbar = |alpha|^2 with alpha real,
/// interferometer phase phi (radians) and super-resolution order N.
struct SourceParams {
    double nbar = 0.0;
    double phi = 0.0;
    int order = 0;

    void validate() const {
        if (!std::isfinite(nbar) || nbar < 0.0)
            throw domain_error("nbar must be finite and non-negative");
        if (!std::isfinite(phi))
            throw domain_error("phi must be finite");
        if (order < 0)
            throw domain_error("order must be non-negative");
    }

    double alpha() const { return std::sqrt(nbar); }
};

namespace detail {

inline void require_finite(double x, const char *what) {
    if (!std::isfinite(x))
        throw domain_error(std::string(what) + " must be finite");
}

// log of alpha^k / sqrt(k!) magnitude for |alpha| = r, k >= 0.
inline double log_fock_weight(double log_r, int k) {
    if (k == 0)
        return 0.0;
    return k * log_r - 0.5 * std::lgamma(k + 1.0);
}

// Single-mode coherent amplitudes <k|alpha>, 0 <= k <= cutoff, evaluated as
// exp(-|alpha|^2/2 + k log|alpha| - lgamma(k+1)/2) times the phase e^{i k arg}.
// The log terms grow like k log k, so their rounding (~1e-13 relative at a
// few hundred photons) is removed by normalizing the Poisson weights over a
// range whose remaining tail is far below double precision.
inline std::vector<complex> coherent_mode(complex alpha, int cutoff) {
    std::vector<complex> out(static_cast<std::size_t>(cutoff) + 1, complex{});
    const double r = std::abs(alpha);
    if (r == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double log_r = std::log(r);
    const double arg = std::arg(alpha);
    const double base = -0.5 * r * r;
    std::vector<double> mags;
    double total = 0.0;
    for (int k = 0;; ++k) {
        const double lm = base + log_fock_weight(log_r, k);
        mags.push_back(std::exp(lm));
        total += mags.back() * mags.back();
        if (k >= cutoff && k > r * r && lm < -45.0)
            break;
    }
    const double scale = 1.0 / std::sqrt(total);
    for (int k = 0; k <= cutoff; ++k)
        out[static_cast<std::size_t>(k)] = std::polar(mags[static_cast<std::size_t>(k)] * scale, k * arg);
    return out;
}

} // namespace detail

/// Product-coherent label carried by states known to be |alpha_a, alpha_b>.
struct CoherentTag {
    complex alpha_a;
    complex alpha_b;
};

class TwoModeFockState {
public:
    /// Builds a state from a row-major grid, index n * (cutoff + 1) + m.
    TwoModeFockState(int cutoff, std::vector<complex> amplitudes,
                     std::optional<CoherentTag> tag = std::nullopt)
        : cutoff_(cutoff), amplitudes_(std::move(amplitudes)), tag_(tag) {
        if (cutoff_ < 0)
            throw domain_error("cutoff must be non-negative");
        if (amplitudes_.size() != dim() * dim())
            throw shape_error("amplitude grid does not match cutoff");
    }

    static TwoModeFockState vacuum(int cutoff) {
        return fock(0, 0, cutoff);
    }

    /// The number state |n, m>.
    static TwoModeFockState fock(int n, int m, int cutoff) {
        if (cutoff < 0)
            throw domain_error("cutoff must be non-negative");
        if (n < 0 || m < 0 || n > cutoff || m > cutoff)
            throw domain_error("Fock labels outside the truncated grid");
        const auto d = static_cast<std::size_t>(cutoff) + 1;
        std::vector<complex> amps(d * d, complex{});
        amps[static_cast<std::size_t>(n) * d + static_cast<std::size_t>(m)] = 1.0;
        std::optional<CoherentTag> tag;
        if (n == 0 && m == 0)
            tag = CoherentTag{0.0, 0.0};
        return TwoModeFockState(cutoff, std::move(amps), tag);
    }

    int cutoff() const noexcept { return cutoff_; }
    std::size_t dim() const noexcept { return static_cast<std::size_t>(cutoff_) + 1; }

    complex operator()(int n, int m) const {
        return amplitudes_[static_cast<std::size_t>(n) * dim() + static_cast<std::size_t>(m)];
    }

    std::span<const complex> amplitudes() const noexcept { return amplitudes_; }
    const std::optional<CoherentTag> &coherent_tag() const noexcept { return tag_; }

    /// Same amplitudes with the coherent label dropped, so transforms take
    /// the generic Fock-space route.
    TwoModeFockState untagged() const { return TwoModeFockState(cutoff_, amplitudes_); }

    /// Compensated (Neumaier) sum, so the deficit 1 - norm_sq resolves
    /// tails near 1e-14 on large grids.
    double norm_sq() const {
        double s = 0.0, comp = 0.0;
        for (const auto &c : amplitudes_) {
            const double x = std::norm(c);
            const double t = s + x;
            comp += std::abs(s) >= x ? (s - t) + x : (x - t) + s;
            s = t;
        }
        return s + comp;
    }

private:
    int cutoff_;
    std::vector<complex> amplitudes_;
    std::optional<CoherentTag> tag_;
};

/// Smallest K such that the Poisson(mean) mass above K is below tail_tol.
inline int poisson_tail_cutoff(double mean, double tail_tol) {
    detail::require_finite(mean, "mean photon number");
    detail::require_finite(tail_tol, "tail_tol");
    if (mean < 0.0)
        throw domain_error("mean photon number must be non-negative");
    if (!(tail_tol > 0.0 && tail_tol < 1.0))
        throw domain_error("tail_tol must lie in (0, 1)");
    if (mean == 0.0)
        return 0;

    // pmf far enough past the mode that the remaining tail is negligible
    // against tail_tol, then suffix sums from the top.
    const double log_mean = std::log(mean);
    const double log_floor = std::log(tail_tol) - 40.0;
    std::vector<double> pmf;
    for (int k = 0;; ++k) {
        const double lp = -mean + k * log_mean - std::lgamma(k + 1.0);
        pmf.push_back(std::exp(lp));
        if (k > mean && lp < log_floor)
            break;
    }
    double tail = 0.0;
    int best = static_cast<int>(pmf.size()) - 1;
    for (int k = static_cast<int>(pmf.size()) - 1; k >= 0; --k) {
        // tail currently holds the mass strictly above k
        if (tail < tail_tol)
            best = k;
        else
            break;
        tail += pmf[static_cast<std::size_t>(k)];
    }
    return best;
}

/// Per-mode cutoff for the balanced two-mode coherent state of total power
/// nbar: each mode carries Poisson(nbar / 2) photon statistics.
inline int choose_cutoff(double nbar, double tail_tol = default_tail_tol) {
    detail::require_finite(nbar, "nbar");
    if (nbar < 0.0)
        throw domain_error("nbar must be non-negative");
    return poisson_tail_cutoff(0.5 * nbar, tail_tol);
}

/// |alpha_a, alpha_b> truncated at `cutoff`, amplitudes evaluated in the log
/// domain so large photon numbers neither overflow nor lose precision.
inline TwoModeFockState make_two_mode_coherent(complex alpha_a, complex alpha_b, int cutoff) {
    detail::require_finite(alpha_a.real(), "alpha_a");
    detail::require_finite(alpha_a.imag(), "alpha_a");
    detail::require_finite(alpha_b.real(), "alpha_b");
    detail::require_finite(alpha_b.imag(), "alpha_b");
    if (cutoff < 0)
        throw domain_error("cutoff must be non-negative");
    const auto a = detail::coherent_mode(alpha_a, cutoff);
    const auto b = detail::coherent_mode(alpha_b, cutoff);
    const std::size_t d = a.size();
    std::vector<complex> amps(d * d);
    for (std::size_t n = 0; n < d; ++n)
        for (std::size_t m = 0; m < d; ++m)
            amps[n * d + m] = a[n] * b[m];
    return TwoModeFockState(cutoff, std::move(amps), CoherentTag{alpha_a, alpha_b});
}

/// <s1|s2>.
inline complex inner_product(const TwoModeFockState &s1, const TwoModeFockState &s2) {
    if (s1.cutoff() != s2.cutoff())
        throw shape_error("inner_product: cutoff mismatch");
    const auto a = s1.amplitudes();
    const auto b = s2.amplitudes();
    complex acc{};
    for (std::size_t i = 0; i < a.size(); ++i)
        acc += std::conj(a[i]) * b[i];
    return acc;
}

/// 1 - sum |c|^2, clamped at zero.
inline double norm_deficit(const TwoModeFockState &s) {
    const double d = 1.0 - s.norm_sq();
    return d > 0.0 ? d : 0.0;
}

/// Re-embeds a state on a different grid: zero padding when growing,
/// discarding out-of-range amplitudes when shrinking.
inline TwoModeFockState with_cutoff(const TwoModeFockState &s, int cutoff) {
    if (cutoff < 0)
        throw domain_error("cutoff must be non-negative");
    const auto d = static_cast<std::size_t>(cutoff) + 1;
    const int keep = std::min(cutoff, s.cutoff());
    std::vector<complex> amps(d * d, complex{});
    for (int n = 0; n <= keep; ++n)
        for (int m = 0; m <= keep; ++m)
            amps[static_cast<std::size_t>(n) * d + static_cast<std::size_t>(m)] = s(n, m);
    return TwoModeFockState(cutoff, std::move(amps));
}

} // namespace interf
