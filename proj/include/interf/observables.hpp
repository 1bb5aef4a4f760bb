#pragma once

// Brute-force evaluation of the four detection schemes on truncated Fock
// states.  Operators are never materialized; each one touches a fixed index
// pattern of the amplitude grid.

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "interf/fock_state.hpp"
#include "interf/optics.hpp"

namespace interf {

class DetectionScheme {
public:
    enum class Kind {
        noon,   ///< |N,0><0,N| + |0,N><N,0|
        nu,     ///< sum over N of the N00N projectors
        mu,     ///< sum over M, M' of |M',M><M,M'|, the mode swap
        parity, ///< (-1)^{n_A}, read out after the interferometer
    };

    static DetectionScheme noon(int order) {
        if (order < 0)
            throw domain_error("N00N projector order must be non-negative");
        return DetectionScheme(Kind::noon, order);
    }
    static DetectionScheme nu() { return DetectionScheme(Kind::nu, 0); }
    static DetectionScheme mu() { return DetectionScheme(Kind::mu, 0); }
    static DetectionScheme parity() { return DetectionScheme(Kind::parity, 0); }

    Kind kind() const noexcept { return kind_; }
    int order() const noexcept { return order_; }

    std::string_view name() const noexcept {
        switch (kind_) {
        case Kind::noon: return "noon";
        case Kind::nu: return "nu";
        case Kind::mu: return "mu";
        case Kind::parity: return "parity";
        }
        return "?";
    }

    friend bool operator==(const DetectionScheme &, const DetectionScheme &) = default;

private:
    DetectionScheme(Kind k, int order) : kind_(k), order_(order) {}
    Kind kind_;
    int order_;
};

/// Mean, variance, phase slope and error-propagation sensitivity of one
/// scheme at one operating point.  sensitivity_sq is empty where the slope
/// vanishes.
struct MeasurementRecord {
    double mean = 0.0;
    double variance = 0.0;
    double dmean_dphi = 0.0;
    std::optional<double> sensitivity_sq;
};

struct MeasureOptions {
    double tail_tol = default_tail_tol;
    double fd_step = 1e-4;
    /// Slopes below this magnitude are treated as stationary points.
    double slope_floor = 1e-12;
    OpticsConvention convention = standard_convention();
};

namespace detail {

inline void require_order_fits(const TwoModeFockState &s, const DetectionScheme &d) {
    if (d.kind() == DetectionScheme::Kind::noon && d.order() > s.cutoff())
        throw domain_error("N00N order " + std::to_string(d.order()) + " exceeds cutoff " +
                           std::to_string(s.cutoff()));
}

inline double noon_term(const TwoModeFockState &s, int N) {
    return 2.0 * (std::conj(s(N, 0)) * s(0, N)).real();
}

} // namespace detail

/// <psi|d|psi>.
inline double expectation(const TwoModeFockState &s, const DetectionScheme &d) {
    detail::require_order_fits(s, d);
    const int K = s.cutoff();
    switch (d.kind()) {
    case DetectionScheme::Kind::noon:
        return detail::noon_term(s, d.order());
    case DetectionScheme::Kind::nu: {
        double acc = 0.0;
        for (int N = 0; N <= K; ++N)
            acc += detail::noon_term(s, N);
        return acc;
    }
    case DetectionScheme::Kind::mu: {
        // swap-partner terms are complex conjugates; pair them so the sum is
        // real by construction
        double acc = 0.0;
        for (int n = 0; n <= K; ++n) {
            acc += std::norm(s(n, n));
            for (int m = n + 1; m <= K; ++m)
                acc += 2.0 * (std::conj(s(m, n)) * s(n, m)).real();
        }
        return acc;
    }
    case DetectionScheme::Kind::parity: {
        double acc = 0.0;
        for (int n = 0; n <= K; ++n) {
            double row = 0.0;
            for (int m = 0; m <= K; ++m)
                row += std::norm(s(n, m));
            acc += (n % 2 == 0) ? row : -row;
        }
        return acc;
    }
    }
    return 0.0;
}

/// Sum of |term| in the structural sum behind expectation(); multiplied by
/// machine epsilon it bounds the rounding error of the mean.
inline double expectation_magnitude(const TwoModeFockState &s, const DetectionScheme &d) {
    detail::require_order_fits(s, d);
    const int K = s.cutoff();
    switch (d.kind()) {
    case DetectionScheme::Kind::noon:
        return 2.0 * std::abs(s(d.order(), 0)) * std::abs(s(0, d.order()));
    case DetectionScheme::Kind::nu: {
        double acc = 0.0;
        for (int N = 0; N <= K; ++N)
            acc += 2.0 * std::abs(s(N, 0)) * std::abs(s(0, N));
        return acc;
    }
    case DetectionScheme::Kind::mu: {
        double acc = 0.0;
        for (int n = 0; n <= K; ++n)
            for (int m = 0; m <= K; ++m)
                acc += std::abs(s(m, n)) * std::abs(s(n, m));
        return acc;
    }
    case DetectionScheme::Kind::parity:
        return s.norm_sq();
    }
    return 0.0;
}

/// <psi|d^2|psi> from the operator squares:
///   noon (N > 0): |N,0><N,0| + |0,N><0,N|;  noon (N = 0): 4 |0,0><0,0|
///   nu: sum_N (|N,0><N,0| + |0,N><0,N|) + 2 |0,0><0,0|
///   mu, parity: identity.
inline double second_moment(const TwoModeFockState &s, const DetectionScheme &d) {
    detail::require_order_fits(s, d);
    const int K = s.cutoff();
    switch (d.kind()) {
    case DetectionScheme::Kind::noon: {
        const int N = d.order();
        if (N == 0)
            return 4.0 * std::norm(s(0, 0));
        return std::norm(s(N, 0)) + std::norm(s(0, N));
    }
    case DetectionScheme::Kind::nu: {
        double acc = 2.0 * std::norm(s(0, 0));
        for (int N = 0; N <= K; ++N)
            acc += std::norm(s(N, 0)) + std::norm(s(0, N));
        return acc;
    }
    case DetectionScheme::Kind::mu:
    case DetectionScheme::Kind::parity:
        return s.norm_sq();
    }
    return 0.0;
}

/// State on which `d` is read out at operating point p.  The projector
/// schemes see the phase-shifted balanced product inside the interferometer;
/// parity sees mode A after the output splitter, fed by |alpha, 0>.
inline TwoModeFockState prepare_state(const SourceParams &p, const DetectionScheme &d,
                                      const MeasureOptions &opt = {}) {
    p.validate();
    if (d.kind() == DetectionScheme::Kind::parity) {
        const int K = poisson_tail_cutoff(p.nbar, opt.tail_tol);
        const auto input = make_two_mode_coherent(p.alpha(), 0.0, K);
        return mzi_transform(input, p.phi, opt.convention);
    }
    int K = choose_cutoff(p.nbar, opt.tail_tol);
    if (d.kind() == DetectionScheme::Kind::noon)
        K = std::max(K, d.order());
    const double half = std::sqrt(0.5 * p.nbar);
    return make_two_mode_coherent(std::polar(half, p.phi), half, K);
}

inline double mean_at(const SourceParams &p, const DetectionScheme &d, const MeasureOptions &opt) {
    return expectation(prepare_state(p, d, opt), d);
}

/// Central difference of the mean in phi with one Richardson step:
/// (4 D(h/2) - D(h)) / 3.
inline double dmean_dphi(const SourceParams &p, const DetectionScheme &d, double h,
                         const MeasureOptions &opt = {}) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw domain_error("finite-difference step must be positive");
    auto central = [&](double step) {
        SourceParams lo = p, hi = p;
        lo.phi -= step;
        hi.phi += step;
        return (mean_at(hi, d, opt) - mean_at(lo, d, opt)) / (2.0 * step);
    };
    return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

inline MeasurementRecord measure(const SourceParams &p, const DetectionScheme &d,
                                 const MeasureOptions &opt = {}) {
    const auto state = prepare_state(p, d, opt);
    MeasurementRecord r;
    r.mean = expectation(state, d);
    const double var = second_moment(state, d) - r.mean * r.mean;
    if (var < -1e-12)
        throw std::logic_error("negative variance " + std::to_string(var));
    r.variance = var > 0.0 ? var : 0.0;
    r.dmean_dphi = dmean_dphi(p, d, opt.fd_step, opt);
    if (std::abs(r.dmean_dphi) >= opt.slope_floor)
        r.sensitivity_sq = r.variance / (r.dmean_dphi * r.dmean_dphi);
    return r;
}

} // namespace interf
