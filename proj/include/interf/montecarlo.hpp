#pragma once

// Shot-level simulation of parity readout on the dark port and phase
// estimation by inverting the parity fringe.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "interf/analytic.hpp"
#include "interf/errors.hpp"
#include "interf/parallel.hpp"

namespace interf::montecarlo {

struct ShotExperiment {
    double nbar = 0.0;
    double phi_true = 0.0;
    std::int64_t shots = 1;
    std::uint64_t seed = 0;

    void validate() const {
        if (!std::isfinite(nbar) || nbar < 0.0)
            throw domain_error("nbar must be finite and non-negative");
        if (!std::isfinite(phi_true))
            throw domain_error("phi must be finite");
        if (shots < 1)
            throw domain_error("shots must be at least 1");
    }
};

struct ParityCounts {
    std::int64_t even = 0;
    std::int64_t odd = 0;

    double even_fraction() const { return static_cast<double>(even) / static_cast<double>(even + odd); }
};

/// Probability of an even photon count on the dark port,
/// (1 + e^{-2 nbar sin^2(phi/2)}) / 2.
inline double parity_even_probability(double nbar, double phi) {
    return 0.5 * (1.0 + analytic::mu_expectation(nbar, phi));
}

/// SplitMix64 finalizer; derives independent stream seeds from a master seed.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t trial_seed(std::uint64_t master, std::uint64_t trial) {
    return splitmix64(master ^ splitmix64(trial));
}

/// Independent Bernoulli(p_even) shots.  Uniforms are taken from the top 53
/// bits of mt19937_64, whose output sequence is fixed by the standard, so
/// counts are reproducible across platforms.
inline ParityCounts run_shots(const ShotExperiment &e) {
    e.validate();
    const double p = parity_even_probability(e.nbar, e.phi_true);
    std::mt19937_64 rng(e.seed);
    ParityCounts c;
    for (std::int64_t i = 0; i < e.shots; ++i) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u < p)
            ++c.even;
        else
            ++c.odd;
    }
    return c;
}

enum class Branch { positive, negative };

/// Inverts the parity fringe: phi = 2 asin(sqrt(-ln(2 p - 1) / (2 nbar))).
inline double estimate_phase(double even_fraction, double nbar, Branch branch = Branch::positive) {
    if (!(nbar > 0.0))
        throw domain_error("phase estimation needs nbar > 0");
    if (!(even_fraction > 0.5) || even_fraction > 1.0)
        throw inversion_range_error("even fraction outside (1/2, 1]");
    const double arg = -std::log(2.0 * even_fraction - 1.0) / (2.0 * nbar);
    if (arg > 1.0)
        throw inversion_range_error("even fraction below the fringe minimum");
    const double phi = 2.0 * std::asin(std::sqrt(arg));
    return branch == Branch::positive ? phi : -phi;
}

inline double estimate_phase(const ParityCounts &c, double nbar, Branch branch = Branch::positive) {
    return estimate_phase(c.even_fraction(), nbar, branch);
}

struct SensitivityEstimate {
    std::int64_t shots = 0;
    int trials = 0;
    int failed_trials = 0;
    double mean_phi = 0.0;
    /// sample std of the per-trial estimates; empty with fewer than two
    std::optional<double> phi_std;
    /// phi_std * sqrt(shots)
    std::optional<double> per_shot_dphi;
};

/// Repeats run_shots + estimate_phase over `trials` independent seeded
/// trials.  Inversion failures are dropped; more than 1% of them is an error.
inline SensitivityEstimate empirical_sensitivity(double nbar, double phi, std::int64_t shots, int trials,
                                                 std::uint64_t seed) {
    if (trials < 1)
        throw domain_error("trials must be at least 1");
    if (!(std::abs(analytic::mu_dmean_dphi(nbar, phi)) > 0.0))
        throw domain_error("fringe slope is zero at this phase; inversion is degenerate");
    const Branch branch = phi >= 0.0 ? Branch::positive : Branch::negative;

    const auto estimates = parallel_map(static_cast<std::size_t>(trials), [&](std::size_t t) -> std::optional<double> {
        const auto counts = run_shots({nbar, phi, shots, trial_seed(seed, t)});
        try {
            return estimate_phase(counts, nbar, branch);
        } catch (const inversion_range_error &) {
            return std::nullopt;
        }
    });

    SensitivityEstimate r;
    r.shots = shots;
    r.trials = trials;
    std::vector<double> ok;
    for (const auto &x : estimates) {
        if (x)
            ok.push_back(*x);
        else
            ++r.failed_trials;
    }
    if (r.failed_trials * 100 > trials)
        throw inversion_range_error(std::to_string(r.failed_trials) + " of " + std::to_string(trials) +
                                    " trials fell outside the invertible range");
    if (ok.empty())
        return r;
    double mean = 0.0;
    for (double x : ok)
        mean += x;
    mean /= static_cast<double>(ok.size());
    r.mean_phi = mean;
    if (ok.size() >= 2) {
        double ss = 0.0;
        for (double x : ok)
            ss += (x - mean) * (x - mean);
        r.phi_std = std::sqrt(ss / static_cast<double>(ok.size() - 1));
        r.per_shot_dphi = *r.phi_std * std::sqrt(static_cast<double>(shots));
    }
    return r;
}

} // namespace interf::montecarlo
