#pragma once

// Grid suites that pit the Fock-space observables against the closed forms
// and check the swap/parity identity.  Shared by the CLI and the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "interf/analytic.hpp"
#include "interf/equivalence.hpp"
#include "interf/observables.hpp"
#include "interf/parallel.hpp"

namespace interf {

/// Evenly spaced phases from lo to hi inclusive, symmetric in rounding so a
/// grid symmetric about zero hits zero exactly.
inline std::vector<double> phase_grid(double lo, double hi, int points) {
    if (points < 2)
        throw domain_error("a phase grid needs at least 2 points");
    if (!(lo < hi))
        throw domain_error("phase grid needs phi_min < phi_max");
    std::vector<double> out(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        const double t = static_cast<double>(i) / (points - 1);
        out[static_cast<std::size_t>(i)] = lo * (1.0 - t) + hi * t;
    }
    return out;
}

/// Order of the N00N projector used when none is given: N = round(nbar), >= 1.
inline int default_noon_order(double nbar) {
    return std::max(1, static_cast<int>(std::lround(nbar)));
}

/// Tolerances for oracle agreement.  They equal the nominal 1e-12 absolute /
/// 1e-8 relative as long as the truncation tail is small enough not to be
/// the dominant error, and widen linearly with tail_tol beyond that.
struct AgreementTolerance {
    double abs;
    double rel;

    static AgreementTolerance for_tail(double tail_tol) {
        return {std::max(1e-12, 8.0 * tail_tol), std::max(1e-8, 8.0 * tail_tol)};
    }

    bool accepts(double numeric, double reference) const {
        return std::abs(numeric - reference) <= std::max(abs, rel * std::abs(reference));
    }

    /// |numeric - reference| in units of the allowed deviation.
    double ratio(double numeric, double reference) const {
        return std::abs(numeric - reference) / std::max(abs, rel * std::abs(reference));
    }
};

/// Closed-form mean, variance and slope for a scheme.  Parity maps onto the
/// swap observable through the interferometer identity.
struct ClosedForm {
    double mean;
    double variance;
    double slope;
    std::optional<double> sensitivity_sq;
};

inline ClosedForm closed_form(double nbar, double phi, const DetectionScheme &d) {
    using namespace analytic;
    switch (d.kind()) {
    case DetectionScheme::Kind::noon: {
        const int N = d.order();
        const double m = noon_expectation(nbar, N, phi);
        return {m, noon_second_moment(nbar, N) - m * m, noon_dmean_dphi(nbar, N, phi),
                noon_sensitivity_sq(nbar, N, phi)};
    }
    case DetectionScheme::Kind::nu: {
        const double m = nu_expectation(nbar, phi);
        return {m, nu_second_moment(nbar) - m * m, nu_dmean_dphi(nbar, phi), nu_sensitivity_sq(nbar, phi)};
    }
    case DetectionScheme::Kind::mu:
    case DetectionScheme::Kind::parity: {
        const double m = mu_expectation(nbar, phi);
        return {m, -std::expm1(-4.0 * nbar * std::pow(std::sin(0.5 * phi), 2)), mu_dmean_dphi(nbar, phi),
                mu_sensitivity_sq(nbar, phi)};
    }
    }
    return {};
}

struct SuiteResult {
    std::string name;
    /// largest deviation in units of the allowed deviation (pass iff <= 1)
    double worst_ratio = 0.0;
    /// largest raw deviation |numeric - reference|
    double max_abs_dev = 0.0;
    /// largest relative deviation among points above the absolute window
    double max_rel_dev = 0.0;
    int compared = 0;
    int skipped = 0;
    bool passed = true;
};

struct ValidationReport {
    std::vector<SuiteResult> suites;
    double tail_tol = default_tail_tol;
    AgreementTolerance tolerance{1e-12, 1e-8};

    bool passed() const {
        return std::all_of(suites.begin(), suites.end(), [](const SuiteResult &s) { return s.passed; });
    }
    const SuiteResult *find(const std::string &name) const {
        for (const auto &s : suites)
            if (s.name == name)
                return &s;
        return nullptr;
    }
};

struct ValidationGrid {
    std::vector<double> nbars{1.0, 4.0, 20.0, 100.0};
    int points = 33;
    double phi_min = -std::numbers::pi;
    double phi_max = std::numbers::pi;
    double tail_tol = default_tail_tol;
    double fd_step = 1e-4;
    OpticsConvention convention = standard_convention();
};

namespace detail {

struct PointComparison {
    double mean_num, mean_ana;
    double var_num, var_ana;
    std::optional<double> sens_num, sens_ana;
    bool sens_resolvable;
};

// Upper bound on truncation error of the mean / variance for a scheme on a
// grid whose per-mode tails are below tail_tol.
inline double truncation_bound(const DetectionScheme &d, double nbar, double tail_tol) {
    switch (d.kind()) {
    case DetectionScheme::Kind::noon:
        return 0.0; // both amplitudes lie on the grid by construction
    case DetectionScheme::Kind::nu:
        return 4.0 * std::exp(-0.5 * nbar) * tail_tol;
    case DetectionScheme::Kind::mu:
    case DetectionScheme::Kind::parity:
        return 4.0 * tail_tol;
    }
    return tail_tol;
}

// A sensitivity comparison is meaningful only where the rounding floor of
// the finite-difference slope and the truncation error of both moments are
// well below the relative tolerance being tested.
inline bool sensitivity_resolvable(const DetectionScheme &d, const SourceParams &p, const MeasureOptions &opt,
                                   const ClosedForm &ana, double rel_tol) {
    if (!ana.sensitivity_sq)
        return false;
    const auto state = prepare_state(p, d, opt);
    const double eps = std::numeric_limits<double>::epsilon();
    const double mag = expectation_magnitude(state, d);
    const double trunc = truncation_bound(d, p.nbar, opt.tail_tol);
    const double mean_err = 16.0 * eps * mag + trunc;
    // mean error is amplified by 3 / h through the Richardson difference;
    // tails carry phases up to e^{i 2K phi}
    const double slope_err = 3.0 * 16.0 * eps * mag / opt.fd_step + 2.0 * (2.0 * state.cutoff() + 2.0) * trunc;
    const double var_err = 16.0 * eps * (1.0 + mag) + 2.0 * trunc + 2.0 * std::abs(ana.mean) * mean_err;
    if (ana.variance <= 0.0 || ana.slope == 0.0)
        return false;
    const double bound = var_err / ana.variance + 2.0 * slope_err / std::abs(ana.slope);
    return bound <= 0.25 * rel_tol;
}

} // namespace detail

inline std::vector<DetectionScheme> grid_schemes(double nbar) {
    return {DetectionScheme::noon(default_noon_order(nbar)), DetectionScheme::nu(), DetectionScheme::mu(),
            DetectionScheme::parity()};
}

/// Mean, variance and sensitivity suites for every scheme over the grid.
inline std::vector<SuiteResult> oracle_suites(const ValidationGrid &g) {
    const auto tol = AgreementTolerance::for_tail(g.tail_tol);
    const auto phis = phase_grid(g.phi_min, g.phi_max, g.points);
    MeasureOptions opt;
    opt.tail_tol = g.tail_tol;
    opt.fd_step = g.fd_step;
    opt.convention = g.convention;

    std::vector<SuiteResult> out;
    const char *kinds[] = {"noon", "nu", "mu", "parity"};
    for (int k = 0; k < 4; ++k) {
        SuiteResult mean{std::string("mean:") + kinds[k]};
        SuiteResult var{std::string("variance:") + kinds[k]};
        SuiteResult sens{std::string("sensitivity:") + kinds[k]};

        struct Job {
            double nbar, phi;
        };
        std::vector<Job> jobs;
        for (double nb : g.nbars)
            for (double phi : phis)
                jobs.push_back({nb, phi});

        const auto cmp = parallel_map(jobs.size(), [&](std::size_t i) {
            const auto d = grid_schemes(jobs[i].nbar)[static_cast<std::size_t>(k)];
            const SourceParams p{jobs[i].nbar, jobs[i].phi, d.order()};
            const auto rec = measure(p, d, opt);
            const auto ana = closed_form(p.nbar, p.phi, d);
            return detail::PointComparison{rec.mean,
                                           ana.mean,
                                           rec.variance,
                                           ana.variance,
                                           rec.sensitivity_sq,
                                           ana.sensitivity_sq,
                                           detail::sensitivity_resolvable(d, p, opt, ana, tol.rel)};
        });

        auto record = [&](SuiteResult &s, double num, double ref, const AgreementTolerance &t) {
            ++s.compared;
            const double dev = std::abs(num - ref);
            s.max_abs_dev = std::max(s.max_abs_dev, dev);
            // below the absolute window a relative deviation says nothing
            if (std::abs(ref) > t.abs)
                s.max_rel_dev = std::max(s.max_rel_dev, dev / std::abs(ref));
            s.worst_ratio = std::max(s.worst_ratio, t.ratio(num, ref));
        };
        // sensitivities are compared purely relatively
        const AgreementTolerance sens_tol{0.0, tol.rel};
        for (const auto &c : cmp) {
            record(mean, c.mean_num, c.mean_ana, tol);
            record(var, c.var_num, c.var_ana, tol);
            if (c.sens_resolvable && c.sens_num && c.sens_ana)
                record(sens, *c.sens_num, *c.sens_ana, sens_tol);
            else
                ++sens.skipped;
        }
        mean.passed = mean.worst_ratio <= 1.0 && mean.compared > 0;
        var.passed = var.worst_ratio <= 1.0 && var.compared > 0;
        // a coarse tail can leave no point resolvable; that is not a failure
        sens.passed = sens.worst_ratio <= 1.0;
        for (auto *s : {&mean, &var, &sens})
            out.push_back(*s);
    }
    return out;
}

/// Swap-before versus parity-after over the grid, plus both sides against
/// the closed form.
inline std::vector<SuiteResult> identity_suites(const ValidationGrid &g) {
    const auto phis = phase_grid(g.phi_min, g.phi_max, g.points);
    const auto sweep = sweep_identity(g.nbars, phis, CutoffPolicy{g.tail_tol, std::nullopt}, g.convention);
    constexpr double identity_tol = 1e-9;
    const double witness_tol = std::max(identity_tol, 8.0 * g.tail_tol);

    SuiteResult id{"identity"};
    SuiteResult witness{"identity:closed-form"};
    for (const auto &r : sweep.reports) {
        ++id.compared;
        ++witness.compared;
        id.max_abs_dev = std::max(id.max_abs_dev, r.abs_diff);
        witness.max_abs_dev = std::max({witness.max_abs_dev, std::abs(r.lhs_mu - r.closed_form),
                                        std::abs(r.rhs_parity - r.closed_form)});
    }
    id.worst_ratio = id.max_abs_dev / identity_tol;
    witness.worst_ratio = witness.max_abs_dev / witness_tol;
    id.passed = id.worst_ratio < 1.0 && id.compared > 0;
    witness.passed = witness.worst_ratio < 1.0 && witness.compared > 0;
    return {id, witness};
}

/// <nu^2> from the structural formula versus ||nu psi||^2 with nu applied
/// as an explicit projector sum, on random states with small cutoffs.
inline SuiteResult nu_square_suite(std::uint64_t seed = 12345, int max_cutoff = 12) {
    SuiteResult s{"nu-square"};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int K = 0; K <= max_cutoff; ++K) {
        for (int rep = 0; rep < 4; ++rep) {
            const auto d = static_cast<std::size_t>(K) + 1;
            std::vector<complex> amps(d * d);
            double norm = 0.0;
            for (auto &c : amps) {
                c = {g(rng), g(rng)};
                norm += std::norm(c);
            }
            for (auto &c : amps)
                c /= std::sqrt(norm);
            const TwoModeFockState psi(K, amps);

            // nu |psi> = sum_N |N,0><0,N|psi> + |0,N><N,0|psi>
            std::vector<complex> image(d * d, complex{});
            for (int N = 0; N <= K; ++N) {
                image[static_cast<std::size_t>(N) * d] += psi(0, N);
                image[static_cast<std::size_t>(N)] += psi(N, 0);
            }
            double direct = 0.0;
            for (const auto &c : image)
                direct += std::norm(c);

            const double structural = second_moment(psi, DetectionScheme::nu());
            ++s.compared;
            const double dev = std::abs(structural - direct);
            s.max_abs_dev = std::max(s.max_abs_dev, dev);
        }
    }
    s.worst_ratio = s.max_abs_dev / 1e-12;
    s.passed = s.worst_ratio <= 1.0;
    return s;
}

inline ValidationReport run_validation(const ValidationGrid &g) {
    ValidationReport r;
    r.tail_tol = g.tail_tol;
    r.tolerance = AgreementTolerance::for_tail(g.tail_tol);
    r.suites = oracle_suites(g);
    for (auto &s : identity_suites(g))
        r.suites.push_back(std::move(s));
    r.suites.push_back(nu_square_suite());
    return r;
}

} // namespace interf
