#pragma once

// Swap observable before the output splitter versus parity on port A after
// it.  For the standard convention the output splitter conjugates
// (-1)^{n_A} exactly into the mode swap, so the two readouts agree for any
// input; both sides are computed through independent Fock-space routes and
// checked against the closed form as a third witness.

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "interf/analytic.hpp"
#include "interf/observables.hpp"
#include "interf/optics.hpp"
#include "interf/parallel.hpp"

namespace interf {

struct EquivalenceReport {
    double nbar = 0.0;
    double phi = 0.0;
    double lhs_mu = 0.0;
    double rhs_parity = 0.0;
    double abs_diff = 0.0;
    double closed_form = 0.0;
    int cutoff = 0;
};

/// How the grid for |alpha, 0> is sized: by default the Poisson(nbar) tail
/// of the single occupied input mode, or a fixed cutoff.
struct CutoffPolicy {
    double tail_tol = default_tail_tol;
    std::optional<int> fixed;

    int cutoff_for(double nbar) const {
        return fixed ? *fixed : poisson_tail_cutoff(nbar, tail_tol);
    }
};

inline EquivalenceReport check_identity(double nbar, double phi, const CutoffPolicy &policy = {},
                                        const OpticsConvention &conv = standard_convention()) {
    SourceParams{nbar, phi, 0}.validate();
    const int K = policy.cutoff_for(nbar);
    const auto input = make_two_mode_coherent(std::sqrt(nbar), 0.0, K).untagged();

    // inside the interferometer: first splitter, then the phase on A
    const auto inside = phase_shift_mode_a(beam_splitter_50_50(input, conv, TransformPath::generic), phi);
    // after it: the composite interferometer matrix lifted in one pass
    const auto outside = mzi_transform(input, phi, conv, TransformPath::generic);

    EquivalenceReport r;
    r.nbar = nbar;
    r.phi = phi;
    r.cutoff = K;
    r.lhs_mu = expectation(inside, DetectionScheme::mu());
    r.rhs_parity = expectation(outside, DetectionScheme::parity());
    r.abs_diff = std::abs(r.lhs_mu - r.rhs_parity);
    r.closed_form = analytic::mu_expectation(nbar, phi);
    return r;
}

struct IdentitySweep {
    std::vector<EquivalenceReport> reports;
    double max_abs_diff = 0.0;
    /// max over both sides of |side - closed form|
    double max_closed_form_diff = 0.0;
};

/// check_identity over the cartesian grid nbars x phis, nbar-major.
inline IdentitySweep sweep_identity(std::span<const double> nbars, std::span<const double> phis,
                                    const CutoffPolicy &policy = {},
                                    const OpticsConvention &conv = standard_convention()) {
    IdentitySweep out;
    const std::size_t n = nbars.size() * phis.size();
    out.reports = parallel_map(n, [&](std::size_t i) {
        return check_identity(nbars[i / phis.size()], phis[i % phis.size()], policy, conv);
    });
    for (const auto &r : out.reports) {
        out.max_abs_diff = std::max(out.max_abs_diff, r.abs_diff);
        out.max_closed_form_diff = std::max(
            {out.max_closed_form_diff, std::abs(r.lhs_mu - r.closed_form), std::abs(r.rhs_parity - r.closed_form)});
    }
    return out;
}

} // namespace interf
