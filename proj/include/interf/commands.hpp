#pragma once

// CSV producing front-end commands.  Flag parsing lives in tools/; these
// take a filled RunConfig and write to a stream so they can be tested
// without a process boundary.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "interf/analytic.hpp"
#include "interf/montecarlo.hpp"
#include "interf/observables.hpp"
#include "interf/parallel.hpp"
#include "interf/validate.hpp"

namespace interf::cli {

inline constexpr const char *tool_version = "1.0.0";

enum ExitCode : int { exit_ok = 0, exit_validation_failed = 1, exit_config_error = 2 };

class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    DetectionScheme::Kind scheme = DetectionScheme::Kind::mu;
    double nbar = 100.0;
    std::optional<int> order;
    double phi_min = -std::numbers::pi;
    double phi_max = std::numbers::pi;
    std::optional<int> points;
    double tail_tol = default_tail_tol;
    double fd_step = 1e-4;
    std::uint64_t seed = 7;

    // montecarlo
    double phi = 0.02;
    std::vector<std::int64_t> shots{10000};
    int trials = 200;

    // validate
    std::vector<double> grid_nbars{1.0, 4.0, 20.0, 100.0};
    /// Test hook: run with the flipped splitter convention.
    bool flip_convention = false;

    OpticsConvention convention() const {
        return flip_convention ? flipped_convention() : standard_convention();
    }

    DetectionScheme detection() const {
        switch (scheme) {
        case DetectionScheme::Kind::noon: return DetectionScheme::noon(order.value_or(default_noon_order(nbar)));
        case DetectionScheme::Kind::nu: return DetectionScheme::nu();
        case DetectionScheme::Kind::mu: return DetectionScheme::mu();
        case DetectionScheme::Kind::parity: return DetectionScheme::parity();
        }
        return DetectionScheme::mu();
    }

    void validate(int default_points) const {
        const int p = points.value_or(default_points);
        if (p < 2)
            throw config_error("--points must be at least 2");
        if (!(phi_min < phi_max))
            throw config_error("--phi-min must be below --phi-max");
        if (!std::isfinite(phi_min) || !std::isfinite(phi_max) || !std::isfinite(phi))
            throw config_error("phases must be finite (radians)");
        if (!(tail_tol > 0.0 && tail_tol < 1.0))
            throw config_error("--tail-tol must lie in (0, 1)");
        if (!(fd_step > 0.0 && fd_step < 1.0))
            throw config_error("--fd-step must lie in (0, 1)");
        if (!std::isfinite(nbar) || nbar < 0.0)
            throw config_error("--nbar must be finite and non-negative");
        if (order && *order < 0)
            throw config_error("--order must be non-negative");
        if (trials < 1)
            throw config_error("--trials must be at least 1");
        for (auto s : shots)
            if (s < 1)
                throw config_error("--shots entries must be at least 1");
        for (double nb : grid_nbars)
            if (!std::isfinite(nb) || nb < 0.0)
                throw config_error("--grid-nbar entries must be finite and non-negative");
    }
};

inline DetectionScheme::Kind parse_scheme(const std::string &s) {
    if (s == "noon") return DetectionScheme::Kind::noon;
    if (s == "nu") return DetectionScheme::Kind::nu;
    if (s == "mu") return DetectionScheme::Kind::mu;
    if (s == "parity") return DetectionScheme::Kind::parity;
    throw config_error("unknown scheme '" + s + "' (expected noon|nu|mu|parity)");
}

/// 12 significant digits; std::nullopt and non-finite values become an
/// empty field.
inline std::string format_field(std::optional<double> v) {
    if (!v || !std::isfinite(*v))
        return {};
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", *v);
    return buf;
}

inline std::string format_field(double v) { return format_field(std::optional<double>(v)); }

inline void write_metadata(std::ostream &os, const char *command, const RunConfig &c, bool with_scheme = true) {
    os << "# tool: interf " << tool_version << '\n';
    os << "# command: " << command << '\n';
    os << "# convention: " << c.convention().name << '\n';
    if (with_scheme) {
        const auto d = c.detection();
        os << "# scheme: " << d.name() << '\n';
        if (d.kind() == DetectionScheme::Kind::noon)
            os << "# order: " << d.order() << '\n';
    }
    os << "# nbar: " << format_field(c.nbar) << '\n';
    os << "# tail_tol: " << format_field(c.tail_tol) << '\n';
    os << "# fd_step: " << format_field(c.fd_step) << '\n';
    os << "# seed: " << c.seed << '\n';
}

inline MeasureOptions measure_options(const RunConfig &c) {
    MeasureOptions o;
    o.tail_tol = c.tail_tol;
    o.fd_step = c.fd_step;
    o.convention = c.convention();
    return o;
}

inline constexpr int sweep_default_points = 629;
inline constexpr int validate_default_points = 33;

/// phi, numeric mean, closed-form mean, classical fringe.
inline int cmd_interferogram(const RunConfig &c, std::ostream &os) {
    c.validate(sweep_default_points);
    const auto d = c.detection();
    const auto phis = phase_grid(c.phi_min, c.phi_max, c.points.value_or(sweep_default_points));
    const auto opt = measure_options(c);
    const auto rows = parallel_map(phis.size(), [&](std::size_t i) {
        const SourceParams p{c.nbar, phis[i], d.order()};
        const double num = expectation(prepare_state(p, d, opt), d);
        const double ana = closed_form(c.nbar, phis[i], d).mean;
        return format_field(phis[i]) + ',' + format_field(num) + ',' + format_field(ana) + ',' +
               format_field(analytic::classical_fringe(phis[i]));
    });
    write_metadata(os, "interferogram", c);
    os << "phi,mean_numeric,mean_analytic,classical\n";
    for (const auto &r : rows)
        os << r << '\n';
    return exit_ok;
}

/// phi, numeric and closed-form sensitivity, shot-noise and Heisenberg limits.
inline int cmd_sensitivity(const RunConfig &c, std::ostream &os) {
    c.validate(sweep_default_points);
    if (!(c.nbar > 0.0))
        throw config_error("sensitivity needs --nbar > 0");
    const auto d = c.detection();
    const auto phis = phase_grid(c.phi_min, c.phi_max, c.points.value_or(sweep_default_points));
    const auto opt = measure_options(c);
    const auto rows = parallel_map(phis.size(), [&](std::size_t i) {
        const SourceParams p{c.nbar, phis[i], d.order()};
        const auto rec = measure(p, d, opt);
        const auto ana = closed_form(c.nbar, phis[i], d).sensitivity_sq;
        return format_field(phis[i]) + ',' + format_field(rec.sensitivity_sq) + ',' + format_field(ana) + ',' +
               format_field(analytic::snl_sq(c.nbar)) + ',' + format_field(analytic::hl_sq(c.nbar));
    });
    write_metadata(os, "sensitivity", c);
    os << "phi,sens_sq_numeric,sens_sq_analytic,snl_sq,hl_sq\n";
    for (const auto &r : rows)
        os << r << '\n';
    return exit_ok;
}

/// Runs every suite on the grid and prints one line per suite.
inline int cmd_validate(const RunConfig &c, std::ostream &os) {
    c.validate(validate_default_points);
    ValidationGrid g;
    g.nbars = c.grid_nbars;
    g.points = c.points.value_or(validate_default_points);
    g.phi_min = c.phi_min;
    g.phi_max = c.phi_max;
    g.tail_tol = c.tail_tol;
    g.fd_step = c.fd_step;
    g.convention = c.convention();
    const auto report = run_validation(g);

    os << "# tool: interf " << tool_version << '\n';
    os << "# convention: " << g.convention.name << '\n';
    os << "# tail_tol: " << format_field(g.tail_tol) << '\n';
    os << "# fd_step: " << format_field(g.fd_step) << '\n';
    os << "# tolerance: abs " << format_field(report.tolerance.abs) << " rel " << format_field(report.tolerance.rel)
       << '\n';
    char line[200];
    std::snprintf(line, sizeof line, "%-22s %-6s %12s %12s %12s %8s %8s\n", "suite", "status", "worst_ratio",
                  "max_abs_dev", "max_rel_dev", "compared", "skipped");
    os << line;
    for (const auto &s : report.suites) {
        std::snprintf(line, sizeof line, "%-22s %-6s %12.3e %12.3e %12.3e %8d %8d%s\n", s.name.c_str(),
                      s.passed ? "PASS" : "FAIL", s.worst_ratio, s.max_abs_dev, s.max_rel_dev, s.compared, s.skipped,
                      s.compared == 0 ? "  (no resolvable points)" : "");
        os << line;
    }
    os << (report.passed() ? "validation passed\n" : "validation FAILED\n");
    return report.passed() ? exit_ok : exit_validation_failed;
}

/// shots, trials, empirical and predicted per-shot phase uncertainty.
inline int cmd_montecarlo(const RunConfig &c, std::ostream &os) {
    c.validate(sweep_default_points);
    if (!(c.nbar > 0.0))
        throw config_error("montecarlo needs --nbar > 0");
    const auto predicted = analytic::mu_sensitivity_sq(c.nbar, c.phi);
    std::vector<std::string> rows;
    for (auto shots : c.shots) {
        const auto est = montecarlo::empirical_sensitivity(c.nbar, c.phi, shots, c.trials, c.seed);
        std::optional<double> pred;
        if (predicted)
            pred = std::sqrt(*predicted);
        rows.push_back(std::to_string(shots) + ',' + std::to_string(c.trials) + ',' + format_field(est.per_shot_dphi) +
                       ',' + format_field(pred));
    }
    write_metadata(os, "montecarlo", c, false);
    os << "# phi: " << format_field(c.phi) << '\n';
    os << "shots,trials,dphi_empirical,dphi_predicted\n";
    for (const auto &r : rows)
        os << r << '\n';
    return exit_ok;
}

} // namespace interf::cli
