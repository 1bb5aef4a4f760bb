#pragma once

// Passive linear two-mode optics acting on truncated Fock states.
//
// Every element is described by its single-photon mode matrix u, with
// u[x][y] = <x|U|y> for x, y in {A, B}; a coherent product |a, b> maps to
// |u (a, b)^T>.  On general states the matrix is lifted block by block over
// total photon number, since passive optics conserve it.

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

#include "interf/fock_state.hpp"

namespace interf {

using ModeMatrix = std::array<std::array<complex, 2>, 2>;

inline constexpr int mode_a = 0;
inline constexpr int mode_b = 1;

inline ModeMatrix operator*(const ModeMatrix &x, const ModeMatrix &y) {
    ModeMatrix r{};
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            r[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
    return r;
}

/// Real 50-50 splitter ((1, 1), (1, -1)) / sqrt 2: takes |alpha, 0> to the
/// balanced product |alpha / sqrt 2, alpha / sqrt 2> with no i factor.
inline ModeMatrix hadamard_splitter() {
    const double h = std::numbers::sqrt2 / 2.0;
    return {{{h, h}, {h, -h}}};
}

/// ((1, -1), (1, 1)) / sqrt 2, the real splitter with its output ports
/// exchanged.  Equals exp(-i J_y pi / 2).
inline ModeMatrix exchanged_splitter() {
    const double h = std::numbers::sqrt2 / 2.0;
    return {{{h, -h}, {h, h}}};
}

/// e^{i phi n_A}.
inline ModeMatrix phase_matrix(double phi) {
    return {{{std::polar(1.0, phi), 0.0}, {0.0, 1.0}}};
}

/// exp(-i J_y phi) with J_y = i (a b^dag - a^dag b) / 2.
inline ModeMatrix jy_rotation_matrix(double phi) {
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);
    return {{{c, -s}, {s, c}}};
}

/// Fixed splitter pair of the Mach-Zehnder interferometer.
///
/// The input splitter prepares the balanced real product state; the output
/// splitter is chosen so that it conjugates (-1)^{n_A} into the mode-swap
/// operator, which makes port A dark at phi = 0 and ties parity on A after
/// the interferometer to the swap observable before it.
struct OpticsConvention {
    std::string_view name;
    ModeMatrix input_splitter;
    ModeMatrix output_splitter;
};

inline OpticsConvention standard_convention() {
    return {"real-hadamard-bs/dark-port-A", hadamard_splitter(), exchanged_splitter()};
}

/// Splitters swapped between input and output.  Port A becomes the bright
/// port; only meant as a negative control for the parity identity.
inline OpticsConvention flipped_convention() {
    return {"flipped-bs-order/bright-port-A", exchanged_splitter(), hadamard_splitter()};
}

/// Full interferometer: input splitter, phase on A, output splitter.
inline ModeMatrix mzi_matrix(double phi, const OpticsConvention &conv = standard_convention()) {
    return conv.output_splitter * phase_matrix(phi) * conv.input_splitter;
}

enum class TransformPath {
    automatic, ///< coherent shortcut when the input carries a coherent tag
    generic,   ///< always act in Fock space
};

namespace detail {

// Lifts u to every total-photon block present in s.  The N-photon block is
// built from the (N-1)-photon block through the isometric embedding of the
// symmetric N-photon space into (N-1 photons) x (one photon):
//   U_N = S^dag (U_{N-1} (x) u) S,
// so every step is a product of norm-one maps and rounding does not grow.
// Block index k counts photons in mode A.
inline TwoModeFockState lift_mode_matrix(const TwoModeFockState &s, const ModeMatrix &u) {
    const int K = s.cutoff();
    const std::size_t d = s.dim();

    int top = 0;
    for (int n = 0; n <= K; ++n)
        for (int m = 0; m <= K; ++m)
            if (s(n, m) != complex{})
                top = std::max(top, n + m);

    std::vector<double> root(static_cast<std::size_t>(2 * K) + 2);
    for (std::size_t i = 0; i < root.size(); ++i)
        root[i] = std::sqrt(static_cast<double>(i));

    std::vector<complex> out(d * d, complex{});
    std::vector<complex> prev{1.0};
    std::vector<complex> cur;
    std::vector<complex> block_in;
    out[0] = s(0, 0);

    const complex uaa = u[mode_a][mode_a], uab = u[mode_a][mode_b];
    const complex uba = u[mode_b][mode_a], ubb = u[mode_b][mode_b];

    for (int N = 1; N <= top; ++N) {
        const std::size_t w = static_cast<std::size_t>(N) + 1;     // block width
        const std::size_t pw = static_cast<std::size_t>(N);        // previous width
        cur.assign(w * w, complex{});
        const double inv_n = 1.0 / N;
        for (int j = 0; j <= N; ++j) {
            for (int k = 0; k <= N; ++k) {
                complex acc{};
                if (j > 0 && k > 0)
                    acc += root[j] * root[k] * prev[(j - 1) * pw + (k - 1)] * uaa;
                if (j > 0 && k < N)
                    acc += root[j] * root[N - k] * prev[(j - 1) * pw + k] * uab;
                if (j < N && k > 0)
                    acc += root[N - j] * root[k] * prev[j * pw + (k - 1)] * uba;
                if (j < N && k < N)
                    acc += root[N - j] * root[N - k] * prev[j * pw + k] * ubb;
                cur[j * w + k] = acc * inv_n;
            }
        }

        // amplitudes of this block that fit on the grid
        const int lo = std::max(0, N - K);
        const int hi = std::min(N, K);
        block_in.assign(w, complex{});
        bool any = false;
        for (int k = lo; k <= hi; ++k) {
            block_in[k] = s(k, N - k);
            any = any || block_in[k] != complex{};
        }
        if (any) {
            for (int j = lo; j <= hi; ++j) {
                complex acc{};
                for (int k = lo; k <= hi; ++k)
                    acc += cur[j * w + k] * block_in[k];
                out[static_cast<std::size_t>(j) * d + static_cast<std::size_t>(N - j)] = acc;
            }
        }
        prev.swap(cur);
    }
    return TwoModeFockState(K, std::move(out));
}

} // namespace detail

/// Applies a single-photon mode matrix to a two-mode state.  Blocks with
/// more than K photons are only partially representable on the grid; the
/// transform is exactly unitary on states supported on n + m <= K.
inline TwoModeFockState apply_mode_matrix(const TwoModeFockState &s, const ModeMatrix &u,
                                          TransformPath path = TransformPath::automatic) {
    if (path == TransformPath::automatic && s.coherent_tag()) {
        const auto [a, b] = *s.coherent_tag();
        const complex a2 = u[mode_a][mode_a] * a + u[mode_a][mode_b] * b;
        const complex b2 = u[mode_b][mode_a] * a + u[mode_b][mode_b] * b;
        return make_two_mode_coherent(a2, b2, s.cutoff());
    }
    return detail::lift_mode_matrix(s, u);
}

inline TwoModeFockState beam_splitter_50_50(const TwoModeFockState &s,
                                            const OpticsConvention &conv = standard_convention(),
                                            TransformPath path = TransformPath::automatic) {
    return apply_mode_matrix(s, conv.input_splitter, path);
}

/// c(n, m) -> e^{i n phi} c(n, m).
inline TwoModeFockState phase_shift_mode_a(const TwoModeFockState &s, double phi) {
    detail::require_finite(phi, "phi");
    const std::size_t d = s.dim();
    std::vector<complex> amps(s.amplitudes().begin(), s.amplitudes().end());
    for (std::size_t n = 1; n < d; ++n) {
        const complex f = std::polar(1.0, static_cast<double>(n) * phi);
        for (std::size_t m = 0; m < d; ++m)
            amps[n * d + m] *= f;
    }
    std::optional<CoherentTag> tag;
    if (s.coherent_tag())
        tag = CoherentTag{s.coherent_tag()->alpha_a * std::polar(1.0, phi), s.coherent_tag()->alpha_b};
    return TwoModeFockState(s.cutoff(), std::move(amps), tag);
}

/// Whole Mach-Zehnder interferometer in one Fock-space pass.  For input
/// |alpha, 0> the output is coherent with |alpha sin(phi/2)| in A and
/// |alpha cos(phi/2)| in B.
inline TwoModeFockState mzi_transform(const TwoModeFockState &s, double phi,
                                      const OpticsConvention &conv = standard_convention(),
                                      TransformPath path = TransformPath::automatic) {
    detail::require_finite(phi, "phi");
    return apply_mode_matrix(s, mzi_matrix(phi, conv), path);
}

/// exp(-i J_y phi) alone.  Unlike the interferometer, whose port
/// orientation is fixed by its splitters, this forms a one-parameter group.
inline TwoModeFockState rotate_jy(const TwoModeFockState &s, double phi,
                                  TransformPath path = TransformPath::automatic) {
    detail::require_finite(phi, "phi");
    return apply_mode_matrix(s, jy_rotation_matrix(phi), path);
}

} // namespace interf
