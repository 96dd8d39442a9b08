#pragma once

// Dense reference implementations used only by tests.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "qtti/kernels.hpp"
#include "qtti/tti.hpp"

namespace qtti::testing {

inline double ghost_value(const std::vector<double>& f, long j, Boundary boundary, GhostFill fill) {
    const long n = static_cast<long>(f.size());
    if (j >= 0 && j < n) return f[static_cast<std::size_t>(j)];
    if (boundary == Boundary::periodic) return f[static_cast<std::size_t>(((j % n) + n) % n)];
    switch (fill) {
    case GhostFill::zero: return 0.0;
    case GhostFill::edge: return f[j < 0 ? 0 : static_cast<std::size_t>(n - 1)];
    case GhostFill::reflect: {
        long s = j < 0 ? -j : 2 * (n - 1) - j;
        s = std::max(0L, std::min(n - 1, s));
        return f[static_cast<std::size_t>(s)];
    }
    }
    return 0.0;
}

/// Kernel convolution F(x) = sum_j c_j phi^(d)(x/h - j) h^-d, sampled at 2^m points per cell.
inline std::vector<double> dense_convolution(const std::vector<double>& f, const Kernel& kernel, std::size_t m,
                                             int derivative = 0, double h = 1.0,
                                             Boundary boundary = Boundary::periodic,
                                             GhostFill fill = GhostFill::edge) {
    const std::size_t sub = std::size_t{1} << m;
    const long reach = static_cast<long>(kernel.pieces.size()) + 1;
    std::vector<double> out(f.size() * sub);
    for (std::size_t a = 0; a < f.size(); ++a) {
        for (std::size_t b = 0; b < sub; ++b) {
            const double x = static_cast<double>(a) + static_cast<double>(b) / static_cast<double>(sub);
            double s = 0.0;
            for (long j = static_cast<long>(a) - reach; j <= static_cast<long>(a) + reach; ++j)
                s += ghost_value(f, j, boundary, fill) * kernel.derivative(x - static_cast<double>(j), derivative);
            out[a * sub + b] = s * std::pow(h, -derivative);
        }
    }
    return out;
}

/// Row-major 2D array refined along both axes, one axis at a time.
inline std::vector<double> dense_convolution_2d(const std::vector<double>& f, std::size_t n0, std::size_t n1,
                                                const Kernel& kernel, std::size_t m,
                                                Boundary boundary = Boundary::periodic,
                                                GhostFill fill = GhostFill::edge) {
    const std::size_t sub = std::size_t{1} << m;
    std::vector<double> rows(n0 * n1 * sub);
    for (std::size_t i = 0; i < n0; ++i) {
        std::vector<double> line(f.begin() + static_cast<long>(i * n1), f.begin() + static_cast<long>((i + 1) * n1));
        const auto r = dense_convolution(line, kernel, m, 0, 1.0, boundary, fill);
        std::copy(r.begin(), r.end(), rows.begin() + static_cast<long>(i * n1 * sub));
    }
    std::vector<double> out(n0 * sub * n1 * sub);
    for (std::size_t j = 0; j < n1 * sub; ++j) {
        std::vector<double> col(n0);
        for (std::size_t i = 0; i < n0; ++i) col[i] = rows[i * n1 * sub + j];
        const auto r = dense_convolution(col, kernel, m, 0, 1.0, boundary, fill);
        for (std::size_t i = 0; i < n0 * sub; ++i) out[i * n1 * sub + j] = r[i];
    }
    return out;
}

/// Keys cubic convolution weight with a = -1/2, written out by hand.
inline double keys_weight(double x) {
    const double t = std::abs(x);
    if (t <= 1.0) return (1.5 * t - 2.5) * t * t + 1.0;
    if (t < 2.0) return ((-0.5 * t + 2.5) * t - 4.0) * t + 2.0;
    return 0.0;
}

/// Classic bicubic upscale by 2^m with edge-replicated borders; output pixel (I, J) sits at (I, J) / 2^m.
inline std::vector<double> bicubic_upscale(const std::vector<double>& img, std::size_t n, std::size_t m) {
    const std::size_t sub = std::size_t{1} << m, N = n * sub;
    const auto px = [&](long i, long j) {
        const long last = static_cast<long>(n) - 1;
        return img[static_cast<std::size_t>(std::clamp(i, 0L, last)) * n +
                   static_cast<std::size_t>(std::clamp(j, 0L, last))];
    };
    std::vector<double> out(N * N);
    for (std::size_t I = 0; I < N; ++I)
        for (std::size_t J = 0; J < N; ++J) {
            const long i0 = static_cast<long>(I / sub), j0 = static_cast<long>(J / sub);
            const double fi = static_cast<double>(I % sub) / static_cast<double>(sub);
            const double fj = static_cast<double>(J % sub) / static_cast<double>(sub);
            double s = 0.0;
            for (long a = -1; a <= 2; ++a)
                for (long b = -1; b <= 2; ++b)
                    s += keys_weight(fi - static_cast<double>(a)) * keys_weight(fj - static_cast<double>(b)) *
                         px(i0 + a, j0 + b);
            out[I * N + J] = s;
        }
    return out;
}

// ---- noise: direct transcriptions of the pseudocode on periodic lattices ----

inline double fade_value(bool quintic, double t) {
    return quintic ? t * t * t * (t * (6.0 * t - 15.0) + 10.0) : t * t * (3.0 - 2.0 * t);
}

/// Subdivision on H[0..2^M]; draws[l - 1][j] is the level-l draw at odd site j.
/// Returns H[0..2^M - 1].
inline std::vector<double> midpoint_dense(std::size_t M, double h0, double hN, double R, double decay,
                                          const std::vector<std::vector<double>>& draws) {
    const std::size_t N = std::size_t{1} << M;
    std::vector<double> H(N + 1, 0.0);
    H[0] = h0;
    H[N] = hN;
    for (std::size_t level = 1; level <= M; ++level) {
        const std::size_t d = N >> (level - 1);
        for (std::size_t i = 0; i + d <= N; i += d) {
            const std::size_t mid = i + d / 2;
            H[mid] = 0.5 * (H[i] + H[i + d]) + R * draws[level - 1][mid / (d / 2)];
        }
        R *= decay;
    }
    H.pop_back();
    return H;
}

/// 1D value noise: sum_{j=-1..2} V(i0 + j) phi(t - j), with 2^(M - n0) samples per cell.
inline std::vector<double> value_noise_dense(const std::vector<double>& V, const Kernel& kernel, std::size_t n0,
                                             std::size_t M) {
    const long cells = static_cast<long>(V.size());
    const std::size_t sub = std::size_t{1} << (M - n0);
    std::vector<double> out(V.size() * sub);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(sub);
        const long i0 = static_cast<long>(std::floor(x));
        const double t = x - static_cast<double>(i0);
        double sum = 0.0;
        for (long j = -1; j <= 2; ++j) sum += V[static_cast<std::size_t>(((i0 + j) % cells + cells) % cells)] * kernel(t - static_cast<double>(j));
        out[i] = sum;
    }
    return out;
}

inline std::vector<double> perlin1d_dense(const std::vector<double>& g, std::size_t n0, std::size_t M, bool quintic) {
    const std::size_t cells = g.size();
    const std::size_t sub = std::size_t{1} << (M - n0);
    std::vector<double> out(cells * sub);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(sub);
        const auto i0 = static_cast<std::size_t>(std::floor(x));
        const double u = x - static_cast<double>(i0);
        double n[2];
        for (std::size_t a = 0; a < 2; ++a) n[a] = g[(i0 + a) % cells] * (u - static_cast<double>(a));
        const double s = fade_value(quintic, u);
        out[i] = (1 - s) * n[0] + s * n[1];
    }
    (void)n0;
    return out;
}

/// gx, gy, gz are row-major cubes with side 2^n0; output is the row-major cube with side 2^M.
inline std::vector<double> perlin3d_dense(const std::vector<double>& gx, const std::vector<double>& gy,
                                          const std::vector<double>& gz, std::size_t n0, std::size_t M,
                                          bool quintic) {
    const std::size_t L = std::size_t{1} << n0, side = std::size_t{1} << M, sub = side / L;
    auto at = [L](const std::vector<double>& g, std::size_t i, std::size_t j, std::size_t k) {
        return g[((i % L) * L + (j % L)) * L + (k % L)];
    };
    std::vector<double> out(side * side * side);
    for (std::size_t p = 0; p < side; ++p)
        for (std::size_t q = 0; q < side; ++q)
            for (std::size_t w = 0; w < side; ++w) {
                const double x = static_cast<double>(p) / sub, y = static_cast<double>(q) / sub,
                             z = static_cast<double>(w) / sub;
                const auto i0 = static_cast<std::size_t>(std::floor(x)), j0 = static_cast<std::size_t>(std::floor(y)),
                           k0 = static_cast<std::size_t>(std::floor(z));
                const double u = x - i0, v = y - j0, t3 = z - k0;
                double n[2][2][2];
                for (std::size_t a = 0; a < 2; ++a)
                    for (std::size_t b = 0; b < 2; ++b)
                        for (std::size_t c = 0; c < 2; ++c)
                            n[a][b][c] = at(gx, i0 + a, j0 + b, k0 + c) * (u - a) +
                                         at(gy, i0 + a, j0 + b, k0 + c) * (v - b) +
                                         at(gz, i0 + a, j0 + b, k0 + c) * (t3 - c);
                const double s = fade_value(quintic, u), t = fade_value(quintic, v), r = fade_value(quintic, t3);
                double pc[2];
                for (std::size_t c = 0; c < 2; ++c) {
                    const double m0 = (1 - s) * n[0][0][c] + s * n[1][0][c];
                    const double m1 = (1 - s) * n[0][1][c] + s * n[1][1][c];
                    pc[c] = (1 - t) * m0 + t * m1;
                }
                out[(p * side + q) * side + w] = (1 - r) * pc[0] + r * pc[1];
            }
    return out;
}

/// sum_k alpha^k n(2^k x) on a periodic 1D grid.
inline std::vector<double> fractal_dense(const std::vector<double>& base, std::size_t octaves, double alpha) {
    std::vector<double> out(base.size(), 0.0);
    double w = 1.0;
    for (std::size_t k = 0; k < octaves; ++k, w *= alpha)
        for (std::size_t i = 0; i < base.size(); ++i) out[i] += w * base[(i << k) % base.size()];
    return out;
}

/// Separable periodic refinement of a row-major cube (side L) by m scales,
/// with per-axis derivative orders; h is the lattice spacing.
inline std::vector<double> dense_refine_3d(const std::vector<double>& lattice, std::size_t L, const Kernel& kernel,
                                           std::size_t m, std::array<int, 3> orders, double h) {
    std::array<std::size_t, 3> side{L, L, L};
    std::vector<double> cur = lattice;
    for (std::size_t axis = 0; axis < 3; ++axis) {
        std::array<std::size_t, 3> next_side = side;
        next_side[axis] = side[axis] << m;
        std::vector<double> next(next_side[0] * next_side[1] * next_side[2]);
        std::array<std::size_t, 3> idx{};
        for (idx[0] = 0; idx[0] < side[0]; ++idx[0])
            for (idx[1] = 0; idx[1] < side[1]; ++idx[1])
                for (idx[2] = 0; idx[2] < side[2]; ++idx[2]) {
                    if (idx[axis] != 0) continue;
                    std::vector<double> line(side[axis]);
                    auto at = idx;
                    for (std::size_t t = 0; t < side[axis]; ++t) {
                        at[axis] = t;
                        line[t] = cur[(at[0] * side[1] + at[1]) * side[2] + at[2]];
                    }
                    const auto r = dense_convolution(line, kernel, m, orders[axis], h);
                    for (std::size_t t = 0; t < r.size(); ++t) {
                        at[axis] = t;
                        next[(at[0] * next_side[1] + at[1]) * next_side[2] + at[2]] = r[t];
                    }
                }
        cur = std::move(next);
        side = next_side;
    }
    return cur;
}

} // namespace qtti::testing
