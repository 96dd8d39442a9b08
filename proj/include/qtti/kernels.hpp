#pragma once

#include <string>
#include <vector>

#include "qtti/construct.hpp"

namespace qtti {

enum class KernelKind { interpolating, quasi };

/**
 * Compactly supported piecewise polynomial phi. pieces[i] is phi(j + s) for
 * s in [0, 1) with j = first_piece + i, in monomials of the local s.
 */
struct Kernel {
    std::string name;
    std::size_t support_points = 0; ///< q
    std::size_t degree = 0;         ///< p
    int smoothness = 0;             ///< C^smoothness
    KernelKind kind = KernelKind::interpolating;
    int first_piece = 0;
    std::vector<Polynomial> pieces;
    int derivative_order = 0; ///< highest derivative stencils may use

    double operator()(double x) const { return derivative(x, 0); }
    double derivative(double x, int order) const;
};

Kernel linear_kernel();
Kernel lagrange_kernel(std::size_t m);
Kernel keys_cubic();
Kernel bspline_cubic();
Kernel cubic_sixpoint();
Kernel mitchell_netravali(double B, double C);
/// Delta kernel: P^(0) = 1, the refinement copies each coarse value.
Kernel nearest_kernel();

/// "linear", "keys", "bspline3", "cubic6", "nearest", "mn:B,C", "lagrange:m".
Kernel kernel_by_name(const std::string& name);

enum class FadeKind { cubic, quintic };
/// f3 = 3t^2 - 2t^3, f5 = 6t^5 - 15t^4 + 10t^3.
Polynomial fade(FadeKind kind);

/// P^(k)(t) on the unit cell for offsets first_offset .. first_offset + size - 1.
struct StencilSet {
    int first_offset = 0;
    std::vector<Polynomial> polynomials;

    std::size_t size() const { return polynomials.size(); }
    int last_offset() const { return first_offset + static_cast<int>(polynomials.size()) - 1; }
    const Polynomial& at(int k) const {
        return polynomials.at(static_cast<std::size_t>(k - first_offset));
    }
    std::size_t degree() const;
    StencilSet derivative() const;
};

/// P^(k)(t) = phi^(derivative)(t - k) restricted to [0, 1); unscaled by h.
StencilSet stencils(const Kernel& kernel, int derivative = 0);

} // namespace qtti
