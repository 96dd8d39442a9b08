#include "qtti/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <sstream>

#include "qtti/errors.hpp"

namespace qtti {

namespace {

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den < 0) {
            num = -num;
            den = -den;
        }
        const std::int64_t g = std::gcd(num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

Rational operator+(Rational a, Rational b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
Rational operator-(Rational a, Rational b) { return {a.num * b.den - b.num * a.den, a.den * b.den}; }
Rational operator*(Rational a, Rational b) { return {a.num * b.num, a.den * b.den}; }
Rational operator/(Rational a, Rational b) { return {a.num * b.den, a.den * b.num}; }

template <class T>
using Coeffs = std::vector<T>;

template <class T>
Coeffs<T> poly_mul(const Coeffs<T>& a, const Coeffs<T>& b) {
    Coeffs<T> c(a.size() + b.size() - 1, T(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] = c[i + j] + a[i] * b[j];
    return c;
}

// p(c + sigma s) as coefficients in s.
template <class T>
Coeffs<T> substitute(const Coeffs<T>& p, T c, T sigma) {
    Coeffs<T> out(p.size(), T(0));
    Coeffs<T> power{T(1)};
    const Coeffs<T> lin{c, sigma};
    for (std::size_t n = 0; n < p.size(); ++n) {
        for (std::size_t i = 0; i < power.size(); ++i) out[i] = out[i] + p[n] * power[i];
        power = poly_mul(power, lin);
    }
    return out;
}

Polynomial to_double(const Coeffs<Rational>& c) {
    Polynomial p;
    for (const auto& r : c) p.coefficients.push_back(r.value());
    return p;
}

Polynomial to_double(const Coeffs<double>& c) { return Polynomial{c}; }

// Symmetric kernel given by polynomials in r = |x| on [i, i+1), i = 0..R-1.
template <class T>
std::pair<int, std::vector<Polynomial>> symmetric_pieces(const std::vector<Coeffs<T>>& radial) {
    const int R = static_cast<int>(radial.size());
    std::vector<Polynomial> pieces;
    for (int j = -R; j < R; ++j) {
        if (j >= 0) {
            pieces.push_back(to_double(substitute(radial[j], T(j), T(1))));
        } else {
            // x = j + s, |x| = -j - s.
            pieces.push_back(to_double(substitute(radial[-j - 1], T(-j), T(-1))));
        }
    }
    return {-R, pieces};
}

Kernel make_symmetric(std::string name, auto radial, int smoothness, KernelKind kind) {
    Kernel k;
    k.name = std::move(name);
    auto [first, pieces] = symmetric_pieces(radial);
    k.first_piece = first;
    k.pieces = std::move(pieces);
    k.support_points = k.pieces.size();
    k.degree = 0;
    for (const auto& p : k.pieces) k.degree = std::max(k.degree, p.degree());
    k.smoothness = smoothness;
    k.derivative_order = smoothness;
    k.kind = kind;
    return k;
}

} // namespace

double Kernel::derivative(double x, int order) const {
    const double fl = std::floor(x);
    const long j = static_cast<long>(fl) - first_piece;
    if (j < 0 || j >= static_cast<long>(pieces.size())) {
        return 0.0;
    }
    Polynomial p = pieces[static_cast<std::size_t>(j)];
    for (int i = 0; i < order; ++i) p = p.derivative();
    return p(x - fl);
}

Kernel linear_kernel() {
    using R = Rational;
    return make_symmetric("linear", std::vector<Coeffs<R>>{{R(1), R(-1)}}, 0,
                          KernelKind::interpolating);
}

Kernel keys_cubic() {
    using R = Rational;
    const std::vector<Coeffs<R>> radial{
        {R(1), R(0), R(-5, 2), R(3, 2)},
        {R(2), R(-4), R(5, 2), R(-1, 2)},
    };
    return make_symmetric("keys", radial, 1, KernelKind::interpolating);
}

Kernel bspline_cubic() {
    using R = Rational;
    const std::vector<Coeffs<R>> radial{
        {R(4, 6), R(0), R(-1), R(1, 2)},
        // (2 - r)^3 / 6
        {R(8, 6), R(-2), R(1), R(-1, 6)},
    };
    return make_symmetric("bspline3", radial, 2, KernelKind::quasi);
}

Kernel cubic_sixpoint() {
    using R = Rational;
    const std::vector<Coeffs<R>> radial{
        {R(1), R(0), R(-7, 3), R(4, 3)},
        {R(5, 2), R(-59, 12), R(3), R(-7, 12)},
        {R(-3, 2), R(21, 12), R(-2, 3), R(1, 12)},
    };
    return make_symmetric("cubic6", radial, 1, KernelKind::interpolating);
}

Kernel mitchell_netravali(double B, double C) {
    const std::vector<Coeffs<double>> radial{
        {(6 - 2 * B) / 6, 0.0, (-18 + 12 * B + 6 * C) / 6, (12 - 9 * B - 6 * C) / 6},
        {(8 * B + 24 * C) / 6, (-12 * B - 48 * C) / 6, (6 * B + 30 * C) / 6, (-B - 6 * C) / 6},
    };
    std::ostringstream name;
    name << "mn:" << B << "," << C;
    const bool spline = B == 1.0 && C == 0.0;
    return make_symmetric(name.str(), radial, spline ? 2 : 1,
                          B == 0.0 ? KernelKind::interpolating : KernelKind::quasi);
}

Kernel lagrange_kernel(std::size_t m) {
    if (m < 1 || m > 12) {
        throw ConfigError("lagrange degree must be in 1..12");
    }
    const int lo = -static_cast<int>(m / 2);
    const int hi = static_cast<int>((m + 1) / 2);
    Kernel k;
    k.name = "lagrange:" + std::to_string(m);
    k.first_piece = -hi;
    // phi(j + s) = l_{-j}(s) on nodes lo..hi.
    for (int j = -hi; j <= -lo; ++j) {
        const int node = -j;
        Coeffs<Rational> basis{Rational(1)};
        for (int other = lo; other <= hi; ++other) {
            if (other == node) continue;
            basis = poly_mul(basis, Coeffs<Rational>{Rational(-other, node - other),
                                                     Rational(1, node - other)});
        }
        k.pieces.push_back(to_double(basis));
    }
    k.support_points = m + 1;
    k.degree = m;
    k.smoothness = 0;
    k.derivative_order = m >= 2 ? 2 : 1;
    k.kind = KernelKind::interpolating;
    return k;
}

Kernel nearest_kernel() {
    Kernel k;
    k.name = "nearest";
    k.first_piece = 0;
    k.pieces = {Polynomial{{1.0}}};
    k.support_points = 1;
    k.degree = 0;
    k.smoothness = 0;
    k.derivative_order = 0;
    k.kind = KernelKind::interpolating;
    return k;
}

Kernel kernel_by_name(const std::string& name) {
    if (name == "linear") return linear_kernel();
    if (name == "keys") return keys_cubic();
    if (name == "bspline3") return bspline_cubic();
    if (name == "cubic6") return cubic_sixpoint();
    if (name == "nearest") return nearest_kernel();
    if (name.rfind("lagrange:", 0) == 0) {
        try {
            return lagrange_kernel(std::stoul(name.substr(9)));
        } catch (const std::logic_error&) {
            throw ConfigError("bad lagrange degree in '" + name + "'");
        }
    }
    if (name.rfind("mn:", 0) == 0) {
        const auto comma = name.find(',', 3);
        if (comma == std::string::npos) {
            throw ConfigError("expected mn:B,C, got '" + name + "'");
        }
        try {
            return mitchell_netravali(std::stod(name.substr(3, comma - 3)),
                                      std::stod(name.substr(comma + 1)));
        } catch (const std::logic_error&) {
            throw ConfigError("bad Mitchell-Netravali parameters in '" + name + "'");
        }
    }
    throw ConfigError("unknown kernel '" + name + "'");
}

Polynomial fade(FadeKind kind) {
    if (kind == FadeKind::cubic) {
        return Polynomial{{0.0, 0.0, 3.0, -2.0}};
    }
    return Polynomial{{0.0, 0.0, 0.0, 10.0, -15.0, 6.0}};
}

std::size_t StencilSet::degree() const {
    std::size_t p = 0;
    for (const auto& poly : polynomials) p = std::max(p, poly.degree());
    return p;
}

StencilSet StencilSet::derivative() const {
    StencilSet d{first_offset, {}};
    for (const auto& poly : polynomials) d.polynomials.push_back(poly.derivative());
    return d;
}

StencilSet stencils(const Kernel& kernel, int derivative) {
    if (derivative < 0 || derivative > kernel.derivative_order) {
        throw ConfigError("kernel '" + kernel.name + "' does not provide derivative order " +
                          std::to_string(derivative));
    }
    // P^(k)(t) = phi(t - k) = pieces[-k - first_piece](t).
    const int count = static_cast<int>(kernel.pieces.size());
    StencilSet s;
    s.first_offset = -(kernel.first_piece + count - 1);
    for (int k = s.first_offset; k < s.first_offset + count; ++k) {
        Polynomial p = kernel.pieces[static_cast<std::size_t>(-k - kernel.first_piece)];
        for (int i = 0; i < derivative; ++i) p = p.derivative();
        s.polynomials.push_back(std::move(p));
    }
    return s;
}

} // namespace qtti
