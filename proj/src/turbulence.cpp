#include "qtti/turbulence.hpp"

#include <cmath>

#include "qtti/errors.hpp"
#include "qtti/noise.hpp"
#include "qtti/rng.hpp"
#include "qtti/tti.hpp"

namespace qtti {

namespace {

// Levi-Civita pairs: v_k += sign * d_i A_j.
struct CurlTerm {
    std::size_t k, i, j;
    double sign;
};
constexpr std::array<CurlTerm, 6> kCurl{{
    {0, 1, 2, 1.0}, {0, 2, 1, -1.0},
    {1, 2, 0, 1.0}, {1, 0, 2, -1.0},
    {2, 0, 1, 1.0}, {2, 1, 0, -1.0},
}};

std::vector<std::size_t> interleaved_bits(std::array<std::size_t, 3> index, std::size_t n) {
    std::vector<std::size_t> bits(3 * n);
    for (std::size_t s = 0; s < n; ++s)
        for (std::size_t d = 0; d < 3; ++d) bits[3 * s + d] = (index[d] >> (n - 1 - s)) & 1U;
    return bits;
}

} // namespace

double CascadeSpec::weight(std::size_t m) const {
    return std::exp2(weight_exponent * static_cast<double>(m));
}

void CascadeSpec::validate() const {
    if (scales < 4) throw DimensionError("turbulence: need at least 4 scales");
    if (chi == 0) throw ConfigError("turbulence: chi must be >= 1");
    if (layout == Layout::plain) throw ConfigError("turbulence: layout must be interleaved or tucker");
    if (first_scale < 2 || first_scale > final_scale() || final_scale() >= scales)
        throw ConfigError("turbulence: stream scales must satisfy 2 <= first <= last < scales");
    if (!(box > 0.0)) throw ConfigError("turbulence: box must be positive");
}

StreamTerm draw_stream_term(const CascadeSpec& spec, std::size_t m) {
    StreamTerm t;
    t.scale = m;
    t.weight = spec.weight(m);
    for (std::size_t j = 0; j < 3; ++j) {
        if (spec.layout == Layout::interleaved)
            t.interleaved[j] = random_qtt(3 * m, spec.chi, spec.seed, {stream_tag::cascade, m, j});
        else
            t.tucker[j] = random_tucker(3, m, spec.chi, spec.seed, {stream_tag::cascade, m, j});
    }
    return t;
}

VelocityField turbulence_cascade(const CascadeSpec& spec) {
    spec.validate();
    const std::size_t M = spec.scales;
    VelocityField v;
    v.layout = spec.layout;
    v.scales = M;
    v.box = spec.box;
    const Tolerance tol = Tolerance::relative(spec.tolerance);
    const Kernel kernel = bspline_cubic();
    std::array<bool, 3> started{};
    for (std::size_t m = spec.first_scale; m <= spec.final_scale(); ++m) {
        StreamTerm term = draw_stream_term(spec, m);
        TTIOptions options;
        options.domain_length = spec.box;
        // Fixed order: derivative axis i outer, then the curl pairs using it.
        for (std::size_t i = 0; i < 3; ++i) {
            std::vector<int> orders(3, 0);
            orders[i] = 1;
            if (spec.layout == Layout::interleaved) {
                const auto op = build_tti_multidim_interleaved(kernel, 3, m, M - m, orders, options);
                for (const auto& c : kCurl) {
                    if (c.i != i) continue;
                    const auto d = scale(apply_tti(op, term.interleaved[c.j], tol), term.weight * c.sign);
                    v.interleaved[c.k] = started[c.k] ? round(add(v.interleaved[c.k], d), tol) : d;
                    started[c.k] = true;
                }
            } else {
                for (const auto& c : kCurl) {
                    if (c.i != i) continue;
                    const auto d = tucker_scale(
                        apply_tti_tucker(term.tucker[c.j], kernel, M - m, orders, tol, options), term.weight * c.sign);
                    v.tucker[c.k] = started[c.k] ? tucker_round(tucker_add(v.tucker[c.k], d), tol) : d;
                    started[c.k] = true;
                }
            }
        }
        v.terms.push_back(std::move(term));
    }
    return v;
}

std::size_t VelocityField::max_rank() const {
    std::size_t r = 0;
    for (std::size_t k = 0; k < 3; ++k)
        r = std::max(r, layout == Layout::interleaved ? interleaved[k].max_rank() : tucker[k].max_rank());
    return r;
}

std::size_t VelocityField::parameter_count() const {
    std::size_t p = 0;
    for (std::size_t k = 0; k < 3; ++k)
        p += layout == Layout::interleaved ? interleaved[k].parameter_count() : tucker[k].parameter_count();
    return p;
}

DenseTensor VelocityField::component_dense(std::size_t k) const {
    return layout == Layout::interleaved ? deinterleave(interleaved[k], 3) : tucker_to_dense(tucker[k]);
}

double VelocityField::component_at(std::size_t k, std::span<const std::size_t> index) const {
    if (layout == Layout::tucker) return tucker_eval(tucker[k], index);
    return tt_eval(interleaved[k], interleaved_bits({index[0], index[1], index[2]}, scales));
}

double stream_lattice_value(const StreamTerm& term, Layout layout, std::size_t j, std::array<long, 3> index) {
    const long side = 1L << term.scale;
    std::array<std::size_t, 3> wrapped{};
    for (std::size_t d = 0; d < 3; ++d) wrapped[d] = static_cast<std::size_t>(((index[d] % side) + side) % side);
    if (layout == Layout::tucker) return tucker_eval(term.tucker[j], wrapped);
    return tt_eval(term.interleaved[j], interleaved_bits(wrapped, term.scale));
}

double stream_derivative_at(const StreamTerm& term, Layout layout, std::size_t j, double box,
                            std::array<double, 3> x, std::array<int, 3> orders) {
    const Kernel kernel = bspline_cubic();
    const double cells = std::ldexp(1.0, static_cast<int>(term.scale));
    const double h = box / cells;
    std::array<long, 3> base{};
    std::array<std::vector<double>, 3> w;
    int first = 0, last = 0;
    for (std::size_t d = 0; d < 3; ++d) {
        const StencilSet s = stencils(kernel, orders[d]);
        first = s.first_offset;
        last = s.last_offset();
        const double u = x[d] / h;
        const double a = std::floor(u);
        base[d] = static_cast<long>(a);
        const double scale = std::pow(h, -orders[d]);
        for (int k = first; k <= last; ++k) w[d].push_back(scale * s.at(k)(u - a));
    }
    double sum = 0.0;
    const int width = last - first + 1;
    for (int a = 0; a < width; ++a)
        for (int b = 0; b < width; ++b)
            for (int c = 0; c < width; ++c)
                sum += w[0][a] * w[1][b] * w[2][c] *
                       stream_lattice_value(term, layout, j,
                                            {base[0] + first + a, base[1] + first + b, base[2] + first + c});
    return sum;
}

std::array<double, 3> velocity_at(const VelocityField& v, std::array<double, 3> x) {
    std::array<double, 3> out{};
    for (const auto& term : v.terms)
        for (const auto& c : kCurl) {
            std::array<int, 3> orders{};
            orders[c.i] = 1;
            out[c.k] += term.weight * c.sign * stream_derivative_at(term, v.layout, c.j, v.box, x, orders);
        }
    return out;
}

double divergence_at(const VelocityField& v, std::array<double, 3> x) {
    double div = 0.0;
    for (const auto& term : v.terms)
        for (const auto& c : kCurl) {
            std::array<int, 3> orders{};
            orders[c.i] += 1;
            orders[c.k] += 1;
            div += term.weight * c.sign * stream_derivative_at(term, v.layout, c.j, v.box, x, orders);
        }
    return div;
}

} // namespace qtti
