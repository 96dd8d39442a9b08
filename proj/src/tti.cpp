#include "qtti/tti.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "qtti/construct.hpp"
#include "qtti/errors.hpp"

namespace qtti {

namespace {

std::vector<OperatorCore> column_cores(const TensorTrain& tt) {
    std::vector<OperatorCore> out;
    for (const Core& c : tt.cores()) out.push_back(detail::as_operator_core(c, c.mode(), 1));
    return out;
}

TTOperator shift_for_offset(int k, std::size_t n, Boundary boundary) {
    const std::size_t full = std::size_t{1} << n;
    const std::size_t mag = static_cast<std::size_t>(std::abs(k));
    if (boundary == Boundary::periodic) {
        return shift_mpo(ShiftKind::cyclic, k >= 0 ? mag % full : (full - mag % full) % full, n);
    }
    if (k >= 0) return shift_mpo(ShiftKind::left, mag, n);
    return shift_mpo(ShiftKind::right, mag, n);
}

// Rank-1 operator |a><src| on n binary legs.
TTOperator outer_delta(std::size_t a, std::size_t src, std::size_t n) {
    std::vector<OperatorCore> cores;
    for (std::size_t j = 0; j < n; ++j) {
        OperatorCore c(1, 2, 2, 1);
        c(0, (a >> (n - 1 - j)) & 1U, (src >> (n - 1 - j)) & 1U, 0) = 1.0;
        cores.push_back(std::move(c));
    }
    return TTOperator(std::move(cores));
}

TensorTrain delta_qtt(std::size_t a, std::size_t n) {
    std::vector<Core> cores;
    for (std::size_t j = 0; j < n; ++j) {
        Core c(1, 2, 1);
        c(0, (a >> (n - 1 - j)) & 1U, 0) = 1.0;
        cores.push_back(std::move(c));
    }
    return TensorTrain(std::move(cores));
}

// Index supplying the ghost sample at position j outside [0, full).
long ghost_source(long j, long full, GhostFill fill) {
    long s = j;
    if (fill == GhostFill::reflect) {
        if (s < 0) s = -s;
        if (s >= full) s = 2 * (full - 1) - s;
    }
    return std::clamp(s, 0L, full - 1);
}

Polynomial scaled(const Polynomial& p, double c) {
    Polynomial out = p;
    for (double& x : out.coefficients) x *= c;
    return out;
}

void accumulate(Polynomial& acc, const Polynomial& p, double w) {
    if (acc.coefficients.size() < p.coefficients.size()) acc.coefficients.resize(p.coefficients.size(), 0.0);
    for (std::size_t i = 0; i < p.coefficients.size(); ++i) acc.coefficients[i] += w * p.coefficients[i];
}

TTOperator with_fine(const TTOperator& coarse, const Polynomial& poly, std::size_t m) {
    if (m == 0) return op_scale(coarse, poly(0.0));
    const TensorTrain fine = detail::polynomial_qtt_any(poly, m, PolynomialBasis::monomial);
    return op_kron(coarse, TTOperator(column_cores(fine)));
}

TTOperator sum_terms(const std::vector<TTOperator>& terms) {
    TTOperator total = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) {
        total = op_add(total, terms[i]);
        // Keep intermediate ranks small; exact recompression only.
        total = op_round(total, Tolerance::exact());
    }
    return op_round(total, Tolerance::exact());
}

// Boundary cells with at least one offset falling outside the grid.
std::vector<std::size_t> boundary_cells(const StencilSet& s, std::size_t full) {
    std::vector<std::size_t> cells;
    for (std::size_t a = 0; a < full; ++a) {
        const long lo = static_cast<long>(a) + s.first_offset;
        const long hi = static_cast<long>(a) + s.last_offset();
        if (lo < 0 || hi >= static_cast<long>(full)) cells.push_back(a);
    }
    return cells;
}

std::vector<Core> padded_cores(const TensorTrain& f, std::size_t extra) {
    std::vector<Core> cores = f.cores();
    for (std::size_t i = 0; i < extra; ++i) cores.emplace_back(1, 1, 1, std::vector<double>{1.0});
    return cores;
}

} // namespace

std::vector<std::size_t> TTIOperator::coarse_ranks() const {
    const auto r = op.ranks();
    return {r.begin() + 1, r.begin() + 1 + static_cast<long>(dims * coarse_scales)};
}

std::vector<std::size_t> TTIOperator::fine_ranks() const {
    const auto r = op.ranks();
    const std::size_t first = dims * coarse_scales + 1;
    if (first >= r.size() - 1) return {};
    return {r.begin() + static_cast<long>(first), r.end() - 1};
}

TTIOperator build_tti_stencils(const StencilSet& stencils, std::size_t n, std::size_t m,
                               double scale, Boundary boundary, GhostFill ghost, bool fold_boundary) {
    if (n == 0 || n > 40) throw DimensionError("TTI: coarse scale count must be in 1..40");
    const std::size_t full = std::size_t{1} << n;
    if (stencils.size() == 0) throw ConfigError("TTI: empty stencil set");
    if (stencils.size() > full || static_cast<std::size_t>(std::max(std::abs(stencils.first_offset),
                                                                     std::abs(stencils.last_offset()))) >= full)
        throw DimensionError("TTI: kernel support exceeds the coarse grid (" + std::to_string(full) + " points)");

    std::vector<TTOperator> terms;
    for (int k = stencils.first_offset; k <= stencils.last_offset(); ++k) {
        terms.push_back(with_fine(shift_for_offset(k, n, boundary), scaled(stencils.at(k), scale), m));
    }
    const bool fold = boundary == Boundary::clamped && fold_boundary && ghost != GhostFill::zero;
    if (fold) {
        // Ghost rows: output cell a reads sample src for every offset that leaves the grid.
        std::map<std::pair<std::size_t, std::size_t>, Polynomial> rows;
        for (std::size_t a : boundary_cells(stencils, full)) {
            for (int k = stencils.first_offset; k <= stencils.last_offset(); ++k) {
                const long j = static_cast<long>(a) + k;
                if (j >= 0 && j < static_cast<long>(full)) continue;
                const auto src = static_cast<std::size_t>(ghost_source(j, static_cast<long>(full), ghost));
                accumulate(rows[{a, src}], stencils.at(k), scale);
            }
        }
        for (const auto& [key, poly] : rows) terms.push_back(with_fine(outer_delta(key.first, key.second, n), poly, m));
    }
    TTIOperator out;
    out.dims = 1;
    out.coarse_scales = n;
    out.extra_scales = m;
    out.op = sum_terms(terms);
    out.stencils = {stencils};
    out.scale = {scale};
    out.boundary = {boundary};
    out.ghost = {ghost};
    out.folded = {fold};
    return out;
}

TTIOperator build_tti_1d(const Kernel& kernel, std::size_t n, std::size_t m, const TTIOptions& options) {
    const StencilSet s = stencils(kernel, options.derivative);
    const double h = options.domain_length / std::ldexp(1.0, static_cast<int>(n));
    const double scale = std::pow(h, -options.derivative);
    return build_tti_stencils(s, n, m, scale, options.boundary, options.ghost, options.fold_boundary);
}

TTIOperator build_tti_interleaved(const std::vector<TTIOperator>& per_dimension) {
    const std::size_t d = per_dimension.size();
    if (d == 0) throw DimensionError("TTI: no dimensions");
    const std::size_t n = per_dimension[0].coarse_scales;
    const std::size_t m = per_dimension[0].extra_scales;
    for (const auto& op : per_dimension)
        if (op.dims != 1 || op.coarse_scales != n || op.extra_scales != m)
            throw DimensionError("TTI: interleaved layout needs equal scales per dimension");
    if (d == 1) return per_dimension[0];
    const std::size_t total = n + m;
    std::vector<std::vector<std::size_t>> ranks;
    for (const auto& op : per_dimension) ranks.push_back(op.op.ranks());

    std::vector<OperatorCore> cores;
    for (std::size_t k = 0; k < total; ++k) {
        for (std::size_t j = 0; j < d; ++j) {
            // Bond tuple: dims < j already past scale k, dims >= j still before it.
            std::vector<std::size_t> lrad(d), rrad(d);
            for (std::size_t i = 0; i < d; ++i) {
                lrad[i] = i < j ? ranks[i][k + 1] : ranks[i][k];
                rrad[i] = i <= j ? ranks[i][k + 1] : ranks[i][k];
            }
            std::size_t lsize = 1, rsize = 1;
            for (std::size_t i = 0; i < d; ++i) {
                lsize *= lrad[i];
                rsize *= rrad[i];
            }
            const OperatorCore& g = per_dimension[j].op.core(k);
            OperatorCore c(lsize, g.rows(), g.cols(), rsize);
            std::vector<std::size_t> tuple(d, 0);
            for (std::size_t lin = 0; lin < lsize; ++lin) {
                std::size_t t = lin;
                for (std::size_t i = d; i-- > 0;) {
                    tuple[i] = t % lrad[i];
                    t /= lrad[i];
                }
                for (std::size_t b = 0; b < g.right(); ++b) {
                    std::size_t rlin = 0;
                    for (std::size_t i = 0; i < d; ++i) rlin = rlin * rrad[i] + (i == j ? b : tuple[i]);
                    for (std::size_t row = 0; row < g.rows(); ++row)
                        for (std::size_t col = 0; col < g.cols(); ++col)
                            c(lin, row, col, rlin) = g(tuple[j], row, col, b);
                }
            }
            cores.push_back(std::move(c));
        }
    }
    TTIOperator out;
    out.dims = d;
    out.coarse_scales = n;
    out.extra_scales = m;
    out.op = TTOperator(std::move(cores));
    for (const auto& op : per_dimension) {
        out.stencils.push_back(op.stencils[0]);
        out.scale.push_back(op.scale[0]);
        out.boundary.push_back(op.boundary[0]);
        out.ghost.push_back(op.ghost[0]);
        out.folded.push_back(op.folded[0]);
    }
    return out;
}

TTIOperator build_tti_multidim_interleaved(const Kernel& kernel, std::size_t d, std::size_t n, std::size_t m,
                                           const std::vector<int>& derivative, const TTIOptions& options) {
    if (!derivative.empty() && derivative.size() != d)
        throw DimensionError("TTI: one derivative order per dimension expected");
    std::vector<TTIOperator> ops;
    for (std::size_t j = 0; j < d; ++j) {
        TTIOptions o = options;
        o.derivative = derivative.empty() ? 0 : derivative[j];
        if (d > 1 && o.boundary == Boundary::clamped) o.fold_boundary = true;
        ops.push_back(build_tti_1d(kernel, n, m, o));
    }
    return build_tti_interleaved(ops);
}

namespace detail {

void round_leading_bonds(std::vector<Core>& cores, std::size_t nb, const Tolerance& tol) {
    if (cores.size() < 2 || nb == 0) return;
    nb = std::min(nb, cores.size() - 1);
    for (std::size_t c = cores.size() - 1; c > nb; --c) right_orthogonalize(cores, c);
    for (std::size_t c = 0; c < nb; ++c) left_orthogonalize(cores, c);
    double nrm = 0.0;
    for (double x : cores[nb].data()) nrm += x * x;
    nrm = std::sqrt(nrm);
    if (nrm == 0.0) {
        for (auto& c : cores) c = Core(1, c.mode(), 1);
        return;
    }
    const double delta = tol.relative_epsilon * nrm / std::sqrt(static_cast<double>(nb));
    for (std::size_t k = nb; k > 0; --k) truncate_bond(cores, k, delta, tol.max_rank);
}

} // namespace detail

TensorTrain apply_tti(const TTIOperator& op, const TensorTrain& f, const Tolerance& tol) {
    const std::size_t coarse = op.dims * op.coarse_scales;
    if (f.order() != coarse) {
        throw DimensionError("apply_tti: input has " + std::to_string(f.order()) + " cores, operator expects " +
                             std::to_string(coarse));
    }
    const TensorTrain raw = contract(op.op, TensorTrain(padded_cores(f, op.dims * op.extra_scales)));
    std::vector<Core> cores = raw.cores();
    detail::round_leading_bonds(cores, coarse, tol);
    return TensorTrain(std::move(cores));
}

TuckerTT apply_tti_tucker(const TuckerTT& t, const std::vector<TTIOperator>& per_dimension, const Tolerance& tol) {
    if (per_dimension.size() != t.dims()) throw DimensionError("apply_tti_tucker: one operator per dimension expected");
    TuckerTT out;
    out.core = t.core;
    const double eps = tol.relative_epsilon / std::sqrt(static_cast<double>(t.dims()));
    for (std::size_t k = 0; k < t.dims(); ++k) {
        const TTIOperator& op = per_dimension[k];
        const TensorTrain& f = t.factors[k];
        if (op.dims != 1 || f.order() != op.coarse_scales + 1)
            throw DimensionError("apply_tti_tucker: factor " + std::to_string(k) + " does not match its operator");
        const std::size_t r = f.core(0).mode();
        const std::vector<std::size_t> leg{r};
        const TTOperator full = op_kron(TTOperator::identity(leg), op.op);
        std::vector<Core> cores = contract(full, TensorTrain(padded_cores(f, op.extra_scales))).cores();
        detail::round_leading_bonds(cores, op.coarse_scales + 1, Tolerance{eps, tol.max_rank});
        out.factors.emplace_back(std::move(cores));
    }
    return out;
}

TuckerTT apply_tti_tucker(const TuckerTT& t, const Kernel& kernel, std::size_t m, const std::vector<int>& derivative,
                          const Tolerance& tol, const TTIOptions& options) {
    std::vector<TTIOperator> ops;
    for (std::size_t k = 0; k < t.dims(); ++k) {
        TTIOptions o = options;
        o.derivative = derivative.empty() ? 0 : derivative.at(k);
        if (o.boundary == Boundary::clamped) o.fold_boundary = true;
        ops.push_back(build_tti_1d(kernel, t.scales(k), m, o));
    }
    return apply_tti_tucker(t, ops, tol);
}

TensorTrain clamped_boundary_correction(const TTIOperator& op, const TensorTrain& f) {
    if (op.dims != 1) throw DimensionError("clamped_boundary_correction: 1D operators only");
    const std::size_t n = op.coarse_scales;
    const std::size_t m = op.extra_scales;
    if (f.order() != n) throw DimensionError("clamped_boundary_correction: core count mismatch");
    const std::size_t full = std::size_t{1} << n;
    if (op.boundary[0] != Boundary::clamped || op.folded[0] || op.ghost[0] == GhostFill::zero)
        return TensorTrain::qtt_constant(n + m, 0.0);
    const StencilSet& s = op.stencils[0];
    std::vector<TensorTrain> terms;
    for (std::size_t a : boundary_cells(s, full)) {
        Polynomial poly{{0.0}};
        for (int k = s.first_offset; k <= s.last_offset(); ++k) {
            const long j = static_cast<long>(a) + k;
            if (j >= 0 && j < static_cast<long>(full)) continue;
            const auto src = static_cast<std::size_t>(ghost_source(j, static_cast<long>(full), op.ghost[0]));
            std::vector<std::size_t> bits(n);
            for (std::size_t b = 0; b < n; ++b) bits[b] = (src >> (n - 1 - b)) & 1U;
            accumulate(poly, s.at(k), op.scale[0] * tt_eval(f, bits));
        }
        const TensorTrain cell = delta_qtt(a, n);
        if (m == 0) {
            terms.push_back(scale(cell, poly(0.0)));
        } else {
            terms.push_back(kron(cell, detail::polynomial_qtt_any(poly, m, PolynomialBasis::monomial)));
        }
    }
    TensorTrain total = terms.front();
    for (std::size_t i = 1; i < terms.size(); ++i) total = add(total, terms[i]);
    return round(total, Tolerance::exact());
}

} // namespace qtti
