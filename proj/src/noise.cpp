#include "qtti/noise.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "qtti/construct.hpp"
#include "qtti/errors.hpp"
#include "qtti/rng.hpp"
#include "qtti/tti.hpp"

namespace qtti {

namespace {

std::size_t pow2_capped(std::size_t e, std::size_t cap) {
    return e >= 62 ? cap : std::min(cap, std::size_t{1} << e);
}

std::vector<std::uint64_t> with_tags(std::uint64_t head, const std::vector<std::uint64_t>& tags,
                                     std::initializer_list<std::uint64_t> tail) {
    std::vector<std::uint64_t> out{head};
    out.insert(out.end(), tags.begin(), tags.end());
    out.insert(out.end(), tail);
    return out;
}

Core random_core(std::size_t l, std::size_t mode, std::size_t r, std::uint64_t seed,
                 const std::vector<std::uint64_t>& tags) {
    Stream s(seed, tags);
    Core c(l, mode, r);
    // 1/sqrt(l) keeps long chains near unit magnitude before calibration.
    const double w = 1.0 / std::sqrt(static_cast<double>(l));
    for (double& x : c.data()) x = w * s.normal();
    return c;
}

void scale_evenly(std::vector<Core>& cores, double c) {
    const double per = std::pow(std::abs(c), 1.0 / static_cast<double>(cores.size()));
    for (auto& core : cores)
        for (double& x : core.data()) x *= per;
    if (c < 0)
        for (double& x : cores[0].data()) x = -x;
}

Polynomial multiply(const Polynomial& a, const Polynomial& b) {
    Polynomial out;
    out.coefficients.assign(a.coefficients.size() + b.coefficients.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
        for (std::size_t j = 0; j < b.coefficients.size(); ++j)
            out.coefficients[i + j] += a.coefficients[i] * b.coefficients[j];
    return out;
}

Polynomial affine(double c0, double c1) { return Polynomial{{c0, c1}}; }

Polynomial one_minus(const Polynomial& p) {
    Polynomial out = p;
    for (double& c : out.coefficients) c = -c;
    out.coefficients[0] += 1.0;
    return out;
}

TensorTrain accumulate(const TensorTrain& acc, const TensorTrain& term, double tol) {
    if (acc.empty()) return term;
    return round(add(acc, term), Tolerance::relative(tol));
}

} // namespace

TensorTrain random_qtt(std::size_t cores, std::size_t rank, std::uint64_t seed,
                       const std::vector<std::uint64_t>& tags) {
    if (cores == 0) throw DimensionError("random_qtt: need at least one core");
    if (rank == 0) throw ConfigError("random_qtt: rank must be >= 1");
    std::vector<std::size_t> r(cores + 1);
    for (std::size_t k = 0; k <= cores; ++k) r[k] = std::min(pow2_capped(k, rank), pow2_capped(cores - k, rank));
    std::vector<Core> cs;
    for (std::size_t k = 0; k < cores; ++k)
        cs.push_back(random_core(r[k], 2, r[k + 1], seed, with_tags(stream_tag::random_qtt, tags, {k})));
    TensorTrain tt(std::move(cs));
    // Mean square rather than centred variance: the centred estimate over a
    // handful of sites (coarse lattices, early midpoint levels) is unstable.
    const double ms = norm2(tt) / std::sqrt(std::pow(2.0, static_cast<double>(cores)));
    if (ms > 0) scale_evenly(tt.cores(), 1.0 / ms);
    return tt;
}

double tt_mean(const TensorTrain& tt) {
    double n = 1.0;
    for (std::size_t d : tt.dims()) n *= static_cast<double>(d);
    return sum(tt) / n;
}

double tt_variance(const TensorTrain& tt) {
    double n = 1.0;
    for (std::size_t d : tt.dims()) n *= static_cast<double>(d);
    const double mean = sum(tt) / n;
    const double nrm = norm2(tt);
    return std::max(0.0, nrm * nrm / n - mean * mean);
}

double tucker_sum(const TuckerTT& t) {
    // Row vector through the core chain, each leg weighted by its factor's row sums.
    std::vector<double> row{1.0};
    for (std::size_t k = 0; k < t.dims(); ++k) {
        const TensorTrain& f = t.factors[k];
        const Core& first = f.core(0);
        std::vector<double> s(first.mode() * first.right());
        for (std::size_t g = 0; g < first.mode(); ++g)
            for (std::size_t b = 0; b < first.right(); ++b) s[g * first.right() + b] = first(0, g, b);
        std::size_t width = first.right();
        for (std::size_t c = 1; c < f.order(); ++c) {
            const Core& core = f.core(c);
            std::vector<double> next(first.mode() * core.right(), 0.0);
            for (std::size_t g = 0; g < first.mode(); ++g)
                for (std::size_t l = 0; l < width; ++l) {
                    const double w = s[g * width + l];
                    for (std::size_t i = 0; i < core.mode(); ++i)
                        for (std::size_t r = 0; r < core.right(); ++r) next[g * core.right() + r] += w * core(l, i, r);
                }
            s = std::move(next);
            width = core.right();
        }
        const Core& cc = t.core.core(k);
        std::vector<double> next(cc.right(), 0.0);
        for (std::size_t l = 0; l < cc.left(); ++l)
            for (std::size_t g = 0; g < cc.mode(); ++g)
                for (std::size_t r = 0; r < cc.right(); ++r) next[r] += row[l] * cc(l, g, r) * s[g];
        row = std::move(next);
    }
    return row[0];
}

TuckerTT random_tucker(std::size_t d, std::size_t scales, std::size_t rank, std::uint64_t seed,
                       const std::vector<std::uint64_t>& tags) {
    if (d == 0 || scales == 0) throw DimensionError("random_tucker: empty shape");
    if (rank == 0) throw ConfigError("random_tucker: rank must be >= 1");
    const std::size_t leg = pow2_capped(scales, rank);
    TuckerTT t;
    std::vector<std::size_t> cr(d + 1, 1);
    for (std::size_t k = 1; k < d; ++k) {
        std::size_t left = 1, right = 1;
        for (std::size_t i = 0; i < k; ++i) left = std::min(rank, left * leg);
        for (std::size_t i = k; i < d; ++i) right = std::min(rank, right * leg);
        cr[k] = std::min(left, right);
    }
    std::vector<Core> core;
    for (std::size_t k = 0; k < d; ++k)
        core.push_back(random_core(cr[k], leg, cr[k + 1], seed, with_tags(stream_tag::random_qtt, tags, {0xC0, k})));
    t.core = TensorTrain(std::move(core));
    for (std::size_t k = 0; k < d; ++k) {
        std::vector<std::size_t> modes{leg};
        modes.insert(modes.end(), scales, 2);
        std::vector<std::size_t> r(modes.size() + 1, 1);
        for (std::size_t c = 1; c < modes.size(); ++c) {
            const std::size_t left = std::min(rank, leg * pow2_capped(c - 1, rank));
            r[c] = std::min(left, pow2_capped(modes.size() - c, rank));
        }
        std::vector<Core> cs;
        for (std::size_t c = 0; c < modes.size(); ++c)
            cs.push_back(random_core(r[c], modes[c], r[c + 1], seed, with_tags(stream_tag::random_qtt, tags, {0xF0 + k, c})));
        t.factors.emplace_back(std::move(cs));
    }
    const double rms = tucker_norm(t) / std::sqrt(std::pow(2.0, static_cast<double>(d * scales)));
    if (rms > 0) scale_evenly(t.core.cores(), 1.0 / rms);
    return t;
}

// ---- spec ----

void NoiseSpec::validate() const {
    if (dims == 0 || dims > 3) throw ConfigError("noise: dims must be 1, 2 or 3");
    if (scales == 0) throw ConfigError("noise: scales must be >= 1");
    if (rank == 0) throw ConfigError("noise: rank must be >= 1");
    if (octaves == 0) throw ConfigError("noise: octaves must be >= 1");
    if (!(persistence > 0.0 && persistence < 1.0)) throw ConfigError("noise: persistence must be in (0, 1)");
    if (!(decay > 0.0 && decay < 1.0)) throw ConfigError("noise: decay must be in (0, 1)");
    if (!(tolerance >= 0.0)) throw ConfigError("noise: tolerance must be >= 0");
}

namespace {
void check_lattice(const NoiseSpec& spec) {
    spec.validate();
    if (spec.base_scales == 0 || spec.base_scales > spec.scales)
        throw ConfigError("noise: base_scales must be in 1..scales");
}
} // namespace

void write_noise_spec(std::ostream& out, const NoiseSpec& s) {
    out.precision(17);
    out << "seed=" << s.seed << "\ndims=" << s.dims << "\nscales=" << s.scales << "\nbase_scales=" << s.base_scales
        << "\nrank=" << s.rank << "\noctaves=" << s.octaves << "\npersistence=" << s.persistence
        << "\nroughness=" << s.roughness << "\ndecay=" << s.decay << "\nleft_height=" << s.left_height
        << "\nright_height=" << s.right_height << "\nkernel=" << s.kernel
        << "\nfade=" << (s.fade_kind == FadeKind::cubic ? "cubic" : "quintic")
        << "\nunit_gradients=" << (s.unit_gradients ? 1 : 0) << "\ntolerance=" << s.tolerance << "\n";
}

NoiseSpec read_noise_spec(std::istream& in) {
    NoiseSpec s;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("noise spec: expected key=value, got '" + line + "'");
        const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
        try {
            if (key == "seed") s.seed = std::stoull(value);
            else if (key == "dims") s.dims = std::stoul(value);
            else if (key == "scales") s.scales = std::stoul(value);
            else if (key == "base_scales") s.base_scales = std::stoul(value);
            else if (key == "rank") s.rank = std::stoul(value);
            else if (key == "octaves") s.octaves = std::stoul(value);
            else if (key == "persistence") s.persistence = std::stod(value);
            else if (key == "roughness") s.roughness = std::stod(value);
            else if (key == "decay") s.decay = std::stod(value);
            else if (key == "left_height") s.left_height = std::stod(value);
            else if (key == "right_height") s.right_height = std::stod(value);
            else if (key == "kernel") s.kernel = value;
            else if (key == "fade") {
                if (value == "cubic") s.fade_kind = FadeKind::cubic;
                else if (value == "quintic") s.fade_kind = FadeKind::quintic;
                else throw ConfigError("noise spec: fade must be cubic or quintic");
            } else if (key == "unit_gradients") s.unit_gradients = value == "1" || value == "true";
            else if (key == "tolerance") s.tolerance = std::stod(value);
            else throw ConfigError("noise spec: unknown key '" + key + "'");
        } catch (const std::logic_error& e) {
            if (dynamic_cast<const ConfigError*>(&e)) throw;
            throw ConfigError("noise spec: bad value for '" + key + "'");
        }
    }
    s.validate();
    return s;
}

// ---- midpoint displacement ----

TensorTrain midpoint_level_field(const NoiseSpec& spec, std::size_t level) {
    return random_qtt(level, spec.rank, spec.seed, {stream_tag::midpoint, level});
}

TensorTrain midpoint_displacement_tt(const NoiseSpec& spec) {
    spec.validate();
    if (spec.dims != 1) throw DimensionError("midpoint displacement is one-dimensional");
    const std::size_t M = spec.scales;
    if (M < 2) throw DimensionError("midpoint displacement needs at least 2 scales");
    TensorTrain total = polynomial_qtt(affine(spec.left_height, spec.right_height - spec.left_height), M);
    const Tolerance tol = Tolerance::relative(spec.tolerance);
    double amplitude = spec.roughness;
    for (std::size_t level = 1; level <= M; ++level, amplitude *= spec.decay) {
        if (amplitude == 0.0) continue;
        TensorTrain f = midpoint_level_field(spec, level);
        // Odd sites only: the finest bit must be 1.
        Core& last = f.core(level - 1);
        for (std::size_t l = 0; l < last.left(); ++l)
            for (std::size_t r = 0; r < last.right(); ++r) last(l, 0, r) = 0.0;
        const auto op = build_tti_1d(linear_kernel(), level, M - level);
        total = accumulate(total, scale(apply_tti(op, f, tol), amplitude), spec.tolerance);
    }
    return total;
}

// ---- value noise ----

TensorTrain value_noise_lattice(const NoiseSpec& spec) {
    return random_qtt(spec.dims * spec.base_scales, spec.rank, spec.seed, {stream_tag::value_noise});
}

TensorTrain value_noise_tt(const NoiseSpec& spec) {
    spec.validate();
    return value_noise_from_lattice(value_noise_lattice(spec), spec);
}

TensorTrain value_noise_from_lattice(const TensorTrain& lattice, const NoiseSpec& spec) {
    check_lattice(spec);
    const Kernel kernel = kernel_by_name(spec.kernel);
    const std::size_t n = spec.base_scales, m = spec.scales - spec.base_scales;
    const auto op = spec.dims == 1
                        ? build_tti_1d(kernel, n, m)
                        : build_tti_multidim_interleaved(kernel, spec.dims, n, m, std::vector<int>(spec.dims, 0));
    return apply_tti(op, lattice, Tolerance::relative(spec.tolerance));
}

// ---- Perlin ----

std::vector<TensorTrain> perlin_gradients(const NoiseSpec& spec) {
    std::vector<TensorTrain> g;
    for (std::size_t c = 0; c < spec.dims; ++c)
        g.push_back(random_qtt(spec.dims * spec.base_scales, spec.rank, spec.seed, {stream_tag::perlin, c}));
    if (!spec.unit_gradients) return g;
    std::vector<DenseTensor> dense;
    for (const auto& tt : g) dense.push_back(tt_to_dense(tt));
    for (std::size_t i = 0; i < dense[0].size(); ++i) {
        double nrm = 0.0;
        for (const auto& d : dense) nrm += d.values[i] * d.values[i];
        nrm = std::sqrt(nrm);
        for (auto& d : dense) d.values[i] = nrm > 0 ? d.values[i] / nrm : 0.0;
    }
    for (std::size_t c = 0; c < spec.dims; ++c) g[c] = tt_from_dense(dense[c]);
    return g;
}

TensorTrain perlin_tt(const NoiseSpec& spec) {
    spec.validate();
    return perlin_from_gradients(perlin_gradients(spec), spec);
}

TensorTrain perlin_from_gradients(const std::vector<TensorTrain>& grads, const NoiseSpec& spec) {
    check_lattice(spec);
    if (spec.dims != 1 && spec.dims != 3) throw DimensionError("Perlin noise is implemented for 1 and 3 dimensions");
    const Polynomial f = fade(spec.fade_kind);
    // Along the gradient's own axis: (1 - f(u)) u and f(u) (u - 1); elsewhere the fade weights.
    const StencilSet along{0, {multiply(one_minus(f), affine(0.0, 1.0)), multiply(f, affine(-1.0, 1.0))}};
    const StencilSet across{0, {one_minus(f), f}};
    const std::size_t n = spec.base_scales, m = spec.scales - spec.base_scales;
    if (grads.size() != spec.dims) throw DimensionError("Perlin: need one gradient lattice per dimension");
    const Tolerance tol = Tolerance::relative(spec.tolerance);
    TensorTrain total;
    for (std::size_t c = 0; c < spec.dims; ++c) {
        std::vector<TTIOperator> per_dim;
        for (std::size_t j = 0; j < spec.dims; ++j) per_dim.push_back(build_tti_stencils(j == c ? along : across, n, m));
        total = accumulate(total, apply_tti(build_tti_interleaved(per_dim), grads[c], tol), spec.tolerance);
    }
    return total;
}

// ---- fractal ----

TensorTrain octave(const TensorTrain& base, std::size_t dims, std::size_t k) {
    const std::size_t drop = k * dims;
    if (drop == 0) return base;
    const std::size_t total = base.order();
    if (drop > total) throw DimensionError("octave: more octaves than scales");
    std::vector<Core> cores;
    for (std::size_t c = 0; c < drop; ++c) cores.emplace_back(1, base.core(c).mode(), 1, std::vector<double>(base.core(c).mode(), 1.0));
    // Contract the trailing cores at index 0 into a column vector.
    std::vector<double> tail{1.0};
    for (std::size_t c = total; c-- > total - drop;) {
        const Core& core = base.core(c);
        std::vector<double> next(core.left(), 0.0);
        for (std::size_t l = 0; l < core.left(); ++l)
            for (std::size_t r = 0; r < core.right(); ++r) next[l] += core(l, 0, r) * tail[r];
        tail = std::move(next);
    }
    if (drop == total) {
        cores.back()(0, 0, 0) *= tail[0];
        for (std::size_t i = 1; i < cores.back().mode(); ++i) cores.back()(0, i, 0) *= tail[0];
        return TensorTrain(std::move(cores));
    }
    for (std::size_t c = 0; c + drop < total; ++c) {
        if (c + drop + 1 < total) {
            cores.push_back(base.core(c));
            continue;
        }
        const Core& core = base.core(c);
        Core merged(core.left(), core.mode(), 1);
        for (std::size_t l = 0; l < core.left(); ++l)
            for (std::size_t i = 0; i < core.mode(); ++i)
                for (std::size_t r = 0; r < core.right(); ++r) merged(l, i, 0) += core(l, i, r) * tail[r];
        cores.push_back(std::move(merged));
    }
    return TensorTrain(std::move(cores));
}

TensorTrain fractal_tt(const TensorTrain& base, const NoiseSpec& spec) {
    spec.validate();
    if (spec.octaves > spec.scales) throw ConfigError("fractal: octaves exceed scales");
    if (base.order() != spec.dims * spec.scales) throw DimensionError("fractal: base does not have dims * scales cores");
    TensorTrain total;
    double w = 1.0;
    for (std::size_t k = 0; k < spec.octaves; ++k, w *= spec.persistence)
        total = accumulate(total, scale(octave(base, spec.dims, k), w), spec.tolerance);
    return total;
}

} // namespace qtti
