#include "qtti/analysis.hpp"

#include <fftw3.h>

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>
#include <ostream>

#include "qtti/errors.hpp"
#include "qtti/rng.hpp"
#include "qtti/tti.hpp"

namespace qtti {

double rmse_sampled(const TensorTrain& tt, const IndexFunction& reference, std::size_t samples,
                    std::uint64_t seed) {
    if (samples == 0) throw ConfigError("rmse_sampled: need at least one sample");
    Stream s(seed, {stream_tag::sampling});
    const auto dims = tt.dims();
    std::vector<std::size_t> index(dims.size());
    double acc = 0.0;
    for (std::size_t n = 0; n < samples; ++n) {
        for (std::size_t k = 0; k < dims.size(); ++k)
            index[k] = static_cast<std::size_t>(s.uniform() * static_cast<double>(dims[k]));
        const double e = tt_eval(tt, index) - reference(index);
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(samples));
}

double rmse_sampled(const TensorTrain& tt, const GridDescriptor& grid, const Field& f, std::size_t samples,
                    std::uint64_t seed) {
    grid.validate();
    if (grid.layout == Layout::tucker) throw ConfigError("rmse_sampled: Tucker grids take a TuckerTT");
    if (tt.order() != grid.total_scales()) throw DimensionError("rmse_sampled: TT does not match the grid");
    if (samples == 0) throw ConfigError("rmse_sampled: need at least one sample");
    Stream s(seed, {stream_tag::sampling});
    const std::size_t d = grid.dims();
    std::vector<std::size_t> index(d);
    std::vector<double> x(d);
    double acc = 0.0;
    for (std::size_t n = 0; n < samples; ++n) {
        for (std::size_t k = 0; k < d; ++k) {
            index[k] = static_cast<std::size_t>(s.uniform() * static_cast<double>(grid.points(k)));
            x[k] = grid.coordinate(k, index[k]);
        }
        const double e = tt_eval(tt, binary_index(index, grid)) - f(x);
        acc += e * e;
    }
    return std::sqrt(acc / static_cast<double>(samples));
}

// ---- spectrum ----

Spectrum Spectrum::resolved() const {
    Spectrum out;
    out.nyquist = nyquist;
    for (std::size_t i = 1; i < k.size() && k[i] <= static_cast<double>(nyquist); ++i) {
        out.k.push_back(k[i]);
        out.energy.push_back(energy[i]);
    }
    return out;
}

double Spectrum::total() const {
    double t = 0.0;
    for (double e : energy) t += e;
    return t;
}

Spectrum energy_spectrum(const std::vector<DenseTensor>& components) {
    if (components.empty()) throw DimensionError("energy_spectrum: no components");
    const auto& dims = components[0].dims;
    if (dims.size() != 3 || dims[0] != dims[1] || dims[1] != dims[2] || dims[0] % 2 != 0)
        throw DimensionError("energy_spectrum: components must be cubes with even side");
    const int n = static_cast<int>(dims[0]);
    const std::size_t total = dims[0] * dims[1] * dims[2];
    const int nz = n / 2 + 1;
    // Shells up to the corner |k| = sqrt(3) n / 2; shell n/2 is the last resolved one.
    const auto shells = static_cast<std::size_t>(std::ceil(std::sqrt(3.0) * n / 2.0)) + 1;
    Spectrum s;
    s.nyquist = dims[0] / 2;
    s.energy.assign(shells, 0.0);
    for (std::size_t i = 0; i < shells; ++i) s.k.push_back(static_cast<double>(i));

    std::vector<double> in(total);
    auto* out = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * dims[0] * dims[1] * nz));
    fftw_plan plan = fftw_plan_dft_r2c_3d(n, n, n, in.data(), out, FFTW_ESTIMATE);
    const double norm = 1.0 / static_cast<double>(total);
    for (const auto& c : components) {
        if (c.dims != dims) {
            fftw_destroy_plan(plan);
            fftw_free(out);
            throw DimensionError("energy_spectrum: component shapes differ");
        }
        std::copy(c.values.begin(), c.values.end(), in.begin());
        fftw_execute(plan);
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int z = 0; z < nz; ++z) {
                    const auto& v = out[(static_cast<std::size_t>(a) * n + b) * nz + z];
                    const double ka = a <= n / 2 ? a : a - n, kb = b <= n / 2 ? b : b - n;
                    const double kmag = std::sqrt(ka * ka + kb * kb + double(z) * z);
                    // Half spectrum: interior z planes stand for their conjugate partners too.
                    const double mult = (z == 0 || z == n / 2) ? 1.0 : 2.0;
                    const double p = (v[0] * v[0] + v[1] * v[1]) * norm * norm;
                    s.energy[static_cast<std::size_t>(std::floor(kmag + 0.5))] += 0.5 * mult * p;
                }
    }
    fftw_destroy_plan(plan);
    fftw_free(out);
    return s;
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    if (x.size() < 2) throw ConfigError("fit_slope: need at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double spectrum_slope(const Spectrum& s, double kmin, double kmax) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < s.k.size(); ++i)
        if (s.k[i] >= kmin && s.k[i] <= kmax && s.k[i] > 0 && s.energy[i] > 0) {
            lx.push_back(std::log(s.k[i]));
            ly.push_back(std::log(s.energy[i]));
        }
    return fit_slope(lx, ly);
}

// ---- flatness ----

std::vector<double> flatness(const std::vector<DenseTensor>& components, std::span<const std::size_t> separations,
                             IncrementKind kind) {
    if (components.empty()) throw DimensionError("flatness: no components");
    const auto& dims = components[0].dims;
    const std::size_t d = dims.size();
    if (kind == IncrementKind::longitudinal && components.size() != d)
        throw DimensionError("flatness: longitudinal increments need one component per axis");
    for (const auto& c : components)
        if (c.dims != dims) throw DimensionError("flatness: component shapes differ");
    std::vector<std::size_t> stride(d, 1);
    for (std::size_t a = d - 1; a-- > 0;) stride[a] = stride[a + 1] * dims[a + 1];

    std::vector<double> out;
    for (std::size_t r : separations) {
        double s2 = 0.0, s4 = 0.0, count = 0.0;
        for (std::size_t ci = 0; ci < components.size(); ++ci) {
            const auto& v = components[ci].values;
            for (std::size_t axis = 0; axis < d; ++axis) {
                if (kind == IncrementKind::longitudinal && axis != ci) continue;
                if (r == 0 || r >= dims[axis]) continue;
                for (std::size_t flat = 0; flat < v.size(); ++flat) {
                    const std::size_t coord = (flat / stride[axis]) % dims[axis];
                    if (coord + r >= dims[axis]) continue;
                    const double dv = v[flat + r * stride[axis]] - v[flat];
                    s2 += dv * dv;
                    s4 += dv * dv * dv * dv;
                    count += 1.0;
                }
            }
        }
        if (count == 0.0) throw DimensionError("flatness: separation exceeds the grid");
        s2 /= count;
        s4 /= count;
        out.push_back(s2 > 0.0 ? s4 / (s2 * s2) : 0.0);
    }
    return out;
}

// ---- ranks ----

RankStats rank_stats(const TensorTrain& tt) {
    RankStats s;
    s.max_rank = tt.max_rank();
    s.parameter_count = tt.parameter_count();
    double points = 1.0;
    for (std::size_t n : tt.dims()) points *= static_cast<double>(n);
    s.compression_ratio = static_cast<double>(s.parameter_count) / points;
    return s;
}

RankStats rank_stats(const TuckerTT& t) {
    RankStats s;
    s.max_rank = t.max_rank();
    s.parameter_count = t.parameter_count();
    double points = 1.0;
    for (std::size_t k = 0; k < t.dims(); ++k) points *= std::ldexp(1.0, static_cast<int>(t.scales(k)));
    s.compression_ratio = static_cast<double>(s.parameter_count) / points;
    return s;
}

// ---- convergence ----

ConvergenceStudy convergence_study(const Kernel& kernel, const std::function<double(double)>& f,
                                   std::span<const std::size_t> coarse_scales, std::size_t m) {
    ConvergenceStudy study;
    std::vector<double> lh, le;
    for (std::size_t n : coarse_scales) {
        const std::size_t fine = n + m;
        checked_volume(std::vector<std::size_t>{std::size_t{1} << fine});
        const std::size_t cells = std::size_t{1} << n;
        std::vector<double> samples(cells);
        for (std::size_t i = 0; i < cells; ++i) samples[i] = f(static_cast<double>(i) / static_cast<double>(cells));
        const auto coarse = tt_from_dense(DenseTensor(std::vector<std::size_t>(n, 2), samples));
        const auto refined = tt_to_dense(apply_tti(build_tti_1d(kernel, n, m), coarse, Tolerance::exact())).values;
        double acc = 0.0;
        for (std::size_t i = 0; i < refined.size(); ++i) {
            const double e = refined[i] - f(static_cast<double>(i) / static_cast<double>(refined.size()));
            acc += e * e;
        }
        const double err = std::sqrt(acc / static_cast<double>(refined.size()));
        const double h = 1.0 / static_cast<double>(cells);
        study.points.push_back({n, h, err});
        lh.push_back(std::log(h));
        le.push_back(std::log(err));
    }
    study.slope = fit_slope(lh, le);
    return study;
}

// ---- turbulence ----

TurbulenceMetrics turbulence_metrics(const VelocityField& v, const TurbulenceMetricOptions& options) {
    TurbulenceMetrics out;
    const std::size_t side = std::size_t{1} << v.scales;
    checked_volume(std::vector<std::size_t>{side, side, side});
    std::vector<DenseTensor> comps;
    for (std::size_t k = 0; k < 3; ++k) comps.push_back(v.component_dense(k));
    out.spectrum = energy_spectrum(comps).resolved();
    const double kmax = options.kmax > 0.0 ? options.kmax : std::ldexp(1.0, static_cast<int>(v.scales) - 2);
    out.slope = spectrum_slope(out.spectrum, options.kmin, kmax);
    std::vector<std::size_t> seps;
    for (std::size_t r : options.separations)
        if (r < side) seps.push_back(r);
    out.flatness = flatness(comps, seps, options.increments);

    Stream s(options.seed, {stream_tag::sampling, 0xD1});
    double worst = 0.0, v2 = 0.0;
    for (std::size_t n = 0; n < options.divergence_samples; ++n) {
        const std::array<double, 3> x{s.uniform(0.0, v.box), s.uniform(0.0, v.box), s.uniform(0.0, v.box)};
        const auto u = velocity_at(v, x);
        v2 += u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
        worst = std::max(worst, std::abs(divergence_at(v, x)));
    }
    if (options.divergence_samples > 0 && v2 > 0.0)
        out.divergence_relative = worst / std::sqrt(v2 / static_cast<double>(options.divergence_samples));

    out.ranks.max_rank = v.max_rank();
    out.ranks.parameter_count = v.parameter_count();
    out.ranks.compression_ratio =
        static_cast<double>(out.ranks.parameter_count) / (3.0 * std::pow(static_cast<double>(side), 3.0));
    return out;
}

// ---- reports ----

void write_csv(std::ostream& out, const MetricReport& report) {
    out.precision(17);
    for (std::size_t c = 0; c < report.columns.size(); ++c) out << (c ? "," : "") << report.columns[c];
    out << "\n";
    for (const auto& row : report.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << row[c];
        out << "\n";
    }
}

void write_json_summary(std::ostream& out, const MetricReport& report) {
    nlohmann::ordered_json j;
    j["name"] = report.name;
    for (const auto& [key, value] : report.scalars) j[key] = value;
    out << j.dump(2) << "\n";
}

} // namespace qtti
