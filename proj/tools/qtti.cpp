// qtti: encode, refine, noise, turbulence, superres, analyze.
// Exit codes: 0 ok, 1 unexpected, 2 config/shape, 3 capacity, 4 io.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "qtti/analysis.hpp"
#include "qtti/errors.hpp"
#include "qtti/fixtures.hpp"
#include "qtti/image.hpp"
#include "qtti/noise.hpp"
#include "qtti/rng.hpp"
#include "qtti/serialization.hpp"
#include "qtti/tti.hpp"
#include "qtti/turbulence.hpp"

using namespace qtti;
namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, unexpected = 1, config = 2, capacity = 3, io = 4 };

struct Timer {
    bool enabled = false;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
    void stage(const std::string& name) {
        const auto now = std::chrono::steady_clock::now();
        if (enabled)
            std::cerr << "time " << name << " " << std::chrono::duration<double>(now - start).count() << " s\n";
        start = now;
    }
};
Timer timer;

std::string grid_path(const std::string& tt_path) { return tt_path + ".grid"; }

GridDescriptor grid_for(const std::string& tt_path, std::size_t order) {
    if (fs::exists(grid_path(tt_path))) return load_grid(grid_path(tt_path));
    return GridDescriptor::unit(1, order);
}

void print_stats(const RankStats& s) {
    std::cout << "max_rank " << s.max_rank << "\nparameter_count " << s.parameter_count << "\ncompression_ratio "
              << std::setprecision(6) << s.compression_ratio << "\n";
}

struct SampleError {
    double rmse = 0.0;
    double max_abs = 0.0;
};

// Sampled error of a TT or Tucker field against a callable on grid coordinates.
SampleError sampled_error(const GridDescriptor& grid, const std::function<double(std::span<const std::size_t>)>& eval,
                          const Field& f, std::size_t samples, std::uint64_t seed) {
    Stream s(seed, {stream_tag::sampling});
    const std::size_t d = grid.dims();
    std::vector<std::size_t> idx(d);
    std::vector<double> x(d);
    SampleError e;
    for (std::size_t n = 0; n < samples; ++n) {
        for (std::size_t k = 0; k < d; ++k) {
            idx[k] = static_cast<std::size_t>(s.uniform() * static_cast<double>(grid.points(k)));
            x[k] = grid.coordinate(k, idx[k]);
        }
        const double diff = eval(idx) - f(x);
        e.rmse += diff * diff;
        e.max_abs = std::max(e.max_abs, std::abs(diff));
    }
    e.rmse = std::sqrt(e.rmse / static_cast<double>(std::max<std::size_t>(samples, 1)));
    return e;
}

std::function<double(std::span<const std::size_t>)> evaluator(const GridDescriptor& grid, const TensorTrain* tt,
                                                               const TuckerTT* tucker) {
    if (tucker) return [tucker](std::span<const std::size_t> idx) { return tucker_eval(*tucker, idx); };
    return [tt, &grid](std::span<const std::size_t> idx) { return tt_eval(*tt, binary_index(idx, grid)); };
}

void print_error(const char* label, const SampleError& e) {
    std::cout << std::setprecision(6) << label << "_rmse " << e.rmse << "\n" << label << "_max " << e.max_abs << "\n";
}

// ---- encode ----

struct EncodeArgs {
    std::string fixture, image, layout = "plain", out;
    std::size_t scales = 0, samples = 10000;
    std::uint64_t seed = 1;
    double tol = 0.0, width = 0.02;
    bool pad = false;
};

int cmd_encode(const EncodeArgs& a) {
    const Tolerance tol = Tolerance::relative(a.tol);
    const Layout layout = layout_from_name(a.layout);
    if (!a.image.empty()) {
        auto img = read_pgm(a.image);
        if (!is_dyadic_square(img)) {
            if (!a.pad) throw DimensionError("image is not a 2^n square; pass --pad to edge-replicate");
            img = pad_to_dyadic(img);
        }
        const std::size_t n = static_cast<std::size_t>(std::countr_zero(img.dims[0]));
        auto grid = GridDescriptor::unit(2, n, layout == Layout::tucker ? Layout::tucker : Layout::interleaved, false);
        timer.stage("read");
        if (grid.layout == Layout::tucker) {
            const auto t = to_tucker(img, tol);
            save_tucker(a.out, t);
            save_grid(grid_path(a.out), grid);
            print_stats(rank_stats(t));
        } else {
            const auto tt = interleave(img, tol);
            save_tt(a.out, tt);
            save_grid(grid_path(a.out), grid);
            const auto back = deinterleave(tt, 2);
            double dev = 0.0;
            for (std::size_t i = 0; i < back.values.size(); ++i)
                dev = std::max(dev, std::abs(back.values[i] - img.values[i]));
            print_stats(rank_stats(tt));
            std::cout << "roundtrip_max " << dev << "\n";
        }
        timer.stage("encode");
        return ok;
    }
    FixtureOptions fo;
    fo.width = a.width;
    const auto fx = fixture_by_name(a.fixture, fo);
    const auto grid = fixture_grid(fx, a.scales ? a.scales : fx.base_scales, layout);
    if (grid.layout == Layout::tucker) {
        const auto t = encode_tucker(fx.f, grid, tol);
        timer.stage("encode");
        save_tucker(a.out, t);
        save_grid(grid_path(a.out), grid);
        print_stats(rank_stats(t));
        print_error("fixture", sampled_error(grid, evaluator(grid, nullptr, &t), fx.f, a.samples, a.seed));
    } else {
        const auto tt = encode_qtt(fx.f, grid, tol);
        timer.stage("encode");
        save_tt(a.out, tt);
        save_grid(grid_path(a.out), grid);
        print_stats(rank_stats(tt));
        print_error("fixture", sampled_error(grid, evaluator(grid, &tt, nullptr), fx.f, a.samples, a.seed));
    }
    return ok;
}

// ---- refine ----

struct RefineArgs {
    std::string in, out, kernel = "keys", boundary, ghost = "edge", fixture;
    std::size_t extra = 1, axis = 0, samples = 10000;
    int derivative = 0;
    double tol = 1e-12, width = 0.02;
    std::uint64_t seed = 1;
};

GhostFill ghost_from_name(const std::string& s) {
    if (s == "edge") return GhostFill::edge;
    if (s == "reflect") return GhostFill::reflect;
    if (s == "zero") return GhostFill::zero;
    throw ConfigError("unknown ghost fill '" + s + "'");
}

Boundary boundary_from_name(const std::string& s) {
    if (s == "periodic") return Boundary::periodic;
    if (s == "clamped") return Boundary::clamped;
    throw ConfigError("unknown boundary '" + s + "'");
}

int cmd_refine(const RefineArgs& a) {
    const Kernel kernel = kernel_by_name(a.kernel);
    const Tolerance tol = Tolerance::relative(a.tol);
    TTIOptions options;
    options.ghost = ghost_from_name(a.ghost);

    GridDescriptor grid;
    TensorTrain tt;
    TuckerTT tucker;
    const bool is_tucker = fs::exists(grid_path(a.in)) && load_grid(grid_path(a.in)).layout == Layout::tucker;
    if (is_tucker) {
        tucker = load_tucker(a.in);
        grid = load_grid(grid_path(a.in));
    } else {
        tt = load_tt(a.in);
        grid = grid_for(a.in, tt.order());
    }
    const std::size_t d = grid.dims();
    // Without --boundary the grid's periodic flag decides.
    options.boundary = a.boundary.empty() ? (grid.periodic.at(0) ? Boundary::periodic : Boundary::clamped)
                                          : boundary_from_name(a.boundary);
    options.fold_boundary = options.boundary == Boundary::clamped;
    if (a.axis >= d) throw ConfigError("refine: --axis out of range");
    for (std::size_t k = 1; k < d; ++k)
        if (grid.scales[k] != grid.scales[0]) throw ConfigError("refine: unequal scales per axis");
    options.domain_length = grid.upper[a.axis] - grid.lower[a.axis];
    std::vector<int> orders(d, 0);
    orders[a.axis] = a.derivative;
    timer.stage("load");

    const GridDescriptor fine = grid.refined(a.extra);
    if (is_tucker) {
        tucker = apply_tti_tucker(tucker, kernel, a.extra, orders, tol, options);
        save_tucker(a.out, tucker);
    } else if (d == 1) {
        options.derivative = a.derivative;
        tt = apply_tti(build_tti_1d(kernel, grid.scales[0], a.extra, options), tt, tol);
        save_tt(a.out, tt);
    } else {
        if (grid.layout != Layout::interleaved) throw ConfigError("refine: multi-d fields need interleaved or tucker");
        tt = apply_tti(build_tti_multidim_interleaved(kernel, d, grid.scales[0], a.extra, orders, options), tt, tol);
        save_tt(a.out, tt);
    }
    save_grid(grid_path(a.out), fine);
    timer.stage("refine");
    print_stats(is_tucker ? rank_stats(tucker) : rank_stats(tt));

    if (!a.fixture.empty()) {
        FixtureOptions fo;
        fo.width = a.width;
        const auto fx = fixture_by_name(a.fixture, fo);
        Field ref = fx.f;
        if (a.derivative == 1 && d == 1) {
            if (!fx.derivative) throw ConfigError("refine: fixture has no closed-form derivative");
            ref = fx.derivative;
        } else if (a.derivative != 0) {
            throw ConfigError("refine: reference comparison supports derivative 0, or 1 in 1D");
        }
        print_error("fixture", sampled_error(fine, evaluator(fine, &tt, is_tucker ? &tucker : nullptr), ref,
                                             a.samples, a.seed));
        timer.stage("sample");
    }
    return ok;
}

// ---- noise ----

struct NoiseArgs {
    std::string algo = "perlin", out, dense, spec_file, fade = "quintic";
    NoiseSpec spec;
};

int cmd_noise(NoiseArgs a) {
    NoiseSpec spec = a.spec;
    if (!a.spec_file.empty()) {
        std::ifstream in(a.spec_file);
        if (!in) throw IoError("cannot open " + a.spec_file);
        spec = read_noise_spec(in);
    } else {
        if (a.fade == "cubic")
            spec.fade_kind = FadeKind::cubic;
        else if (a.fade != "quintic")
            throw ConfigError("unknown fade '" + a.fade + "'");
    }
    spec.validate();
    TensorTrain tt;
    if (a.algo == "midpoint") {
        tt = midpoint_displacement_tt(spec);
    } else if (a.algo == "value") {
        tt = value_noise_tt(spec);
    } else if (a.algo == "perlin") {
        tt = perlin_tt(spec);
    } else {
        throw ConfigError("unknown noise algorithm '" + a.algo + "'");
    }
    if (a.algo != "midpoint" && spec.octaves > 1) tt = fractal_tt(tt, spec);
    timer.stage("generate");

    const auto grid = GridDescriptor::unit(spec.dims, spec.scales, spec.dims > 1 ? Layout::interleaved : Layout::plain);
    save_tt(a.out, tt);
    save_grid(grid_path(a.out), grid);
    {
        std::ofstream s(a.out + ".spec");
        if (!s) throw IoError("cannot write " + a.out + ".spec");
        write_noise_spec(s, spec);
    }
    if (!a.dense.empty()) write_dense(a.dense, qtt_to_grid(tt, grid));
    print_stats(rank_stats(tt));
    std::cout << std::setprecision(6) << "mean " << tt_mean(tt) << "\nvariance " << tt_variance(tt) << "\n";
    timer.stage("write");
    return ok;
}

// ---- turbulence ----

struct TurbulenceArgs {
    CascadeSpec spec;
    std::string layout = "tucker", out_dir = "turbulence";
    std::size_t seeds = 20, jobs = 0;
    std::uint64_t first_seed = 1;
    TurbulenceMetricOptions metrics;
    bool save_fields = true;
};

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double std_of(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

int cmd_turbulence(TurbulenceArgs a) {
    a.spec.layout = layout_from_name(a.layout);
    a.spec.validate();
    if (a.seeds == 0) throw ConfigError("turbulence: need at least one seed");
    fs::create_directories(a.out_dir);
    std::vector<TurbulenceMetrics> results(a.seeds);
    std::vector<std::string> errors(a.seeds);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < a.seeds; i = next++) {
            try {
                CascadeSpec spec = a.spec;
                spec.seed = a.first_seed + i;
                const auto v = turbulence_cascade(spec);
                if (a.save_fields)
                    for (std::size_t k = 0; k < 3; ++k) {
                        const auto path = (fs::path(a.out_dir) / ("seed" + std::to_string(spec.seed) + "_v" +
                                                                   std::to_string(k) + ".tt"))
                                              .string();
                        if (spec.layout == Layout::tucker)
                            save_tucker(path, v.tucker[k]);
                        else
                            save_tt(path, v.interleaved[k]);
                    }
                auto opts = a.metrics;
                opts.seed = spec.seed;
                results[i] = turbulence_metrics(v, opts);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    std::size_t jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, std::max<std::size_t>(a.seeds, 1));
    std::vector<std::thread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (!e.empty()) throw ConfigError("turbulence: " + e);
    timer.stage("ensemble");

    MetricReport per_seed{"seeds", {}, {"seed", "slope", "flatness_min_r", "divergence_relative", "max_rank",
                                        "parameter_count", "compression_ratio"}, {}};
    std::vector<double> slopes, flat0, divs;
    for (std::size_t i = 0; i < a.seeds; ++i) {
        const auto& r = results[i];
        per_seed.rows.push_back({static_cast<double>(a.first_seed + i), r.slope, r.flatness.front(),
                                 r.divergence_relative, static_cast<double>(r.ranks.max_rank),
                                 static_cast<double>(r.ranks.parameter_count), r.ranks.compression_ratio});
        slopes.push_back(r.slope);
        flat0.push_back(r.flatness.front());
        divs.push_back(r.divergence_relative);
    }
    MetricReport spectrum{"spectrum", {}, {"k", "E_mean", "E_std"}, {}};
    for (std::size_t s = 0; s < results[0].spectrum.k.size(); ++s) {
        std::vector<double> e;
        for (const auto& r : results) e.push_back(r.spectrum.energy[s]);
        spectrum.rows.push_back({results[0].spectrum.k[s], mean_of(e), std_of(e)});
    }
    MetricReport flat{"flatness", {}, {"r", "F_mean", "F_std"}, {}};
    std::vector<std::size_t> seps;
    for (std::size_t r : a.metrics.separations)
        if (r < (std::size_t{1} << a.spec.scales)) seps.push_back(r);
    for (std::size_t s = 0; s < seps.size(); ++s) {
        std::vector<double> f;
        for (const auto& r : results) f.push_back(r.flatness[s]);
        flat.rows.push_back({static_cast<double>(seps[s]), mean_of(f), std_of(f)});
    }
    MetricReport summary{"turbulence", {}, {}, {}};
    summary.scalars["scales"] = static_cast<double>(a.spec.scales);
    summary.scalars["seeds"] = static_cast<double>(a.seeds);
    summary.scalars["slope_mean"] = mean_of(slopes);
    summary.scalars["slope_std"] = std_of(slopes);
    summary.scalars["flatness_min_r_mean"] = mean_of(flat0);
    summary.scalars["divergence_relative_max"] = *std::max_element(divs.begin(), divs.end());
    summary.scalars["max_rank"] = per_seed.rows.empty() ? 0.0 : per_seed.rows[0][4];
    for (const auto& row : per_seed.rows) summary.scalars["max_rank"] = std::max(summary.scalars["max_rank"], row[4]);

    auto emit = [&](const MetricReport& r, const std::string& name, bool json) {
        std::ofstream out(fs::path(a.out_dir) / name);
        if (!out) throw IoError("cannot write " + name);
        json ? write_json_summary(out, r) : write_csv(out, r);
    };
    emit(per_seed, "seeds.csv", false);
    emit(spectrum, "spectrum.csv", false);
    emit(flat, "flatness.csv", false);
    emit(summary, "summary.json", true);
    write_json_summary(std::cout, summary);
    timer.stage("report");
    return ok;
}

// ---- superres ----

struct SuperresArgs {
    std::string image, out, kernel = "keys", reference, dense, tt_out, ghost = "edge";
    std::size_t extra = 1;
    double tol = 1e-12;
    bool pad = false;
    unsigned maxval = 255;
};

int cmd_superres(const SuperresArgs& a) {
    auto img = read_pgm(a.image);
    if (!is_dyadic_square(img)) {
        if (!a.pad) throw DimensionError("image is not a 2^n square; pass --pad to edge-replicate");
        img = pad_to_dyadic(img);
    }
    timer.stage("read");
    const auto sr = super_resolve(img, a.extra, kernel_by_name(a.kernel), Tolerance::relative(a.tol),
                                  ghost_from_name(a.ghost));
    timer.stage("refine");
    const auto coarse_stats = rank_stats(sr.coarse), fine_stats = rank_stats(sr.fine);
    std::cout << "coarse_compression_ratio " << coarse_stats.compression_ratio << "\n";
    print_stats(fine_stats);
    if (!a.tt_out.empty()) {
        save_tt(a.tt_out, sr.fine);
        save_grid(grid_path(a.tt_out),
                  GridDescriptor::unit(2, sr.coarse_scales + sr.extra_scales, Layout::interleaved, false));
    }
    if (!a.out.empty() || !a.dense.empty() || !a.reference.empty()) {
        const auto up = deinterleave(sr.fine, 2);
        if (!a.out.empty()) write_pgm(a.out, up, a.maxval);
        if (!a.dense.empty()) write_dense(a.dense, up);
        if (!a.reference.empty()) std::cout << "l2_percent " << l2_percent_error(up, read_pgm(a.reference)) << "\n";
    }
    timer.stage("write");
    return ok;
}

// ---- analyze ----

struct AnalyzeArgs {
    std::string in, fixture, csv, json;
    std::vector<std::string> velocity;
    std::string layout = "tucker";
    std::size_t samples = 10000;
    std::uint64_t seed = 1;
    double width = 0.02;
    TurbulenceMetricOptions metrics;
};

int cmd_analyze(const AnalyzeArgs& a) {
    MetricReport report;
    if (!a.velocity.empty()) {
        if (a.velocity.size() != 3) throw ConfigError("analyze: --velocity takes three component files");
        VelocityField v;
        v.layout = layout_from_name(a.layout);
        for (std::size_t k = 0; k < 3; ++k) {
            if (v.layout == Layout::tucker)
                v.tucker[k] = load_tucker(a.velocity[k]);
            else
                v.interleaved[k] = load_tt(a.velocity[k]);
        }
        v.scales = v.layout == Layout::tucker ? v.tucker[0].scales(0) : v.interleaved[0].order() / 3;
        // Files carry no stream terms, so the divergence check is skipped here.
        auto opts = a.metrics;
        opts.divergence_samples = 0;
        const auto m = turbulence_metrics(v, opts);
        report.name = "velocity";
        report.scalars["slope"] = m.slope;
        report.scalars["flatness_min_r"] = m.flatness.front();
        report.scalars["max_rank"] = static_cast<double>(m.ranks.max_rank);
        report.scalars["parameter_count"] = static_cast<double>(m.ranks.parameter_count);
        report.scalars["compression_ratio"] = m.ranks.compression_ratio;
        report.columns = {"k", "E"};
        for (std::size_t i = 0; i < m.spectrum.k.size(); ++i) report.rows.push_back({m.spectrum.k[i], m.spectrum.energy[i]});
    } else {
        if (a.in.empty()) throw ConfigError("analyze: need --in or --velocity");
        const bool is_tucker = fs::exists(grid_path(a.in)) && load_grid(grid_path(a.in)).layout == Layout::tucker;
        TensorTrain tt;
        TuckerTT tucker;
        GridDescriptor grid;
        RankStats stats;
        if (is_tucker) {
            tucker = load_tucker(a.in);
            grid = load_grid(grid_path(a.in));
            stats = rank_stats(tucker);
        } else {
            tt = load_tt(a.in);
            grid = grid_for(a.in, tt.order());
            stats = rank_stats(tt);
        }
        report.name = a.in;
        report.scalars["max_rank"] = static_cast<double>(stats.max_rank);
        report.scalars["parameter_count"] = static_cast<double>(stats.parameter_count);
        report.scalars["compression_ratio"] = stats.compression_ratio;
        if (!a.fixture.empty()) {
            FixtureOptions fo;
            fo.width = a.width;
            const auto fx = fixture_by_name(a.fixture, fo);
            const auto e = sampled_error(grid, evaluator(grid, &tt, is_tucker ? &tucker : nullptr), fx.f, a.samples,
                                         a.seed);
            report.scalars["rmse"] = e.rmse;
            report.scalars["max_abs"] = e.max_abs;
        }
        if (!is_tucker) {
            report.columns = {"bond", "rank"};
            const auto r = tt.ranks();
            for (std::size_t k = 0; k < r.size(); ++k) report.rows.push_back({static_cast<double>(k), double(r[k])});
        }
    }
    timer.stage("analyze");
    write_json_summary(std::cout, report);
    if (!a.csv.empty()) {
        std::ofstream out(a.csv);
        if (!out) throw IoError("cannot write " + a.csv);
        write_csv(out, report);
    }
    if (!a.json.empty()) {
        std::ofstream out(a.json);
        if (!out) throw IoError("cannot write " + a.json);
        write_json_summary(out, report);
    }
    return ok;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tensor-train interpolation toolkit"};
    app.require_subcommand(1);
    app.add_flag("--timing", timer.enabled, "Print wall-clock per stage to stderr");

    EncodeArgs ea;
    auto* enc = app.add_subcommand("encode", "Encode a fixture or PGM image as a QTT");
    auto* fxo = enc->add_option("--fixture", ea.fixture, "Fixture name");
    auto* imo = enc->add_option("--image", ea.image, "P5 PGM image");
    fxo->excludes(imo);
    enc->add_option("--scales", ea.scales, "Scales per axis (default: fixture base)");
    enc->add_option("--layout", ea.layout, "plain, interleaved or tucker");
    enc->add_option("--tol", ea.tol, "Relative SVD truncation");
    enc->add_option("--width", ea.width, "Mask smoothing width");
    enc->add_option("--samples", ea.samples, "Samples for the error check");
    enc->add_option("--seed", ea.seed);
    enc->add_flag("--pad", ea.pad, "Edge-replicate non-dyadic images");
    enc->add_option("--out", ea.out)->required();

    RefineArgs ra;
    auto* ref = app.add_subcommand("refine", "Refine a QTT by extra scales with TTI");
    ref->add_option("--in", ra.in)->required();
    ref->add_option("--out", ra.out)->required();
    ref->add_option("--kernel", ra.kernel, "linear, keys, bspline3, cubic6, nearest, lagrange:p");
    ref->add_option("--extra,-m", ra.extra, "Extra scales");
    ref->add_option("--derivative", ra.derivative);
    ref->add_option("--axis", ra.axis, "Derivative axis");
    ref->add_option("--boundary", ra.boundary, "periodic or clamped (default: from the grid)");
    ref->add_option("--ghost", ra.ghost, "edge, reflect or zero");
    ref->add_option("--tol", ra.tol);
    ref->add_option("--fixture", ra.fixture, "Report the sampled error against this fixture");
    ref->add_option("--width", ra.width);
    ref->add_option("--samples", ra.samples);
    ref->add_option("--seed", ra.seed);

    NoiseArgs na;
    auto* noi = app.add_subcommand("noise", "Generate a noise field as a QTT");
    noi->add_option("--algo", na.algo, "midpoint, value or perlin");
    noi->add_option("--spec", na.spec_file, "key=value spec file (overrides the flags below)");
    noi->add_option("--seed", na.spec.seed);
    noi->add_option("--dim", na.spec.dims);
    noi->add_option("--scales", na.spec.scales);
    noi->add_option("--base-scales", na.spec.base_scales);
    noi->add_option("--rank", na.spec.rank);
    noi->add_option("--octaves", na.spec.octaves);
    noi->add_option("--persistence", na.spec.persistence);
    noi->add_option("--roughness", na.spec.roughness);
    noi->add_option("--decay", na.spec.decay);
    noi->add_option("--left", na.spec.left_height);
    noi->add_option("--right", na.spec.right_height);
    noi->add_option("--kernel", na.spec.kernel);
    noi->add_option("--fade", na.fade, "cubic or quintic");
    noi->add_flag("--unit-gradients", na.spec.unit_gradients);
    noi->add_option("--tol", na.spec.tolerance);
    noi->add_option("--dense", na.dense, "Also write the dense field");
    noi->add_option("--out", na.out)->required();

    TurbulenceArgs ta;
    auto* tur = app.add_subcommand("turbulence", "Synthetic turbulence ensemble with spectrum and flatness");
    tur->add_option("--scales", ta.spec.scales);
    tur->add_option("--seeds", ta.seeds);
    tur->add_option("--first-seed", ta.first_seed);
    tur->add_option("--chi", ta.spec.chi);
    tur->add_option("--layout", ta.layout, "tucker or interleaved");
    tur->add_option("--tol", ta.spec.tolerance);
    tur->add_option("--kmin", ta.metrics.kmin);
    tur->add_option("--kmax", ta.metrics.kmax, "0 means 2^(M-2)");
    tur->add_option("--separations", ta.metrics.separations)->delimiter(',');
    tur->add_option("--divergence-samples", ta.metrics.divergence_samples);
    tur->add_option("--jobs", ta.jobs, "Concurrent seeds (0: hardware threads)");
    tur->add_flag("!--no-save", ta.save_fields, "Skip the per-seed TT files");
    tur->add_option("--out-dir", ta.out_dir);

    SuperresArgs sa;
    auto* sup = app.add_subcommand("superres", "Upscale a PGM image through its QTT");
    sup->add_option("--image", sa.image)->required();
    sup->add_option("--extra,-m", sa.extra, "Extra scales per axis");
    sup->add_option("--kernel", sa.kernel);
    sup->add_option("--ghost", sa.ghost);
    sup->add_option("--tol", sa.tol);
    sup->add_option("--out", sa.out, "Upscaled PGM");
    sup->add_option("--dense", sa.dense, "Upscaled float64 dump");
    sup->add_option("--tt", sa.tt_out, "Upscaled QTT");
    sup->add_option("--reference", sa.reference, "PGM to report the l2 percentage error against");
    sup->add_option("--maxval", sa.maxval);
    sup->add_flag("--pad", sa.pad);

    AnalyzeArgs aa;
    auto* ana = app.add_subcommand("analyze", "Rank statistics, sampled errors, velocity spectra");
    ana->add_option("--in", aa.in);
    ana->add_option("--velocity", aa.velocity, "Three component files")->expected(3);
    ana->add_option("--layout", aa.layout);
    ana->add_option("--fixture", aa.fixture);
    ana->add_option("--width", aa.width);
    ana->add_option("--samples", aa.samples);
    ana->add_option("--seed", aa.seed);
    ana->add_option("--separations", aa.metrics.separations)->delimiter(',');
    ana->add_option("--csv", aa.csv);
    ana->add_option("--json", aa.json);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? ok : config;
    }

    try {
        if (*enc) {
            if (ea.fixture.empty() && ea.image.empty()) throw ConfigError("encode: need --fixture or --image");
            return cmd_encode(ea);
        }
        if (*ref) return cmd_refine(ra);
        if (*noi) return cmd_noise(na);
        if (*tur) return cmd_turbulence(ta);
        if (*sup) return cmd_superres(sa);
        if (*ana) return cmd_analyze(aa);
    } catch (const CapacityError& e) {
        std::cerr << "capacity error: " << e.what() << "\n";
        return capacity;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return io;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return io;
    } catch (const DimensionError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return config;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return unexpected;
    }
    return unexpected;
}
