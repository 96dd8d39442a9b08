#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "qtti/encoders.hpp"
#include "qtti/kernels.hpp"
#include "qtti/tensor_train.hpp"
#include "qtti/turbulence.hpp"

namespace qtti {

/// Reference value at a per-core multi-index.
using IndexFunction = std::function<double(std::span<const std::size_t>)>;

/// RMS deviation over `samples` multi-indices drawn uniformly per core.
double rmse_sampled(const TensorTrain& tt, const IndexFunction& reference, std::size_t samples,
                    std::uint64_t seed);
/**
 * Same on a QTT grid, comparing against f at grid coordinates. Index
 * floor(u 2^N) from one uniform u per axis, so a fixed seed probes the same
 * physical positions on every refinement level.
 */
double rmse_sampled(const TensorTrain& tt, const GridDescriptor& grid, const Field& f, std::size_t samples,
                    std::uint64_t seed);

struct Spectrum {
    /// Shell index k = 0, 1, ..., shells - 1 (bins [k - 1/2, k + 1/2)).
    std::vector<double> k;
    std::vector<double> energy;
    /// n/2 for a side-n cube.
    std::size_t nyquist = 0;
    /// Shells 1 .. n/2, the ones meant for plotting and fitting.
    Spectrum resolved() const;
    double total() const;
};

/**
 * Shell-averaged E(k) = 1/2 sum |v_hat|^2 with v_hat = DFT / N^3, so that
 * sum over all shells equals half the mean square (Parseval). Components
 * are row-major cubes with equal sides; k is in units of 2 pi / box.
 */
Spectrum energy_spectrum(const std::vector<DenseTensor>& components);

/// Least-squares slope of log E against log k over kmin <= k <= kmax.
double spectrum_slope(const Spectrum& s, double kmin, double kmax);

enum class IncrementKind {
    longitudinal, ///< component d along axis d
    full,         ///< every component along every axis
};

/**
 * F(r) = S4(r) / S2(r)^2 over non-wrapping lags r; constant nonzero
 * increments give 1 and an all-zero increment set gives 0.
 */
std::vector<double> flatness(const std::vector<DenseTensor>& components, std::span<const std::size_t> separations,
                             IncrementKind kind = IncrementKind::longitudinal);

struct RankStats {
    std::size_t max_rank = 0;
    std::size_t parameter_count = 0;
    double compression_ratio = 0.0;
};
RankStats rank_stats(const TensorTrain& tt);
RankStats rank_stats(const TuckerTT& t);

struct ConvergencePoint {
    std::size_t coarse_scales;
    double h;
    double error;
};
struct ConvergenceStudy {
    std::vector<ConvergencePoint> points;
    double slope = 0.0;
};
/**
 * Sample f on 2^n points of the periodic unit interval for each n, refine by
 * m scales and measure the RMS error on the fine grid; slope of log error
 * against log h.
 */
ConvergenceStudy convergence_study(const Kernel& kernel, const std::function<double(double)>& f,
                                   std::span<const std::size_t> coarse_scales, std::size_t m);

double fit_slope(std::span<const double> x, std::span<const double> y);

struct TurbulenceMetricOptions {
    /// Inertial fit window in shell units; kmax = 0 means 2^(M-2).
    double kmin = 4.0;
    double kmax = 0.0;
    std::vector<std::size_t> separations{1, 2, 4, 8, 16};
    IncrementKind increments = IncrementKind::longitudinal;
    std::size_t divergence_samples = 200;
    std::uint64_t seed = 1;
};

struct TurbulenceMetrics {
    Spectrum spectrum; ///< resolved shells only
    double slope = 0.0;
    std::vector<double> flatness;
    /// max |div v| over random points of the spline model, over rms |v| at the same points.
    double divergence_relative = 0.0;
    RankStats ranks;
};

/// Densifies the three components (capacity permitting) for spectrum and flatness.
TurbulenceMetrics turbulence_metrics(const VelocityField& v, const TurbulenceMetricOptions& options = {});

struct MetricReport {
    std::string name;
    std::map<std::string, double> scalars;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

/// One header row, comma separated, '.' decimal.
void write_csv(std::ostream& out, const MetricReport& report);
void write_json_summary(std::ostream& out, const MetricReport& report);

} // namespace qtti
