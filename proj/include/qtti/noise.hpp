#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "qtti/encoders.hpp"
#include "qtti/kernels.hpp"
#include "qtti/tensor_train.hpp"

namespace qtti {

/**
 * Random QTT with `cores` binary legs and bonds min(rank, 2^k, 2^(cores-k)).
 * Core k draws its entries from Stream(seed, {random_qtt, tags..., k}); the
 * result is rescaled to unit mean square over all 2^cores entries (the
 * ensemble mean is zero, so this is the unit-variance normalization).
 */
TensorTrain random_qtt(std::size_t cores, std::size_t rank, std::uint64_t seed,
                       const std::vector<std::uint64_t>& tags = {});

/// Random QTT-Tucker field: d factor chains of `scales` bits, unit mean square.
TuckerTT random_tucker(std::size_t d, std::size_t scales, std::size_t rank, std::uint64_t seed,
                       const std::vector<std::uint64_t>& tags = {});

/// Mean and population variance over every entry, computed in TT form.
double tt_mean(const TensorTrain& tt);
double tt_variance(const TensorTrain& tt);
double tucker_sum(const TuckerTT& t);

struct NoiseSpec {
    std::uint64_t seed = 1;
    std::size_t dims = 1;
    /// Fine scales M per dimension.
    std::size_t scales = 8;
    /// Lattice scales n0 per dimension for value and gradient noise.
    std::size_t base_scales = 3;
    std::size_t rank = 8;
    std::size_t octaves = 1;
    double persistence = 0.5;
    // Midpoint displacement.
    double roughness = 1.0;
    double decay = 0.5;
    double left_height = 0.0;
    double right_height = 0.0;
    std::string kernel = "keys";
    FadeKind fade_kind = FadeKind::quintic;
    /// Perlin: normalize gradients to unit length (densifies the lattice).
    bool unit_gradients = false;
    double tolerance = 1e-12;

    void validate() const;
};

void write_noise_spec(std::ostream& out, const NoiseSpec& spec);
/// key=value lines; unknown keys are a ConfigError.
NoiseSpec read_noise_spec(std::istream& in);

/// Unmasked level-l draw field of the midpoint construction (l cores).
TensorTrain midpoint_level_field(const NoiseSpec& spec, std::size_t level);
/**
 * Sum over levels l = 1..M of the level field masked to odd sites, linearly
 * refined to M scales and scaled by R * decay^(l-1), plus the straight line
 * from left_height to right_height. Entry i is H[i] of the subdivision on
 * 2^M + 1 points; H[2^M] (= right_height) is not stored.
 */
TensorTrain midpoint_displacement_tt(const NoiseSpec& spec);

/// Lattice values (dims * base_scales cores, interleaved).
TensorTrain value_noise_lattice(const NoiseSpec& spec);
TensorTrain value_noise_tt(const NoiseSpec& spec);
/// Kernel refinement of given lattice values from base_scales to scales.
TensorTrain value_noise_from_lattice(const TensorTrain& lattice, const NoiseSpec& spec);

/// One lattice per gradient component, interleaved when dims > 1.
std::vector<TensorTrain> perlin_gradients(const NoiseSpec& spec);
/// Periodic Perlin noise for dims 1 or 3 on the interleaved fine grid.
TensorTrain perlin_tt(const NoiseSpec& spec);
TensorTrain perlin_from_gradients(const std::vector<TensorTrain>& gradients, const NoiseSpec& spec);

/// Octave k of a field: n(2^k x) tiled periodically, by evaluating the
/// last k*dims cores at 0 and prepending k*dims all-ones cores.
TensorTrain octave(const TensorTrain& base, std::size_t dims, std::size_t k);
/// sum_{k < octaves} persistence^k octave(base, k).
TensorTrain fractal_tt(const TensorTrain& base, const NoiseSpec& spec);

} // namespace qtti
