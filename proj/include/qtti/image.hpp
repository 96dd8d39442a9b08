#pragma once

#include <string>

#include "qtti/kernels.hpp"
#include "qtti/tensor_train.hpp"
#include "qtti/tti.hpp"

namespace qtti {

/// Binary PGM (P5), 8 or 16 bit; returns (rows, cols) with values in [0, maxval].
DenseTensor read_pgm(const std::string& path);
/// Values are rounded and clamped to [0, maxval].
void write_pgm(const std::string& path, const DenseTensor& image, unsigned maxval = 255);

/// Text header line "float64 <rank> <dims...>" followed by raw row-major doubles.
void write_dense(const std::string& path, const DenseTensor& t);
DenseTensor read_dense(const std::string& path);

/// Edge-replicate to the smallest 2^n x 2^n square holding the image.
DenseTensor pad_to_dyadic(const DenseTensor& image);
bool is_dyadic_square(const DenseTensor& image);

struct SuperResolution {
    std::size_t coarse_scales = 0;
    std::size_t extra_scales = 0;
    TensorTrain coarse;
    TensorTrain fine;
};

/**
 * Interleaved QTT of a 2^n x 2^n image refined by m scales per axis with
 * clamped boundaries; fine pixel (I, J) sits at coarse position (I, J) / 2^m.
 */
SuperResolution super_resolve(const DenseTensor& image, std::size_t m, const Kernel& kernel,
                              const Tolerance& tol, GhostFill ghost = GhostFill::edge);

/// 100 ||a - b|| / ||b||.
double l2_percent_error(const DenseTensor& a, const DenseTensor& b);

} // namespace qtti
