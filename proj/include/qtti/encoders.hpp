#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qtti/tensor_train.hpp"

namespace qtti {

enum class Layout { plain, interleaved, tucker };

std::string layout_name(Layout layout);
Layout layout_from_name(const std::string& name);

/**
 * Dyadic grid: dimension m has 2^scales[m] half-open samples
 * x_i = a_m + i h_m on [a_m, b_m). Bits are most significant first.
 */
struct GridDescriptor {
    std::vector<std::size_t> scales;
    std::vector<double> lower;
    std::vector<double> upper;
    Layout layout = Layout::plain;
    std::vector<bool> periodic;

    static GridDescriptor unit(std::size_t dims, std::size_t scales, Layout layout = Layout::plain,
                               bool periodic = true);

    std::size_t dims() const { return scales.size(); }
    std::size_t points(std::size_t m) const { return std::size_t{1} << scales[m]; }
    double spacing(std::size_t m) const;
    double coordinate(std::size_t m, std::size_t i) const;
    std::size_t total_scales() const;
    /// Same box, every dimension refined by `extra` scales.
    GridDescriptor refined(std::size_t extra) const;
    void validate() const;
};

void write_grid(std::ostream& out, const GridDescriptor& grid);
GridDescriptor read_grid(std::istream& in);
void save_grid(const std::string& path, const GridDescriptor& grid);
GridDescriptor load_grid(const std::string& path);

using Field = std::function<double(std::span<const double>)>;

/// Dense samples on the grid, dims (2^N_1, ..., 2^N_d), row-major.
DenseTensor sample_grid(const Field& f, const GridDescriptor& grid);

// ---- bit layouts ----

/// Scale-major bit weave: code bit (k, m) is bit k of index m.
std::size_t interleave_bits(std::span<const std::size_t> index, std::size_t scales);
std::vector<std::size_t> deinterleave_bits(std::size_t code, std::size_t dims, std::size_t scales);

/// Core-ordered binary multi-index of a grid point for a plain or interleaved layout.
std::vector<std::size_t> binary_index(std::span<const std::size_t> index, const GridDescriptor& grid);

/// d-way dense array to interleaved QTT with d*N binary cores.
TensorTrain interleave(const DenseTensor& dense, const Tolerance& tol = {});
/// Inverse of interleave: back to a d-way array with 2^N points per axis.
DenseTensor deinterleave(const TensorTrain& tt, std::size_t dims);

/// Plain sequential QTT: all bits of dimension 1, then dimension 2, ...
TensorTrain encode_plain(const DenseTensor& dense, const Tolerance& tol = {});
/// Dense d-way array from a plain or interleaved QTT on this grid.
DenseTensor qtt_to_grid(const TensorTrain& tt, const GridDescriptor& grid);

TensorTrain encode_qtt(const Field& f, const GridDescriptor& grid, const Tolerance& tol = {});

// ---- Tucker ----

/**
 * A(i_1..i_d) = sum_g core(g_1..g_d) prod_k U_k(g_k, i_k). Factor k is a TT
 * whose first mode is the Tucker leg g_k followed by N_k binary modes.
 */
struct TuckerTT {
    TensorTrain core;
    std::vector<TensorTrain> factors;

    std::size_t dims() const { return factors.size(); }
    std::vector<std::size_t> tucker_ranks() const { return core.dims(); }
    std::size_t scales(std::size_t k) const { return factors[k].order() - 1; }
    std::size_t parameter_count() const;
    /// Largest bond over the core and all factor chains.
    std::size_t max_rank() const;
};

TuckerTT to_tucker(const DenseTensor& dense, const Tolerance& tol = {});
DenseTensor tucker_to_dense(const TuckerTT& t);
double tucker_eval(const TuckerTT& t, std::span<const std::size_t> index);
TuckerTT encode_tucker(const Field& f, const GridDescriptor& grid, const Tolerance& tol = {});

TuckerTT tucker_add(const TuckerTT& a, const TuckerTT& b);
TuckerTT tucker_scale(const TuckerTT& a, double c);
/// Recompress factor chains, Tucker legs and the core TT.
TuckerTT tucker_round(const TuckerTT& t, const Tolerance& tol);
/// Row-orthonormal factors; then the core TT carries the norm.
double tucker_norm(const TuckerTT& t);

} // namespace qtti
