#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "qtti/encoders.hpp"
#include "qtti/kernels.hpp"
#include "qtti/tensor_train.hpp"

namespace qtti {

struct CascadeSpec {
    std::uint64_t seed = 1;
    /// Finest scale M: 2^M points per axis.
    std::size_t scales = 7;
    /// Bond dimension of every random stream field.
    std::size_t chi = 5;
    /// Tucker keeps ranks linear in M; interleaved ranks roughly double per scale.
    Layout layout = Layout::tucker;
    /// omega_m = 2^(weight_exponent * m).
    double weight_exponent = -4.0 / 3.0;
    std::size_t first_scale = 2;
    /// 0 means scales - 1.
    std::size_t last_scale = 0;
    /// Relative rounding tolerance of each accumulation step.
    double tolerance = 1e-10;
    /// Domain edge length; derivatives are per unit length.
    double box = 1.0;

    double weight(std::size_t m) const;
    std::size_t final_scale() const { return last_scale == 0 ? scales - 1 : last_scale; }
    void validate() const;
};

/// G^m_j for j = x, y, z on the 2^m-per-axis lattice.
struct StreamTerm {
    std::size_t scale = 0;
    double weight = 0.0;
    std::array<TensorTrain, 3> interleaved;
    std::array<TuckerTT, 3> tucker;
};

/// v = curl A, with d_i A_j = sum_m omega_m d_i (spline of G^m_j).
struct VelocityField {
    Layout layout = Layout::interleaved;
    std::size_t scales = 0;
    double box = 1.0;
    std::array<TensorTrain, 3> interleaved;
    std::array<TuckerTT, 3> tucker;
    std::vector<StreamTerm> terms;

    std::size_t max_rank() const;
    std::size_t parameter_count() const;
    /// Row-major cube with side 2^scales (x slowest).
    DenseTensor component_dense(std::size_t k) const;
    double component_at(std::size_t k, std::span<const std::size_t> index) const;
};

StreamTerm draw_stream_term(const CascadeSpec& spec, std::size_t m);
VelocityField turbulence_cascade(const CascadeSpec& spec);

/// Lattice value G^m_j at integer indices (periodic).
double stream_lattice_value(const StreamTerm& term, Layout layout, std::size_t j,
                            std::array<long, 3> index);
/**
 * Partial derivative of the cubic B-spline quasi-interpolant of G^m_j at a
 * point of the periodic box, orders per axis, evaluated straight from the
 * kernel pieces (no TTI involved).
 */
double stream_derivative_at(const StreamTerm& term, Layout layout, std::size_t j, double box,
                            std::array<double, 3> x, std::array<int, 3> orders);
/// Velocity and divergence of the spline model at a point.
std::array<double, 3> velocity_at(const VelocityField& v, std::array<double, 3> x);
double divergence_at(const VelocityField& v, std::array<double, 3> x);

} // namespace qtti
