#pragma once

#include <vector>

#include "qtti/encoders.hpp"
#include "qtti/kernels.hpp"
#include "qtti/tensor_train.hpp"

namespace qtti {

enum class Boundary { periodic, clamped };
/// Ghost samples outside a clamped grid.
enum class GhostFill { edge, reflect, zero };

struct TTIOptions {
    int derivative = 0;
    Boundary boundary = Boundary::periodic;
    GhostFill ghost = GhostFill::edge;
    /// Clamped only: add the ghost-sample rows into the operator itself so
    /// it needs no separate correction (required for the d-D operators).
    bool fold_boundary = false;
    /// Physical length of the coarse axis; derivatives scale by h^-derivative.
    double domain_length = 1.0;
};

/**
 * TTI-O over `dims` interleaved dimensions: d*n operator cores (2x2) followed
 * by d*m vector-like cores (rows 2, cols 1). In 1D, core order is the coarse
 * bits then the new fine bits.
 */
struct TTIOperator {
    std::size_t dims = 1;
    std::size_t coarse_scales = 0;
    std::size_t extra_scales = 0;
    TTOperator op;
    // Per dimension; needed for boundary corrections.
    std::vector<StencilSet> stencils;
    std::vector<double> scale;
    std::vector<Boundary> boundary;
    std::vector<GhostFill> ghost;
    std::vector<bool> folded;

    /// Bonds 1 .. d*n (every bond touching a coarse leg).
    std::vector<std::size_t> coarse_ranks() const;
    /// Bonds strictly inside the fine tail.
    std::vector<std::size_t> fine_ranks() const;
};

TTIOperator build_tti_1d(const Kernel& kernel, std::size_t n, std::size_t m,
                         const TTIOptions& options = {});

/// Operator from explicit stencil polynomials, already multiplied by `scale`.
TTIOperator build_tti_stencils(const StencilSet& stencils, std::size_t n, std::size_t m,
                               double scale = 1.0, Boundary boundary = Boundary::periodic,
                               GhostFill ghost = GhostFill::edge, bool fold_boundary = false);

/// Weave 1D operators sharing n and m into the scale-major d-D operator.
TTIOperator build_tti_interleaved(const std::vector<TTIOperator>& per_dimension);

TTIOperator build_tti_multidim_interleaved(const Kernel& kernel, std::size_t d, std::size_t n,
                                           std::size_t m, const std::vector<int>& derivative,
                                           const TTIOptions& options = {});

/// Refines f (d*n cores) to d*(n+m) cores; one rounding pass over coarse bonds only.
TensorTrain apply_tti(const TTIOperator& op, const TensorTrain& f, const Tolerance& tol);

/// Refine every factor chain by its own 1D operator; the core TT is untouched.
TuckerTT apply_tti_tucker(const TuckerTT& t, const std::vector<TTIOperator>& per_dimension,
                          const Tolerance& tol);
TuckerTT apply_tti_tucker(const TuckerTT& t, const Kernel& kernel, std::size_t m,
                          const std::vector<int>& derivative, const Tolerance& tol,
                          const TTIOptions& options = {});

/**
 * Ghost-sample contribution missing from an unfolded clamped 1D operator:
 * sum over boundary cells a of delta_a (x) sum_{a+k outside} ghost(a+k) P^(k).
 * Zero for periodic operators.
 */
TensorTrain clamped_boundary_correction(const TTIOperator& op, const TensorTrain& f);

namespace detail {
/// Round bonds 1..nb with a single right-to-left sweep; other bonds are untouched.
void round_leading_bonds(std::vector<Core>& cores, std::size_t nb, const Tolerance& tol);
} // namespace detail

} // namespace qtti
