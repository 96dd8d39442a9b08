#pragma once

#include <string>
#include <vector>

#include "qtti/encoders.hpp"

namespace qtti {

struct FixtureOptions {
    /// tanh smoothing width of the masks, in domain units.
    double width = 0.02;
};

struct Fixture {
    std::string name;
    Field f;
    /// d/dx of a 1D fixture when known in closed form, else empty.
    Field derivative;
    std::size_t dims = 1;
    std::size_t base_scales = 10;
    bool periodic = true;
};

/// Multi-scale 1D benchmark on [0, 1): tanh of windowed oscillations plus C^2 kinks.
double eqg1(double x);
/// Correlated Gaussian centred at (1/2, 1/2), sigma 0.1 per axis, correlation 0.6.
double correlated_gaussian(double x, double y);
/// 0.5 (1 - tanh(sd / width)) for a circle of radius 1/4 centred in the unit square.
double soft_circle(double x, double y, double width);
/**
 * Symmetric NACA 00xx-style section (12% thickness), chord 0.5 starting at
 * x = 0.25 on the centre line, softened by the same tanh of an approximate
 * signed distance (vertical distance over the chord, radial past the ends).
 */
double soft_airfoil(double x, double y, double width);

Fixture fixture_by_name(const std::string& name, const FixtureOptions& options = {});
std::vector<std::string> fixture_names();

/// Grid matching a fixture's dimensionality on the unit box.
GridDescriptor fixture_grid(const Fixture& fx, std::size_t scales, Layout layout);

} // namespace qtti
