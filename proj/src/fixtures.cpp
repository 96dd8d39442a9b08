#include "qtti/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtti/errors.hpp"

namespace qtti {

namespace {

constexpr double kPi = std::numbers::pi;

double gauss(double x, double c, double s) {
    const double u = (x - c) / s;
    return std::exp(-0.5 * u * u);
}

double cube_plus(double u) { return u > 0.0 ? u * u * u : 0.0; }

struct Kink {
    double at, width, weight;
};
constexpr Kink kRight[] = {{0.22, 0.030, 0.8}, {0.37, 0.025, -0.6}, {0.61, 0.035, 0.7}, {0.82, 0.022, -0.5}};
constexpr Kink kLeft[] = {{0.28, 0.030, -0.6}, {0.42, 0.028, 0.5}, {0.68, 0.030, -0.5}, {0.88, 0.022, 0.4}};

double mask(double sd, double width) { return 0.5 * (1.0 - std::tanh(sd / width)); }

} // namespace

double eqg1(double x) {
    // Chirp with start frequency 5 and sweep 18 across the unit interval.
    const double chirp = std::cos(2.0 * kPi * (5.0 * x + 0.5 * 18.0 * x * x));
    const double b = 0.28 * std::sin(16.0 * kPi * x) * gauss(x, 0.20, 0.07) +
                     0.24 * std::cos(44.0 * kPi * x) * gauss(x, 0.36, 0.05) + 0.20 * chirp * gauss(x, 0.58, 0.12) +
                     0.18 * std::sin(120.0 * kPi * x) * gauss(x, 0.73, 0.03);
    const double bg = 0.07 * std::sin(2.0 * kPi * 1.8 * x + 0.2) + 0.05 * std::cos(2.0 * kPi * 3.3 * x + 0.9);
    double kp = 0.0, km = 0.0;
    for (const auto& k : kRight) kp += k.weight * cube_plus(x - k.at) * gauss(x, k.at, k.width);
    for (const auto& k : kLeft) km += k.weight * cube_plus(k.at - x) * gauss(x, k.at, k.width);
    return std::tanh((b + bg + kp + km) / 2.5);
}

double correlated_gaussian(double x, double y) {
    constexpr double s = 0.1, rho = 0.6;
    const double u = (x - 0.5) / s, v = (y - 0.5) / s;
    return std::exp(-(u * u - 2.0 * rho * u * v + v * v) / (2.0 * (1.0 - rho * rho)));
}

double soft_circle(double x, double y, double width) {
    return mask(std::hypot(x - 0.5, y - 0.5) - 0.25, width);
}

double soft_airfoil(double x, double y, double width) {
    constexpr double lead = 0.25, chord = 0.5, thick = 0.12, yc = 0.5;
    const double xi = (x - lead) / chord;
    double sd;
    if (xi < 0.0) {
        sd = std::hypot(x - lead, y - yc);
    } else if (xi > 1.0) {
        sd = std::hypot(x - lead - chord, y - yc);
    } else {
        const double yt = 5.0 * thick * chord *
                          (0.2969 * std::sqrt(xi) - 0.1260 * xi - 0.3516 * xi * xi + 0.2843 * xi * xi * xi -
                           0.1015 * xi * xi * xi * xi);
        sd = std::abs(y - yc) - yt;
    }
    return mask(sd, width);
}

std::vector<std::string> fixture_names() {
    return {"eqg1", "sin", "cos", "exp", "poly", "ones", "gaussian2d", "circle", "airfoil"};
}

Fixture fixture_by_name(const std::string& name, const FixtureOptions& options) {
    if (!(options.width > 0.0)) throw ConfigError("fixture: width must be positive");
    const double w = options.width;
    Fixture fx;
    fx.name = name;
    if (name == "eqg1") {
        fx.f = [](std::span<const double> x) { return eqg1(x[0]); };
        fx.base_scales = 14;
        fx.periodic = false;
    } else if (name == "sin") {
        fx.f = [](std::span<const double> x) { return std::sin(2.0 * kPi * x[0]); };
        fx.derivative = [](std::span<const double> x) { return 2.0 * kPi * std::cos(2.0 * kPi * x[0]); };
    } else if (name == "cos") {
        fx.f = [](std::span<const double> x) { return std::cos(2.0 * kPi * x[0]); };
        fx.derivative = [](std::span<const double> x) { return -2.0 * kPi * std::sin(2.0 * kPi * x[0]); };
    } else if (name == "exp") {
        fx.f = [](std::span<const double> x) { return std::exp(x[0]); };
        fx.derivative = fx.f;
        fx.periodic = false;
    } else if (name == "poly") {
        fx.f = [](std::span<const double> x) { return 1.0 - 2.0 * x[0] + 3.0 * x[0] * x[0] * x[0]; };
        fx.derivative = [](std::span<const double> x) { return -2.0 + 9.0 * x[0] * x[0]; };
        fx.periodic = false;
    } else if (name == "ones") {
        fx.f = [](std::span<const double>) { return 1.0; };
        fx.derivative = [](std::span<const double>) { return 0.0; };
    } else if (name == "gaussian2d") {
        fx.f = [](std::span<const double> x) { return correlated_gaussian(x[0], x[1]); };
        fx.dims = 2;
        fx.base_scales = 6;
    } else if (name == "circle") {
        fx.f = [w](std::span<const double> x) { return soft_circle(x[0], x[1], w); };
        fx.dims = 2;
        fx.base_scales = 6;
    } else if (name == "airfoil") {
        fx.f = [w](std::span<const double> x) { return soft_airfoil(x[0], x[1], w); };
        fx.dims = 2;
        fx.base_scales = 7;
    } else {
        throw ConfigError("unknown fixture '" + name + "'");
    }
    return fx;
}

GridDescriptor fixture_grid(const Fixture& fx, std::size_t scales, Layout layout) {
    if (fx.dims == 1 && layout == Layout::interleaved) layout = Layout::plain;
    auto g = GridDescriptor::unit(fx.dims, scales, layout, fx.periodic);
    return g;
}

} // namespace qtti
