#include "qtti/encoders.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qtti/errors.hpp"

namespace qtti {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::vector<std::size_t> binary_dims(std::size_t n) { return std::vector<std::size_t>(n, 2); }

std::size_t log2_exact(std::size_t n) {
    if (n == 0 || (n & (n - 1)) != 0) {
        throw DimensionError("grid size " + std::to_string(n) + " is not a power of two");
    }
    std::size_t s = 0;
    while ((std::size_t{1} << s) < n) ++s;
    return s;
}

// out = A x_k M with M of shape (r, n_k): contracts mode k of A against M's columns.
DenseTensor mode_product(const DenseTensor& a, std::size_t k, const RowMatrix& m) {
    std::size_t pre = 1, post = 1;
    for (std::size_t i = 0; i < k; ++i) pre *= a.dims[i];
    for (std::size_t i = k + 1; i < a.dims.size(); ++i) post *= a.dims[i];
    const std::size_t n = a.dims[k];
    const std::size_t r = static_cast<std::size_t>(m.rows());
    std::vector<std::size_t> dims = a.dims;
    dims[k] = r;
    DenseTensor out(dims);
    for (std::size_t p = 0; p < pre; ++p) {
        Eigen::Map<const RowMatrix> block(a.values.data() + p * n * post,
                                          static_cast<Eigen::Index>(n),
                                          static_cast<Eigen::Index>(post));
        Eigen::Map<RowMatrix> dst(out.values.data() + p * r * post, static_cast<Eigen::Index>(r),
                                  static_cast<Eigen::Index>(post));
        dst.noalias() = m * block;
    }
    return out;
}

// Mode-k unfolding, n_k rows.
RowMatrix unfold(const DenseTensor& a, std::size_t k) {
    std::size_t pre = 1, post = 1;
    for (std::size_t i = 0; i < k; ++i) pre *= a.dims[i];
    for (std::size_t i = k + 1; i < a.dims.size(); ++i) post *= a.dims[i];
    const std::size_t n = a.dims[k];
    RowMatrix u(n, pre * post);
    for (std::size_t p = 0; p < pre; ++p)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t q = 0; q < post; ++q)
                u(i, p * post + q) = a.values[(p * n + i) * post + q];
    return u;
}

// Contract a factor chain at fixed binary bits: vector over the Tucker leg.
std::vector<double> factor_column(const TensorTrain& f, std::span<const std::size_t> bits) {
    std::vector<double> v{1.0};
    for (std::size_t c = f.order(); c-- > 1;) {
        const Core& core = f.core(c);
        std::vector<double> next(core.left(), 0.0);
        for (std::size_t l = 0; l < core.left(); ++l)
            for (std::size_t r = 0; r < core.right(); ++r)
                next[l] += core(l, bits[c - 1], r) * v[r];
        v.swap(next);
    }
    const Core& first = f.core(0);
    std::vector<double> out(first.mode(), 0.0);
    for (std::size_t g = 0; g < first.mode(); ++g)
        for (std::size_t r = 0; r < first.right(); ++r) out[g] += first(0, g, r) * v[r];
    return out;
}

// Place a core's physical mode at [offset, offset + mode) inside a wider mode.
Core widen_mode(const Core& c, std::size_t width, std::size_t offset) {
    Core out(c.left(), width, c.right());
    for (std::size_t l = 0; l < c.left(); ++l)
        for (std::size_t i = 0; i < c.mode(); ++i)
            for (std::size_t r = 0; r < c.right(); ++r) out(l, offset + i, r) = c(l, i, r);
    return out;
}

TensorTrain widen_first(const TensorTrain& t, std::size_t width, std::size_t offset) {
    std::vector<Core> cores = t.cores();
    cores[0] = widen_mode(cores[0], width, offset);
    return TensorTrain(std::move(cores));
}

// core_k(l, g', r) = sum_g core_k(l, g, r) m(g, g').
void absorb_into_mode(TensorTrain& core_tt, std::size_t k, const RowMatrix& m) {
    const Core& c = core_tt.core(k);
    Core out(c.left(), static_cast<std::size_t>(m.cols()), c.right());
    for (std::size_t l = 0; l < c.left(); ++l)
        for (std::size_t g = 0; g < c.mode(); ++g)
            for (std::size_t gp = 0; gp < out.mode(); ++gp) {
                const double w = m(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(gp));
                if (w == 0.0) continue;
                for (std::size_t r = 0; r < c.right(); ++r) out(l, gp, r) += c(l, g, r) * w;
            }
    core_tt.core(k) = std::move(out);
}

// first(0, g', r) = sum_g m(g', g) first(0, g, r).
void left_multiply_leg(TensorTrain& factor, const RowMatrix& m) {
    const Core& c = factor.core(0);
    Core out(1, static_cast<std::size_t>(m.rows()), c.right());
    for (std::size_t gp = 0; gp < out.mode(); ++gp)
        for (std::size_t g = 0; g < c.mode(); ++g) {
            const double w = m(static_cast<Eigen::Index>(gp), static_cast<Eigen::Index>(g));
            if (w == 0.0) continue;
            for (std::size_t r = 0; r < c.right(); ++r) out(0, gp, r) += w * c(0, g, r);
        }
    factor.core(0) = std::move(out);
}

} // namespace

std::string layout_name(Layout layout) {
    switch (layout) {
    case Layout::plain: return "plain";
    case Layout::interleaved: return "interleaved";
    case Layout::tucker: return "tucker";
    }
    return "plain";
}

Layout layout_from_name(const std::string& name) {
    if (name == "plain") return Layout::plain;
    if (name == "interleaved") return Layout::interleaved;
    if (name == "tucker") return Layout::tucker;
    throw ConfigError("unknown layout '" + name + "'");
}

GridDescriptor GridDescriptor::unit(std::size_t dims, std::size_t scales, Layout layout,
                                    bool periodic) {
    GridDescriptor g;
    g.scales.assign(dims, scales);
    g.lower.assign(dims, 0.0);
    g.upper.assign(dims, 1.0);
    g.layout = layout;
    g.periodic.assign(dims, periodic);
    return g;
}

double GridDescriptor::spacing(std::size_t m) const {
    return (upper[m] - lower[m]) / static_cast<double>(points(m));
}

double GridDescriptor::coordinate(std::size_t m, std::size_t i) const {
    return lower[m] + static_cast<double>(i) * spacing(m);
}

std::size_t GridDescriptor::total_scales() const {
    std::size_t s = 0;
    for (std::size_t n : scales) s += n;
    return s;
}

GridDescriptor GridDescriptor::refined(std::size_t extra) const {
    GridDescriptor g = *this;
    for (auto& n : g.scales) n += extra;
    return g;
}

void GridDescriptor::validate() const {
    const std::size_t d = scales.size();
    if (d == 0) throw ConfigError("grid needs at least one dimension");
    if (lower.size() != d || upper.size() != d || periodic.size() != d)
        throw ConfigError("grid descriptor fields disagree on dimension count");
    for (std::size_t m = 0; m < d; ++m) {
        if (scales[m] == 0 || scales[m] > 60) throw ConfigError("grid scales must be in 1..60");
        if (!(upper[m] > lower[m])) throw ConfigError("grid domain must have b > a");
    }
    if (layout == Layout::interleaved &&
        std::any_of(scales.begin(), scales.end(), [&](std::size_t n) { return n != scales[0]; }))
        throw DimensionError("interleaved layout needs equal scales in every dimension");
}

void write_grid(std::ostream& out, const GridDescriptor& grid) {
    auto join = [&](auto&& values) {
        std::ostringstream s;
        s.precision(17);
        for (std::size_t i = 0; i < values.size(); ++i) s << (i ? "," : "") << values[i];
        return s.str();
    };
    std::vector<int> periodic(grid.periodic.begin(), grid.periodic.end());
    out << "dims=" << grid.dims() << "\n"
        << "scales=" << join(grid.scales) << "\n"
        << "lower=" << join(grid.lower) << "\n"
        << "upper=" << join(grid.upper) << "\n"
        << "layout=" << layout_name(grid.layout) << "\n"
        << "periodic=" << join(periodic) << "\n";
}

GridDescriptor read_grid(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw IoError("malformed grid line: " + line);
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto field = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) throw IoError("grid header lacks '" + key + "'");
        return it->second;
    };
    auto split = [](const std::string& s) {
        std::vector<std::string> parts;
        std::stringstream ss(s);
        std::string item;
        while (std::getline(ss, item, ',')) parts.push_back(item);
        return parts;
    };
    GridDescriptor g;
    try {
        const std::size_t d = std::stoul(field("dims"));
        for (const auto& s : split(field("scales"))) g.scales.push_back(std::stoul(s));
        for (const auto& s : split(field("lower"))) g.lower.push_back(std::stod(s));
        for (const auto& s : split(field("upper"))) g.upper.push_back(std::stod(s));
        for (const auto& s : split(field("periodic"))) g.periodic.push_back(std::stoi(s) != 0);
        g.layout = layout_from_name(field("layout"));
        if (g.scales.size() != d) throw IoError("grid header dims disagree with scales");
    } catch (const std::logic_error& e) {
        throw IoError(std::string("bad grid header: ") + e.what());
    }
    g.validate();
    return g;
}

void save_grid(const std::string& path, const GridDescriptor& grid) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path + " for writing");
    write_grid(out, grid);
}

GridDescriptor load_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    return read_grid(in);
}

DenseTensor sample_grid(const Field& f, const GridDescriptor& grid) {
    grid.validate();
    std::vector<std::size_t> dims;
    for (std::size_t m = 0; m < grid.dims(); ++m) dims.push_back(grid.points(m));
    DenseTensor out(dims);
    std::vector<std::size_t> idx(dims.size(), 0);
    std::vector<double> x(dims.size());
    for (std::size_t flat = 0; flat < out.size(); ++flat) {
        std::size_t t = flat;
        for (std::size_t m = dims.size(); m-- > 0;) {
            idx[m] = t % dims[m];
            t /= dims[m];
            x[m] = grid.coordinate(m, idx[m]);
        }
        out.values[flat] = f(x);
    }
    return out;
}

std::size_t interleave_bits(std::span<const std::size_t> index, std::size_t scales) {
    std::size_t code = 0;
    for (std::size_t k = 0; k < scales; ++k)
        for (std::size_t m = 0; m < index.size(); ++m)
            code = (code << 1) | ((index[m] >> (scales - 1 - k)) & 1U);
    return code;
}

std::vector<std::size_t> deinterleave_bits(std::size_t code, std::size_t dims, std::size_t scales) {
    std::vector<std::size_t> index(dims, 0);
    std::size_t pos = dims * scales;
    for (std::size_t k = 0; k < scales; ++k)
        for (std::size_t m = 0; m < dims; ++m) {
            --pos;
            index[m] = (index[m] << 1) | ((code >> pos) & 1U);
        }
    return index;
}

std::vector<std::size_t> binary_index(std::span<const std::size_t> index, const GridDescriptor& grid) {
    std::vector<std::size_t> bits;
    if (grid.layout == Layout::interleaved) {
        const std::size_t n = grid.scales[0];
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t m = 0; m < index.size(); ++m)
                bits.push_back((index[m] >> (n - 1 - k)) & 1U);
    } else {
        for (std::size_t m = 0; m < index.size(); ++m)
            for (std::size_t k = 0; k < grid.scales[m]; ++k)
                bits.push_back((index[m] >> (grid.scales[m] - 1 - k)) & 1U);
    }
    return bits;
}

TensorTrain interleave(const DenseTensor& dense, const Tolerance& tol) {
    const std::size_t d = dense.dims.size();
    const std::size_t n = log2_exact(dense.dims[0]);
    for (std::size_t m : dense.dims)
        if (m != dense.dims[0]) throw DimensionError("interleave: unequal scales per dimension");
    std::vector<double> woven(dense.size());
    std::vector<std::size_t> idx(d);
    for (std::size_t flat = 0; flat < dense.size(); ++flat) {
        std::size_t t = flat;
        for (std::size_t m = d; m-- > 0;) {
            idx[m] = t % dense.dims[m];
            t /= dense.dims[m];
        }
        woven[interleave_bits(idx, n)] = dense.values[flat];
    }
    return tt_from_dense(DenseTensor(binary_dims(d * n), std::move(woven)), tol);
}

DenseTensor deinterleave(const TensorTrain& tt, std::size_t dims) {
    if (dims == 0 || tt.order() % dims != 0) throw DimensionError("deinterleave: core count not divisible");
    const std::size_t n = tt.order() / dims;
    const DenseTensor flat = tt_to_dense(tt);
    DenseTensor out(std::vector<std::size_t>(dims, std::size_t{1} << n));
    for (std::size_t code = 0; code < flat.size(); ++code) {
        const auto idx = deinterleave_bits(code, dims, n);
        out.values[out.flat_index(idx)] = flat.values[code];
    }
    return out;
}

TensorTrain encode_plain(const DenseTensor& dense, const Tolerance& tol) {
    std::size_t bits = 0;
    for (std::size_t n : dense.dims) bits += log2_exact(n);
    return tt_from_dense(DenseTensor(binary_dims(bits), dense.values), tol);
}

DenseTensor qtt_to_grid(const TensorTrain& tt, const GridDescriptor& grid) {
    if (tt.order() != grid.total_scales()) throw DimensionError("qtt_to_grid: core count does not match grid");
    if (grid.layout == Layout::interleaved) return deinterleave(tt, grid.dims());
    std::vector<std::size_t> dims;
    for (std::size_t m = 0; m < grid.dims(); ++m) dims.push_back(grid.points(m));
    return DenseTensor(dims, tt_to_dense(tt).values);
}

TensorTrain encode_qtt(const Field& f, const GridDescriptor& grid, const Tolerance& tol) {
    const DenseTensor dense = sample_grid(f, grid);
    if (grid.layout == Layout::interleaved) return interleave(dense, tol);
    if (grid.layout == Layout::tucker) throw ConfigError("encode_qtt: use encode_tucker for the Tucker layout");
    return encode_plain(dense, tol);
}

// ---- Tucker ----

std::size_t TuckerTT::parameter_count() const {
    std::size_t n = core.parameter_count();
    for (const auto& f : factors) n += f.parameter_count();
    return n;
}

std::size_t TuckerTT::max_rank() const {
    std::size_t r = core.max_rank();
    for (const auto& f : factors) r = std::max(r, f.max_rank());
    return r;
}

TuckerTT to_tucker(const DenseTensor& dense, const Tolerance& tol) {
    const std::size_t d = dense.dims.size();
    checked_volume(dense.dims);
    const double total = Eigen::Map<const Eigen::VectorXd>(dense.values.data(),
                                                           static_cast<Eigen::Index>(dense.size()))
                             .norm();
    // Budget: HOSVD legs, core TT and factor chains share the error in quadrature.
    const double leg_delta = tol.relative_epsilon * total / std::sqrt(2.0 * static_cast<double>(d));
    TuckerTT out;
    DenseTensor core = dense;
    for (std::size_t k = 0; k < d; ++k) {
        const std::size_t scales = log2_exact(dense.dims[k]);
        const RowMatrix a = unfold(dense, k);
        Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU);
        const Eigen::VectorXd sv = svd.singularValues();
        const std::size_t r = detail::choose_rank(
            std::span<const double>(sv.data(), static_cast<std::size_t>(sv.size())), leg_delta,
            tol.max_rank);
        const RowMatrix ut = svd.matrixU().leftCols(static_cast<Eigen::Index>(r)).transpose();
        core = mode_product(core, k, ut);
        std::vector<std::size_t> fdims{r};
        fdims.resize(scales + 1, 2);
        const double factor_eps =
            tol.relative_epsilon / (2.0 * std::sqrt(static_cast<double>(d * r)));
        out.factors.push_back(tt_from_dense(
            DenseTensor(fdims, std::vector<double>(ut.data(), ut.data() + ut.size())),
            Tolerance::relative(factor_eps)));
    }
    out.core = tt_from_dense(core, Tolerance{tol.relative_epsilon / 2.0, tol.max_rank});
    return out;
}

DenseTensor tucker_to_dense(const TuckerTT& t) {
    DenseTensor out = tt_to_dense(t.core);
    std::vector<std::size_t> dims;
    for (std::size_t k = 0; k < t.dims(); ++k) dims.push_back(std::size_t{1} << t.scales(k));
    checked_volume(dims);
    for (std::size_t k = 0; k < t.dims(); ++k) {
        const DenseTensor u = tt_to_dense(t.factors[k]);
        const auto r = static_cast<Eigen::Index>(u.dims[0]);
        const auto n = static_cast<Eigen::Index>(u.size()) / r;
        const RowMatrix m = Eigen::Map<const RowMatrix>(u.values.data(), r, n).transpose();
        out = mode_product(out, k, m);
    }
    return out;
}

double tucker_eval(const TuckerTT& t, std::span<const std::size_t> index) {
    if (index.size() != t.dims()) throw DimensionError("tucker_eval: index order mismatch");
    std::vector<double> env{1.0};
    for (std::size_t k = 0; k < t.dims(); ++k) {
        const std::size_t n = t.scales(k);
        if (index[k] >= (std::size_t{1} << n)) throw DimensionError("tucker_eval: index out of range");
        std::vector<std::size_t> bits(n);
        for (std::size_t b = 0; b < n; ++b) bits[b] = (index[k] >> (n - 1 - b)) & 1U;
        const auto u = factor_column(t.factors[k], bits);
        const Core& c = t.core.core(k);
        std::vector<double> next(c.right(), 0.0);
        for (std::size_t l = 0; l < c.left(); ++l)
            for (std::size_t g = 0; g < c.mode(); ++g) {
                const double w = env[l] * u[g];
                if (w == 0.0) continue;
                for (std::size_t r = 0; r < c.right(); ++r) next[r] += w * c(l, g, r);
            }
        env.swap(next);
    }
    return env[0];
}

TuckerTT encode_tucker(const Field& f, const GridDescriptor& grid, const Tolerance& tol) {
    return to_tucker(sample_grid(f, grid), tol);
}

TuckerTT tucker_add(const TuckerTT& a, const TuckerTT& b) {
    if (a.dims() != b.dims()) throw DimensionError("tucker_add: dimension counts differ");
    TuckerTT out;
    const auto ra = a.tucker_ranks(), rb = b.tucker_ranks();
    std::vector<Core> ca, cb;
    for (std::size_t k = 0; k < a.dims(); ++k) {
        if (a.scales(k) != b.scales(k)) throw DimensionError("tucker_add: scales differ");
        const std::size_t w = ra[k] + rb[k];
        ca.push_back(widen_mode(a.core.core(k), w, 0));
        cb.push_back(widen_mode(b.core.core(k), w, ra[k]));
        out.factors.push_back(add(widen_first(a.factors[k], w, 0), widen_first(b.factors[k], w, ra[k])));
    }
    out.core = add(TensorTrain(std::move(ca)), TensorTrain(std::move(cb)));
    return out;
}

TuckerTT tucker_scale(const TuckerTT& a, double c) {
    TuckerTT out = a;
    out.core = scale(a.core, c);
    return out;
}

TuckerTT tucker_round(const TuckerTT& t, const Tolerance& tol) {
    const std::size_t d = t.dims();
    TuckerTT out = t;
    // 1. Compress each chain, make its rows orthonormal, move the transfer
    //    matrix into the core.
    for (std::size_t k = 0; k < d; ++k) {
        TensorTrain& f = out.factors[k];
        const std::size_t r = f.core(0).mode();
        const double eps = tol.relative_epsilon / std::sqrt(3.0 * static_cast<double>(d * r));
        f = round(f, Tolerance::relative(eps));
        for (std::size_t c = f.order(); c-- > 1;) detail::right_orthogonalize(f.cores(), c);
        const Core& first = f.core(0);
        const RowMatrix cm = Eigen::Map<const RowMatrix>(first.data().data(),
                                                         static_cast<Eigen::Index>(first.mode()),
                                                         static_cast<Eigen::Index>(first.right()));
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(cm, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd sv = svd.singularValues();
        const std::size_t keep = detail::choose_rank(
            std::span<const double>(sv.data(), static_cast<std::size_t>(sv.size())), 0.0, std::nullopt);
        const auto kk = static_cast<Eigen::Index>(keep);
        const RowMatrix ws = svd.matrixU().leftCols(kk) * sv.head(kk).asDiagonal();
        const RowMatrix vt = svd.matrixV().leftCols(kk).transpose();
        f.core(0) = Core(1, keep, first.right(), std::vector<double>(vt.data(), vt.data() + vt.size()));
        absorb_into_mode(out.core, k, ws);
    }
    const double total = norm2(out.core);
    if (total == 0.0) {
        for (auto& f : out.factors) {
            auto dims = f.dims();
            dims[0] = 1;
            f = TensorTrain::zeros(dims);
        }
        out.core = TensorTrain::zeros(std::vector<std::size_t>(d, 1));
        return out;
    }
    // 2. Truncate every Tucker leg at the core's orthogonality center.
    const double delta = tol.relative_epsilon * total / std::sqrt(3.0 * static_cast<double>(d));
    std::vector<Core>& cc = out.core.cores();
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t c = d; c-- > k + 1;) detail::right_orthogonalize(cc, c);
        for (std::size_t c = 0; c < k; ++c) detail::left_orthogonalize(cc, c);
        const Core& center = cc[k];
        // Leg-major matricization: rows g, columns (l, r).
        RowMatrix m(center.mode(), center.left() * center.right());
        for (std::size_t l = 0; l < center.left(); ++l)
            for (std::size_t g = 0; g < center.mode(); ++g)
                for (std::size_t r = 0; r < center.right(); ++r)
                    m(g, l * center.right() + r) = center(l, g, r);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const Eigen::VectorXd sv = svd.singularValues();
        const std::size_t keep = detail::choose_rank(
            std::span<const double>(sv.data(), static_cast<std::size_t>(sv.size())), delta, tol.max_rank);
        const auto kk = static_cast<Eigen::Index>(keep);
        const RowMatrix p = svd.matrixU().leftCols(kk);
        const RowMatrix reduced = p.transpose() * m;
        Core next(center.left(), keep, center.right());
        for (std::size_t l = 0; l < center.left(); ++l)
            for (std::size_t g = 0; g < keep; ++g)
                for (std::size_t r = 0; r < center.right(); ++r)
                    next(l, g, r) = reduced(static_cast<Eigen::Index>(g),
                                            static_cast<Eigen::Index>(l * center.right() + r));
        cc[k] = std::move(next);
        left_multiply_leg(out.factors[k], p.transpose());
    }
    // 3. Core bonds.
    out.core = round(out.core, Tolerance{tol.relative_epsilon / std::sqrt(3.0), tol.max_rank});
    return out;
}

double tucker_norm(const TuckerTT& t) {
    return norm2(tucker_round(t, Tolerance::exact()).core);
}

} // namespace qtti
