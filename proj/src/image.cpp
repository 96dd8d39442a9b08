#include "qtti/image.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qtti/encoders.hpp"
#include "qtti/errors.hpp"

namespace qtti {

namespace {

// Next header token, skipping whitespace and '#' comments.
std::string pgm_token(std::istream& in) {
    std::string tok;
    char c;
    while (in.get(c)) {
        if (c == '#') {
            std::string rest;
            std::getline(in, rest);
            continue;
        }
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!tok.empty()) return tok;
            continue;
        }
        tok.push_back(c);
    }
    if (tok.empty()) throw IoError("pgm: truncated header");
    return tok;
}

std::size_t parse_size(const std::string& s, const char* what) {
    try {
        std::size_t pos = 0;
        const auto v = std::stoul(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw IoError(std::string("pgm: bad ") + what + " '" + s + "'");
    }
}

} // namespace

DenseTensor read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("pgm: cannot open " + path);
    if (pgm_token(in) != "P5") throw IoError("pgm: only binary P5 is supported");
    const std::size_t w = parse_size(pgm_token(in), "width");
    const std::size_t h = parse_size(pgm_token(in), "height");
    const std::size_t maxval = parse_size(pgm_token(in), "maxval");
    if (w == 0 || h == 0 || maxval == 0 || maxval > 65535) throw IoError("pgm: bad dimensions or maxval");
    const std::size_t bytes = maxval < 256 ? 1 : 2;
    std::vector<unsigned char> raw(w * h * bytes);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw IoError("pgm: truncated pixel data");
    DenseTensor img({h, w});
    for (std::size_t i = 0; i < w * h; ++i)
        img.values[i] = bytes == 1 ? raw[i] : static_cast<double>(raw[2 * i] << 8 | raw[2 * i + 1]);
    return img;
}

void write_pgm(const std::string& path, const DenseTensor& image, unsigned maxval) {
    if (image.dims.size() != 2) throw DimensionError("pgm: image must be 2D");
    if (maxval == 0 || maxval > 65535) throw ConfigError("pgm: maxval must be in 1..65535");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("pgm: cannot write " + path);
    out << "P5\n" << image.dims[1] << " " << image.dims[0] << "\n" << maxval << "\n";
    for (double v : image.values) {
        const auto q = static_cast<unsigned>(std::clamp(std::lround(v), 0L, static_cast<long>(maxval)));
        if (maxval < 256) {
            out.put(static_cast<char>(q));
        } else {
            out.put(static_cast<char>(q >> 8));
            out.put(static_cast<char>(q & 0xFF));
        }
    }
    if (!out) throw IoError("pgm: write failed for " + path);
}

void write_dense(const std::string& path, const DenseTensor& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("dense: cannot write " + path);
    out << "float64 " << t.dims.size();
    for (auto d : t.dims) out << " " << d;
    out << "\n";
    out.write(reinterpret_cast<const char*>(t.values.data()),
              static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (!out) throw IoError("dense: write failed for " + path);
}

DenseTensor read_dense(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("dense: cannot open " + path);
    std::string line;
    std::getline(in, line);
    std::istringstream hdr(line);
    std::string tag;
    std::size_t rank = 0;
    if (!(hdr >> tag >> rank) || tag != "float64") throw IoError("dense: bad header in " + path);
    std::vector<std::size_t> dims(rank);
    for (auto& d : dims)
        if (!(hdr >> d)) throw IoError("dense: bad header in " + path);
    DenseTensor t(dims);
    in.read(reinterpret_cast<char*>(t.values.data()), static_cast<std::streamsize>(t.values.size() * sizeof(double)));
    if (in.gcount() != static_cast<std::streamsize>(t.values.size() * sizeof(double)))
        throw IoError("dense: truncated data in " + path);
    return t;
}

bool is_dyadic_square(const DenseTensor& image) {
    return image.dims.size() == 2 && image.dims[0] == image.dims[1] && std::has_single_bit(image.dims[0]);
}

DenseTensor pad_to_dyadic(const DenseTensor& image) {
    if (image.dims.size() != 2) throw DimensionError("pad: image must be 2D");
    const std::size_t h = image.dims[0], w = image.dims[1];
    const std::size_t side = std::bit_ceil(std::max(h, w));
    DenseTensor out({side, side});
    for (std::size_t i = 0; i < side; ++i)
        for (std::size_t j = 0; j < side; ++j)
            out.values[i * side + j] = image.values[std::min(i, h - 1) * w + std::min(j, w - 1)];
    return out;
}

SuperResolution super_resolve(const DenseTensor& image, std::size_t m, const Kernel& kernel, const Tolerance& tol,
                              GhostFill ghost) {
    if (!is_dyadic_square(image))
        throw DimensionError("superres: image must be a 2^n x 2^n square (pad it first)");
    SuperResolution s;
    s.coarse_scales = static_cast<std::size_t>(std::countr_zero(image.dims[0]));
    s.extra_scales = m;
    checked_volume(std::vector<std::size_t>{image.dims[0] << m, image.dims[0] << m});
    s.coarse = interleave(image, tol);
    if (m == 0) {
        s.fine = s.coarse;
        return s;
    }
    TTIOptions options;
    options.boundary = Boundary::clamped;
    options.ghost = ghost;
    const auto op = build_tti_multidim_interleaved(kernel, 2, s.coarse_scales, m, {0, 0}, options);
    s.fine = apply_tti(op, s.coarse, tol);
    return s;
}

double l2_percent_error(const DenseTensor& a, const DenseTensor& b) {
    if (a.dims != b.dims) throw DimensionError("l2 error: shapes differ");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const double d = a.values[i] - b.values[i];
        num += d * d;
        den += b.values[i] * b.values[i];
    }
    return 100.0 * std::sqrt(num / den);
}

} // namespace qtti
