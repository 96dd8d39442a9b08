#include "qtti/serialization.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "qtti/errors.hpp"

namespace qtti {

namespace {

constexpr char kMagic[4] = {'T', 'T', 'v', '1'};
constexpr std::uint64_t kEndianTag = 0x0102030405060708ULL;

static_assert(std::endian::native == std::endian::little,
              "serialization assumes a little-endian host");

void put_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t get_u64(std::istream& in) {
    std::uint64_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) {
        throw IoError("truncated TT stream");
    }
    return v;
}

void put_values(std::ostream& out, std::span<const double> v) {
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(v.size() * sizeof(double)));
}

std::vector<double> get_values(std::istream& in, std::size_t n) {
    std::vector<double> v(n);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(n * sizeof(double)));
    if (!in) {
        throw IoError("truncated TT stream");
    }
    return v;
}

// Returns the mode flag after validating magic and endianness.
std::uint64_t read_header(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("not a TTv1 stream");
    }
    if (get_u64(in) != kEndianTag) {
        throw IoError("TTv1 endianness tag mismatch");
    }
    return get_u64(in);
}

std::size_t bounded(std::uint64_t v) {
    // Guards against allocating from a corrupt header.
    if (v > (std::uint64_t{1} << 32)) {
        throw IoError("implausible size in TT header");
    }
    return static_cast<std::size_t>(v);
}

} // namespace

void write_tt(std::ostream& out, const TensorTrain& tt) {
    out.write(kMagic, 4);
    put_u64(out, kEndianTag);
    put_u64(out, 0);
    put_u64(out, tt.order());
    for (std::size_t n : tt.dims()) {
        put_u64(out, n);
    }
    for (std::size_t r : tt.ranks()) {
        put_u64(out, r);
    }
    for (const Core& c : tt.cores()) {
        put_values(out, c.data());
    }
    if (!out) {
        throw IoError("failed writing TT stream");
    }
}

void write_operator(std::ostream& out, const TTOperator& op) {
    out.write(kMagic, 4);
    put_u64(out, kEndianTag);
    put_u64(out, 1);
    put_u64(out, op.order());
    for (std::size_t n : op.row_dims()) {
        put_u64(out, n);
    }
    for (std::size_t n : op.col_dims()) {
        put_u64(out, n);
    }
    for (std::size_t r : op.ranks()) {
        put_u64(out, r);
    }
    for (const OperatorCore& c : op.cores()) {
        put_values(out, c.data());
    }
    if (!out) {
        throw IoError("failed writing TT stream");
    }
}

TensorTrain read_tt(std::istream& in) {
    if (read_header(in) != 0) {
        throw IoError("stream holds an operator, expected a tensor train");
    }
    const std::size_t d = bounded(get_u64(in));
    std::vector<std::size_t> dims(d), ranks(d + 1);
    for (auto& n : dims) {
        n = bounded(get_u64(in));
    }
    for (auto& r : ranks) {
        r = bounded(get_u64(in));
    }
    std::vector<Core> cores;
    for (std::size_t k = 0; k < d; ++k) {
        cores.emplace_back(ranks[k], dims[k], ranks[k + 1],
                           get_values(in, ranks[k] * dims[k] * ranks[k + 1]));
    }
    return TensorTrain(std::move(cores));
}

TTOperator read_operator(std::istream& in) {
    if (read_header(in) != 1) {
        throw IoError("stream holds a tensor train, expected an operator");
    }
    const std::size_t d = bounded(get_u64(in));
    std::vector<std::size_t> rows(d), cols(d), ranks(d + 1);
    for (auto& n : rows) {
        n = bounded(get_u64(in));
    }
    for (auto& n : cols) {
        n = bounded(get_u64(in));
    }
    for (auto& r : ranks) {
        r = bounded(get_u64(in));
    }
    std::vector<OperatorCore> cores;
    for (std::size_t k = 0; k < d; ++k) {
        cores.emplace_back(ranks[k], rows[k], cols[k], ranks[k + 1],
                           get_values(in, ranks[k] * rows[k] * cols[k] * ranks[k + 1]));
    }
    return TTOperator(std::move(cores));
}

void save_tt(const std::string& path, const TensorTrain& tt) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_tt(out, tt);
}

TensorTrain load_tt(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return read_tt(in);
}

void save_operator(const std::string& path, const TTOperator& op) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_operator(out, op);
}

TTOperator load_operator(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return read_operator(in);
}

void write_tucker(std::ostream& out, const TuckerTT& t) {
    write_tt(out, t.core);
    for (const auto& f : t.factors) {
        write_tt(out, f);
    }
}

TuckerTT read_tucker(std::istream& in) {
    TuckerTT t;
    t.core = read_tt(in);
    for (std::size_t k = 0; k < t.core.order(); ++k) {
        t.factors.push_back(read_tt(in));
        if (t.factors.back().dims().front() != t.core.dims()[k]) {
            throw IoError("Tucker factor leg does not match the core");
        }
    }
    return t;
}

void save_tucker(const std::string& path, const TuckerTT& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot open " + path + " for writing");
    }
    write_tucker(out, t);
}

TuckerTT load_tucker(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path);
    }
    return read_tucker(in);
}

} // namespace qtti
