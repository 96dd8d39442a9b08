#pragma once

#include <iosfwd>
#include <string>

#include "qtti/encoders.hpp"
#include "qtti/tensor_train.hpp"

namespace qtti {

// Binary container: "TTv1", u64 endianness tag, u64 mode flag (0 = TT,
// 1 = operator), u64 d, dims (rows then cols for operators), ranks r_0..r_d,
// then every core as row-major little-endian f64.

void write_tt(std::ostream& out, const TensorTrain& tt);
void write_operator(std::ostream& out, const TTOperator& op);
TensorTrain read_tt(std::istream& in);
TTOperator read_operator(std::istream& in);

void save_tt(const std::string& path, const TensorTrain& tt);
TensorTrain load_tt(const std::string& path);
void save_operator(const std::string& path, const TTOperator& op);
TTOperator load_operator(const std::string& path);

/// Tucker: the core TT followed by one factor TT per leg, back to back.
void write_tucker(std::ostream& out, const TuckerTT& t);
TuckerTT read_tucker(std::istream& in);
void save_tucker(const std::string& path, const TuckerTT& t);
TuckerTT load_tucker(const std::string& path);

} // namespace qtti
