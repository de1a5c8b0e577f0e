#pragma once

#include "qnc/common.hpp"

#include <iosfwd>
#include <string>
#include <string_view>

namespace qnc::text_io {

// Lossless decimal form of a double (17 significant digits).
std::string format_double(double value);

// A named dense block:
//   <name> <rows> <cols>
//   one row per line, space separated, 17 significant digits
void write_matrix(std::ostream& os, std::string_view name, const Matrix& m);
Matrix read_matrix(std::istream& is, std::string_view name);

void write_vector(std::ostream& os, std::string_view name, const Vector& v);
Vector read_vector(std::istream& is, std::string_view name);

// Reads "<key> <value>" and checks the key.
double read_scalar(std::istream& is, std::string_view key);
void expect_token(std::istream& is, std::string_view token);

}  // namespace qnc::text_io
