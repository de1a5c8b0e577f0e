#include "qnc/text_io.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace qnc::text_io {

std::string format_double(double value) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10) << value;
  return os.str();
}

void expect_token(std::istream& is, std::string_view token) {
  std::string got;
  if (!(is >> got) || got != token) {
    throw std::invalid_argument("expected '" + std::string(token) + "', got '" +
                                got + "'");
  }
}

double read_scalar(std::istream& is, std::string_view key) {
  expect_token(is, key);
  double value = 0.0;
  if (!(is >> value)) {
    throw std::invalid_argument("missing value for '" + std::string(key) + "'");
  }
  return value;
}

void write_matrix(std::ostream& os, std::string_view name, const Matrix& m) {
  os << name << ' ' << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j));
    }
    os << '\n';
  }
}

Matrix read_matrix(std::istream& is, std::string_view name) {
  expect_token(is, name);
  Eigen::Index rows = 0, cols = 0;
  if (!(is >> rows >> cols) || rows < 0 || cols < 0) {
    throw std::invalid_argument("bad dimensions for '" + std::string(name) + "'");
  }
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      if (!(is >> m(i, j))) {
        throw std::invalid_argument("truncated matrix '" + std::string(name) + "'");
      }
    }
  }
  return m;
}

void write_vector(std::ostream& os, std::string_view name, const Vector& v) {
  os << name << ' ' << v.size() << '\n';
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) os << ' ';
    os << format_double(v(i));
  }
  os << '\n';
}

Vector read_vector(std::istream& is, std::string_view name) {
  expect_token(is, name);
  Eigen::Index size = 0;
  if (!(is >> size) || size < 0) {
    throw std::invalid_argument("bad length for '" + std::string(name) + "'");
  }
  Vector v(size);
  for (Eigen::Index i = 0; i < size; ++i) {
    if (!(is >> v(i))) {
      throw std::invalid_argument("truncated vector '" + std::string(name) + "'");
    }
  }
  return v;
}

}  // namespace qnc::text_io
