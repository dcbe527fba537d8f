#pragma once

// Text formats.
//
//   ARRV1            MATV1
//   dims m1 ... mi   dims r c
//   <m reals>        <r*c reals, row-major>
//
// ARRV1 values are in rvec order. Several ARRV1 arrays may be concatenated
// in one stream, separated by blank lines. Writers emit 17 significant
// digits so values round-trip exactly.

#include <charconv>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "arrayvariate/array.hpp"
#include "arrayvariate/errors.hpp"
#include "arrayvariate/matrix.hpp"

namespace arrayvariate {

namespace detail {

struct Token {
  std::string text;
  std::size_t line;
};

/// Whitespace tokenizer that remembers line numbers.
class TokenReader {
 public:
  TokenReader(std::istream& in, std::string source) : source_(std::move(source)) {
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      std::istringstream ls(line);
      std::string tok;
      while (ls >> tok) tokens_.push_back({tok, lineno});
    }
    last_line_ = lineno;
  }

  bool done() const noexcept { return pos_ >= tokens_.size(); }
  const Token& peek() const { return tokens_[pos_]; }

  const Token& next(std::string_view expecting) {
    if (done()) fail(last_line_, "unexpected end of input, expected " + std::string(expecting));
    return tokens_[pos_++];
  }

  [[noreturn]] void fail(std::size_t line, const std::string& what) const {
    throw FormatError(source_, line, what);
  }

  void expect_keyword(std::string_view kw) {
    const Token& t = next(kw);
    if (t.text != kw) fail(t.line, "expected '" + std::string(kw) + "', found '" + t.text + "'");
  }

  double real() {
    const Token& t = next("a real number");
    double v = 0.0;
    const char* b = t.text.data();
    const char* e = b + t.text.size();
    if (*b == '+') ++b;
    const auto [ptr, ec] = std::from_chars(b, e, v);
    if (ec != std::errc() || ptr != e) fail(t.line, "malformed real '" + t.text + "'");
    return v;
  }

  std::size_t positive_integer() {
    const Token& t = next("a positive integer");
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || ptr != t.text.data() + t.text.size() || v == 0)
      fail(t.line, "expected a positive integer, found '" + t.text + "'");
    return v;
  }

  /// Reads the integers remaining on the current token's line.
  std::vector<std::size_t> integers_on_line(std::size_t line) {
    std::vector<std::size_t> out;
    while (!done() && peek().line == line) out.push_back(positive_integer());
    return out;
  }

 private:
  std::string source_;
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::size_t last_line_ = 0;
};

inline DataArray read_one_array(TokenReader& r) {
  r.expect_keyword("ARRV1");
  const Token& dims_tok = r.next("dims");
  if (dims_tok.text != "dims") r.fail(dims_tok.line, "expected 'dims', found '" + dims_tok.text + "'");
  const std::size_t line = dims_tok.line;
  std::vector<std::size_t> dims = r.integers_on_line(line);
  if (dims.empty()) r.fail(line, "'dims' needs at least one extent");
  Shape shape;
  try {
    shape = Shape(dims);
  } catch (const ShapeError& e) {
    r.fail(line, e.what());
  }
  Vector data(shape.size());
  for (double& v : data) v = r.real();
  return DataArray(shape, std::move(data));
}

}  // namespace detail

/// Reads every ARRV1 array in `in`. `source` names the input in errors.
inline std::vector<DataArray> read_arrays(std::istream& in, const std::string& source = "<input>") {
  detail::TokenReader r(in, source);
  std::vector<DataArray> out;
  while (!r.done()) out.push_back(detail::read_one_array(r));
  return out;
}

/// Reads exactly one ARRV1 array.
inline DataArray read_array(std::istream& in, const std::string& source = "<input>") {
  detail::TokenReader r(in, source);
  DataArray a = detail::read_one_array(r);
  if (!r.done()) r.fail(r.peek().line, "trailing content after array");
  return a;
}

inline void write_array(std::ostream& out, const DataArray& a) {
  const auto old = out.precision(17);
  out << "ARRV1\ndims";
  for (std::size_t d : a.shape().dims()) out << ' ' << d;
  out << '\n';
  // One mode-1 fiber per line.
  const std::size_t row = a.shape().extent(1);
  for (std::size_t k = 0; k < a.size(); ++k) {
    out << a[k];
    out << ((k + 1) % row == 0 ? '\n' : ' ');
  }
  out.precision(old);
}

/// Writes arrays separated by blank lines; nothing for an empty list.
inline void write_arrays(std::ostream& out, const std::vector<DataArray>& arrays) {
  for (std::size_t k = 0; k < arrays.size(); ++k) {
    if (k) out << '\n';
    write_array(out, arrays[k]);
  }
}

inline DenseMatrix read_matrix(std::istream& in, const std::string& source = "<input>") {
  detail::TokenReader r(in, source);
  r.expect_keyword("MATV1");
  const detail::Token& dims_tok = r.next("dims");
  if (dims_tok.text != "dims") r.fail(dims_tok.line, "expected 'dims', found '" + dims_tok.text + "'");
  const std::size_t line = dims_tok.line;
  const auto dims = r.integers_on_line(line);
  if (dims.size() != 2) r.fail(line, "matrix 'dims' needs exactly two extents");
  std::vector<double> values(dims[0] * dims[1]);
  for (double& v : values) v = r.real();
  if (!r.done()) r.fail(r.peek().line, "trailing content after matrix");
  return DenseMatrix::from_rows(dims[0], dims[1], std::move(values));
}

inline void write_matrix(std::ostream& out, const DenseMatrix& a) {
  const auto old = out.precision(17);
  out << "MATV1\ndims " << a.rows() << ' ' << a.cols() << '\n';
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out << a(i, j) << (j + 1 == a.cols() ? '\n' : ' ');
  out.precision(old);
}

}  // namespace arrayvariate
