#ifndef HODGELAB_IO_HPP_
#define HODGELAB_IO_HPP_

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "hodgelab/grid.hpp"
#include "hodgelab/types.hpp"

namespace hodgelab {

/// Compile an arithmetic expression over x1, x2, x3 into a callable.
/// Grammar: numbers, pi, + - * / ^, parentheses, unary minus, and the
/// functions sin, cos, tan, exp, log, sqrt, abs.
ScalarField parse_expression(const std::string& expr);

/// Parsed key = value config file.  '#' starts a comment; values keep
/// their raw text so numeric lists and expressions are read on demand.
class Config {
 public:
  static Config from_file(const std::string& path);
  static Config from_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& key) const;
  const std::string& raw(const std::string& key) const;  // throws on missing key

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;     // empty if missing
  std::vector<long> get_longs(const std::string& key) const;

  /// FNV-1a over the raw file bytes, as a 16-digit hex string.
  const std::string& hash() const { return hash_; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// grid.* keys -> GridSpec; eps.expr / mu.expr (optionally eps.expr.<axis>)
  /// -> MaterialField.
  GridSpec grid_spec() const;
  MaterialField material() const;

 private:
  std::map<std::string, std::string> entries_;
  std::string hash_;
  std::string origin_;
};

/// Matrix Market exchange format, coordinate (sparse) and array (dense
/// vector) flavours, 1-based indices.
SpMat read_matrix_market(const std::string& path);
void write_matrix_market(const std::string& path, const SpMat& a);
Vec read_vector_market(const std::string& path);
void write_vector_market(const std::string& path, const Vec& v);

/// FNV-1a 64-bit hash as 16 hex digits.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace hodgelab

#endif  // HODGELAB_IO_HPP_
