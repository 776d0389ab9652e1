#include "hodgelab/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <memory>
#include <sstream>

namespace hodgelab {

// ---------------------------------------------------------------------------
// expression language
// ---------------------------------------------------------------------------

namespace {

struct Expr {
  virtual ~Expr() = default;
  virtual double eval(double x1, double x2, double x3) const = 0;
};
using ExprPtr = std::shared_ptr<const Expr>;

struct Num : Expr {
  double v;
  explicit Num(double val) : v(val) {}
  double eval(double, double, double) const override { return v; }
};

struct Var : Expr {
  int which;  // 0,1,2
  explicit Var(int w) : which(w) {}
  double eval(double x1, double x2, double x3) const override {
    return which == 0 ? x1 : which == 1 ? x2 : x3;
  }
};

struct Unary : Expr {
  double (*fn)(double);
  ExprPtr arg;
  Unary(double (*f)(double), ExprPtr a) : fn(f), arg(std::move(a)) {}
  double eval(double a, double b, double c) const override { return fn(arg->eval(a, b, c)); }
};

struct Binary : Expr {
  char op;
  ExprPtr lhs, rhs;
  Binary(char o, ExprPtr l, ExprPtr r) : op(o), lhs(std::move(l)), rhs(std::move(r)) {}
  double eval(double a, double b, double c) const override {
    const double x = lhs->eval(a, b, c), y = rhs->eval(a, b, c);
    switch (op) {
      case '+': return x + y;
      case '-': return x - y;
      case '*': return x * y;
      case '/': return x / y;
      default: return std::pow(x, y);
    }
  }
};

class ExprParser {
 public:
  explicit ExprParser(const std::string& s) : s_(s) {}

  ExprPtr parse() {
    ExprPtr e = sum();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw StructuralError("expression '" + s_ + "' at position " + std::to_string(pos_) +
                          ": " + msg);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  ExprPtr sum() {
    ExprPtr e = product();
    for (;;) {
      if (eat('+'))
        e = std::make_shared<Binary>('+', e, product());
      else if (eat('-'))
        e = std::make_shared<Binary>('-', e, product());
      else
        return e;
    }
  }

  ExprPtr product() {
    ExprPtr e = power();
    for (;;) {
      if (eat('*'))
        e = std::make_shared<Binary>('*', e, power());
      else if (eat('/'))
        e = std::make_shared<Binary>('/', e, power());
      else
        return e;
    }
  }

  ExprPtr power() {
    ExprPtr base = atom();
    if (eat('^')) return std::make_shared<Binary>('^', base, power());  // right-assoc
    return base;
  }

  ExprPtr atom() {
    skip();
    // Unary minus binds looser than '^': -x^2 reads as -(x^2).
    if (eat('-')) return std::make_shared<Binary>('-', std::make_shared<Num>(0.0), power());
    if (eat('(')) {
      ExprPtr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return std::make_shared<Num>(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t end = pos_;
      while (end < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
        ++end;
      std::string name = s_.substr(pos_, end - pos_);
      pos_ = end;
      if (name == "x1") return std::make_shared<Var>(0);
      if (name == "x2") return std::make_shared<Var>(1);
      if (name == "x3") return std::make_shared<Var>(2);
      if (name == "pi") return std::make_shared<Num>(M_PI);
      static const std::map<std::string, double (*)(double)> fns = {
          {"sin", std::sin}, {"cos", std::cos}, {"tan", std::tan},  {"exp", std::exp},
          {"log", std::log}, {"sqrt", std::sqrt}, {"abs", std::fabs}};
      auto it = fns.find(name);
      if (it == fns.end()) fail("unknown identifier '" + name + "'");
      if (!eat('(')) fail("expected '(' after '" + name + "'");
      ExprPtr arg = sum();
      if (!eat(')')) fail("expected ')'");
      return std::make_shared<Unary>(it->second, arg);
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

ScalarField parse_expression(const std::string& expr) {
  ExprPtr e = ExprParser(expr).parse();
  return [e](double x1, double x2, double x3) { return e->eval(x1, x2, x3); };
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::from_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  cfg.hash_ = fnv1a_hex(text);
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw StructuralError(origin + ":" + std::to_string(lineno) +
                            ": expected 'key = value', got '" + t + "'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw StructuralError(origin + ":" + std::to_string(lineno) + ": empty key");
    cfg.entries_[key] = value;
  }
  return cfg;
}

Config Config::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

const std::string& Config::raw(const std::string& key) const {
  auto it = entries_.find(key);
  if (it == entries_.end())
    throw StructuralError(origin_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stod(it->second);
  } catch (const std::exception&) {
    throw StructuralError(origin_ + ": key '" + key + "': not a number: '" + it->second + "'");
  }
}

long Config::get_long(const std::string& key, long fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  try {
    return std::stol(it->second);
  } catch (const std::exception&) {
    throw StructuralError(origin_ + ": key '" + key + "': not an integer: '" + it->second +
                          "'");
  }
}

std::vector<double> Config::get_doubles(const std::string& key) const {
  std::vector<double> out;
  if (!has(key)) return out;
  std::istringstream in(raw(key));
  std::string tok;
  while (in >> tok) {
    try {
      out.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw StructuralError(origin_ + ": key '" + key + "': not a number: '" + tok + "'");
    }
  }
  return out;
}

std::vector<long> Config::get_longs(const std::string& key) const {
  std::vector<long> out;
  for (double v : get_doubles(key)) out.push_back(static_cast<long>(v));
  return out;
}

GridSpec Config::grid_spec() const {
  GridSpec spec;
  // The bare key names are the documented grammar; the 'grid.' prefix is
  // accepted as an alias.
  const auto pick = [this](const std::string& bare) {
    return has(bare) ? bare : std::string("grid.") + bare;
  };
  const auto cells = get_longs(pick("cells"));
  if (!cells.empty()) {
    if (cells.size() != 3)
      throw StructuralError(origin_ + ": cells needs exactly 3 values");
    for (int a = 0; a < 3; ++a) spec.cells[a] = cells[a];
  }
  const auto lengths = get_doubles(pick("lengths"));
  if (!lengths.empty()) {
    if (lengths.size() != 3)
      throw StructuralError(origin_ + ": lengths needs exactly 3 values");
    for (int a = 0; a < 3; ++a) spec.lengths[a] = lengths[a];
  }
  const std::string topo = get_string(pick("topology"), "box");
  if (topo == "torus")
    spec.topology = Topology::Torus;
  else if (topo == "box")
    spec.topology = Topology::Box;
  else
    throw StructuralError(origin_ + ": grid.topology must be 'box' or 'torus'");
  static const char* faces[6] = {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  for (int f = 0; f < 6; ++f) {
    std::string key = std::string("bc.") + faces[f];
    if (!has(key)) key = std::string("grid.") + key;
    if (!has(key)) continue;
    if (spec.topology == Topology::Torus)
      throw StructuralError(origin_ + ": torus topology carries no bc map ('" + key + "')");
    const std::string& v = raw(key);
    if (v == "tangential")
      spec.bc[f] = FaceBc::Tangential;
    else if (v == "normal")
      spec.bc[f] = FaceBc::Normal;
    else
      throw StructuralError(origin_ + ": " + key + " must be 'tangential' or 'normal'");
  }
  spec.validate();
  return spec;
}

MaterialField Config::material() const {
  MaterialField mat;
  static const char* axes[3] = {"1", "2", "3"};
  for (int a = 0; a < 3; ++a) {
    if (has("eps.expr")) mat.eps[a] = parse_expression(raw("eps.expr"));
    if (has(std::string("eps.expr.x") + axes[a]))
      mat.eps[a] = parse_expression(raw(std::string("eps.expr.x") + axes[a]));
    if (has("mu.expr")) mat.mu[a] = parse_expression(raw("mu.expr"));
    if (has(std::string("mu.expr.x") + axes[a]))
      mat.mu[a] = parse_expression(raw(std::string("mu.expr.x") + axes[a]));
  }
  return mat;
}

// ---------------------------------------------------------------------------
// matrix market
// ---------------------------------------------------------------------------

namespace {

std::ifstream open_mm(const std::string& path, std::string& header) {
  std::ifstream in(path);
  if (!in) throw StructuralError("cannot open matrix market file '" + path + "'");
  if (!std::getline(in, header) || header.rfind("%%MatrixMarket", 0) != 0)
    throw StructuralError("'" + path + "': missing %%MatrixMarket header");
  return in;
}

void skip_comments(std::ifstream& in, std::string& line) {
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '%') return;
  line.clear();
}

}  // namespace

SpMat read_matrix_market(const std::string& path) {
  std::string header;
  std::ifstream in = open_mm(path, header);
  if (header.find("coordinate") == std::string::npos)
    throw StructuralError("'" + path + "': expected coordinate format");
  std::string line;
  skip_comments(in, line);
  std::istringstream sizes(line);
  Index rows = 0, cols = 0, nnz = 0;
  if (!(sizes >> rows >> cols >> nnz))
    throw StructuralError("'" + path + "': bad size line '" + line + "'");
  std::vector<Triplet> trip;
  trip.reserve(nnz);
  for (Index e = 0; e < nnz; ++e) {
    Index i = 0, j = 0;
    double v = 0.0;
    if (!(in >> i >> j >> v))
      throw StructuralError("'" + path + "': truncated entry list");
    if (i < 1 || i > rows || j < 1 || j > cols)
      throw StructuralError("'" + path + "': index out of range in entry " +
                            std::to_string(e + 1));
    trip.emplace_back(i - 1, j - 1, v);
  }
  SpMat a(rows, cols);
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

void write_matrix_market(const std::string& path, const SpMat& a) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  out.precision(17);
  for (Index k = 0; k < a.outerSize(); ++k)
    for (SpMat::InnerIterator it(a, k); it; ++it)
      out << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
}

Vec read_vector_market(const std::string& path) {
  std::string header;
  std::ifstream in = open_mm(path, header);
  std::string line;
  skip_comments(in, line);
  std::istringstream sizes(line);
  if (header.find("array") != std::string::npos) {
    Index rows = 0, cols = 0;
    if (!(sizes >> rows >> cols) || cols != 1)
      throw StructuralError("'" + path + "': expected an n-by-1 array");
    Vec v(rows);
    for (Index i = 0; i < rows; ++i)
      if (!(in >> v(i))) throw StructuralError("'" + path + "': truncated array");
    return v;
  }
  in.close();
  SpMat a = read_matrix_market(path);
  if (a.cols() != 1)
    throw StructuralError("'" + path + "': expected a single-column matrix");
  return Vec(Mat(a).col(0));
}

void write_vector_market(const std::string& path, const Vec& v) {
  std::ofstream out(path);
  if (!out) throw StructuralError("cannot write '" + path + "'");
  out << "%%MatrixMarket matrix array real general\n";
  out << v.size() << " 1\n";
  out.precision(17);
  for (Index i = 0; i < v.size(); ++i) out << v(i) << '\n';
}

}  // namespace hodgelab
