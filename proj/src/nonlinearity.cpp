#include "efk/nonlinearity.hpp"

#include <cctype>
#include <cmath>
#include <memory>
#include <random>
#include <variant>

#include "efk/errors.hpp"

namespace efk {

namespace {

struct Node {
  enum class Kind { Zero, Linear, Tanh, Sin, Cubic, Sum } kind = Kind::Zero;
  std::vector<double> coeffs;  // Linear
  double beta = 0.0;           // Tanh, Sin
  std::size_t index = 0;       // Tanh, Sin, Cubic (0-based)
  std::vector<Node> children;  // Sum
};

double eval(const Node& n, std::span<const double> xi) {
  switch (n.kind) {
    case Node::Kind::Zero:
      return 0.0;
    case Node::Kind::Linear: {
      double s = 0.0;
      for (std::size_t k = 0; k < n.coeffs.size(); ++k) s += n.coeffs[k] * xi[k];
      return s;
    }
    case Node::Kind::Tanh:
      return n.beta * std::tanh(xi[n.index]);
    case Node::Kind::Sin:
      return n.beta * std::sin(xi[n.index]);
    case Node::Kind::Cubic: {
      const double v = xi[n.index];
      return -v * v * v;
    }
    case Node::Kind::Sum: {
      double s = 0.0;
      for (const auto& c : n.children) s += eval(c, xi);
      return s;
    }
  }
  return 0.0;
}

bool all_zero(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Zero:
      return true;
    case Node::Kind::Linear:
      for (double c : n.coeffs)
        if (c != 0.0) return false;
      return true;
    case Node::Kind::Tanh:
    case Node::Kind::Sin:
      return n.beta == 0.0;
    case Node::Kind::Cubic:
      return false;
    case Node::Kind::Sum:
      for (const auto& c : n.children)
        if (!all_zero(c)) return false;
      return true;
  }
  return false;
}

std::optional<std::vector<double>> lipschitz_of(const Node& n, std::size_t arity) {
  std::vector<double> b(arity, 0.0);
  switch (n.kind) {
    case Node::Kind::Zero:
      return b;
    case Node::Kind::Linear:
      for (std::size_t k = 0; k < arity; ++k) b[k] = std::abs(n.coeffs[k]);
      return b;
    case Node::Kind::Tanh:
    case Node::Kind::Sin:
      b[n.index] = std::abs(n.beta);
      return b;
    case Node::Kind::Cubic:
      return std::nullopt;
    case Node::Kind::Sum:
      for (const auto& c : n.children) {
        auto cb = lipschitz_of(c, arity);
        if (!cb) return std::nullopt;
        for (std::size_t k = 0; k < arity; ++k) b[k] += (*cb)[k];
      }
      return b;
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view text, std::size_t arity) : s_(text), arity_(arity) {}

  Node parse_all() {
    Node n = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("nonlinearity '" + std::string(s_) + "' at offset " + std::to_string(pos_) +
                      ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  std::string identifier() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    if (start == pos_) fail("expected a function name");
    return std::string(s_.substr(start, pos_ - start));
  }

  double number() {
    skip_ws();
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    if (!std::isfinite(v)) fail("non-finite number");
    pos_ += used;
    return v;
  }

  std::size_t delay_index() {
    const double v = number();
    if (v != std::floor(v) || v < 1.0 || v > static_cast<double>(arity_)) {
      fail("delay index must be an integer in 1.." + std::to_string(arity_));
    }
    return static_cast<std::size_t>(v) - 1;
  }

  std::vector<double> number_list() {
    std::vector<double> out;
    expect('(');
    if (accept(')')) return out;
    do {
      out.push_back(number());
    } while (accept(','));
    expect(')');
    return out;
  }

  Node parse_expr() {
    const std::string name = identifier();
    Node n;
    if (name == "zero") {
      n.kind = Node::Kind::Zero;
      if (accept('(')) expect(')');
    } else if (name == "linear") {
      n.kind = Node::Kind::Linear;
      n.coeffs = number_list();
      if (n.coeffs.size() != arity_) {
        fail("linear() needs " + std::to_string(arity_) + " coefficients");
      }
    } else if (name == "tanh_scaled" || name == "sin_scaled") {
      n.kind = name == "tanh_scaled" ? Node::Kind::Tanh : Node::Kind::Sin;
      expect('(');
      n.beta = number();
      expect(',');
      n.index = delay_index();
      expect(')');
    } else if (name == "cubic") {
      n.kind = Node::Kind::Cubic;
      expect('(');
      n.index = delay_index();
      expect(')');
    } else if (name == "sum") {
      n.kind = Node::Kind::Sum;
      expect('(');
      do {
        n.children.push_back(parse_expr());
      } while (accept(','));
      expect(')');
    } else {
      fail("unknown function '" + name + "'");
    }
    return n;
  }

  std::string_view s_;
  std::size_t arity_;
  std::size_t pos_ = 0;
};

}  // namespace

NonlinearitySpec::NonlinearitySpec(std::size_t arity, Evaluator f, std::string description)
    : arity_(arity), f_(std::move(f)), description_(std::move(description)) {
  if (arity == 0) throw ConfigError("NonlinearitySpec: arity must be at least 1");
  if (!f_) throw ConfigError("NonlinearitySpec: empty evaluator");
}

NonlinearitySpec NonlinearitySpec::zero(std::size_t arity) { return parse("zero", arity); }

NonlinearitySpec NonlinearitySpec::parse(std::string_view expr, std::size_t arity) {
  if (arity == 0) throw ConfigError("NonlinearitySpec: arity must be at least 1");
  auto tree = std::make_shared<const Node>(Parser(expr, arity).parse_all());
  NonlinearitySpec spec(
      arity, [tree](std::span<const double> xi) { return eval(*tree, xi); }, std::string(expr));
  spec.is_zero_ = all_zero(*tree);
  spec.natural_ = lipschitz_of(*tree, arity);
  return spec;
}

void NonlinearitySpec::set_lipschitz_betas(std::vector<double> betas) {
  if (betas.size() != arity_) {
    throw ConfigError("lipschitz betas: expected " + std::to_string(arity_) + " values, got " +
                      std::to_string(betas.size()));
  }
  for (double b : betas) {
    if (!(b >= 0.0) || !std::isfinite(b)) throw ConfigError("lipschitz betas must be finite and >= 0");
  }
  betas_ = std::move(betas);
}

void NonlinearitySpec::set_affine_bound(AffineBound bound) {
  if (bound.betas.size() != arity_) throw ConfigError("affine bound: beta count does not match arity");
  if (!(bound.K >= 0.0) || !std::isfinite(bound.K)) throw ConfigError("affine bound: K must be >= 0");
  affine_ = std::move(bound);
}

SampledCheck sample_lipschitz(const NonlinearitySpec& f, std::span<const double> betas, double box,
                              std::size_t samples, std::uint64_t seed) {
  if (betas.size() != f.arity()) throw ShapeError("sample_lipschitz: beta count does not match arity");
  SampledCheck out;
  out.samples = samples;
  out.seed = seed;
  out.box = box;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-box, box);
  const std::size_t n = f.arity();
  std::vector<double> xi(n), eta(n);
  for (std::size_t s = 0; s < samples; ++s) {
    double rhs = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      xi[k] = dist(rng);
      eta[k] = dist(rng);
      rhs += betas[k] * std::abs(xi[k] - eta[k]);
    }
    const double lhs = std::abs(f(xi) - f(eta));
    if (rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
    // Relative slack covers rounding in f itself.
    if (lhs > rhs * (1.0 + 1e-12) + 1e-14) ++out.violations;
  }
  out.holds = out.violations == 0;
  return out;
}

}  // namespace efk
