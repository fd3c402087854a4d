#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "semilag/analysis.hpp"
#include "semilag/error.hpp"
#include "semilag/expr.hpp"
#include "semilag/grid.hpp"
#include "semilag/problem.hpp"

namespace semilag {

namespace detail {

inline std::string trim(const std::string& s) {
  const std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

/// Strict double parse: the whole token must be consumed.
inline double parse_double_string(const std::string& raw, const std::string& what) {
  const std::string token = detail::trim(raw);
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(token, &used);
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: " + raw);
  }
  if (token.empty() || used != token.size())
    throw ConfigError(what + ": not a number: " + raw);
  return v;
}

/// Comma-separated coordinate list, e.g. "0.5" or "0,0".
inline Vec parse_vec_string(const std::string& raw, const std::string& what) {
  std::vector<double> parts;
  std::stringstream ss(raw);
  std::string piece;
  while (std::getline(ss, piece, ','))
    parts.push_back(parse_double_string(detail::trim(piece), what));
  if (parts.empty() || parts.size() > static_cast<std::size_t>(kMaxDim))
    throw ConfigError(what + ": need 1.." + std::to_string(kMaxDim) +
                      " comma-separated components");
  Vec v(static_cast<int>(parts.size()));
  for (int k = 0; k < v.size(); ++k) v[k] = parts[k];
  return v;
}

/// Flat `key = value` file: one pair per line, `#` starts a comment, blank
/// lines ignored, later occurrences of a key override earlier ones. Typed
/// getters mark keys as consumed so finish() can reject unknown keys.
class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues from_stream(std::istream& in, const std::string& origin) {
    KeyValues kv;
    kv.origin_ = origin;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      const std::size_t hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      const std::string stripped = detail::trim(line);
      if (stripped.empty()) continue;
      const std::size_t eq = stripped.find('=');
      if (eq == std::string::npos)
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
      const std::string key = detail::trim(stripped.substr(0, eq));
      const std::string value = detail::trim(stripped.substr(eq + 1));
      if (key.empty())
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": empty key");
      kv.values_[key] = value;
    }
    return kv;
  }

  static KeyValues from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return from_stream(in, path);
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::optional<std::string> get_string(const std::string& key) {
    auto it = values_.find(key);
    if (it == values_.end()) return std::nullopt;
    consumed_.insert(key);
    return it->second;
  }

  std::optional<double> get_double(const std::string& key) {
    auto raw = get_string(key);
    if (!raw) return std::nullopt;
    return parse_double_string(*raw, origin_ + ": key '" + key + "'");
  }

  std::optional<int> get_int(const std::string& key) {
    auto raw = get_string(key);
    if (!raw) return std::nullopt;
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(*raw, &used);
    } catch (const std::exception&) {
      throw ConfigError(origin_ + ": key '" + key + "': not an integer: " + *raw);
    }
    if (used != raw->size())
      throw ConfigError(origin_ + ": key '" + key + "': not an integer: " + *raw);
    return v;
  }

  std::optional<Vec> get_vec(const std::string& key) {
    auto raw = get_string(key);
    if (!raw) return std::nullopt;
    return parse_vec_string(*raw, origin_ + ": key '" + key + "'");
  }

  /// Throws when any key was never consumed (misspelled or unsupported).
  void finish() const {
    for (const auto& [key, value] : values_)
      if (!consumed_.count(key))
        throw ConfigError(origin_ + ": unknown key '" + key + "'");
  }

  std::string origin() const { return origin_; }

 private:
  std::string origin_ = "<args>";
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

inline BoundaryPolicy parse_boundary(const std::string& name) {
  if (name == "clamp") return BoundaryPolicy::kClamp;
  if (name == "error") return BoundaryPolicy::kError;
  if (name == "extrapolate") return BoundaryPolicy::kExtrapolate;
  throw ConfigError("unknown boundary policy '" + name + "' (clamp, error, extrapolate)");
}

inline std::string boundary_name(BoundaryPolicy b) {
  switch (b) {
    case BoundaryPolicy::kClamp: return "clamp";
    case BoundaryPolicy::kError: return "error";
    case BoundaryPolicy::kExtrapolate: return "extrapolate";
  }
  return "?";
}

inline ErrorNorm parse_norm(const std::string& name) {
  if (name == "relative") return ErrorNorm::kRelative;
  if (name == "absolute") return ErrorNorm::kAbsolute;
  throw ConfigError("unknown norm '" + name + "' (relative, absolute)");
}

inline std::string norm_name(ErrorNorm n) {
  return n == ErrorNorm::kRelative ? "relative" : "absolute";
}

/// Everything a command run needs, collected from defaults, an optional
/// config file, and command-line flags (flags win).
struct RunConfig {
  std::string problem = "test1";
  double dt = 0.1;
  double dx = 0.1;
  int controls = 0;  // 0: match the spatial node count along axis 0
  BoundaryPolicy boundary = BoundaryPolicy::kClamp;
  ErrorNorm norm = ErrorNorm::kAbsolute;
  std::string out_dir = ".";
  std::uint64_t seed = 12345;
  std::uint64_t budget = 20'000'000;  // enumeration work cap

  double base_step = 0.1;  // eoc
  int levels = 5;          // eoc
  Vec start;               // simulate initial state (empty: domain center)

  /// Applies the keys this struct understands; command-specific keys may
  /// remain for the caller, which is why this does not call finish().
  void apply(KeyValues& kv) {
    if (auto v = kv.get_string("problem")) problem = *v;
    if (auto v = kv.get_double("dt")) dt = *v;
    if (auto v = kv.get_double("dx")) dx = *v;
    if (auto v = kv.get_int("controls")) controls = *v;
    if (auto v = kv.get_string("boundary")) boundary = parse_boundary(*v);
    if (auto v = kv.get_string("norm")) norm = parse_norm(*v);
    if (auto v = kv.get_string("out")) out_dir = *v;
    if (auto v = kv.get_int("seed")) seed = static_cast<std::uint64_t>(*v);
    if (auto v = kv.get_int("budget")) budget = static_cast<std::uint64_t>(*v);
    if (auto v = kv.get_double("base")) base_step = *v;
    if (auto v = kv.get_int("levels")) levels = *v;
    if (auto v = kv.get_vec("x")) start = *v;
  }
};

/// Builds a problem from a flat config file with expression-valued entries.
/// Variables: states x1..xd and time t everywhere; controls u1..uc in the
/// dynamics and running cost; the terminal cost sees only x1..xd.
inline TestCase problem_from_file(const std::string& path) {
  KeyValues kv = KeyValues::from_file(path);
  TestCase tc;
  Problem& p = tc.problem;

  const auto require_int = [&](const char* key) {
    auto v = kv.get_int(key);
    if (!v) throw ConfigError(path + ": missing required key '" + std::string(key) + "'");
    return *v;
  };
  const auto require_vec = [&](const char* key) {
    auto v = kv.get_vec(key);
    if (!v) throw ConfigError(path + ": missing required key '" + std::string(key) + "'");
    return *v;
  };
  const auto require_string = [&](const char* key) {
    auto v = kv.get_string(key);
    if (!v) throw ConfigError(path + ": missing required key '" + std::string(key) + "'");
    return *v;
  };

  p.dim = require_int("dim");
  p.control_dim = require_int("control_dim");
  if (p.dim < 1 || p.dim > kMaxDim)
    throw ConfigError(path + ": dim must be in [1, " + std::to_string(kMaxDim) + "]");
  if (p.control_dim < 1 || p.control_dim > kMaxDim)
    throw ConfigError(path + ": control_dim must be in [1, " + std::to_string(kMaxDim) + "]");

  {
    std::string stem = path;
    const std::size_t slash = stem.find_last_of('/');
    if (slash != std::string::npos) stem.erase(0, slash + 1);
    const std::size_t dot = stem.find_last_of('.');
    if (dot != std::string::npos) stem.erase(dot);
    p.name = kv.get_string("name").value_or(stem);
  }
  p.t0 = kv.get_double("t0").value_or(0.0);
  p.horizon_end = kv.get_double("t_end").value_or(1.0);
  p.discount = kv.get_double("discount").value_or(0.0);
  if (p.discount < 0) throw ConfigError(path + ": discount must be >= 0");
  if (!(p.horizon_end > p.t0)) throw ConfigError(path + ": need t_end > t0");

  p.domain_lower = require_vec("domain_lower");
  p.domain_upper = require_vec("domain_upper");
  p.control_lower = require_vec("control_lower");
  p.control_upper = require_vec("control_upper");
  const auto check_box = [&](const Vec& lo, const Vec& hi, int d, const char* what) {
    if (lo.size() != d || hi.size() != d)
      throw ConfigError(path + ": " + what + " bounds must have " + std::to_string(d) +
                        " components");
    for (int k = 0; k < d; ++k)
      if (!(lo[k] < hi[k])) throw ConfigError(path + ": " + what + " box is empty on axis " +
                                              std::to_string(k + 1));
  };
  check_box(p.domain_lower, p.domain_upper, p.dim, "domain");
  check_box(p.control_lower, p.control_upper, p.control_dim, "control");

  std::vector<std::string> state_vars, full_vars;
  for (int k = 0; k < p.dim; ++k) state_vars.push_back("x" + std::to_string(k + 1));
  full_vars = state_vars;
  full_vars.push_back("t");
  for (int k = 0; k < p.control_dim; ++k) full_vars.push_back("u" + std::to_string(k + 1));
  std::vector<std::string> exact_vars = state_vars;
  exact_vars.push_back("t");

  const int dim = p.dim;
  const int cdim = p.control_dim;
  const auto pack = [dim, cdim](const Vec& x, double t, const Vec& u,
                                double* buf) {
    for (int k = 0; k < dim; ++k) buf[k] = x[k];
    buf[dim] = t;
    for (int k = 0; k < cdim; ++k) buf[dim + 1 + k] = u[k];
  };

  {
    auto exprs = std::make_shared<std::vector<Expression>>(
        parse_expression_list(require_string("dynamics"), full_vars));
    if (static_cast<int>(exprs->size()) != p.dim)
      throw ConfigError(path + ": dynamics needs " + std::to_string(p.dim) +
                        " comma-separated components");
    p.dynamics = [exprs, dim, pack](const Vec& x, double t, const Vec& u) {
      double buf[2 * kMaxDim + 1];
      pack(x, t, u, buf);
      Vec f(dim);
      for (int k = 0; k < dim; ++k) f[k] = (*exprs)[k].eval(buf);
      return f;
    };
  }
  {
    auto expr = std::make_shared<Expression>(
        Expression::parse(require_string("running_cost"), full_vars));
    p.running_cost = [expr, pack](const Vec& x, double t, const Vec& u) {
      double buf[2 * kMaxDim + 1];
      pack(x, t, u, buf);
      return expr->eval(buf);
    };
  }
  {
    auto expr = std::make_shared<Expression>(
        Expression::parse(require_string("terminal_cost"), state_vars));
    p.terminal_cost = [expr, dim](const Vec& x) {
      double buf[kMaxDim];
      for (int k = 0; k < dim; ++k) buf[k] = x[k];
      return expr->eval(buf);
    };
  }
  if (auto text = kv.get_string("exact_value")) {
    auto expr = std::make_shared<Expression>(Expression::parse(*text, exact_vars));
    tc.exact.value = [expr, dim](const Vec& x, double t) {
      double buf[kMaxDim + 1];
      for (int k = 0; k < dim; ++k) buf[k] = x[k];
      buf[dim] = t;
      return expr->eval(buf);
    };
  }
  if (auto lo = kv.get_vec("solve_lower")) tc.solve_lower = *lo;
  if (auto hi = kv.get_vec("solve_upper")) tc.solve_upper = *hi;
  if (tc.solve_lower.size() || tc.solve_upper.size()) {
    check_box(tc.solve_lower, tc.solve_upper, p.dim, "solve");
    for (int k = 0; k < p.dim; ++k)
      if (tc.solve_lower[k] > p.domain_lower[k] || tc.solve_upper[k] < p.domain_upper[k])
        throw ConfigError(path + ": solve box must contain the domain box");
  }

  kv.finish();
  return tc;
}

/// Built-in name or path to a problem config file.
inline TestCase resolve_problem(const std::string& selector) {
  if (selector == "test1") return make_test1();
  if (selector == "test2") return make_test2();
  if (selector == "dpp2d") {
    TestCase tc;
    tc.problem = make_dpp_2d();
    return tc;
  }
  if (selector.find('.') == std::string::npos && selector.find('/') == std::string::npos)
    throw ConfigError("unknown problem '" + selector +
                      "' (built-ins: test1, test2, dpp2d; or a problem file path)");
  return problem_from_file(selector);
}

/// Reproducibility record: `key = value` per line, written next to the data
/// artifacts of a run.
inline void write_manifest(const std::string& path,
                           const std::vector<std::pair<std::string, std::string>>& entries) {
  std::ofstream out(path);
  if (!out) throw ConfigError("manifest: cannot open " + path + " for writing");
  for (const auto& [key, value] : entries) out << key << " = " << value << '\n';
}

}  // namespace semilag
