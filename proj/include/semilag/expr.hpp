#pragma once

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "semilag/error.hpp"

namespace semilag {

/// Arithmetic expression over named scalar variables, parsed once and
/// evaluated against a value array in the variables' declaration order.
/// Grammar: + - * / ^ (right-assoc), unary -, parentheses, function calls.
/// Functions: sin cos tan exp log sqrt abs sign tanh atan floor,
/// min max pow atan2. Constants: pi, e.
class Expression {
 public:
  static Expression parse(const std::string& text, const std::vector<std::string>& variables) {
    Parser p{text, variables, 0, {}};
    const int root = p.expr();
    p.skip_ws();
    if (p.pos != text.size())
      throw ConfigError("expression: unexpected '" + std::string(1, text[p.pos]) +
                        "' at position " + std::to_string(p.pos) + " in \"" + text + "\"");
    Expression e;
    e.nodes_ = std::move(p.nodes);
    e.root_ = root;
    return e;
  }

  double eval(const double* vars) const { return eval_node(root_, vars); }
  double eval(const std::vector<double>& vars) const { return eval_node(root_, vars.data()); }

 private:
  enum class Op : std::uint8_t { kNum, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kFn1, kFn2 };
  enum class Fn : std::uint8_t {
    kSin, kCos, kTan, kExp, kLog, kSqrt, kAbs, kSign, kTanh, kAtan, kFloor,
    kMin, kMax, kPow, kAtan2
  };

  struct Node {
    Op op;
    Fn fn = Fn::kSin;
    double num = 0;
    int a = -1, b = -1;
    int var = -1;
  };

  struct Parser {
    const std::string& text;
    const std::vector<std::string>& variables;
    std::size_t pos;
    std::vector<Node> nodes;

    void skip_ws() {
      while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
      skip_ws();
      if (pos < text.size() && text[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }

    [[noreturn]] void fail(const std::string& what) {
      throw ConfigError("expression: " + what + " at position " + std::to_string(pos) +
                        " in \"" + text + "\"");
    }

    int add(Node n) {
      nodes.push_back(n);
      return static_cast<int>(nodes.size()) - 1;
    }

    int expr() {
      int lhs = term();
      for (;;) {
        if (eat('+'))
          lhs = add({Op::kAdd, {}, 0, lhs, term(), -1});
        else if (eat('-'))
          lhs = add({Op::kSub, {}, 0, lhs, term(), -1});
        else
          return lhs;
      }
    }

    int term() {
      int lhs = factor();
      for (;;) {
        if (eat('*'))
          lhs = add({Op::kMul, {}, 0, lhs, factor(), -1});
        else if (eat('/'))
          lhs = add({Op::kDiv, {}, 0, lhs, factor(), -1});
        else
          return lhs;
      }
    }

    int factor() {
      // Unary minus binds looser than '^', so -2^2 means -(2^2); the
      // exponent recurses through factor, which keeps '^' right-associative
      // and lets it take a signed exponent.
      if (eat('-')) return add({Op::kNeg, {}, 0, factor(), -1, -1});
      const int base = primary();
      if (eat('^')) return add({Op::kPow, {}, 0, base, factor(), -1});
      return base;
    }

    int primary() {
      skip_ws();
      if (pos >= text.size()) fail("unexpected end of input");
      const char c = text[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
      if (eat('(')) {
        const int inner = expr();
        if (!eat(')')) fail("expected ')'");
        return inner;
      }
      fail(std::string("unexpected '") + c + "'");
    }

    int number() {
      const char* begin = text.c_str() + pos;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("malformed number");
      pos += static_cast<std::size_t>(end - begin);
      return add({Op::kNum, {}, v, -1, -1, -1});
    }

    int identifier() {
      const std::size_t start = pos;
      while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) ||
                                   text[pos] == '_'))
        ++pos;
      const std::string name = text.substr(start, pos - start);
      skip_ws();
      if (pos < text.size() && text[pos] == '(') return call(name);
      if (name == "pi") return add({Op::kNum, {}, 3.14159265358979323846, -1, -1, -1});
      if (name == "e") return add({Op::kNum, {}, 2.71828182845904523536, -1, -1, -1});
      for (std::size_t i = 0; i < variables.size(); ++i)
        if (variables[i] == name)
          return add({Op::kVar, {}, 0, -1, -1, static_cast<int>(i)});
      fail("unknown variable '" + name + "'");
    }

    int call(const std::string& name) {
      struct Entry {
        const char* name;
        Fn fn;
        int arity;
      };
      static constexpr Entry kTable[] = {
          {"sin", Fn::kSin, 1},   {"cos", Fn::kCos, 1},     {"tan", Fn::kTan, 1},
          {"exp", Fn::kExp, 1},   {"log", Fn::kLog, 1},     {"sqrt", Fn::kSqrt, 1},
          {"abs", Fn::kAbs, 1},   {"sign", Fn::kSign, 1},   {"tanh", Fn::kTanh, 1},
          {"atan", Fn::kAtan, 1}, {"floor", Fn::kFloor, 1}, {"min", Fn::kMin, 2},
          {"max", Fn::kMax, 2},   {"pow", Fn::kPow, 2},     {"atan2", Fn::kAtan2, 2},
      };
      const Entry* entry = nullptr;
      for (const Entry& e : kTable)
        if (name == e.name) entry = &e;
      if (!entry) fail("unknown function '" + name + "'");
      if (!eat('(')) fail("expected '(' after function name");
      const int a = expr();
      int b = -1;
      if (entry->arity == 2) {
        if (!eat(',')) fail("function '" + name + "' takes two arguments");
        b = expr();
      }
      if (!eat(')')) fail("expected ')'");
      return add({entry->arity == 1 ? Op::kFn1 : Op::kFn2, entry->fn, 0, a, b, -1});
    }
  };

  double eval_node(int i, const double* vars) const {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::kNum: return n.num;
      case Op::kVar: return vars[n.var];
      case Op::kAdd: return eval_node(n.a, vars) + eval_node(n.b, vars);
      case Op::kSub: return eval_node(n.a, vars) - eval_node(n.b, vars);
      case Op::kMul: return eval_node(n.a, vars) * eval_node(n.b, vars);
      case Op::kDiv: return eval_node(n.a, vars) / eval_node(n.b, vars);
      case Op::kPow: return std::pow(eval_node(n.a, vars), eval_node(n.b, vars));
      case Op::kNeg: return -eval_node(n.a, vars);
      case Op::kFn1: {
        const double x = eval_node(n.a, vars);
        switch (n.fn) {
          case Fn::kSin: return std::sin(x);
          case Fn::kCos: return std::cos(x);
          case Fn::kTan: return std::tan(x);
          case Fn::kExp: return std::exp(x);
          case Fn::kLog: return std::log(x);
          case Fn::kSqrt: return std::sqrt(x);
          case Fn::kAbs: return std::abs(x);
          case Fn::kSign: return static_cast<double>((x > 0) - (x < 0));
          case Fn::kTanh: return std::tanh(x);
          case Fn::kAtan: return std::atan(x);
          case Fn::kFloor: return std::floor(x);
          default: break;
        }
        break;
      }
      case Op::kFn2: {
        const double x = eval_node(n.a, vars);
        const double y = eval_node(n.b, vars);
        switch (n.fn) {
          case Fn::kMin: return std::min(x, y);
          case Fn::kMax: return std::max(x, y);
          case Fn::kPow: return std::pow(x, y);
          case Fn::kAtan2: return std::atan2(x, y);
          default: break;
        }
        break;
      }
    }
    throw ConfigError("expression: corrupt node");
  }

  std::vector<Node> nodes_;
  int root_ = -1;
};

/// Splits on commas at parenthesis depth zero; each piece becomes one
/// component expression (vector-valued dynamics use this).
inline std::vector<Expression> parse_expression_list(const std::string& text,
                                                     const std::vector<std::string>& variables) {
  std::vector<std::string> pieces;
  int depth = 0;
  std::string current;
  for (char c : text) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      pieces.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  pieces.push_back(current);
  std::vector<Expression> out;
  out.reserve(pieces.size());
  for (const std::string& piece : pieces) out.push_back(Expression::parse(piece, variables));
  return out;
}

}  // namespace semilag
