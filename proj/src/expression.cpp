#include "busekit/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

#include "busekit/types.hpp"

namespace busekit {

struct Expression::Node {
  enum class Kind { Number, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Func } kind;
  double value = 0.0;
  double (*func)(double) = nullptr;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;

  double eval(double x, double y) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::VarX: return x;
      case Kind::VarY: return y;
      case Kind::Neg: return -lhs->eval(x, y);
      case Kind::Add: return lhs->eval(x, y) + rhs->eval(x, y);
      case Kind::Sub: return lhs->eval(x, y) - rhs->eval(x, y);
      case Kind::Mul: return lhs->eval(x, y) * rhs->eval(x, y);
      case Kind::Div: return lhs->eval(x, y) / rhs->eval(x, y);
      case Kind::Pow: return std::pow(lhs->eval(x, y), rhs->eval(x, y));
      case Kind::Func: return func(lhs->eval(x, y));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  return n;
}

double fn_exp(double v) { return std::exp(v); }
double fn_ln(double v) { return std::log(v); }
double fn_sin(double v) { return std::sin(v); }
double fn_cos(double v) { return std::cos(v); }
double fn_sqrt(double v) { return std::sqrt(v); }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& why) const {
    throw Error(ErrorCode::Config, "expression '" + std::string(s_) + "': " + why +
                                       " at offset " + std::to_string(pos_));
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

  NodePtr expr() {
    NodePtr lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Kind::Add, lhs, term());
      else if (accept('-')) lhs = make(Kind::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Kind::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Kind::Div, lhs, unary());
      else return lhs;
    }
  }

  // -a^b parses as -(a^b)
  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::string buf(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(buf.c_str(), &end);
      if (end == buf.c_str()) fail("bad number");
      pos_ += static_cast<std::size_t>(end - buf.c_str());
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->value = v;
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "x") return make(Kind::VarX);
      if (name == "y") return make(Kind::VarY);
      if (name == "pi") {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Number;
        n->value = std::numbers::pi;
        return n;
      }
      double (*f)(double) = nullptr;
      if (name == "exp") f = fn_exp;
      else if (name == "ln") f = fn_ln;
      else if (name == "sin") f = fn_sin;
      else if (name == "cos") f = fn_cos;
      else if (name == "sqrt") f = fn_sqrt;
      else fail("unknown identifier '" + std::string(name) + "'");
      if (!accept('(')) fail("expected '(' after function name");
      NodePtr arg = expr();
      if (!accept(')')) fail("expected ')'");
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Func;
      n->func = f;
      n->lhs = std::move(arg);
      return n;
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text) {
  Parser p(text);
  NodePtr root = p.parse();
  return Expression(std::string(text), std::move(root));
}

double Expression::operator()(double x, double y) const { return root_->eval(x, y); }

}  // namespace busekit
