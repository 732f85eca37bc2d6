#pragma once

#include <memory>
#include <string>
#include <string_view>

namespace busekit {

/// Closed-form arithmetic expression in the variables `x` and `y`.
///
/// Grammar: `+ - * / ^` (right-associative power, unary minus binds looser
/// than `^`), parentheses, decimal literals, the constant `pi`, and the
/// functions `exp ln sin cos sqrt`. Parse errors throw Error(Config).
class Expression {
 public:
  static Expression parse(std::string_view text);

  double operator()(double x, double y) const;
  const std::string& text() const { return text_; }

  struct Node;

 private:
  Expression(std::string text, std::shared_ptr<const Node> root)
      : text_(std::move(text)), root_(std::move(root)) {}

  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace busekit
