#pragma once

#include <memory>
#include <string>
#include <vector>

namespace aniscale {

// Closed-form scalar expression in named variables, e.g.
//   "1 + 0.25*cos(2*atan2(s2,s1))"  or  "abs(s2)^0.3".
// Grammar: numbers, variables, + - * / ^ (right assoc), unary -, parentheses,
// functions abs/sin/cos/exp/log/sqrt/atan2/pow/min/max.
// Parsed once at construction; evaluation is pure and thread-safe.
class Expression {
 public:
  Expression() = default;
  Expression(const std::string& text, std::vector<std::string> variables);

  double eval(const std::vector<double>& values) const;
  double eval(double a, double b) const;  // two-variable convenience

  const std::string& text() const { return text_; }
  bool empty() const { return root_ == nullptr; }

  struct Node;  // exposed for the implementation file only

 private:
  std::shared_ptr<const Node> root_;
  std::string text_;
  std::size_t nvars_ = 0;
};

}  // namespace aniscale
