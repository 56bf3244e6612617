#include "aniscale/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <functional>

#include "aniscale/errors.hpp"

namespace aniscale {

struct Expression::Node {
  enum Kind { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kCall1, kCall2 } kind;
  double value = 0;
  std::size_t var = 0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::shared_ptr<const Node> a, b;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make(Node n) { return std::make_shared<const Node>(std::move(n)); }

struct Parser {
  const std::string& s;
  std::size_t pos = 0;
  const std::vector<std::string>& vars;

  explicit Parser(const std::string& text, const std::vector<std::string>& v)
      : s(text), vars(v) {}

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) { ++pos; return true; }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("expression parse error at offset " + std::to_string(pos) +
                      " in \"" + s + "\": " + what);
  }

  NodePtr parse() {
    NodePtr e = sum();
    skip();
    if (pos != s.size()) fail("trailing characters");
    return e;
  }

  NodePtr sum() {
    NodePtr lhs = term();
    for (;;) {
      if (eat('+')) lhs = make({Node::kAdd, 0, 0, nullptr, nullptr, lhs, term()});
      else if (eat('-')) lhs = make({Node::kSub, 0, 0, nullptr, nullptr, lhs, term()});
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    for (;;) {
      if (eat('*')) lhs = make({Node::kMul, 0, 0, nullptr, nullptr, lhs, unary()});
      else if (eat('/')) lhs = make({Node::kDiv, 0, 0, nullptr, nullptr, lhs, unary()});
      else return lhs;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make({Node::kNeg, 0, 0, nullptr, nullptr, unary(), nullptr});
    if (eat('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = atom();
    if (eat('^'))  // right associative, binds tighter than unary minus on the right
      return make({Node::kPow, 0, 0, nullptr, nullptr, base, unary()});
    return base;
  }

  NodePtr atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end of input");
    char c = s[pos];
    if (c == '(') {
      ++pos;
      NodePtr e = sum();
      if (!eat(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      char* end = nullptr;
      double v = std::strtod(s.c_str() + pos, &end);
      if (end == s.c_str() + pos) fail("bad number");
      pos = end - s.c_str();
      return make({Node::kConst, v, 0, nullptr, nullptr, nullptr, nullptr});
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos;
      while (pos < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
        ++pos;
      std::string name = s.substr(start, pos - start);
      skip();
      if (pos < s.size() && s[pos] == '(') return call(name);
      for (std::size_t i = 0; i < vars.size(); ++i)
        if (vars[i] == name)
          return make({Node::kVar, 0, i, nullptr, nullptr, nullptr, nullptr});
      if (name == "pi")
        return make({Node::kConst, 3.14159265358979323846, 0, nullptr, nullptr, nullptr, nullptr});
      fail("unknown identifier '" + name + "'");
    }
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr call(const std::string& name) {
    struct F1 { const char* n; double (*f)(double); };
    struct F2 { const char* n; double (*f)(double, double); };
    static const F1 fns1[] = {{"abs", std::fabs}, {"sin", std::sin},  {"cos", std::cos},
                              {"exp", std::exp},  {"log", std::log},  {"sqrt", std::sqrt}};
    static const F2 fns2[] = {{"pow", std::pow},
                              {"atan2", std::atan2},
                              {"min", [](double a, double b) { return a < b ? a : b; }},
                              {"max", [](double a, double b) { return a > b ? a : b; }}};
    if (!eat('(')) fail("expected '('");
    NodePtr a = sum();
    for (const auto& f : fns1)
      if (name == f.n) {
        if (!eat(')')) fail("expected ')'");
        return make({Node::kCall1, 0, 0, f.f, nullptr, a, nullptr});
      }
    for (const auto& f : fns2)
      if (name == f.n) {
        if (!eat(',')) fail("expected ',' in two-argument function");
        NodePtr b = sum();
        if (!eat(')')) fail("expected ')'");
        return make({Node::kCall2, 0, 0, nullptr, f.f, a, b});
      }
    fail("unknown function '" + name + "'");
  }
};

double eval_node(const Node* n, const std::vector<double>& v) {
  switch (n->kind) {
    case Node::kConst: return n->value;
    case Node::kVar:   return v[n->var];
    case Node::kAdd:   return eval_node(n->a.get(), v) + eval_node(n->b.get(), v);
    case Node::kSub:   return eval_node(n->a.get(), v) - eval_node(n->b.get(), v);
    case Node::kMul:   return eval_node(n->a.get(), v) * eval_node(n->b.get(), v);
    case Node::kDiv:   return eval_node(n->a.get(), v) / eval_node(n->b.get(), v);
    case Node::kPow:   return std::pow(eval_node(n->a.get(), v), eval_node(n->b.get(), v));
    case Node::kNeg:   return -eval_node(n->a.get(), v);
    case Node::kCall1: return n->fn1(eval_node(n->a.get(), v));
    case Node::kCall2: return n->fn2(eval_node(n->a.get(), v), eval_node(n->b.get(), v));
  }
  return 0;
}

}  // namespace

Expression::Expression(const std::string& text, std::vector<std::string> variables)
    : text_(text), nvars_(variables.size()) {
  Parser p(text, variables);
  root_ = p.parse();
}

double Expression::eval(const std::vector<double>& values) const {
  if (!root_) throw ConfigError("evaluating empty expression");
  if (values.size() != nvars_) throw ConfigError("expression arity mismatch");
  return eval_node(root_.get(), values);
}

double Expression::eval(double a, double b) const {
  if (!root_) throw ConfigError("evaluating empty expression");
  return eval_node(root_.get(), {a, b});
}

}  // namespace aniscale
