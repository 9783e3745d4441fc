#include "bsr/parse.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <string>
#include <vector>

#include "bsr/errors.hpp"

namespace bsr {

namespace {

// intermediate arithmetic tree; numeric literals survive until lowering
struct PNode {
  enum Kind { Num, Var, Call, Bin, Neg } kind = Num;
  double num = 0.0;
  int var = 0;  // 1-based
  std::string name;
  char op = 0;  // + - * / for Bin
  std::vector<PNode> kids;
  std::size_t at = 0;  // source position, for diagnostics
};

class Parser {
 public:
  Parser(std::string_view text, const OperatorSet* extra)
      : text_(text), extra_(extra) {}

  PNode run() {
    PNode root = parse_expr();
    skip_ws();
    if (pos_ != text_.size())
      throw ParseError("unexpected trailing input", pos_);
    return root;
  }

  const OperatorSet* extra_ops() const { return extra_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  const OperatorSet* extra_;

  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_])))
      ++pos_;
  }

  bool peek_is(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool eat(char c) {
    if (!peek_is(c)) return false;
    ++pos_;
    return true;
  }

  void expect(char c) {
    if (!eat(c))
      throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  PNode parse_expr() {
    PNode left = parse_term();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      char c = text_[pos_];
      if (c != '+' && c != '-') break;
      std::size_t at = pos_;
      ++pos_;
      PNode right = parse_term();
      PNode bin;
      bin.kind = PNode::Bin;
      bin.op = c;
      bin.at = at;
      bin.kids.push_back(std::move(left));
      bin.kids.push_back(std::move(right));
      left = std::move(bin);
    }
    return left;
  }

  PNode parse_term() {
    PNode left = parse_unary();
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) break;
      char c = text_[pos_];
      if (c != '*' && c != '/') break;
      std::size_t at = pos_;
      ++pos_;
      PNode right = parse_unary();
      PNode bin;
      bin.kind = PNode::Bin;
      bin.op = c;
      bin.at = at;
      bin.kids.push_back(std::move(left));
      bin.kids.push_back(std::move(right));
      left = std::move(bin);
    }
    return left;
  }

  PNode parse_unary() {
    skip_ws();
    if (eat('-')) {
      std::size_t at = pos_ - 1;
      PNode inner = parse_unary();
      if (inner.kind == PNode::Num) {
        inner.num = -inner.num;
        return inner;
      }
      PNode neg;
      neg.kind = PNode::Neg;
      neg.at = at;
      neg.kids.push_back(std::move(inner));
      return neg;
    }
    return parse_power();
  }

  PNode parse_power() {
    PNode base = parse_atom();
    skip_ws();
    if (eat('^')) {
      std::size_t at = pos_ - 1;
      skip_ws();
      PNode expo = parse_atom();
      if (expo.kind != PNode::Num)
        throw ParseError("exponent must be a numeric literal", at);
      PNode bin;
      bin.kind = PNode::Bin;
      bin.op = '^';
      bin.at = at;
      bin.kids.push_back(std::move(base));
      bin.kids.push_back(std::move(expo));
      return bin;
    }
    return base;
  }

  PNode parse_atom() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      PNode inner = parse_expr();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_name();
    throw ParseError("unexpected character", pos_);
  }

  PNode parse_number() {
    const char* begin = text_.data() + pos_;
    char* end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) throw ParseError("malformed number", pos_);
    if (!std::isfinite(v)) throw ParseError("non-finite literal", pos_);
    PNode n;
    n.kind = PNode::Num;
    n.num = v;
    n.at = pos_;
    pos_ += static_cast<std::size_t>(end - begin);
    return n;
  }

  PNode parse_name() {
    std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      ++pos_;
    std::string name(text_.substr(start, pos_ - start));
    // "x<digits>" is a feature reference
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      int idx = std::atoi(name.c_str() + 1);
      if (idx < 1)
        throw ParseError("feature indices are 1-based ('x1' is the first)",
                         start);
      PNode n;
      n.kind = PNode::Var;
      n.var = idx;
      n.at = start;
      return n;
    }
    if (!peek_is('('))
      throw ParseError("expected '(' after function name '" + name + "'",
                       pos_);
    ++pos_;
    PNode call;
    call.kind = PNode::Call;
    call.name = std::move(name);
    call.at = start;
    call.kids.push_back(parse_expr());
    while (eat(',')) call.kids.push_back(parse_expr());
    expect(')');
    return call;
  }
};

const OperatorSpec* find_named_op(const std::string& name, int arity,
                                  const OperatorSet* extra) {
  if (extra != nullptr) {
    int i = extra->index_of(name);
    if (i >= 0 && extra->at(static_cast<std::size_t>(i)).arity == arity &&
        !extra->at(static_cast<std::size_t>(i)).has_params)
      return &extra->at(static_cast<std::size_t>(i));
  }
  for (const OperatorSpec& op : builtin_operators())
    if (op.name == name && op.arity == arity && !op.has_params) return &op;
  return nullptr;
}

struct Lowered {
  bool is_const = false;
  double value = 0.0;
  ExprNode node;
};

Lowered lower(const PNode& p, const OperatorSet* extra);

ExprNode lower_node(const PNode& p, const OperatorSet* extra) {
  Lowered r = lower(p, extra);
  if (r.is_const)
    throw ParseError("numeric constant in unsupported position", p.at);
  return std::move(r.node);
}

ExprNode lower_lt(double a, double b, const PNode& child,
                  const OperatorSet* extra) {
  return make_lt(a, b, lower_node(child, extra));
}

Lowered lower(const PNode& p, const OperatorSet* extra) {
  switch (p.kind) {
    case PNode::Num:
      return Lowered{true, p.num, {}};
    case PNode::Var: {
      Lowered r;
      r.node = make_terminal(p.var - 1);
      return r;
    }
    case PNode::Neg: {
      Lowered r;
      r.node = make_unary(builtin_operator("neg"), lower_node(p.kids[0], extra));
      return r;
    }
    case PNode::Call: {
      const auto arity = static_cast<int>(p.kids.size());
      const OperatorSpec* op = find_named_op(p.name, arity, extra);
      if (op == nullptr)
        throw ParseError("unknown function '" + p.name + "' with " +
                             std::to_string(arity) + " argument(s)",
                         p.at);
      Lowered r;
      if (arity == 1)
        r.node = make_unary(*op, lower_node(p.kids[0], extra));
      else
        r.node = make_binary(*op, lower_node(p.kids[0], extra),
                             lower_node(p.kids[1], extra));
      return r;
    }
    case PNode::Bin:
      break;
  }

  const PNode& L = p.kids[0];
  const PNode& R = p.kids[1];

  if (p.op == '^') {
    double e = R.num;
    if (e == 2.0) {
      Lowered r;
      r.node = make_unary(builtin_operator("square"), lower_node(L, extra));
      return r;
    }
    if (e == 3.0) {
      Lowered r;
      r.node = make_unary(builtin_operator("cube"), lower_node(L, extra));
      return r;
    }
    throw ParseError("only exponents 2 and 3 are supported", R.at);
  }

  if (p.op == '+' || p.op == '-') {
    const double sign = p.op == '+' ? 1.0 : -1.0;
    // (a*C) +- b and b + (a*C): the linear-transform shape
    if (R.kind == PNode::Num && L.kind == PNode::Bin && L.op == '*') {
      if (L.kids[0].kind == PNode::Num) {
        Lowered r;
        r.node = lower_lt(L.kids[0].num, sign * R.num, L.kids[1], extra);
        return r;
      }
      if (L.kids[1].kind == PNode::Num) {
        Lowered r;
        r.node = lower_lt(L.kids[1].num, sign * R.num, L.kids[0], extra);
        return r;
      }
    }
    if (p.op == '+' && L.kind == PNode::Num && R.kind == PNode::Bin &&
        R.op == '*' && R.kids[0].kind == PNode::Num) {
      Lowered r;
      r.node = lower_lt(R.kids[0].num, L.num, R.kids[1], extra);
      return r;
    }
    Lowered lo_l = lower(L, extra);
    Lowered lo_r = lower(R, extra);
    if (lo_l.is_const && lo_r.is_const)
      return Lowered{true, p.op == '+' ? lo_l.value + lo_r.value
                                       : lo_l.value - lo_r.value,
                     {}};
    if (lo_r.is_const) {
      Lowered r;
      r.node = make_lt(1.0, sign * lo_r.value, std::move(lo_l.node));
      return r;
    }
    if (lo_l.is_const) {
      Lowered r;
      // b + C -> lt(1, b); b - C -> lt(-1, b)
      r.node = make_lt(sign, lo_l.value, std::move(lo_r.node));
      return r;
    }
    Lowered r;
    r.node = make_binary(builtin_operator(p.op == '+' ? "add" : "sub"),
                         std::move(lo_l.node), std::move(lo_r.node));
    return r;
  }

  if (p.op == '*') {
    Lowered lo_l = lower(L, extra);
    Lowered lo_r = lower(R, extra);
    if (lo_l.is_const && lo_r.is_const)
      return Lowered{true, lo_l.value * lo_r.value, {}};
    if (lo_l.is_const) {
      Lowered r;
      r.node = make_lt(lo_l.value, 0.0, std::move(lo_r.node));
      return r;
    }
    if (lo_r.is_const) {
      Lowered r;
      r.node = make_lt(lo_r.value, 0.0, std::move(lo_l.node));
      return r;
    }
    Lowered r;
    r.node = make_binary(builtin_operator("mul"), std::move(lo_l.node),
                         std::move(lo_r.node));
    return r;
  }

  // p.op == '/'
  Lowered lo_l = lower(L, extra);
  Lowered lo_r = lower(R, extra);
  if (lo_l.is_const && lo_r.is_const) {
    if (lo_r.value == 0.0)
      throw ParseError("division by constant zero", R.at);
    return Lowered{true, lo_l.value / lo_r.value, {}};
  }
  if (lo_l.is_const) {
    Lowered r;
    ExprNode inv = make_unary(builtin_operator("inv"), std::move(lo_r.node));
    if (lo_l.value == 1.0)
      r.node = std::move(inv);
    else
      r.node = make_lt(lo_l.value, 0.0, std::move(inv));
    return r;
  }
  if (lo_r.is_const) {
    if (lo_r.value == 0.0)
      throw ParseError("division by constant zero", R.at);
    Lowered r;
    r.node = make_lt(1.0 / lo_r.value, 0.0, std::move(lo_l.node));
    return r;
  }
  Lowered r;
  r.node = make_binary(builtin_operator("div"), std::move(lo_l.node),
                       std::move(lo_r.node));
  return r;
}

}  // namespace

ExprTree parse_infix(std::string_view text, const OperatorSet& extra_ops) {
  Parser parser(text, &extra_ops);
  PNode ast = parser.run();
  ExprTree tree;
  tree.root = lower_node(ast, parser.extra_ops());
  validate_tree(tree);
  return tree;
}

ExprTree parse_infix(std::string_view text) {
  Parser parser(text, nullptr);
  PNode ast = parser.run();
  ExprTree tree;
  tree.root = lower_node(ast, nullptr);
  validate_tree(tree);
  return tree;
}

}  // namespace bsr
