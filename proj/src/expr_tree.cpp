#include "bsr/expr_tree.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>

#include "bsr/errors.hpp"

namespace bsr {

std::uint64_t fresh_uid() {
  // chain states are confined to one thread; a thread-local counter keeps
  // uids unique within any (old tree, edited tree) pair without locking
  thread_local std::uint64_t counter = 0;
  return ++counter;
}

ExprNode make_terminal(int feature) {
  ExprNode n;
  n.terminal = true;
  n.feature = feature;
  n.uid = fresh_uid();
  return n;
}

ExprNode make_unary(const OperatorSpec& op, ExprNode child) {
  ExprNode n;
  n.terminal = false;
  n.op = op;
  n.children.push_back(std::move(child));
  n.uid = fresh_uid();
  return n;
}

ExprNode make_binary(const OperatorSpec& op, ExprNode left, ExprNode right) {
  ExprNode n;
  n.terminal = false;
  n.op = op;
  n.children.push_back(std::move(left));
  n.children.push_back(std::move(right));
  n.uid = fresh_uid();
  return n;
}

ExprNode make_lt(double a, double b, ExprNode child) {
  ExprNode n = make_unary(builtin_operator("lt"), std::move(child));
  n.a = a;
  n.b = b;
  return n;
}

namespace {

void validate_node(const ExprNode& nd) {
  if (nd.terminal) {
    if (!nd.children.empty())
      throw InvalidTree("terminal node has children");
    if (nd.feature < 0) throw InvalidTree("terminal node has negative feature");
    return;
  }
  if (static_cast<int>(nd.children.size()) != nd.op.arity)
    throw InvalidTree("node '" + nd.op.name + "' expects " +
                      std::to_string(nd.op.arity) + " children, has " +
                      std::to_string(nd.children.size()));
  for (const ExprNode& c : nd.children) validate_node(c);
}

void eval_node(const ExprNode& nd, const DataMatrix& data,
               std::vector<double>& out) {
  const int n = data.n();
  if (nd.terminal) {
    if (nd.feature < 0 || nd.feature >= data.d())
      throw FeatureOutOfRange("terminal feature " +
                              std::to_string(nd.feature + 1) +
                              " exceeds the data's " +
                              std::to_string(data.d()) + " columns");
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = data.X(i, nd.feature);
    return;
  }
  if (static_cast<int>(nd.children.size()) != nd.op.arity)
    throw InvalidTree("node '" + nd.op.name + "' has arity mismatch");
  if (nd.op.arity == 1) {
    eval_node(nd.children[0], data, out);
    if (nd.op.has_params) {
      for (double& v : out) v = nd.op.param_unary(v, nd.a, nd.b);
    } else {
      for (double& v : out) v = nd.op.unary(v);
    }
    return;
  }
  std::vector<double> right(static_cast<std::size_t>(n));
  eval_node(nd.children[0], data, out);
  eval_node(nd.children[1], data, right);
  for (int i = 0; i < n; ++i) {
    auto k = static_cast<std::size_t>(i);
    out[k] = nd.op.binary(out[k], right[k]);
  }
}

}  // namespace

void validate_tree(const ExprTree& tree) { validate_node(tree.root); }

std::vector<double> eval_tree(const ExprTree& tree, const DataMatrix& data) {
  std::vector<double> out(static_cast<std::size_t>(data.n()));
  eval_node(tree.root, data, out);
  return out;
}

int node_count(const ExprNode& nd) {
  int total = 1;
  for (const ExprNode& c : nd.children) total += node_count(c);
  return total;
}
int node_count(const ExprTree& t) { return node_count(t.root); }

int depth(const ExprNode& nd) {
  int best = 0;
  for (const ExprNode& c : nd.children) best = std::max(best, 1 + depth(c));
  return best;
}
int depth(const ExprTree& t) { return depth(t.root); }

int count_lt_nodes(const ExprNode& nd) {
  int total = (!nd.terminal && nd.op.has_params) ? 1 : 0;
  for (const ExprNode& c : nd.children) total += count_lt_nodes(c);
  return total;
}
int count_lt_nodes(const ExprTree& t) { return count_lt_nodes(t.root); }

int count_nonterminal(const ExprNode& nd) {
  int total = nd.terminal ? 0 : 1;
  for (const ExprNode& c : nd.children) total += count_nonterminal(c);
  return total;
}
int count_nonterminal(const ExprTree& t) { return count_nonterminal(t.root); }

int count_terminal(const ExprNode& nd) {
  if (nd.terminal) return 1;
  int total = 0;
  for (const ExprNode& c : nd.children) total += count_terminal(c);
  return total;
}
int count_terminal(const ExprTree& t) { return count_terminal(t.root); }

bool same_structure(const ExprNode& x, const ExprNode& y) {
  if (x.terminal != y.terminal) return false;
  if (x.terminal) return x.feature == y.feature;
  if (!same_op(x.op, y.op)) return false;
  if (x.children.size() != y.children.size()) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!same_structure(x.children[i], y.children[i])) return false;
  return true;
}
bool same_structure(const ExprTree& x, const ExprTree& y) {
  return same_structure(x.root, y.root);
}

namespace {

template <typename Node>
Node* node_at_impl(Node& root, int target, int& counter) {
  if (counter == target) return &root;
  ++counter;
  for (auto& c : root.children) {
    Node* hit = node_at_impl(c, target, counter);
    if (hit != nullptr) return hit;
  }
  return nullptr;
}

}  // namespace

ExprNode* node_at(ExprNode& root, int preorder_index) {
  if (preorder_index < 0) return nullptr;
  int counter = 0;
  return node_at_impl(root, preorder_index, counter);
}

const ExprNode* node_at(const ExprNode& root, int preorder_index) {
  if (preorder_index < 0) return nullptr;
  int counter = 0;
  return node_at_impl<const ExprNode>(root, preorder_index, counter);
}

namespace {

void flatten_impl(const ExprNode& nd, int depth, int parent,
                  std::vector<NodeRef>& out) {
  int index = static_cast<int>(out.size());
  out.push_back(NodeRef{&nd, index, depth, parent});
  for (const ExprNode& c : nd.children) flatten_impl(c, depth + 1, index, out);
}

}  // namespace

std::vector<NodeRef> flatten(const ExprNode& root) {
  std::vector<NodeRef> out;
  flatten_impl(root, 0, -1, out);
  return out;
}

std::string format_coefficient(double value, int precision) {
  if (precision < 1) precision = 1;
  if (precision > 17) precision = 17;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", precision, value);
  // keep a decimal marker so coefficients stay visually distinct from
  // feature indices ("2" -> "2.0")
  if (std::strpbrk(buf, ".eE") == nullptr && std::strpbrk(buf, "infa") == nullptr)
    std::strcat(buf, ".0");
  return buf;
}

namespace {

std::string render(const ExprNode& nd, int precision) {
  if (nd.terminal) return "x" + std::to_string(nd.feature + 1);
  const std::string& name = nd.op.name;
  if (nd.op.has_params) {
    const std::string child = render(nd.children[0], precision);
    std::string out = "(" + format_coefficient(nd.a, precision) + "*" + child;
    if (nd.b < 0.0 || (nd.b == 0.0 && std::signbit(nd.b)))
      out += "-" + format_coefficient(-nd.b, precision);
    else
      out += "+" + format_coefficient(nd.b, precision);
    return out + ")";
  }
  if (nd.op.arity == 2) {
    const std::string l = render(nd.children[0], precision);
    const std::string r = render(nd.children[1], precision);
    if (name == "add") return "(" + l + "+" + r + ")";
    if (name == "sub") return "(" + l + "-" + r + ")";
    if (name == "mul") return "(" + l + "*" + r + ")";
    if (name == "div") return "(" + l + "/" + r + ")";
    return name + "(" + l + "," + r + ")";
  }
  const std::string c = render(nd.children[0], precision);
  if (name == "neg") return "(-" + c + ")";
  if (name == "inv") return "(1/" + c + ")";
  if (name == "square") return "(" + c + "^2)";
  if (name == "cube") return "(" + c + "^3)";
  return name + "(" + c + ")";
}

}  // namespace

std::string to_infix(const ExprNode& nd, int precision) {
  return render(nd, precision);
}

std::string to_infix(const ExprTree& tree, int precision) {
  return render(tree.root, precision);
}

}  // namespace bsr
