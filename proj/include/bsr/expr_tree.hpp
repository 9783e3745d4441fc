#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsr/data_matrix.hpp"
#include "bsr/operators.hpp"

namespace bsr {

/// A node of a symbolic expression tree. A terminal selects one feature
/// column; a non-terminal applies its operator to its children, whose count
/// equals the operator arity. Nodes of a parameterized operator carry the
/// (a, b) scalar pair. Each node has a uid so structure edits can tell which
/// nodes survived; uids never influence evaluation, densities or output.
struct ExprNode {
  bool terminal = true;
  int feature = 0;  // 0-based, terminals only
  OperatorSpec op;  // non-terminals only
  double a = 1.0;   // iff op.has_params
  double b = 0.0;
  std::vector<ExprNode> children;
  std::uint64_t uid = 0;
};

struct ExprTree {
  ExprNode root;
};

std::uint64_t fresh_uid();
ExprNode make_terminal(int feature);
ExprNode make_unary(const OperatorSpec& op, ExprNode child);
ExprNode make_binary(const OperatorSpec& op, ExprNode left, ExprNode right);
ExprNode make_lt(double a, double b, ExprNode child);

/// Throws InvalidTree when any node's child count disagrees with its arity.
void validate_tree(const ExprTree&);

/// Evaluates the tree on every row. Non-finite intermediate values (division
/// by zero, overflowing exp, ...) propagate into the result rather than being
/// clamped; callers test the output with std::isfinite. Throws InvalidTree on
/// arity mismatches and FeatureOutOfRange when a terminal exceeds the data's
/// column count.
std::vector<double> eval_tree(const ExprTree&, const DataMatrix&);

int node_count(const ExprNode&);
int node_count(const ExprTree&);
int depth(const ExprNode&);  // a lone node has depth 0
int depth(const ExprTree&);
int count_lt_nodes(const ExprNode&);
int count_lt_nodes(const ExprTree&);
int count_nonterminal(const ExprNode&);
int count_nonterminal(const ExprTree&);
int count_terminal(const ExprNode&);
int count_terminal(const ExprTree&);

/// Structural identity: same shape, operators and features. Parameter values
/// and uids are ignored.
bool same_structure(const ExprNode&, const ExprNode&);
bool same_structure(const ExprTree&, const ExprTree&);

/// Node access by pre-order index; nullptr when out of range.
ExprNode* node_at(ExprNode& root, int preorder_index);
const ExprNode* node_at(const ExprNode& root, int preorder_index);

/// Pre-order flattening with depths and parent links (-1 for the root).
struct NodeRef {
  const ExprNode* node;
  int index;
  int depth;
  int parent;
};
std::vector<NodeRef> flatten(const ExprNode& root);

/// Renders the tree as parenthesized infix. Coefficients are printed with
/// `precision` significant digits (1..17) and always keep a decimal marker.
/// Terminals render 1-based: feature 0 is "x1".
std::string to_infix(const ExprTree&, int precision = 4);
std::string to_infix(const ExprNode&, int precision = 4);

std::string format_coefficient(double value, int precision);

}  // namespace bsr
