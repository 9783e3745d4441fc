#pragma once

#include <array>
#include <optional>
#include <vector>

#include "bsr/expr_tree.hpp"
#include "bsr/prior.hpp"
#include "bsr/rng.hpp"

namespace bsr {

/// The seven structure moves. Stay keeps the structure and only refreshes
/// coefficients; the other six edit the tree.
enum class MoveTag {
  Stay = 0,
  Grow,
  Prune,
  Delete,
  Insert,
  ReassignOperator,
  ReassignFeature,
};

constexpr std::size_t kNumMoves = 7;

const char* move_name(MoveTag);

/// A fully determined structure edit: applying it to the tree it was drawn
/// for is deterministic (see replay). `site` is the pre-order index of the
/// acted-on node in the source tree.
struct MoveKind {
  MoveTag tag = MoveTag::Stay;
  int site = 0;
  /// Grow: the replacement subtree. Insert and ReassignOperator (unary to
  /// binary): the generated right child.
  std::optional<ExprNode> subtree;
  std::optional<OperatorSpec> new_op;  // Insert, ReassignOperator
  int new_feature = -1;                // Prune, ReassignFeature
  int picked_child = 0;                // Delete: index of the kept child
};

/// A proposed tree with the structure-proposal densities. log_q_reverse is
/// the log probability that one structure move applied to new_tree yields
/// the source tree again; it is -inf when no single move can do so (see
/// propose), in which case the proposal can never be accepted.
struct ProposalOutcome {
  ExprTree new_tree;
  double log_q_forward = 0.0;
  double log_q_reverse = 0.0;
  int dim_change = 0;  // change in the number of parameterized nodes
  MoveKind move;
};

/// Move distribution for a tree, indexed by MoveTag. With n_p parameterized
/// (linear-transform) nodes, N_nt non-terminals and N_c delete candidates:
///   Stay            n_p / (stay_scale * (n_p + stay_shift))
///   Grow            r * min{1, grow_cap / (N_nt + grow_shift)}
///   Prune           r - Grow
///   Delete          r * N_c / (N_c + delete_shift)
///   Insert          r - Delete
///   ReassignOperator = ReassignFeature = r / 2
/// where r = (1 - Stay) / 3. When the tree has no non-terminal,
/// ReassignOperator is impossible: its mass is removed and the rest is
/// renormalized. Every structurally impossible move already has zero mass
/// under the formulas (Stay needs a parameterized node, Prune a
/// non-terminal, Delete a candidate).
std::array<double, kNumMoves> move_probabilities(
    const ExprTree&, const MoveConstants& = MoveConstants{});

/// Delete removes a non-terminal and promotes one child into its place.
/// Candidates: every non-root non-terminal, plus the root when at least one
/// of its children is a non-terminal (deleting the root must leave a
/// non-terminal root). A unary candidate promotes its only child; a binary
/// non-root candidate promotes a uniformly chosen child; a binary root
/// promotes a uniformly chosen non-terminal child.
int count_delete_candidates(const ExprTree&);

// pre-order indices of terminals / non-terminals / delete candidates
std::vector<int> terminal_sites(const ExprNode& root);
std::vector<int> nonterminal_sites(const ExprNode& root);
std::vector<int> delete_candidate_sites(const ExprTree&);

/// Draws a move from move_probabilities and applies it:
///   Stay    keep the structure.
///   Grow    replace a uniformly chosen terminal by a generated subtree
///           whose root is forced non-terminal (operator from the weighted
///           pool, children from sample_structure one level deeper).
///   Prune   replace a uniformly chosen non-terminal's subtree by a fresh
///           terminal with a weighted-draw feature.
///   Delete  as documented at count_delete_candidates.
///   Insert  put a new non-terminal above a uniformly chosen node (any
///           node, root included); the chosen node becomes its only or LEFT
///           child, and a binary insert generates the right child one level
///           deeper.
///   ReassignOperator  redraw a uniformly chosen non-terminal's operator
///           (possibly the same). Unary to binary keeps the child on the
///           left and generates a right child; binary to unary keeps the
///           left child and discards the right subtree.
///   ReassignFeature   redraw a uniformly chosen terminal's feature from
///           the full weighted pool (possibly the same).
///
/// Reverse pairing is canonical: Grow<->Prune, Delete<->Insert, and the two
/// reassignments and Stay pair with themselves. Because Insert and the
/// binary-to-unary reassignment always keep the existing node on the LEFT,
/// a Delete that promotes the right child has no paired reverse route and
/// gets log_q_reverse = -inf; likewise an Insert above a terminal sitting
/// at the root (the root delete rule could never promote that terminal
/// back). Such proposals are valid draws that simply never get accepted.
///
/// Generated nodes carry fresh uids; surviving nodes keep theirs, which is
/// how parameterized nodes are later matched across the edit. Coefficients
/// of generated nodes are left at (1, 0) for the parameter stage to fill.
ProposalOutcome propose(const ExprTree&, const PriorConfig&, Rng&);

/// Re-applies a recorded move to a tree. The result equals the original
/// proposal up to uids of generated nodes. Throws InvalidSite when the move
/// does not fit the tree.
ExprTree replay(const ExprTree&, const MoveKind&);

}  // namespace bsr
