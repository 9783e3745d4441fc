#include "bsr/moves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "bsr/errors.hpp"

namespace bsr {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log0(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

std::size_t tag_index(MoveTag t) { return static_cast<std::size_t>(t); }

// log density of generating `node` as a grown subtree rooted at absolute
// depth `depth`: the root operator is a forced weighted draw (no split
// factor), children come from sample_structure one level deeper.
double log_forced_subtree(const ExprNode& node, const PriorConfig& cfg,
                          int depth) {
  double total = std::log(cfg.operators.weight_of(node.op.name));
  for (const ExprNode& child : node.children)
    total += log_structure_gen(child, cfg, depth + 1);
  return total;
}

}  // namespace

const char* move_name(MoveTag tag) {
  switch (tag) {
    case MoveTag::Stay: return "stay";
    case MoveTag::Grow: return "grow";
    case MoveTag::Prune: return "prune";
    case MoveTag::Delete: return "delete";
    case MoveTag::Insert: return "insert";
    case MoveTag::ReassignOperator: return "reassign-op";
    case MoveTag::ReassignFeature: return "reassign-feature";
  }
  return "?";
}

std::array<double, kNumMoves> move_probabilities(const ExprTree& tree,
                                                 const MoveConstants& mc) {
  const double n_p = count_lt_nodes(tree);
  const double n_nt = count_nonterminal(tree);
  const double n_c = count_delete_candidates(tree);

  const double stay = n_p / (mc.stay_scale * (n_p + mc.stay_shift));
  const double r = (1.0 - stay) / 3.0;
  const double grow = r * std::min(1.0, mc.grow_cap / (n_nt + mc.grow_shift));
  const double del = r * n_c / (n_c + mc.delete_shift);

  std::array<double, kNumMoves> p{stay,    grow,    r - grow, del,
                                  r - del, r / 2.0, r / 2.0};
  if (n_nt == 0.0) {
    p[tag_index(MoveTag::ReassignOperator)] = 0.0;
    double sum = 0.0;
    for (double v : p) sum += v;
    for (double& v : p) v /= sum;
  }
  return p;
}

int count_delete_candidates(const ExprTree& tree) {
  if (tree.root.terminal) return 0;
  int count = count_nonterminal(tree) - 1;  // every non-root non-terminal
  for (const ExprNode& child : tree.root.children)
    if (!child.terminal) {
      ++count;  // the root itself, deletable onto a non-terminal child
      break;
    }
  return count;
}

std::vector<int> terminal_sites(const ExprNode& root) {
  std::vector<int> out;
  for (const NodeRef& ref : flatten(root))
    if (ref.node->terminal) out.push_back(ref.index);
  return out;
}

std::vector<int> nonterminal_sites(const ExprNode& root) {
  std::vector<int> out;
  for (const NodeRef& ref : flatten(root))
    if (!ref.node->terminal) out.push_back(ref.index);
  return out;
}

std::vector<int> delete_candidate_sites(const ExprTree& tree) {
  std::vector<int> out;
  if (tree.root.terminal) return out;
  bool root_ok = false;
  for (const ExprNode& child : tree.root.children)
    if (!child.terminal) root_ok = true;
  for (const NodeRef& ref : flatten(tree.root)) {
    if (ref.node->terminal) continue;
    if (ref.index == 0 && !root_ok) continue;
    out.push_back(ref.index);
  }
  return out;
}

namespace {

ProposalOutcome propose_stay(const ExprTree& tree, double p_stay) {
  ProposalOutcome out;
  out.new_tree = tree;
  out.move.tag = MoveTag::Stay;
  out.log_q_forward = log0(p_stay);
  out.log_q_reverse = out.log_q_forward;  // identical tree, identical mass
  return out;
}

ProposalOutcome propose_grow(const ExprTree& tree, const PriorConfig& cfg,
                             const std::array<double, kNumMoves>& probs,
                             Rng& rng) {
  const auto flat = flatten(tree.root);
  const auto terms = terminal_sites(tree.root);
  const int site = terms[rng.uniform_index(terms.size())];
  const int site_depth = flat[static_cast<std::size_t>(site)].depth;
  const int old_feature = flat[static_cast<std::size_t>(site)].node->feature;

  const std::size_t which = rng.categorical(cfg.operators.weights());
  const OperatorSpec& op = cfg.operators.at(which);
  ExprNode grown;
  grown.terminal = false;
  grown.op = op;
  grown.uid = fresh_uid();
  grown.children.push_back(sample_structure(cfg, site_depth + 1, rng));
  if (op.arity == 2)
    grown.children.push_back(sample_structure(cfg, site_depth + 1, rng));

  ProposalOutcome out;
  out.move.tag = MoveTag::Grow;
  out.move.site = site;
  out.move.subtree = grown;
  out.log_q_forward =
      log0(probs[tag_index(MoveTag::Grow)]) -
      std::log(static_cast<double>(terms.size())) +
      log_forced_subtree(grown, cfg, site_depth);

  out.new_tree = tree;
  *node_at(out.new_tree.root, site) = std::move(grown);

  // reverse: prune the grown node back to a terminal with the old feature
  const auto rev = move_probabilities(out.new_tree, cfg.moves);
  const double p_prune = rev[tag_index(MoveTag::Prune)];
  if (p_prune > 0.0) {
    out.log_q_reverse =
        std::log(p_prune) -
        std::log(static_cast<double>(count_nonterminal(out.new_tree))) +
        log0(cfg.feature_weights[static_cast<std::size_t>(old_feature)]);
  } else {
    out.log_q_reverse = kNegInf;
  }
  return out;
}

ProposalOutcome propose_prune(const ExprTree& tree, const PriorConfig& cfg,
                              const std::array<double, kNumMoves>& probs,
                              Rng& rng) {
  const auto flat = flatten(tree.root);
  const auto sites = nonterminal_sites(tree.root);
  const int site = sites[rng.uniform_index(sites.size())];
  const int site_depth = flat[static_cast<std::size_t>(site)].depth;
  const ExprNode removed = *flat[static_cast<std::size_t>(site)].node;

  const int feature = static_cast<int>(rng.categorical(cfg.feature_weights));

  ProposalOutcome out;
  out.move.tag = MoveTag::Prune;
  out.move.site = site;
  out.move.new_feature = feature;
  out.log_q_forward =
      log0(probs[tag_index(MoveTag::Prune)]) -
      std::log(static_cast<double>(sites.size())) +
      log0(cfg.feature_weights[static_cast<std::size_t>(feature)]);

  out.new_tree = tree;
  *node_at(out.new_tree.root, site) = make_terminal(feature);

  // reverse: grow the removed subtree back onto the fresh terminal
  const auto rev = move_probabilities(out.new_tree, cfg.moves);
  out.log_q_reverse =
      log0(rev[tag_index(MoveTag::Grow)]) -
      std::log(static_cast<double>(count_terminal(out.new_tree))) +
      log_forced_subtree(removed, cfg, site_depth);
  return out;
}

ProposalOutcome propose_delete(const ExprTree& tree, const PriorConfig& cfg,
                               const std::array<double, kNumMoves>& probs,
                               Rng& rng) {
  const auto flat = flatten(tree.root);
  const auto cands = delete_candidate_sites(tree);
  const int site = cands[rng.uniform_index(cands.size())];
  const ExprNode& victim = *flat[static_cast<std::size_t>(site)].node;
  const int site_depth = flat[static_cast<std::size_t>(site)].depth;

  int keep = 0;
  double log_pick = 0.0;
  if (victim.op.arity == 2) {
    if (site != 0) {
      keep = static_cast<int>(rng.uniform_index(2));
      log_pick = -std::log(2.0);
    } else {
      std::vector<int> promotable;
      for (int i = 0; i < 2; ++i)
        if (!victim.children[static_cast<std::size_t>(i)].terminal)
          promotable.push_back(i);
      keep = promotable[rng.uniform_index(promotable.size())];
      log_pick = -std::log(static_cast<double>(promotable.size()));
    }
  }

  ProposalOutcome out;
  out.move.tag = MoveTag::Delete;
  out.move.site = site;
  out.move.picked_child = keep;
  out.log_q_forward = log0(probs[tag_index(MoveTag::Delete)]) -
                      std::log(static_cast<double>(cands.size())) + log_pick;

  const ExprNode kept = victim.children[static_cast<std::size_t>(keep)];
  ExprNode discarded;
  const bool binary = victim.op.arity == 2;
  if (binary) discarded = victim.children[static_cast<std::size_t>(1 - keep)];
  const OperatorSpec victim_op = victim.op;

  out.new_tree = tree;
  *node_at(out.new_tree.root, site) = kept;

  // reverse: insert the victim back above the kept child. Insert always
  // attaches the existing node on the left, so promoting the right child is
  // irreversible in one move.
  if (binary && keep == 1) {
    out.log_q_reverse = kNegInf;
    return out;
  }
  const auto rev = move_probabilities(out.new_tree, cfg.moves);
  double lq = log0(rev[tag_index(MoveTag::Insert)]) -
              std::log(static_cast<double>(node_count(out.new_tree))) +
              std::log(cfg.operators.weight_of(victim_op.name));
  if (binary) lq += log_structure_gen(discarded, cfg, site_depth + 1);
  out.log_q_reverse = lq;
  return out;
}

ProposalOutcome propose_insert(const ExprTree& tree, const PriorConfig& cfg,
                               const std::array<double, kNumMoves>& probs,
                               Rng& rng) {
  const auto flat = flatten(tree.root);
  const int total = node_count(tree);
  const int site = static_cast<int>(rng.uniform_index(
      static_cast<std::size_t>(total)));
  const int site_depth = flat[static_cast<std::size_t>(site)].depth;
  const ExprNode child = *flat[static_cast<std::size_t>(site)].node;

  const std::size_t which = rng.categorical(cfg.operators.weights());
  const OperatorSpec& op = cfg.operators.at(which);

  ExprNode added;
  added.terminal = false;
  added.op = op;
  added.uid = fresh_uid();
  added.children.push_back(child);

  ProposalOutcome out;
  out.move.tag = MoveTag::Insert;
  out.move.site = site;
  out.move.new_op = op;
  double lq = log0(probs[tag_index(MoveTag::Insert)]) -
              std::log(static_cast<double>(total)) +
              std::log(cfg.operators.weights()[which]);
  bool right_terminal = true;
  if (op.arity == 2) {
    ExprNode right = sample_structure(cfg, site_depth + 1, rng);
    lq += log_structure_gen(right, cfg, site_depth + 1);
    right_terminal = right.terminal;
    out.move.subtree = right;
    added.children.push_back(std::move(right));
  }
  out.log_q_forward = lq;

  out.new_tree = tree;
  *node_at(out.new_tree.root, site) = std::move(added);

  // reverse: delete the added node, promoting its left child. A root delete
  // only promotes non-terminal children, so inserting above a root terminal
  // has no reverse route.
  double log_pick;
  if (site == 0) {
    if (child.terminal) {
      out.log_q_reverse = kNegInf;
      return out;
    }
    log_pick = op.arity == 2 && !right_terminal ? -std::log(2.0) : 0.0;
  } else {
    log_pick = op.arity == 2 ? -std::log(2.0) : 0.0;
  }
  const auto rev = move_probabilities(out.new_tree, cfg.moves);
  out.log_q_reverse =
      log0(rev[tag_index(MoveTag::Delete)]) -
      std::log(static_cast<double>(count_delete_candidates(out.new_tree))) +
      log_pick;
  return out;
}

ProposalOutcome propose_reassign_op(const ExprTree& tree,
                                    const PriorConfig& cfg,
                                    const std::array<double, kNumMoves>& probs,
                                    Rng& rng) {
  const auto flat = flatten(tree.root);
  const auto sites = nonterminal_sites(tree.root);
  const int site = sites[rng.uniform_index(sites.size())];
  const int site_depth = flat[static_cast<std::size_t>(site)].depth;
  const ExprNode old_node = *flat[static_cast<std::size_t>(site)].node;

  const std::size_t which = rng.categorical(cfg.operators.weights());
  const OperatorSpec& op = cfg.operators.at(which);

  ExprNode node = old_node;  // keeps uid and the left child
  node.op = op;
  ProposalOutcome out;
  out.move.tag = MoveTag::ReassignOperator;
  out.move.site = site;
  out.move.new_op = op;
  double lq = log0(probs[tag_index(MoveTag::ReassignOperator)]) -
              std::log(static_cast<double>(sites.size())) +
              std::log(cfg.operators.weights()[which]);
  if (old_node.op.arity == 1 && op.arity == 2) {
    ExprNode right = sample_structure(cfg, site_depth + 1, rng);
    lq += log_structure_gen(right, cfg, site_depth + 1);
    out.move.subtree = right;
    node.children.push_back(std::move(right));
  } else if (old_node.op.arity == 2 && op.arity == 1) {
    node.children.pop_back();  // keep the left subtree
  }
  out.log_q_forward = lq;

  out.new_tree = tree;
  *node_at(out.new_tree.root, site) = std::move(node);

  // reverse: reassign the old operator back at the same site; a discarded
  // right subtree must be regenerated.
  const auto rev = move_probabilities(out.new_tree, cfg.moves);
  double lr = log0(rev[tag_index(MoveTag::ReassignOperator)]) -
              std::log(static_cast<double>(
                  count_nonterminal(out.new_tree))) +
              std::log(cfg.operators.weight_of(old_node.op.name));
  if (old_node.op.arity == 2 && op.arity == 1)
    lr += log_structure_gen(old_node.children[1], cfg, site_depth + 1);
  out.log_q_reverse = lr;
  return out;
}

ProposalOutcome propose_reassign_feature(
    const ExprTree& tree, const PriorConfig& cfg,
    const std::array<double, kNumMoves>& probs, Rng& rng) {
  const auto flat = flatten(tree.root);
  const auto terms = terminal_sites(tree.root);
  const int site = terms[rng.uniform_index(terms.size())];
  const int old_feature = flat[static_cast<std::size_t>(site)].node->feature;

  const int feature = static_cast<int>(rng.categorical(cfg.feature_weights));

  ProposalOutcome out;
  out.move.tag = MoveTag::ReassignFeature;
  out.move.site = site;
  out.move.new_feature = feature;
  out.log_q_forward =
      log0(probs[tag_index(MoveTag::ReassignFeature)]) -
      std::log(static_cast<double>(terms.size())) +
      log0(cfg.feature_weights[static_cast<std::size_t>(feature)]);

  out.new_tree = tree;
  node_at(out.new_tree.root, site)->feature = feature;

  // reverse: same site count and masses, old feature redrawn
  out.log_q_reverse =
      out.log_q_forward -
      log0(cfg.feature_weights[static_cast<std::size_t>(feature)]) +
      log0(cfg.feature_weights[static_cast<std::size_t>(old_feature)]);
  return out;
}

}  // namespace

ProposalOutcome propose(const ExprTree& tree, const PriorConfig& cfg,
                        Rng& rng) {
  const auto probs = move_probabilities(tree, cfg.moves);
  const auto tag = static_cast<MoveTag>(rng.categorical(probs));

  ProposalOutcome out;
  switch (tag) {
    case MoveTag::Stay:
      out = propose_stay(tree, probs[tag_index(MoveTag::Stay)]);
      break;
    case MoveTag::Grow:
      out = propose_grow(tree, cfg, probs, rng);
      break;
    case MoveTag::Prune:
      out = propose_prune(tree, cfg, probs, rng);
      break;
    case MoveTag::Delete:
      out = propose_delete(tree, cfg, probs, rng);
      break;
    case MoveTag::Insert:
      out = propose_insert(tree, cfg, probs, rng);
      break;
    case MoveTag::ReassignOperator:
      out = propose_reassign_op(tree, cfg, probs, rng);
      break;
    case MoveTag::ReassignFeature:
      out = propose_reassign_feature(tree, cfg, probs, rng);
      break;
  }
  out.dim_change = count_lt_nodes(out.new_tree) - count_lt_nodes(tree);
  return out;
}

ExprTree replay(const ExprTree& tree, const MoveKind& move) {
  ExprTree out = tree;
  ExprNode* node = node_at(out.root, move.site);
  if (node == nullptr) throw InvalidSite("move site outside the tree");

  switch (move.tag) {
    case MoveTag::Stay:
      return out;

    case MoveTag::Grow:
      if (!node->terminal) throw InvalidSite("grow needs a terminal site");
      if (!move.subtree) throw InvalidSite("grow move lacks its subtree");
      *node = *move.subtree;
      return out;

    case MoveTag::Prune:
      if (node->terminal) throw InvalidSite("prune needs a non-terminal site");
      if (move.new_feature < 0) throw InvalidSite("prune move lacks a feature");
      *node = make_terminal(move.new_feature);
      return out;

    case MoveTag::Delete: {
      if (node->terminal) throw InvalidSite("delete needs a non-terminal site");
      if (move.picked_child < 0 ||
          move.picked_child >= static_cast<int>(node->children.size()))
        throw InvalidSite("delete child index outside the node");
      ExprNode kept =
          std::move(node->children[static_cast<std::size_t>(move.picked_child)]);
      *node = std::move(kept);
      return out;
    }

    case MoveTag::Insert: {
      if (!move.new_op) throw InvalidSite("insert move lacks an operator");
      ExprNode added;
      added.terminal = false;
      added.op = *move.new_op;
      added.uid = fresh_uid();
      added.children.push_back(std::move(*node));
      if (move.new_op->arity == 2) {
        if (!move.subtree) throw InvalidSite("binary insert lacks a subtree");
        added.children.push_back(*move.subtree);
      }
      *node = std::move(added);
      return out;
    }

    case MoveTag::ReassignOperator: {
      if (node->terminal)
        throw InvalidSite("operator reassignment needs a non-terminal site");
      if (!move.new_op) throw InvalidSite("reassignment lacks an operator");
      const int old_arity = node->op.arity;
      node->op = *move.new_op;
      if (old_arity == 1 && move.new_op->arity == 2) {
        if (!move.subtree)
          throw InvalidSite("unary-to-binary reassignment lacks a subtree");
        node->children.push_back(*move.subtree);
      } else if (old_arity == 2 && move.new_op->arity == 1) {
        node->children.pop_back();
      }
      return out;
    }

    case MoveTag::ReassignFeature:
      if (!node->terminal)
        throw InvalidSite("feature reassignment needs a terminal site");
      if (move.new_feature < 0)
        throw InvalidSite("feature reassignment lacks a feature");
      node->feature = move.new_feature;
      return out;
  }
  throw InvalidSite("unknown move tag");
}

}  // namespace bsr
