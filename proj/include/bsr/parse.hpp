#pragma once

#include <optional>
#include <string_view>

#include "bsr/expr_tree.hpp"

namespace bsr {

/// Parses the infix grammar emitted by to_infix back into a tree:
///   - terminals "x1", "x2", ... (1-based)
///   - binary "(L+R)", "(L-R)", "(L*R)", "(L/R)"
///   - unary "sin(C)", "cos(C)", "exp(C)", "(-C)", "(1/C)", "(C^2)", "(C^3)"
///   - linear transforms "(a*C+b)" / "(a*C-b)" with numeric a, b
///   - any registered operator by name, "name(C)" or "name(L,R)"
/// Numeric literals are only legal where a pattern above absorbs them into a
/// linear transform, inversion or power. Throws ParseError with the position
/// of the offending character.
ExprTree parse_infix(std::string_view text);

/// Same, with extra operators resolvable by name alongside the built-ins.
ExprTree parse_infix(std::string_view text, const OperatorSet& extra_ops);

}  // namespace bsr
