#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gbclab/jet.hpp"

namespace gbclab {

enum class NodeKind { Number, Variable, Constant, Negate, Add, Subtract, Multiply, Divide, Power, Call };
enum class Function { Sin, Cos, Exp, Log, Sqrt, Tanh, Atan };
enum class NamedConstant { Pi, E };

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

/// Immutable expression tree node.
struct Expr {
  NodeKind kind = NodeKind::Number;
  double number = 0.0;               // Number
  int variable = 0;                  // Variable, zero-based
  NamedConstant constant{};          // Constant
  Function function{};               // Call
  ExprPtr lhs;                       // unary operand / left operand / call argument
  ExprPtr rhs;                       // right operand / exponent
};

ExprPtr make_number(double v);
ExprPtr make_variable(int index);
ExprPtr make_unary(NodeKind kind, ExprPtr operand);
ExprPtr make_binary(NodeKind kind, ExprPtr lhs, ExprPtr rhs);
ExprPtr make_call(Function fn, ExprPtr arg);

/// Structural equality; numbers compare bit-for-bit.
bool same_tree(const Expr& a, const Expr& b);

/// Whether the tree references any variable.
bool depends_on_variables(const Expr& e);

/// Highest zero-based variable index used, or -1.
int max_variable(const Expr& e);

/// Fully parenthesised canonical text that re-parses to an identical tree.
std::string to_string(const Expr& e, char var_prefix = 'x');

/// Replace every variable t_i by replacements[i].
ExprPtr substitute(const ExprPtr& e, std::span<const ExprPtr> replacements);

/// Parses one expression over variables `<prefix>1..<prefix>n`, the builtin
/// `r` (expanded to sqrt of the sum of squares), and constants pi and e.
/// `base_offset` shifts reported error positions.
ExprPtr parse_expression(std::string_view text, int n, char var_prefix = 'x', std::size_t base_offset = 0);

/// Evaluates the tree with the given jets substituted for the variables.
Jet evaluate(const Expr& e, std::span<const Jet> variables);

/// Plain value evaluation.
double evaluate_value(const Expr& e, std::span<const double> variables);

/// A parsed map f: R^n -> R^m.
struct MapSpec {
  int n = 0;
  int m = 0;
  std::vector<ExprPtr> exprs;
  std::string source;
};

/// Splits `source` on ';' and newlines (blank pieces are skipped) and parses
/// exactly m expressions in x1..xn.
MapSpec parse_map(std::string_view source, int n, int m);

/// Canonical text of a map, one expression per ';'.
std::string to_string(const MapSpec& map);

/// Values and derivatives to order 3 of a map at one point.
struct MapJet3 {
  int n = 0;
  int m = 0;
  std::vector<double> point;
  std::vector<Jet> components;

  double value(int a) const { return components[a].value(); }
  double d1(int a, int i) const { return components[a].d1(i); }
  double d2(int a, int i, int j) const { return components[a].d2(i, j); }
  double d3(int a, int i, int j, int k) const { return components[a].d3(i, j, k); }
};

/// Exact (up to rounding) jets of every component at x. Throws DomainError
/// naming the component and the point when x leaves the smooth domain.
MapJet3 eval_jet3(const MapSpec& map, std::span<const double> x);

}  // namespace gbclab
