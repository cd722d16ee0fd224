#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "ppmbench/eventlog.hpp"

namespace ppmbench {

// LTLf abstract syntax tree over finite traces. Immutable, cheap to copy.
class Formula {
 public:
  enum class Op { Atom, Not, And, Or, Implies, Next, Eventually, Globally, Until };

  static Formula atom(std::string activity);
  static Formula unary(Op op, Formula operand);        // Not, Next, Eventually, Globally
  static Formula binary(Op op, Formula lhs, Formula rhs);  // And, Or, Implies, Until

  Op op() const { return node_->op; }
  const std::string& atom_label() const { return node_->label; }
  Formula lhs() const { return Formula(node_->lhs); }
  Formula rhs() const { return Formula(node_->rhs); }

  bool operator==(const Formula& other) const;

 private:
  struct Node {
    Op op;
    std::string label;
    std::shared_ptr<const Node> lhs;  // null for Atom
    std::shared_ptr<const Node> rhs;  // null for unary
  };
  Formula() = default;
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  bool empty() const { return node_ == nullptr; }
  std::shared_ptr<const Node> node_;
  friend struct FormulaBuilder;
};

// Grammar: atoms are bare identifiers or double-quoted strings; prefix
// `!` `X` `F` `G`; binary `U` (right-assoc), `&`, `|`, `->` with precedence
// unary > U > & > | > ->; parentheses override. Throws ParseError.
Formula parse_formula(std::string_view text);

// Canonical text form; parse_formula(to_string(f)) == f.
std::string to_string(const Formula& formula);

// LTLf semantics at position 1 with strong Next, evaluated bottom-up over all
// positions in one pass.
bool evaluate(const Formula& formula, const Trace& trace);

// Labeling over completed traces: an LTLf formula or the duration-based
// "fast case" property (cycle time strictly below a frozen reference mean).
class OutcomeLabeler {
 public:
  static OutcomeLabeler ltl(Formula formula);
  // Threshold computed once from the reference log's mean cycle time.
  static OutcomeLabeler fast_case(const EventLog& reference_log);
  static OutcomeLabeler fast_case_threshold(double threshold_seconds);

  bool is_fast_case() const { return !formula_.has_value(); }
  double threshold_seconds() const { return threshold_seconds_; }
  const Formula& formula() const { return *formula_; }

  bool label(const Trace& trace) const;

 private:
  OutcomeLabeler() = default;
  std::optional<Formula> formula_;
  double threshold_seconds_ = 0.0;
};

// Labels every complete trace of the log. Throws Error on an empty log.
std::map<std::string, bool> label_log(const EventLog& log, const OutcomeLabeler& labeler);

}  // namespace ppmbench
