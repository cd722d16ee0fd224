#include "ppmbench/outcome.hpp"

#include <cctype>
#include <vector>

#include "ppmbench/error.hpp"

namespace ppmbench {

struct FormulaBuilder {
  static Formula make(Formula::Op op, std::string label, Formula lhs, Formula rhs) {
    auto node = std::make_shared<Formula::Node>();
    node->op = op;
    node->label = std::move(label);
    node->lhs = std::move(lhs.node_);
    node->rhs = std::move(rhs.node_);
    return Formula(std::move(node));
  }
  static bool equal(const std::shared_ptr<const Formula::Node>& a,
                    const std::shared_ptr<const Formula::Node>& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op) return false;
    if (a->op == Formula::Op::Atom) return a->label == b->label;
    return equal(a->lhs, b->lhs) && equal(a->rhs, b->rhs);
  }
};

Formula Formula::atom(std::string activity) {
  return FormulaBuilder::make(Op::Atom, std::move(activity), Formula(), Formula());
}

Formula Formula::unary(Op op, Formula operand) {
  return FormulaBuilder::make(op, {}, std::move(operand), Formula());
}

Formula Formula::binary(Op op, Formula lhs, Formula rhs) {
  return FormulaBuilder::make(op, {}, std::move(lhs), std::move(rhs));
}

bool Formula::operator==(const Formula& other) const {
  return FormulaBuilder::equal(node_, other.node_);
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

namespace {

struct Token {
  enum class Kind { LParen, RParen, Bang, Amp, Pipe, Arrow, Next, Eventually, Globally, Until, Ident, End };
  Kind kind;
  std::string text;
  std::size_t pos;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return current_; }
  Token take() {
    Token t = current_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::size_t start = pos_;
    if (pos_ >= text_.size()) {
      current_ = {Token::Kind::End, "", start};
      return;
    }
    char c = text_[pos_];
    switch (c) {
      case '(': ++pos_; current_ = {Token::Kind::LParen, "(", start}; return;
      case ')': ++pos_; current_ = {Token::Kind::RParen, ")", start}; return;
      case '!': ++pos_; current_ = {Token::Kind::Bang, "!", start}; return;
      case '&': ++pos_; current_ = {Token::Kind::Amp, "&", start}; return;
      case '|': ++pos_; current_ = {Token::Kind::Pipe, "|", start}; return;
      case '-':
        if (pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
          pos_ += 2;
          current_ = {Token::Kind::Arrow, "->", start};
          return;
        }
        throw ParseError("unexpected '-'", start);
      case '"': {
        ++pos_;
        std::string s;
        while (pos_ < text_.size() && text_[pos_] != '"') {
          if (text_[pos_] == '\\' && pos_ + 1 < text_.size() &&
              (text_[pos_ + 1] == '"' || text_[pos_ + 1] == '\\')) {
            s.push_back(text_[pos_ + 1]);
            pos_ += 2;
          } else {
            s.push_back(text_[pos_++]);
          }
        }
        if (pos_ >= text_.size()) throw ParseError("unterminated quoted atom", start);
        ++pos_;
        current_ = {Token::Kind::Ident, std::move(s), start};
        return;
      }
      default: break;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t end = pos_;
      while (end < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
        ++end;
      std::string word(text_.substr(pos_, end - pos_));
      pos_ = end;
      if (word == "X") current_ = {Token::Kind::Next, word, start};
      else if (word == "F") current_ = {Token::Kind::Eventually, word, start};
      else if (word == "G") current_ = {Token::Kind::Globally, word, start};
      else if (word == "U") current_ = {Token::Kind::Until, word, start};
      else current_ = {Token::Kind::Ident, std::move(word), start};
      return;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  Token current_{Token::Kind::End, "", 0};
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lexer_(text) {}

  Formula parse() {
    if (lexer_.peek().kind == Token::Kind::End) throw ParseError("empty formula", 0);
    Formula f = parse_implies();
    const Token& t = lexer_.peek();
    if (t.kind != Token::Kind::End)
      throw ParseError("unexpected token '" + t.text + "'", t.pos);
    return f;
  }

 private:
  Formula parse_implies() {  // right-assoc
    Formula lhs = parse_or();
    if (lexer_.peek().kind == Token::Kind::Arrow) {
      lexer_.take();
      return Formula::binary(Formula::Op::Implies, std::move(lhs), parse_implies());
    }
    return lhs;
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (lexer_.peek().kind == Token::Kind::Pipe) {
      lexer_.take();
      lhs = Formula::binary(Formula::Op::Or, std::move(lhs), parse_and());
    }
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (lexer_.peek().kind == Token::Kind::Amp) {
      lexer_.take();
      lhs = Formula::binary(Formula::Op::And, std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_until() {  // right-assoc
    Formula lhs = parse_unary();
    if (lexer_.peek().kind == Token::Kind::Until) {
      lexer_.take();
      return Formula::binary(Formula::Op::Until, std::move(lhs), parse_until());
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = lexer_.peek();
    switch (t.kind) {
      case Token::Kind::Bang: lexer_.take(); return Formula::unary(Formula::Op::Not, parse_unary());
      case Token::Kind::Next: lexer_.take(); return Formula::unary(Formula::Op::Next, parse_unary());
      case Token::Kind::Eventually:
        lexer_.take();
        return Formula::unary(Formula::Op::Eventually, parse_unary());
      case Token::Kind::Globally:
        lexer_.take();
        return Formula::unary(Formula::Op::Globally, parse_unary());
      default: return parse_primary();
    }
  }

  Formula parse_primary() {
    Token t = lexer_.take();
    if (t.kind == Token::Kind::LParen) {
      Formula f = parse_implies();
      Token close = lexer_.take();
      if (close.kind != Token::Kind::RParen) throw ParseError("expected ')'", close.pos);
      return f;
    }
    if (t.kind == Token::Kind::Ident) return Formula::atom(std::move(t.text));
    throw ParseError("expected atom or '(', got '" + (t.text.empty() ? "end of input" : t.text) + "'",
                     t.pos);
  }

  Lexer lexer_;
};

bool is_bare_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (s == "U" || s == "X" || s == "F" || s == "G") return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

void print(const Formula& f, std::string& out) {
  switch (f.op()) {
    case Formula::Op::Atom: {
      const std::string& a = f.atom_label();
      if (is_bare_identifier(a)) {
        out += a;
      } else {
        out.push_back('"');
        for (char c : a) {
          if (c == '"' || c == '\\') out.push_back('\\');
          out.push_back(c);
        }
        out.push_back('"');
      }
      return;
    }
    case Formula::Op::Not: out += "!("; print(f.lhs(), out); out += ")"; return;
    case Formula::Op::Next: out += "X("; print(f.lhs(), out); out += ")"; return;
    case Formula::Op::Eventually: out += "F("; print(f.lhs(), out); out += ")"; return;
    case Formula::Op::Globally: out += "G("; print(f.lhs(), out); out += ")"; return;
    case Formula::Op::And:
    case Formula::Op::Or:
    case Formula::Op::Implies:
    case Formula::Op::Until: {
      const char* op = f.op() == Formula::Op::And       ? " & "
                       : f.op() == Formula::Op::Or      ? " | "
                       : f.op() == Formula::Op::Implies ? " -> "
                                                        : " U ";
      out.push_back('(');
      print(f.lhs(), out);
      out += op;
      print(f.rhs(), out);
      out.push_back(')');
      return;
    }
  }
}

}  // namespace

Formula parse_formula(std::string_view text) { return Parser(text).parse(); }

std::string to_string(const Formula& formula) {
  std::string out;
  print(formula, out);
  return out;
}

// ---------------------------------------------------------------------------
// evaluation
// ---------------------------------------------------------------------------

namespace {

// Truth vector of the formula at every position, computed bottom-up.
std::vector<char> eval_positions(const Formula& f, const Trace& trace) {
  const std::size_t n = trace.events.size();
  std::vector<char> v(n);
  switch (f.op()) {
    case Formula::Op::Atom:
      for (std::size_t i = 0; i < n; ++i) v[i] = trace.events[i].activity == f.atom_label();
      return v;
    case Formula::Op::Not: {
      auto a = eval_positions(f.lhs(), trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i];
      return v;
    }
    case Formula::Op::And: {
      auto a = eval_positions(f.lhs(), trace);
      auto b = eval_positions(f.rhs(), trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[i] && b[i];
      return v;
    }
    case Formula::Op::Or: {
      auto a = eval_positions(f.lhs(), trace);
      auto b = eval_positions(f.rhs(), trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = a[i] || b[i];
      return v;
    }
    case Formula::Op::Implies: {
      auto a = eval_positions(f.lhs(), trace);
      auto b = eval_positions(f.rhs(), trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = !a[i] || b[i];
      return v;
    }
    case Formula::Op::Next: {  // strong next
      auto a = eval_positions(f.lhs(), trace);
      for (std::size_t i = 0; i < n; ++i) v[i] = (i + 1 < n) && a[i + 1];
      return v;
    }
    case Formula::Op::Eventually: {
      auto a = eval_positions(f.lhs(), trace);
      char acc = 0;
      for (std::size_t i = n; i-- > 0;) {
        acc = acc || a[i];
        v[i] = acc;
      }
      return v;
    }
    case Formula::Op::Globally: {
      auto a = eval_positions(f.lhs(), trace);
      char acc = 1;
      for (std::size_t i = n; i-- > 0;) {
        acc = acc && a[i];
        v[i] = acc;
      }
      return v;
    }
    case Formula::Op::Until: {
      auto a = eval_positions(f.lhs(), trace);
      auto b = eval_positions(f.rhs(), trace);
      v[n - 1] = b[n - 1];
      for (std::size_t i = n - 1; i-- > 0;) v[i] = b[i] || (a[i] && v[i + 1]);
      return v;
    }
  }
  throw Error("unreachable formula op");
}

}  // namespace

bool evaluate(const Formula& formula, const Trace& trace) {
  if (trace.events.empty()) throw Error("cannot evaluate formula on an empty trace");
  return eval_positions(formula, trace)[0];
}

// ---------------------------------------------------------------------------
// labelers
// ---------------------------------------------------------------------------

OutcomeLabeler OutcomeLabeler::ltl(Formula formula) {
  OutcomeLabeler l;
  l.formula_ = std::move(formula);
  return l;
}

OutcomeLabeler OutcomeLabeler::fast_case(const EventLog& reference_log) {
  if (reference_log.traces().empty())
    throw Error("fast-case labeler needs a non-empty reference log");
  return fast_case_threshold(stats(reference_log).mean_cycle_time_seconds);
}

OutcomeLabeler OutcomeLabeler::fast_case_threshold(double threshold_seconds) {
  OutcomeLabeler l;
  l.threshold_seconds_ = threshold_seconds;
  return l;
}

bool OutcomeLabeler::label(const Trace& trace) const {
  if (formula_) return evaluate(*formula_, trace);
  return trace.cycle_time_seconds() < threshold_seconds_;  // strictly lower than the mean
}

std::map<std::string, bool> label_log(const EventLog& log, const OutcomeLabeler& labeler) {
  if (log.traces().empty()) throw Error("cannot label an empty log");
  std::map<std::string, bool> labels;
  for (const auto& trace : log.traces()) labels[trace.case_id] = labeler.label(trace);
  return labels;
}

}  // namespace ppmbench
