#pragma once

// Independent reference implementations used by the unit and acceptance
// suites. These stay deliberately naive and separate from the library code
// they check.

#include <algorithm>
#include <string>
#include <vector>

#include "ppmbench/eventlog.hpp"
#include "ppmbench/metrics.hpp"
#include "ppmbench/outcome.hpp"
#include "ppmbench/rng.hpp"

namespace oracles {

// O(n^2) Mann-Whitney statistic: 1 per win, 0.5 per tie.
inline double auc_pair_count(const std::vector<ppmbench::Scored>& scored) {
  double sum = 0.0;
  std::size_t n_pos = 0, n_neg = 0;
  for (const auto& p : scored) {
    if (!p.positive) continue;
    ++n_pos;
    for (const auto& q : scored) {
      if (q.positive) continue;
      if (p.score > q.score) sum += 1.0;
      else if (p.score == q.score) sum += 0.5;
    }
  }
  for (const auto& q : scored)
    if (!q.positive) ++n_neg;
  return sum / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

inline std::vector<ppmbench::Scored> random_scored(ppmbench::Rng& rng, std::size_t n,
                                                   int distinct_levels) {
  std::vector<ppmbench::Scored> scored;
  bool has_pos = false, has_neg = false;
  for (std::size_t i = 0; i < n; ++i) {
    double score = distinct_levels > 0
                       ? static_cast<double>(rng.uniform_int(distinct_levels)) / distinct_levels
                       : rng.uniform();
    bool pos = rng.uniform() < 0.5;
    scored.push_back({score, pos});
    has_pos |= pos;
    has_neg |= !pos;
  }
  if (!has_pos) scored[0].positive = true;
  if (!has_neg) scored[n - 1].positive = false;
  return scored;
}

// Naive recursive LTLf semantics with the quantifiers spelled out.
inline bool ltl(const ppmbench::Formula& f, const ppmbench::Trace& t, std::size_t i) {
  using Op = ppmbench::Formula::Op;
  const std::size_t n = t.events.size();
  switch (f.op()) {
    case Op::Atom: return t.events[i].activity == f.atom_label();
    case Op::Not: return !ltl(f.lhs(), t, i);
    case Op::And: return ltl(f.lhs(), t, i) && ltl(f.rhs(), t, i);
    case Op::Or: return ltl(f.lhs(), t, i) || ltl(f.rhs(), t, i);
    case Op::Implies: return !ltl(f.lhs(), t, i) || ltl(f.rhs(), t, i);
    case Op::Next: return i + 1 < n && ltl(f.lhs(), t, i + 1);
    case Op::Eventually:
      for (std::size_t j = i; j < n; ++j)
        if (ltl(f.lhs(), t, j)) return true;
      return false;
    case Op::Globally:
      for (std::size_t j = i; j < n; ++j)
        if (!ltl(f.lhs(), t, j)) return false;
      return true;
    case Op::Until:
      for (std::size_t j = i; j < n; ++j) {
        if (ltl(f.rhs(), t, j)) {
          bool all = true;
          for (std::size_t k = i; k < j; ++k)
            if (!ltl(f.lhs(), t, k)) all = false;
          if (all) return true;
        }
      }
      return false;
  }
  return false;
}

inline ppmbench::Formula random_formula(ppmbench::Rng& rng, int depth,
                                        const std::vector<std::string>& alphabet) {
  using F = ppmbench::Formula;
  if (depth == 0 || rng.uniform() < 0.25)
    return F::atom(alphabet[rng.uniform_int(alphabet.size())]);
  switch (rng.uniform_int(8)) {
    case 0: return F::unary(F::Op::Not, random_formula(rng, depth - 1, alphabet));
    case 1: return F::unary(F::Op::Next, random_formula(rng, depth - 1, alphabet));
    case 2: return F::unary(F::Op::Eventually, random_formula(rng, depth - 1, alphabet));
    case 3: return F::unary(F::Op::Globally, random_formula(rng, depth - 1, alphabet));
    case 4:
      return F::binary(F::Op::And, random_formula(rng, depth - 1, alphabet),
                       random_formula(rng, depth - 1, alphabet));
    case 5:
      return F::binary(F::Op::Or, random_formula(rng, depth - 1, alphabet),
                       random_formula(rng, depth - 1, alphabet));
    case 6:
      return F::binary(F::Op::Implies, random_formula(rng, depth - 1, alphabet),
                       random_formula(rng, depth - 1, alphabet));
    default:
      return F::binary(F::Op::Until, random_formula(rng, depth - 1, alphabet),
                       random_formula(rng, depth - 1, alphabet));
  }
}

inline ppmbench::Trace trace_of(const std::vector<std::string>& activities) {
  ppmbench::Trace t;
  t.case_id = "t";
  std::int64_t ts = 0;
  for (const auto& a : activities) {
    ppmbench::Event e;
    e.activity = a;
    e.timestamp = ppmbench::Timestamp{ts};
    ts += 1000;
    t.events.push_back(std::move(e));
  }
  return t;
}

inline ppmbench::Trace random_trace(ppmbench::Rng& rng, std::size_t max_len,
                                    const std::vector<std::string>& alphabet) {
  std::vector<std::string> activities;
  std::size_t len = 1 + rng.uniform_int(max_len);
  for (std::size_t i = 0; i < len; ++i)
    activities.push_back(alphabet[rng.uniform_int(alphabet.size())]);
  return trace_of(activities);
}

}  // namespace oracles
