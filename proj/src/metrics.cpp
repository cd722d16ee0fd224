#include "ppmbench/metrics.hpp"

#include <algorithm>
#include <numeric>

#include "ppmbench/error.hpp"

namespace ppmbench {

double auc(const std::vector<Scored>& scored) {
  std::size_t n_pos = 0;
  for (const auto& s : scored)
    if (s.positive) ++n_pos;
  std::size_t n = scored.size();
  std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw Error("AUC undefined: input contains a single class");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scored[a].score < scored[b].score; });

  // average ranks within tie groups, 1-based
  double rank_sum_pos = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && scored[order[j + 1]].score == scored[order[i]].score) ++j;
    double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k)
      if (scored[order[k]].positive) rank_sum_pos += avg_rank;
    i = j + 1;
  }
  double u = rank_sum_pos - 0.5 * static_cast<double>(n_pos) * static_cast<double>(n_pos + 1);
  return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

Confusion confusion_at(const std::vector<Scored>& scored, double threshold) {
  Confusion c;
  for (const auto& s : scored) {
    bool predicted = s.score >= threshold;
    if (predicted && s.positive) ++c.tp;
    else if (predicted && !s.positive) ++c.fp;
    else if (!predicted && s.positive) ++c.fn;
    else ++c.tn;
  }
  return c;
}

double accuracy(const std::vector<Scored>& scored, double threshold) {
  Confusion c = confusion_at(scored, threshold);
  long total = c.tp + c.tn + c.fp + c.fn;
  if (total == 0) return 0.0;
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(total);
}

namespace {

double f1(long tp, long fp, long fn) {
  double denom = 2.0 * tp + fp + fn;
  if (denom == 0.0) return 0.0;
  return 2.0 * tp / denom;
}

}  // namespace

double f_measure(const std::vector<Scored>& scored, double threshold) {
  Confusion c = confusion_at(scored, threshold);
  double f_pos = f1(c.tp, c.fp, c.fn);
  double f_neg = f1(c.tn, c.fn, c.fp);
  return 0.5 * (f_pos + f_neg);
}

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::S0: return "S0";
    case Strategy::S1: return "S1";
    case Strategy::S2: return "S2";
    case Strategy::S3: return "S3";
  }
  return "?";
}

}  // namespace ppmbench
