#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <thread>

#include "ppmbench/error.hpp"
#include "ppmbench/forest.hpp"

namespace ppmbench {

double gini(const std::vector<double>& class_counts) {
  if (class_counts.empty()) throw Error("gini: empty class counts");
  double total = 0.0;
  for (double c : class_counts) {
    if (c < 0.0) throw Error("gini: negative class count");
    total += c;
  }
  if (total == 0.0) throw Error("gini: all-zero class counts");
  double sum_sq = 0.0;
  for (double c : class_counts) {
    double p = c / total;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

double hoeffding_bound(double range, double confidence, double n) {
  if (!(range > 0.0)) throw Error("hoeffding_bound: range must be positive");
  if (!(confidence > 0.0 && confidence < 1.0))
    throw Error("hoeffding_bound: confidence must be in (0,1)");
  if (!(n >= 1.0)) throw Error("hoeffding_bound: n must be >= 1");
  return std::sqrt(range * range * std::log(1.0 / confidence) / (2.0 * n));
}

namespace {

inline double gini2(double n0, double n1) {
  double total = n0 + n1;
  if (total <= 0.0) return 0.0;
  double p0 = n0 / total, p1 = n1 / total;
  return 1.0 - (p0 * p0 + p1 * p1);
}

int resolve_threads(int n_threads, std::size_t n_tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t n = n_threads > 0 ? static_cast<std::size_t>(n_threads) : hw;
  return static_cast<int>(std::min<std::size_t>(n, n_tasks ? n_tasks : 1));
}

// Encoded rows are mostly one-hot columns, so binary features are counted
// through per-row lists of columns sitting above the 0.5 cut; only the
// remaining continuous columns take the sort-based scan.
struct TrainContext {
  const std::vector<EncodedInstance>& data;
  std::size_t width;
  std::vector<bool> is_binary;          // all observed values in {0,1}
  std::vector<std::uint32_t> hot_index; // flattened per-row binary columns with x == 1
  std::vector<std::uint32_t> hot_begin; // row -> offset, size n+1
};

struct TreeBuilder {
  const TrainContext& ctx;
  const BatchHyperparameters& hp;
  std::size_t n_candidate_features;
  Rng rng;
  std::vector<BatchForest::Node> nodes;
  std::vector<std::uint32_t> feature_pool;
  std::vector<std::pair<double, bool>> scratch;  // continuous-feature scan
  std::vector<double> hot0, hot1;                // per-feature hot counts by class

  struct Best {
    double gain = 0.0;
    std::int32_t feature = -1;
    double threshold = 0.0;
  };

  std::int32_t build(std::vector<std::uint32_t>& rows, int depth) {
    double n1 = 0.0;
    for (std::uint32_t r : rows) n1 += ctx.data[r].label ? 1.0 : 0.0;
    double n0 = static_cast<double>(rows.size()) - n1;

    std::int32_t index = static_cast<std::int32_t>(nodes.size());
    nodes.emplace_back();
    nodes[index].counts[0] = n0;
    nodes[index].counts[1] = n1;

    bool pure = n0 == 0.0 || n1 == 0.0;
    if (pure || depth >= hp.max_depth ||
        rows.size() < 2 * static_cast<std::size_t>(hp.min_samples_leaf))
      return index;

    Best best = find_best_split(rows, n0, n1);
    if (best.feature < 0) return index;

    std::vector<std::uint32_t> left_rows, right_rows;
    left_rows.reserve(rows.size());
    right_rows.reserve(rows.size());
    for (std::uint32_t r : rows) {
      if (ctx.data[r].features[best.feature] <= best.threshold) left_rows.push_back(r);
      else right_rows.push_back(r);
    }
    rows.clear();
    rows.shrink_to_fit();

    nodes[index].feature = best.feature;
    nodes[index].threshold = best.threshold;
    std::int32_t left = build(left_rows, depth + 1);
    nodes[index].left = left;
    left_rows = {};
    std::int32_t right = build(right_rows, depth + 1);
    nodes[index].right = right;
    return index;
  }

  Best find_best_split(const std::vector<std::uint32_t>& rows, double n0, double n1) {
    // random feature subset, partial Fisher-Yates over the pool
    for (std::size_t i = 0; i < n_candidate_features; ++i) {
      std::size_t j = i + static_cast<std::size_t>(rng.uniform_int(ctx.width - i));
      std::swap(feature_pool[i], feature_pool[j]);
    }

    // one pass over the node's rows accumulates every binary feature's counts
    std::memset(hot0.data(), 0, hot0.size() * sizeof(double));
    std::memset(hot1.data(), 0, hot1.size() * sizeof(double));
    for (std::uint32_t r : rows) {
      std::vector<double>& side = ctx.data[r].label ? hot1 : hot0;
      for (std::uint32_t k = ctx.hot_begin[r]; k < ctx.hot_begin[r + 1]; ++k)
        side[ctx.hot_index[k]] += 1.0;
    }

    const double parent_gini = gini2(n0, n1);
    const double n = n0 + n1;
    const double msl = static_cast<double>(hp.min_samples_leaf);
    Best best;

    for (std::size_t fi = 0; fi < n_candidate_features; ++fi) {
      std::uint32_t f = feature_pool[fi];
      if (ctx.is_binary[f]) {
        // single candidate cut at 0.5; left side is x == 0
        double l0 = n0 - hot0[f];
        double l1 = n1 - hot1[f];
        double nl = l0 + l1, nr = n - nl;
        if (nl < msl || nr < msl || nl == 0.0 || nr == 0.0) continue;
        double gain = parent_gini - (nl * gini2(l0, l1) + nr * gini2(n0 - l0, n1 - l1)) / n;
        if (gain > best.gain) best = {gain, static_cast<std::int32_t>(f), 0.5};
        continue;
      }

      scratch.clear();
      for (std::uint32_t r : rows) scratch.emplace_back(ctx.data[r].features[f], ctx.data[r].label);
      std::sort(scratch.begin(), scratch.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double l0 = 0.0, l1 = 0.0;
      for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
        if (scratch[i].second) l1 += 1.0;
        else l0 += 1.0;
        if (scratch[i].first == scratch[i + 1].first) continue;  // no cut between equal values
        double nl = l0 + l1, nr = n - nl;
        if (nl < msl || nr < msl) continue;
        double gain = parent_gini - (nl * gini2(l0, l1) + nr * gini2(n0 - l0, n1 - l1)) / n;
        if (gain > best.gain) {
          double threshold = scratch[i].first + 0.5 * (scratch[i + 1].first - scratch[i].first);
          if (threshold == scratch[i + 1].first) threshold = scratch[i].first;  // midpoint rounding guard
          best = {gain, static_cast<std::int32_t>(f), threshold};
        }
      }
    }
    return best;
  }
};

}  // namespace

BatchForest BatchForest::train(const EncodedDataset& dataset, const BatchHyperparameters& hp,
                               std::uint64_t seed, int n_threads, bool bootstrap) {
  if (dataset.instances.empty()) throw Error("train_batch: empty dataset");
  if (hp.n_trees < 1 || hp.max_depth < 1 || hp.min_samples_leaf < 1)
    throw Error("train_batch: invalid hyperparameters");
  if (!(hp.max_features_fraction > 0.0 && hp.max_features_fraction <= 1.0))
    throw Error("train_batch: max_features_fraction must be in (0,1]");

  const std::size_t width = dataset.width;
  const std::size_t n = dataset.instances.size();
  for (const auto& inst : dataset.instances)
    if (inst.features.size() != width) throw Error("train_batch: inconsistent feature width");

  TrainContext ctx{dataset.instances, width, std::vector<bool>(width, true), {}, {}};
  for (const auto& inst : dataset.instances) {
    for (std::size_t f = 0; f < width; ++f) {
      double v = inst.features[f];
      if (v != 0.0 && v != 1.0) ctx.is_binary[f] = false;
    }
  }
  ctx.hot_begin.reserve(n + 1);
  ctx.hot_begin.push_back(0);
  for (const auto& inst : dataset.instances) {
    for (std::size_t f = 0; f < width; ++f)
      if (ctx.is_binary[f] && inst.features[f] == 1.0)
        ctx.hot_index.push_back(static_cast<std::uint32_t>(f));
    ctx.hot_begin.push_back(static_cast<std::uint32_t>(ctx.hot_index.size()));
  }

  BatchForest forest;
  forest.hp_ = hp;
  forest.seed_ = seed;
  forest.width_ = width;
  forest.trees_.resize(static_cast<std::size_t>(hp.n_trees));

  std::size_t n_candidates = static_cast<std::size_t>(
      std::ceil(hp.max_features_fraction * static_cast<double>(width)));
  n_candidates = std::clamp<std::size_t>(n_candidates, 1, width);

  auto build_tree = [&](std::size_t tree_index) {
    TreeBuilder builder{ctx,
                        hp,
                        n_candidates,
                        Rng(seed ^ static_cast<std::uint64_t>(tree_index)),
                        {},
                        {},
                        {},
                        std::vector<double>(width, 0.0),
                        std::vector<double>(width, 0.0)};
    builder.feature_pool.resize(width);
    for (std::size_t i = 0; i < width; ++i) builder.feature_pool[i] = static_cast<std::uint32_t>(i);

    std::vector<std::uint32_t> rows(n);
    if (bootstrap) {
      for (std::size_t i = 0; i < n; ++i)
        rows[i] = static_cast<std::uint32_t>(builder.rng.uniform_int(n));
    } else {
      for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<std::uint32_t>(i);
    }
    builder.build(rows, 0);
    forest.trees_[tree_index] = std::move(builder.nodes);
  };

  int threads = resolve_threads(n_threads, forest.trees_.size());
  if (threads <= 1) {
    for (std::size_t t = 0; t < forest.trees_.size(); ++t) build_tree(t);
  } else {
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&]() {
        while (true) {
          std::size_t t = next.fetch_add(1);
          if (t >= forest.trees_.size()) return;
          build_tree(t);
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  return forest;
}

double BatchForest::predict(std::span<const double> features) const {
  if (features.size() != width_)
    throw Error("predict: expected " + std::to_string(width_) + " features, got " +
                std::to_string(features.size()));
  double sum = 0.0;
  for (const auto& tree : trees_) {
    std::int32_t i = 0;
    while (tree[i].feature >= 0)
      i = features[tree[i].feature] <= tree[i].threshold ? tree[i].left : tree[i].right;
    double n = tree[i].counts[0] + tree[i].counts[1];
    sum += (tree[i].counts[1] + 1.0) / (n + 2.0);  // Laplace smoothing
  }
  return sum / static_cast<double>(trees_.size());
}

}  // namespace ppmbench
