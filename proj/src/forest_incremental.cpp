#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "ppmbench/error.hpp"
#include "ppmbench/forest.hpp"

namespace ppmbench {

namespace {

inline double gini2(double n0, double n1) {
  double total = n0 + n1;
  if (total <= 0.0) return 0.0;
  double p0 = n0 / total, p1 = n1 / total;
  return 1.0 - (p0 * p0 + p1 * p1);
}

// standard normal CDF
inline double phi(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

constexpr int kCandidateGrid = 8;  // candidate thresholds per continuous feature
constexpr double kMinSideWeight = 1e-6;

int resolve_threads(int n_threads, std::size_t n_tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t n = n_threads > 0 ? static_cast<std::size_t>(n_threads) : hw;
  return static_cast<int>(std::min<std::size_t>(n, n_tasks ? n_tasks : 1));
}

// flattened per-row lists of binary columns with x > 0.5
void build_hot_lists(std::span<const EncodedInstance> instances, const std::vector<bool>& is_binary,
                     std::vector<std::uint32_t>& hot_index, std::vector<std::uint32_t>& hot_begin) {
  hot_begin.clear();
  hot_index.clear();
  hot_begin.reserve(instances.size() + 1);
  hot_begin.push_back(0);
  for (const auto& inst : instances) {
    for (std::size_t f = 0; f < inst.features.size(); ++f)
      if (is_binary[f] && inst.features[f] > 0.5) hot_index.push_back(static_cast<std::uint32_t>(f));
    hot_begin.push_back(static_cast<std::uint32_t>(hot_index.size()));
  }
}

}  // namespace

void IncrementalForest::split_subspace(Tree& tree) const {
  tree.binary_sub.clear();
  tree.cont_sub.clear();
  tree.binary_slot.assign(width_, -1);
  for (std::uint32_t f : tree.subspace) {
    if (is_binary_[f]) {
      tree.binary_slot[f] = static_cast<std::int32_t>(tree.binary_sub.size());
      tree.binary_sub.push_back(f);
    } else {
      tree.cont_sub.push_back(f);
    }
  }
}

IncrementalForest::LeafStats IncrementalForest::make_leaf_stats(const Tree& tree) const {
  LeafStats leaf;
  leaf.above.resize(tree.binary_sub.size() * 2, 0.0f);
  leaf.min_value.resize(tree.cont_sub.size(), 0.0f);
  leaf.max_value.resize(tree.cont_sub.size(), 0.0f);
  leaf.stats.resize(tree.cont_sub.size() * 2);
  return leaf;
}

IncrementalForest IncrementalForest::train_initial(const EncodedDataset& dataset,
                                                   const IncHyperparameters& hp,
                                                   std::uint64_t seed, int n_threads) {
  if (dataset.instances.empty()) throw Error("train_incremental_initial: empty dataset");
  if (hp.n_trees < 1 || hp.grace_period < 1) throw Error("train_incremental_initial: invalid hyperparameters");
  if (!(hp.split_confidence > 0.0 && hp.split_confidence < 1.0))
    throw Error("train_incremental_initial: split_confidence must be in (0,1)");
  if (!(hp.tie_threshold >= 0.0 && hp.tie_threshold < 1.0))
    throw Error("train_incremental_initial: tie_threshold must be in [0,1)");
  if (!(hp.max_features_fraction > 0.0 && hp.max_features_fraction <= 1.0))
    throw Error("train_incremental_initial: max_features_fraction must be in (0,1]");

  IncrementalForest forest;
  forest.hp_ = hp;
  forest.seed_ = seed;
  forest.width_ = dataset.width;

  forest.is_binary_.assign(dataset.width, true);
  for (const auto& inst : dataset.instances) {
    if (inst.features.size() != dataset.width)
      throw Error("train_incremental_initial: inconsistent feature width");
    for (std::size_t f = 0; f < dataset.width; ++f) {
      double v = inst.features[f];
      if (v != 0.0 && v != 1.0) forest.is_binary_[f] = false;
    }
  }

  std::size_t subspace_size = static_cast<std::size_t>(
      std::ceil(hp.max_features_fraction * static_cast<double>(dataset.width)));
  subspace_size = std::clamp<std::size_t>(subspace_size, 1, dataset.width);

  forest.trees_.resize(static_cast<std::size_t>(hp.n_trees));
  for (std::size_t t = 0; t < forest.trees_.size(); ++t) {
    Tree& tree = forest.trees_[t];
    tree.rng = Rng(seed ^ static_cast<std::uint64_t>(t));
    std::vector<std::uint32_t> pool(dataset.width);
    for (std::size_t i = 0; i < dataset.width; ++i) pool[i] = static_cast<std::uint32_t>(i);
    for (std::size_t i = 0; i < subspace_size; ++i) {
      std::size_t j = i + static_cast<std::size_t>(tree.rng.uniform_int(dataset.width - i));
      std::swap(pool[i], pool[j]);
    }
    tree.subspace.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(subspace_size));
    std::sort(tree.subspace.begin(), tree.subspace.end());
    forest.split_subspace(tree);
    Node root;
    root.leaf = std::make_unique<LeafStats>(forest.make_leaf_stats(tree));
    tree.nodes.push_back(std::move(root));
  }

  forest.update(dataset.instances, n_threads);
  return forest;
}

void IncrementalForest::learn(Tree& tree, std::span<const double> x,
                              std::span<const std::uint32_t> hot, bool y, double weight) {
  std::int32_t i = 0;
  while (tree.nodes[i].feature >= 0)
    i = x[tree.nodes[i].feature] <= tree.nodes[i].threshold ? tree.nodes[i].left
                                                            : tree.nodes[i].right;
  Node& node = tree.nodes[i];
  const std::size_t cls = y ? 1 : 0;
  node.counts[cls] += weight;
  LeafStats& leaf = *node.leaf;

  for (std::uint32_t f : hot) {
    std::int32_t slot = tree.binary_slot[f];
    if (slot >= 0) leaf.above[static_cast<std::size_t>(slot) * 2 + cls] += static_cast<float>(weight);
  }

  const double class_weight = node.counts[cls];  // after the increment
  for (std::size_t s = 0; s < tree.cont_sub.size(); ++s) {
    float v = static_cast<float>(x[tree.cont_sub[s]]);
    if (!leaf.touched) {
      leaf.min_value[s] = v;
      leaf.max_value[s] = v;
    } else {
      leaf.min_value[s] = std::min(leaf.min_value[s], v);
      leaf.max_value[s] = std::max(leaf.max_value[s], v);
    }
    GaussStat& g = leaf.stats[s * 2 + cls];
    // weighted Welford
    float delta = v - g.mean;
    g.mean += static_cast<float>(weight / class_weight) * delta;
    g.m2 += static_cast<float>(weight) * delta * (v - g.mean);
  }
  leaf.touched = true;
  leaf.weight_since_attempt += weight;
  if (leaf.weight_since_attempt >= static_cast<double>(hp_.grace_period)) {
    leaf.weight_since_attempt = 0.0;
    attempt_split(tree, i);
  }
}

void IncrementalForest::attempt_split(Tree& tree, std::int32_t node_index) {
  Node& node = tree.nodes[node_index];
  const double n0 = node.counts[0], n1 = node.counts[1];
  if (n0 == 0.0 || n1 == 0.0) return;  // pure; nothing to gain
  const double total = n0 + n1;
  const double parent_gini = gini2(n0, n1);
  const LeafStats& leaf = *node.leaf;

  struct Candidate {
    double gain = 0.0;
    double threshold = 0.0;
    double left_counts[2] = {0.0, 0.0};
    bool valid = false;
  };
  Candidate best, second;
  std::int32_t best_feature = -1;

  auto consider = [&](std::int32_t feature, const Candidate& candidate) {
    if (!candidate.valid) return;
    if (!best.valid || candidate.gain > best.gain) {
      second = best;
      best = candidate;
      best_feature = feature;
    } else if (!second.valid || candidate.gain > second.gain) {
      second = candidate;
    }
  };

  // binary columns: exact counts at the 0.5 cut, left side is x <= 0.5
  for (std::size_t s = 0; s < tree.binary_sub.size(); ++s) {
    double a0 = leaf.above[s * 2 + 0], a1 = leaf.above[s * 2 + 1];
    double l0 = n0 - a0, l1 = n1 - a1;
    double nl = l0 + l1, nr = a0 + a1;
    if (nl < kMinSideWeight || nr < kMinSideWeight) continue;
    double gain = parent_gini - (nl * gini2(l0, l1) + nr * gini2(a0, a1)) / total;
    consider(static_cast<std::int32_t>(tree.binary_sub[s]), {gain, 0.5, {l0, l1}, true});
  }

  // continuous columns: candidate grid under per-class Gaussian approximations
  for (std::size_t s = 0; s < tree.cont_sub.size(); ++s) {
    float lo = leaf.min_value[s], hi = leaf.max_value[s];
    if (!(lo < hi)) continue;
    const GaussStat& g0 = leaf.stats[s * 2 + 0];
    const GaussStat& g1 = leaf.stats[s * 2 + 1];
    double sd0 = n0 > 0.0 ? std::sqrt(std::max(0.0, static_cast<double>(g0.m2) / n0)) : 0.0;
    double sd1 = n1 > 0.0 ? std::sqrt(std::max(0.0, static_cast<double>(g1.m2) / n1)) : 0.0;

    Candidate feature_best;
    for (int c = 0; c < kCandidateGrid; ++c) {
      double cut = lo + (hi - lo) * (c + 1) / (kCandidateGrid + 1);
      if (!(cut > lo && cut < hi)) continue;
      double l0 = sd0 > 0.0 ? n0 * phi((cut - g0.mean) / sd0) : (g0.mean <= cut ? n0 : 0.0);
      double l1 = sd1 > 0.0 ? n1 * phi((cut - g1.mean) / sd1) : (g1.mean <= cut ? n1 : 0.0);
      double nl = l0 + l1, nr = total - nl;
      if (nl < kMinSideWeight || nr < kMinSideWeight) continue;
      double gain = parent_gini - (nl * gini2(l0, l1) + nr * gini2(n0 - l0, n1 - l1)) / total;
      if (!feature_best.valid || gain > feature_best.gain)
        feature_best = {gain, cut, {l0, l1}, true};
    }
    consider(static_cast<std::int32_t>(tree.cont_sub[s]), feature_best);
  }

  if (!best.valid || best.gain <= 0.0) return;
  double second_gain = second.valid ? second.gain : 0.0;
  double eps = hoeffding_bound(1.0, hp_.split_confidence, total);
  if (!(best.gain - second_gain > eps || eps < hp_.tie_threshold)) return;

  // split: children seeded with the estimated class distributions
  auto make_child = [&](double c0, double c1) {
    Node child;
    child.counts[0] = c0;
    child.counts[1] = c1;
    child.leaf = std::make_unique<LeafStats>(make_leaf_stats(tree));
    return child;
  };
  std::int32_t left_index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.push_back(make_child(best.left_counts[0], best.left_counts[1]));
  std::int32_t right_index = static_cast<std::int32_t>(tree.nodes.size());
  tree.nodes.push_back(make_child(n0 - best.left_counts[0], n1 - best.left_counts[1]));

  Node& parent = tree.nodes[node_index];  // re-resolve: push_back may reallocate
  parent.feature = best_feature;
  parent.threshold = best.threshold;
  parent.left = left_index;
  parent.right = right_index;
  parent.leaf.reset();
}

void IncrementalForest::run_stream(std::span<const EncodedInstance> instances,
                                   const std::vector<std::uint32_t>& hot_index,
                                   const std::vector<std::uint32_t>& hot_begin, int n_threads) {
  auto run_tree = [&](std::size_t t) {
    Tree& tree = trees_[t];
    for (std::size_t i = 0; i < instances.size(); ++i) {
      int k = tree.rng.poisson1();  // online bagging weight
      if (k > 0) {
        std::span<const std::uint32_t> hot(hot_index.data() + hot_begin[i],
                                           hot_begin[i + 1] - hot_begin[i]);
        learn(tree, instances[i].features, hot, instances[i].label, static_cast<double>(k));
      }
    }
  };

  int threads = resolve_threads(n_threads, trees_.size());
  if (threads <= 1 || instances.empty()) {
    for (std::size_t t = 0; t < trees_.size(); ++t) run_tree(t);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        std::size_t t = next.fetch_add(1);
        if (t >= trees_.size()) return;
        run_tree(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

void IncrementalForest::update(std::span<const EncodedInstance> instances, int n_threads) {
  for (const auto& inst : instances)
    if (inst.features.size() != width_)
      throw Error("update: expected " + std::to_string(width_) + " features, got " +
                  std::to_string(inst.features.size()));
  std::vector<std::uint32_t> hot_index, hot_begin;
  build_hot_lists(instances, is_binary_, hot_index, hot_begin);
  run_stream(instances, hot_index, hot_begin, n_threads);
}

double IncrementalForest::predict(std::span<const double> features) const {
  if (features.size() != width_)
    throw Error("predict: expected " + std::to_string(width_) + " features, got " +
                std::to_string(features.size()));
  double sum = 0.0;
  for (const auto& tree : trees_) {
    std::int32_t i = 0;
    while (tree.nodes[i].feature >= 0)
      i = features[tree.nodes[i].feature] <= tree.nodes[i].threshold ? tree.nodes[i].left
                                                                     : tree.nodes[i].right;
    double n = tree.nodes[i].counts[0] + tree.nodes[i].counts[1];
    sum += (tree.nodes[i].counts[1] + 1.0) / (n + 2.0);
  }
  return sum / static_cast<double>(trees_.size());
}

}  // namespace ppmbench
