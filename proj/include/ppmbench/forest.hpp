#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ppmbench/encoding.hpp"
#include "ppmbench/rng.hpp"

namespace ppmbench {

struct BatchHyperparameters {
  int n_trees = 100;
  int max_depth = 10;
  int min_samples_leaf = 1;
  double max_features_fraction = 1.0;

  bool operator==(const BatchHyperparameters&) const = default;
};

struct IncHyperparameters {
  int n_trees = 25;
  int grace_period = 200;            // instances between split attempts
  double split_confidence = 1e-4;    // delta of the Hoeffding bound
  double tie_threshold = 0.05;       // tau
  double max_features_fraction = 1.0;

  bool operator==(const IncHyperparameters&) const = default;
};

// 1 - sum p_c^2. Throws on empty/all-zero counts.
double gini(const std::vector<double>& class_counts);

// epsilon = sqrt(R^2 ln(1/delta) / (2n))
double hoeffding_bound(double range, double confidence, double n);

// CART ensemble: bootstrap per tree, random feature subset per node, best
// Gini-gain threshold splits. Fully deterministic given (data, hp, seed).
class BatchForest {
 public:
  struct Node {
    std::int32_t feature = -1;  // -1: leaf
    double threshold = 0.0;     // go left when x[feature] <= threshold
    std::int32_t left = -1;
    std::int32_t right = -1;
    double counts[2] = {0.0, 0.0};  // leaf class counts (neg, pos)
  };

  static BatchForest train(const EncodedDataset& dataset, const BatchHyperparameters& hp,
                           std::uint64_t seed, int n_threads = 0, bool bootstrap = true);

  double predict(std::span<const double> features) const;

  const BatchHyperparameters& hyperparameters() const { return hp_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t schema_width() const { return width_; }
  const std::vector<std::vector<Node>>& trees() const { return trees_; }

 private:
  BatchHyperparameters hp_;
  std::uint64_t seed_ = 0;
  std::size_t width_ = 0;
  std::vector<std::vector<Node>> trees_;
  friend class Model;
};

// Hoeffding-tree ensemble with Oza-Russell online bagging (Poisson(1) weights)
// and a fixed random feature subspace per tree. Exposes the update function.
class IncrementalForest {
 public:
  static IncrementalForest train_initial(const EncodedDataset& dataset,
                                         const IncHyperparameters& hp, std::uint64_t seed,
                                         int n_threads = 0);

  void update(std::span<const EncodedInstance> instances, int n_threads = 0);

  double predict(std::span<const double> features) const;

  const IncHyperparameters& hyperparameters() const { return hp_; }
  std::uint64_t seed() const { return seed_; }
  std::size_t schema_width() const { return width_; }

  struct GaussStat {  // per (continuous subspace feature, class), Welford accumulators
    float mean = 0.0f;
    float m2 = 0.0f;
  };
  // Binary (one-hot / boolean) columns keep exact weighted counts of the
  // x > 0.5 side; continuous columns keep per-class Gaussian approximations.
  struct LeafStats {
    std::vector<float> above;      // binary subspace features * 2, class-major
    std::vector<float> min_value;  // per continuous subspace feature
    std::vector<float> max_value;
    std::vector<GaussStat> stats;  // continuous subspace features * 2
    double weight_since_attempt = 0.0;
    bool touched = false;          // min/max valid
  };
  struct Node {
    std::int32_t feature = -1;  // absolute feature index; -1: leaf
    double threshold = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    double counts[2] = {0.0, 0.0};
    std::unique_ptr<LeafStats> leaf;
  };
  struct Tree {
    std::vector<Node> nodes;
    std::vector<std::uint32_t> subspace;    // absolute feature indices, sorted
    std::vector<std::uint32_t> binary_sub;  // subspace split by column kind
    std::vector<std::uint32_t> cont_sub;
    std::vector<std::int32_t> binary_slot;  // width-sized: feature -> slot in binary_sub, -1 otherwise
    Rng rng;
  };
  const std::vector<Tree>& trees() const { return trees_; }
  const std::vector<bool>& binary_mask() const { return is_binary_; }

 private:
  void learn(Tree& tree, std::span<const double> x, std::span<const std::uint32_t> hot, bool y,
             double weight);
  void attempt_split(Tree& tree, std::int32_t node_index);
  void split_subspace(Tree& tree) const;
  LeafStats make_leaf_stats(const Tree& tree) const;
  void run_stream(std::span<const EncodedInstance> instances,
                  const std::vector<std::uint32_t>& hot_index,
                  const std::vector<std::uint32_t>& hot_begin, int n_threads);

  IncHyperparameters hp_;
  std::uint64_t seed_ = 0;
  std::size_t width_ = 0;
  std::vector<bool> is_binary_;  // fixed at initial training
  std::vector<Tree> trees_;
  friend class Model;
};

// Variant wrapper with a versioned self-describing serial format.
class Model {
 public:
  explicit Model(BatchForest forest);
  explicit Model(IncrementalForest forest);

  bool is_batch() const { return batch_ != nullptr; }
  const BatchForest& batch() const;
  IncrementalForest& incremental();
  const IncrementalForest& incremental() const;

  std::size_t schema_width() const;
  std::uint64_t seed() const;

  double predict_proba(std::span<const double> features) const;

  // Throws Error when called on a batch model.
  void update(std::span<const EncodedInstance> instances, int n_threads = 0);

  std::vector<std::uint8_t> serialize() const;
  static Model deserialize(std::span<const std::uint8_t> bytes);

 private:
  Model() = default;
  std::unique_ptr<BatchForest> batch_;
  std::unique_ptr<IncrementalForest> incremental_;
};

}  // namespace ppmbench
