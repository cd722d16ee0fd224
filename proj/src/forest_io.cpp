#include <array>
#include <bit>
#include <cstring>

#include "ppmbench/error.hpp"
#include "ppmbench/forest.hpp"

namespace ppmbench {

namespace {

constexpr char kMagic[4] = {'P', 'P', 'M', 'F'};
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  std::vector<std::uint8_t> bytes;

  void u8(std::uint8_t v) { bytes.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) bytes.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint8_t u8() {
    need(1);
    return bytes_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  float f32() { return std::bit_cast<float>(u32()); }

  bool exhausted() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Error("corrupt model payload: truncated");
  }
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

Model::Model(BatchForest forest) : batch_(std::make_unique<BatchForest>(std::move(forest))) {}
Model::Model(IncrementalForest forest)
    : incremental_(std::make_unique<IncrementalForest>(std::move(forest))) {}

const BatchForest& Model::batch() const {
  if (!batch_) throw Error("model is not a batch forest");
  return *batch_;
}

IncrementalForest& Model::incremental() {
  if (!incremental_) throw Error("model is not an incremental forest");
  return *incremental_;
}

const IncrementalForest& Model::incremental() const {
  if (!incremental_) throw Error("model is not an incremental forest");
  return *incremental_;
}

std::size_t Model::schema_width() const {
  return batch_ ? batch_->schema_width() : incremental_->schema_width();
}

std::uint64_t Model::seed() const { return batch_ ? batch_->seed() : incremental_->seed(); }

double Model::predict_proba(std::span<const double> features) const {
  return batch_ ? batch_->predict(features) : incremental_->predict(features);
}

void Model::update(std::span<const EncodedInstance> instances, int n_threads) {
  if (batch_) throw Error("a batch model rejects update calls; re-train instead");
  incremental_->update(instances, n_threads);
}

std::vector<std::uint8_t> Model::serialize() const {
  Writer w;
  w.bytes.insert(w.bytes.end(), kMagic, kMagic + 4);
  w.u32(kVersion);
  w.u8(batch_ ? 0 : 1);
  w.u64(seed());
  w.u64(schema_width());

  if (batch_) {
    const auto& hp = batch_->hyperparameters();
    w.i32(hp.n_trees);
    w.i32(hp.max_depth);
    w.i32(hp.min_samples_leaf);
    w.f64(hp.max_features_fraction);
    w.u32(static_cast<std::uint32_t>(batch_->trees().size()));
    for (const auto& tree : batch_->trees()) {
      w.u32(static_cast<std::uint32_t>(tree.size()));
      for (const auto& node : tree) {
        w.i32(node.feature);
        w.f64(node.threshold);
        w.i32(node.left);
        w.i32(node.right);
        w.f64(node.counts[0]);
        w.f64(node.counts[1]);
      }
    }
  } else {
    const auto& hp = incremental_->hyperparameters();
    w.i32(hp.n_trees);
    w.i32(hp.grace_period);
    w.f64(hp.split_confidence);
    w.f64(hp.tie_threshold);
    w.f64(hp.max_features_fraction);
    for (std::size_t f = 0; f < incremental_->schema_width(); ++f)
      w.u8(incremental_->binary_mask()[f] ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(incremental_->trees().size()));
    for (const auto& tree : incremental_->trees()) {
      w.u32(static_cast<std::uint32_t>(tree.subspace.size()));
      for (std::uint32_t f : tree.subspace) w.u32(f);
      for (std::uint64_t s : tree.rng.state()) w.u64(s);
      w.u32(static_cast<std::uint32_t>(tree.nodes.size()));
      for (const auto& node : tree.nodes) {
        w.i32(node.feature);
        w.f64(node.threshold);
        w.i32(node.left);
        w.i32(node.right);
        w.f64(node.counts[0]);
        w.f64(node.counts[1]);
        w.u8(node.leaf ? 1 : 0);
        if (node.leaf) {
          const auto& leaf = *node.leaf;
          w.f64(leaf.weight_since_attempt);
          w.u8(leaf.touched ? 1 : 0);
          for (float v : leaf.above) w.f32(v);
          for (float v : leaf.min_value) w.f32(v);
          for (float v : leaf.max_value) w.f32(v);
          for (const auto& g : leaf.stats) {
            w.f32(g.mean);
            w.f32(g.m2);
          }
        }
      }
    }
  }
  return std::move(w.bytes);
}

Model Model::deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, kMagic, 4) != 0) throw Error("corrupt model payload: bad magic");
  std::uint32_t version = r.u32();
  if (version != kVersion)
    throw Error("unsupported model format version " + std::to_string(version));
  std::uint8_t variant = r.u8();
  std::uint64_t seed = r.u64();
  std::uint64_t width = r.u64();

  Model model;
  if (variant == 0) {
    auto forest = std::make_unique<BatchForest>();
    forest->seed_ = seed;
    forest->width_ = static_cast<std::size_t>(width);
    forest->hp_.n_trees = r.i32();
    forest->hp_.max_depth = r.i32();
    forest->hp_.min_samples_leaf = r.i32();
    forest->hp_.max_features_fraction = r.f64();
    std::uint32_t n_trees = r.u32();
    forest->trees_.resize(n_trees);
    for (auto& tree : forest->trees_) {
      std::uint32_t n_nodes = r.u32();
      tree.resize(n_nodes);
      for (auto& node : tree) {
        node.feature = r.i32();
        node.threshold = r.f64();
        node.left = r.i32();
        node.right = r.i32();
        node.counts[0] = r.f64();
        node.counts[1] = r.f64();
      }
    }
    model.batch_ = std::move(forest);
  } else if (variant == 1) {
    auto forest = std::make_unique<IncrementalForest>();
    forest->seed_ = seed;
    forest->width_ = static_cast<std::size_t>(width);
    forest->hp_.n_trees = r.i32();
    forest->hp_.grace_period = r.i32();
    forest->hp_.split_confidence = r.f64();
    forest->hp_.tie_threshold = r.f64();
    forest->hp_.max_features_fraction = r.f64();
    forest->is_binary_.resize(forest->width_);
    for (std::size_t f = 0; f < forest->width_; ++f) forest->is_binary_[f] = r.u8() != 0;
    std::uint32_t n_trees = r.u32();
    forest->trees_.resize(n_trees);
    for (auto& tree : forest->trees_) {
      std::uint32_t k = r.u32();
      tree.subspace.resize(k);
      for (auto& f : tree.subspace) f = r.u32();
      std::array<std::uint64_t, 4> state;
      for (auto& s : state) s = r.u64();
      tree.rng.set_state(state);
      forest->split_subspace(tree);  // derive binary/continuous views
      std::size_t n_bin = tree.binary_sub.size();
      std::size_t n_cont = tree.cont_sub.size();
      std::uint32_t n_nodes = r.u32();
      tree.nodes.resize(n_nodes);
      for (auto& node : tree.nodes) {
        node.feature = r.i32();
        node.threshold = r.f64();
        node.left = r.i32();
        node.right = r.i32();
        node.counts[0] = r.f64();
        node.counts[1] = r.f64();
        if (r.u8()) {
          node.leaf = std::make_unique<IncrementalForest::LeafStats>();
          node.leaf->weight_since_attempt = r.f64();
          node.leaf->touched = r.u8() != 0;
          node.leaf->above.resize(n_bin * 2);
          node.leaf->min_value.resize(n_cont);
          node.leaf->max_value.resize(n_cont);
          node.leaf->stats.resize(n_cont * 2);
          for (auto& v : node.leaf->above) v = r.f32();
          for (auto& v : node.leaf->min_value) v = r.f32();
          for (auto& v : node.leaf->max_value) v = r.f32();
          for (auto& g : node.leaf->stats) {
            g.mean = r.f32();
            g.m2 = r.f32();
          }
        }
      }
    }
    model.incremental_ = std::move(forest);
  } else {
    throw Error("corrupt model payload: unknown variant");
  }
  if (!r.exhausted()) throw Error("corrupt model payload: trailing bytes");
  return model;
}

}  // namespace ppmbench
