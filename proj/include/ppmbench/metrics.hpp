#pragma once

#include <chrono>
#include <cstddef>
#include <vector>

namespace ppmbench {

struct Scored {
  double score = 0.0;
  bool positive = false;
};

// Mann-Whitney AUC via rank sums with average-rank tie handling, O(n log n).
// Throws Error when the input lacks a positive or a negative.
double auc(const std::vector<Scored>& scored);

struct Confusion {
  long tp = 0, tn = 0, fp = 0, fn = 0;
};

// Prediction is positive iff score >= threshold.
Confusion confusion_at(const std::vector<Scored>& scored, double threshold = 0.5);
double accuracy(const std::vector<Scored>& scored, double threshold = 0.5);
// Macro average of per-class F1 over {positive, negative}.
double f_measure(const std::vector<Scored>& scored, double threshold = 0.5);

// Accumulating monotonic wall-clock timer. Wraps bare processing sections only
// (hyperopt loops, train calls, update calls); parsing and encoding stay outside.
class Stopwatch {
 public:
  void start() {
    if (!running_) {
      t0_ = std::chrono::steady_clock::now();
      running_ = true;
    }
  }
  void stop() {
    if (running_) {
      acc_ += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
      running_ = false;
    }
  }
  double seconds() const {
    double s = acc_;
    if (running_) s += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    return s;
  }

 private:
  std::chrono::steady_clock::time_point t0_{};
  double acc_ = 0.0;
  bool running_ = false;
};

class ScopedTimer {
 public:
  explicit ScopedTimer(Stopwatch& sw) : sw_(sw) { sw_.start(); }
  ~ScopedTimer() { sw_.stop(); }
  ScopedTimer(const ScopedTimer&) = delete;
  ScopedTimer& operator=(const ScopedTimer&) = delete;

 private:
  Stopwatch& sw_;
};

enum class Strategy { S0, S1, S2, S3 };
const char* strategy_name(Strategy s);

// Decomposed model-construction time accounting.
struct TimeBreakdown {
  double m0_build = 0.0;
  double retrain = 0.0;
  double hyperopt = 0.0;
  double incremental_update = 0.0;

  double total(Strategy s) const {
    switch (s) {
      case Strategy::S0: return m0_build;
      case Strategy::S1: return m0_build + retrain;
      case Strategy::S2: return m0_build + hyperopt + retrain;
      case Strategy::S3: return m0_build + incremental_update;
    }
    return 0.0;
  }
};

}  // namespace ppmbench
