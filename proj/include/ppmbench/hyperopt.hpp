#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ppmbench/rng.hpp"

namespace ppmbench {

struct ParamSpec {
  enum class Kind { Int, Real };
  std::string name;
  Kind kind = Kind::Real;
  double lo = 0.0;
  double hi = 1.0;
  bool log_scale = false;  // requires lo > 0
};

struct SearchSpace {
  std::vector<ParamSpec> params;
  void validate() const;
};

using Params = std::map<std::string, double>;

struct Trial {
  Params params;
  double objective = 0.0;  // validation AUC to maximize
  double seconds = 0.0;
  bool failed = false;
};

struct TpeOptions {
  std::size_t n_startup = 20;     // uniform random trials before TPE kicks in
  double gamma = 0.25;            // good-set quantile
  std::size_t n_candidates = 24;  // samples drawn from the good density
};

// Tree-structured Parzen Estimator suggestion, independent per parameter.
// Below n_startup history entries: uniform (log-uniform on log scale).
Params suggest(const std::vector<Trial>& history, const SearchSpace& space, Rng& rng,
               const TpeOptions& options = {});

struct OptimizeResult {
  Params best_params;
  double best_objective = 0.0;
  std::vector<Trial> trials;
};

// suggest -> evaluate -> record loop; a throwing objective records a failed
// trial with objective 0 and the loop continues. Deterministic per seed.
OptimizeResult optimize(const std::function<double(const Params&)>& objective,
                        const SearchSpace& space, std::size_t max_iterations, std::uint64_t seed,
                        const TpeOptions& options = {});

}  // namespace ppmbench
