#include "ppmbench/hyperopt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "ppmbench/error.hpp"
#include "ppmbench/metrics.hpp"

namespace ppmbench {

void SearchSpace::validate() const {
  for (const auto& p : params) {
    if (!(p.lo < p.hi)) throw Error("search space '" + p.name + "': lo must be < hi");
    if (p.log_scale && !(p.lo > 0.0))
      throw Error("search space '" + p.name + "': log scale requires lo > 0");
  }
}

namespace {

// Acklam's rational approximation of the inverse normal CDF (~1e-9 accurate).
double normal_inv_cdf(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  }
  double q = std::sqrt(-2.0 * std::log(1.0 - p));
  return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
         ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

double normal_pdf(double z) { return 0.3989422804014326779 * std::exp(-0.5 * z * z); }

// Parzen mixture of per-point Gaussians truncated to [lo, hi].
struct ParzenDensity {
  std::vector<double> centers;
  double bandwidth;
  double lo, hi;

  double log_pdf(double x) const {
    double sum = 0.0;
    for (double mu : centers) {
      double za = (lo - mu) / bandwidth;
      double zb = (hi - mu) / bandwidth;
      double norm = normal_cdf(zb) - normal_cdf(za);
      if (norm <= 0.0) continue;
      sum += normal_pdf((x - mu) / bandwidth) / (bandwidth * norm);
    }
    sum /= static_cast<double>(centers.size());
    return std::log(std::max(sum, 1e-300));
  }

  double sample(Rng& rng) const {
    double mu = centers[rng.uniform_int(centers.size())];
    double za = normal_cdf((lo - mu) / bandwidth);
    double zb = normal_cdf((hi - mu) / bandwidth);
    double u = rng.uniform(za, zb);
    double x = mu + bandwidth * normal_inv_cdf(u);
    return std::clamp(x, lo, hi);
  }
};

double finalize(const ParamSpec& spec, double transformed) {
  double x = spec.log_scale ? std::exp(transformed) : transformed;
  if (spec.kind == ParamSpec::Kind::Int) x = std::round(x);
  return std::clamp(x, spec.lo, spec.hi);
}

}  // namespace

Params suggest(const std::vector<Trial>& history, const SearchSpace& space, Rng& rng,
               const TpeOptions& options) {
  space.validate();
  Params out;

  if (history.size() < options.n_startup) {
    for (const auto& spec : space.params) {
      double tlo = spec.log_scale ? std::log(spec.lo) : spec.lo;
      double thi = spec.log_scale ? std::log(spec.hi) : spec.hi;
      out[spec.name] = finalize(spec, rng.uniform(tlo, thi));
    }
    return out;
  }

  // rank history by objective, ties kept in trial order
  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return history[a].objective > history[b].objective;
  });
  std::size_t n_good = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(options.gamma * static_cast<double>(history.size()))));
  n_good = std::min(n_good, history.size() - 1);  // keep the bad set non-empty

  for (const auto& spec : space.params) {
    double tlo = spec.log_scale ? std::log(spec.lo) : spec.lo;
    double thi = spec.log_scale ? std::log(spec.hi) : spec.hi;
    double range = thi - tlo;

    auto transformed = [&](std::size_t trial_index) {
      double v = history[trial_index].params.at(spec.name);
      return spec.log_scale ? std::log(v) : v;
    };

    ParzenDensity good, bad;
    good.lo = bad.lo = tlo;
    good.hi = bad.hi = thi;
    for (std::size_t i = 0; i < n_good; ++i) good.centers.push_back(transformed(order[i]));
    for (std::size_t i = n_good; i < order.size(); ++i) bad.centers.push_back(transformed(order[i]));
    good.bandwidth = std::max(range / static_cast<double>(good.centers.size()), 0.01 * range);
    bad.bandwidth = std::max(range / static_cast<double>(bad.centers.size()), 0.01 * range);

    double best_score = -std::numeric_limits<double>::infinity();
    double best_value = tlo;
    for (std::size_t c = 0; c < options.n_candidates; ++c) {
      double x = good.sample(rng);
      double score = good.log_pdf(x) - bad.log_pdf(x);
      if (score > best_score) {
        best_score = score;
        best_value = x;
      }
    }
    out[spec.name] = finalize(spec, best_value);
  }
  return out;
}

OptimizeResult optimize(const std::function<double(const Params&)>& objective,
                        const SearchSpace& space, std::size_t max_iterations, std::uint64_t seed,
                        const TpeOptions& options) {
  if (max_iterations < 1) throw Error("optimize: max_iterations must be >= 1");
  Rng rng(seed);
  OptimizeResult result;
  result.best_objective = -std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < max_iterations; ++it) {
    Trial trial;
    trial.params = suggest(result.trials, space, rng, options);
    Stopwatch sw;
    sw.start();
    try {
      trial.objective = objective(trial.params);
    } catch (const std::exception&) {
      trial.objective = 0.0;
      trial.failed = true;
    }
    sw.stop();
    trial.seconds = sw.seconds();
    if (trial.objective > result.best_objective) {
      result.best_objective = trial.objective;
      result.best_params = trial.params;
    }
    result.trials.push_back(std::move(trial));
  }
  return result;
}

}  // namespace ppmbench
