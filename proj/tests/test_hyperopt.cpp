#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ppmbench/error.hpp"
#include "ppmbench/hyperopt.hpp"

using namespace ppmbench;

namespace {

SearchSpace single_real(double lo = 0.0, double hi = 1.0, bool log_scale = false) {
  SearchSpace s;
  s.params = {{"x", ParamSpec::Kind::Real, lo, hi, log_scale}};
  return s;
}

}  // namespace

TEST_CASE("empty history samples within bounds") {
  SearchSpace space;
  space.params = {{"a", ParamSpec::Kind::Real, -2.0, 3.0, false},
                  {"b", ParamSpec::Kind::Real, 0.001, 100.0, true},
                  {"c", ParamSpec::Kind::Int, 1, 10, false}};
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    Params p = suggest({}, space, rng);
    CHECK(p.at("a") >= -2.0);
    CHECK(p.at("a") <= 3.0);
    CHECK(p.at("b") >= 0.001);
    CHECK(p.at("b") <= 100.0);
    CHECK(p.at("c") >= 1.0);
    CHECK(p.at("c") <= 10.0);
  }
}

TEST_CASE("int params are integral in and after startup") {
  SearchSpace space;
  space.params = {{"k", ParamSpec::Kind::Int, 1, 10, false}};
  Rng rng(3);
  std::vector<Trial> history;
  for (int i = 0; i < 60; ++i) {
    Params p = suggest(history, space, rng);
    double v = p.at("k");
    CHECK(v == std::round(v));
    CHECK(v >= 1.0);
    CHECK(v <= 10.0);
    history.push_back({p, v / 10.0, 0.0, false});
  }
}

TEST_CASE("log-scale int params respect bounds") {
  SearchSpace space;
  space.params = {{"n", ParamSpec::Kind::Int, 10, 500, true}};
  Rng rng(5);
  std::vector<Trial> history;
  for (int i = 0; i < 80; ++i) {
    Params p = suggest(history, space, rng);
    double v = p.at("n");
    CHECK(v == std::round(v));
    CHECK(v >= 10.0);
    CHECK(v <= 500.0);
    history.push_back({p, 0.5, 0.0, false});
  }
}

TEST_CASE("TPE concentrates on the good region of a planted monotone objective") {
  // objective increases with x, so the top-quantile region is the upper tail
  Rng rng(7);
  std::vector<Trial> history;
  Rng hist_rng(11);
  for (int i = 0; i < 30; ++i) {
    double x = hist_rng.uniform();
    history.push_back({{{"x", x}}, x, 0.0, false});
  }
  std::vector<double> sorted;
  for (const auto& t : history) sorted.push_back(t.objective);
  std::sort(sorted.rbegin(), sorted.rend());
  double good_cut = sorted[std::max<std::size_t>(1, history.size() / 4) - 1];

  SearchSpace space = single_real();
  int in_good = 0;
  const int n = 200;
  for (int i = 0; i < n; ++i) {
    Params p = suggest(history, space, rng);
    // "good region": within one good-set bandwidth of the top-quantile values
    double bw = std::max(1.0 / 7.0, 0.01);
    if (p.at("x") >= good_cut - bw) ++in_good;
  }
  CHECK(static_cast<double>(in_good) / n >= 0.8);
}

TEST_CASE("constant objective runs all iterations") {
  SearchSpace space = single_real();
  OptimizeResult r = optimize([](const Params&) { return 0.7; }, space, 5, 1);
  CHECK(r.trials.size() == 5);
  CHECK(r.best_objective == doctest::Approx(0.7));
  for (const auto& t : r.trials) CHECK_FALSE(t.failed);
}

TEST_CASE("planted optimum is found within tolerance") {
  SearchSpace space = single_real();
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    OptimizeResult r = optimize(
        [](const Params& p) { return 1.0 - std::abs(p.at("x") - 0.3); }, space, 100, seed);
    if (std::abs(r.best_params.at("x") - 0.3) <= 0.05) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("same seed gives identical trial sequences") {
  SearchSpace space;
  space.params = {{"x", ParamSpec::Kind::Real, 0.0, 1.0, false},
                  {"n", ParamSpec::Kind::Int, 2, 64, true}};
  auto objective = [](const Params& p) { return p.at("x") * 0.9 + p.at("n") / 640.0; };
  OptimizeResult a = optimize(objective, space, 40, 12345);
  OptimizeResult b = optimize(objective, space, 40, 12345);
  REQUIRE(a.trials.size() == b.trials.size());
  for (std::size_t i = 0; i < a.trials.size(); ++i) {
    CHECK(a.trials[i].params == b.trials[i].params);
    CHECK(a.trials[i].objective == b.trials[i].objective);
  }
  CHECK(a.best_params == b.best_params);
}

TEST_CASE("best objective is non-decreasing in the iteration budget") {
  SearchSpace space = single_real();
  auto objective = [](const Params& p) { return std::sin(13.0 * p.at("x")) * p.at("x"); };
  double previous = -1e300;
  for (std::size_t budget : {5, 10, 25, 50, 80}) {
    OptimizeResult r = optimize(objective, space, budget, 777);
    CHECK(r.best_objective >= previous);
    previous = r.best_objective;
  }
}

TEST_CASE("throwing objectives are recorded as failed trials with objective 0") {
  SearchSpace space = single_real();
  int calls = 0;
  OptimizeResult r = optimize(
      [&](const Params&) -> double {
        if (++calls % 2 == 0) throw Error("boom");
        return 0.4;
      },
      space, 6, 9);
  CHECK(r.trials.size() == 6);
  int failed = 0;
  for (const auto& t : r.trials)
    if (t.failed) {
      ++failed;
      CHECK(t.objective == 0.0);
    }
  CHECK(failed == 3);
  CHECK(r.best_objective == doctest::Approx(0.4));
}

TEST_CASE("with n_startup >= iterations the sampler is uniform") {
  SearchSpace space = single_real();
  TpeOptions opts;
  opts.n_startup = 1000;
  OptimizeResult r = optimize([](const Params& p) { return p.at("x"); }, space, 400, 31, opts);
  double sum = 0.0, lo = 1.0, hi = 0.0;
  for (const auto& t : r.trials) {
    double x = t.params.at("x");
    sum += x;
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  double mean = sum / static_cast<double>(r.trials.size());
  CHECK(mean >= 0.45);
  CHECK(mean <= 0.55);
  CHECK(lo <= 0.05);
  CHECK(hi >= 0.95);
}

TEST_CASE("search space validation") {
  SearchSpace bad1;
  bad1.params = {{"x", ParamSpec::Kind::Real, 1.0, 1.0, false}};
  CHECK_THROWS_AS(bad1.validate(), Error);
  SearchSpace bad2;
  bad2.params = {{"x", ParamSpec::Kind::Real, 0.0, 1.0, true}};  // log with lo = 0
  CHECK_THROWS_AS(bad2.validate(), Error);
  CHECK_THROWS_AS(optimize([](const Params&) { return 0.0; }, bad1, 3, 1), Error);
}
