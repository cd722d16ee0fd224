#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "oracles.hpp"
#include "ppmbench/error.hpp"
#include "ppmbench/metrics.hpp"
#include "ppmbench/rng.hpp"

using namespace ppmbench;
using oracles::random_scored;

namespace {
double auc_pair_oracle(const std::vector<Scored>& scored) { return oracles::auc_pair_count(scored); }
}  // namespace

TEST_CASE("auc on the worked example") {
  // pos {0.8, 0.6}, neg {0.7, 0.1}: pairs win,win,lose,win = 3 of 4
  std::vector<Scored> s = {{0.8, true}, {0.6, true}, {0.7, false}, {0.1, false}};
  CHECK(auc_pair_oracle(s) == doctest::Approx(0.75));
  CHECK(auc(s) == doctest::Approx(0.75));
}

TEST_CASE("auc full tie and perfect separation") {
  CHECK(auc({{0.5, true}, {0.5, false}}) == doctest::Approx(0.5));
  CHECK(auc({{0.9, true}, {0.8, true}, {0.2, false}, {0.1, false}}) == doctest::Approx(1.0));
}

TEST_CASE("auc rejects single-class input") {
  CHECK_THROWS_AS(auc({{0.5, true}, {0.6, true}}), Error);
  CHECK_THROWS_AS(auc({}), Error);
}

TEST_CASE("rank-based auc equals the pair-counting oracle with ties") {
  Rng rng(7);
  for (int rep = 0; rep < 60; ++rep) {
    std::size_t n = 2 + rng.uniform_int(300);
    int levels = rep % 3 == 0 ? 5 : (rep % 3 == 1 ? 50 : 0);
    auto scored = random_scored(rng, n, levels);
    CHECK(auc(scored) == doctest::Approx(auc_pair_oracle(scored)).epsilon(1e-12));
  }
}

TEST_CASE("auc label flip duality") {
  Rng rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    auto scored = random_scored(rng, 50, rep % 2 ? 8 : 0);
    auto flipped = scored;
    for (auto& s : flipped) s.positive = !s.positive;
    CHECK(auc(scored) + auc(flipped) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("auc invariant under strictly monotone score transforms") {
  Rng rng(13);
  auto scored = random_scored(rng, 200, 20);
  double base = auc(scored);
  auto transformed = scored;
  for (auto& s : transformed) s.score = std::exp(3.0 * s.score) - 0.5;
  CHECK(auc(transformed) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("confusion, accuracy and macro F1") {
  // TP=3, FP=1, FN=1, TN=5 at threshold 0.5
  std::vector<Scored> s;
  for (int i = 0; i < 3; ++i) s.push_back({0.9, true});
  s.push_back({0.9, false});
  s.push_back({0.1, true});
  for (int i = 0; i < 5; ++i) s.push_back({0.1, false});

  Confusion c = confusion_at(s);
  CHECK(c.tp == 3);
  CHECK(c.fp == 1);
  CHECK(c.fn == 1);
  CHECK(c.tn == 5);
  CHECK(accuracy(s) == doctest::Approx(0.8));
  // pos-F1 = 2*3/(2*3+1+1) = 0.75, neg-F1 = 2*5/(2*5+1+1) = 10/12
  CHECK(f_measure(s) == doctest::Approx(0.5 * (0.75 + 10.0 / 12.0)));
}

TEST_CASE("all scores at threshold predict positive") {
  std::vector<Scored> s = {{0.5, true}, {0.5, false}, {0.5, true}, {0.5, false}};
  CHECK(accuracy(s) == doctest::Approx(0.5));
}

TEST_CASE("all correct gives accuracy and macro F1 of 1") {
  std::vector<Scored> s = {{0.9, true}, {0.8, true}, {0.1, false}};
  CHECK(accuracy(s) == doctest::Approx(1.0));
  CHECK(f_measure(s) == doctest::Approx(1.0));
}

TEST_CASE("stopwatch measures a sleep") {
  Stopwatch sw;
  sw.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(100));
  sw.stop();
  CHECK(sw.seconds() >= 0.100);
  CHECK(sw.seconds() <= 0.150);
}

TEST_CASE("stopwatch accumulates and nests within bookkeeping slack") {
  Stopwatch parent, child1, child2;
  parent.start();
  child1.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  child1.stop();
  child2.start();
  std::this_thread::sleep_for(std::chrono::milliseconds(20));
  child2.stop();
  parent.stop();
  CHECK(child1.seconds() + child2.seconds() <= parent.seconds() + 0.001);
}

TEST_CASE("time breakdown composition identities") {
  TimeBreakdown t;
  t.m0_build = 10.0;
  t.retrain = 2.0;
  t.hyperopt = 7.0;
  t.incremental_update = 0.5;
  CHECK(t.total(Strategy::S0) == 10.0);
  CHECK(t.total(Strategy::S1) == 12.0);
  CHECK(t.total(Strategy::S2) == 19.0);
  CHECK(t.total(Strategy::S3) == 10.5);
  CHECK(t.total(Strategy::S1) - t.total(Strategy::S0) == doctest::Approx(t.retrain));
}
