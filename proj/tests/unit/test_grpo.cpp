// Copyright 2026 The sciex Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "sciex/error.hpp"
#include "sciex/grpo.hpp"

using namespace sciex;

namespace {

// Long-double evaluation of one token's objective term, written independently
// of the library.
long double term_ld(long double logp, long double old, long double ref, long double a,
                    long double eps, long double beta) {
  const long double r = expl(logp - old);
  const long double clipped = std::min(std::max(r, 1.0L - eps), 1.0L + eps);
  const long double policy = std::min(r * a, clipped * a);
  const long double kl = expl(ref - logp) - (ref - logp) - 1.0L;
  return policy - beta * kl;
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double pstd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

GrpoGroup random_group(std::mt19937_64& rng, std::size_t g, std::size_t len) {
  std::uniform_real_distribution<double> reward(0.0, 1.0);
  std::normal_distribution<double> lp(-1.5, 0.8);
  std::normal_distribution<double> shift(0.0, 0.15);
  GrpoGroup group;
  for (std::size_t i = 0; i < g; ++i) {
    group.rewards.push_back(reward(rng));
    OutputLogprobs o;
    for (std::size_t t = 0; t < len; ++t) {
      const double base = lp(rng);
      o.logp.push_back(base);
      o.logp_old.push_back(base + shift(rng));
      o.logp_ref.push_back(base + shift(rng));
    }
    group.outputs.push_back(std::move(o));
  }
  return group;
}

}  // namespace

TEST_CASE("advantages examples") {
  const std::vector<double> a = advantages(std::vector<double>{1, 2, 3});
  const double s = std::sqrt(2.0 / 3.0);
  CHECK(a[0] == doctest::Approx(-1.0 / s).epsilon(1e-12));
  CHECK(a[1] == 0.0);
  CHECK(a[2] == doctest::Approx(1.0 / s).epsilon(1e-12));
  CHECK(a[2] == doctest::Approx(1.2247).epsilon(1e-4));

  const auto b = advantages(std::vector<double>{0, 1});
  CHECK(b[0] == -1.0);
  CHECK(b[1] == 1.0);

  const auto c = advantages(std::vector<double>{0.7, 0.7, 0.7, 0.7});
  CHECK(std::all_of(c.begin(), c.end(), [](double x) { return x == 0.0; }));

  CHECK_THROWS_AS(advantages(std::vector<double>{1.0}), GroupTooSmall);
  CHECK_THROWS_AS(advantages(std::vector<double>{}), GroupTooSmall);
}

TEST_CASE("advantages below the std floor are zero") {
  const auto a = advantages(std::vector<double>{0.5, 0.5 + 1e-9}, 1e-6);
  CHECK(a[0] == 0.0);
  CHECK(a[1] == 0.0);
  const auto b = advantages(std::vector<double>{0.5, 0.5 + 1e-9}, 1e-12);
  CHECK(b[0] == doctest::Approx(-1.0).epsilon(1e-6));
}

TEST_CASE("advantages have mean 0 and std 1") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<double> r(2 + static_cast<std::size_t>(trial % 15));
    for (double& x : r) x = u(rng);
    const auto a = advantages(r);
    CHECK(std::abs(mean_of(a)) < 1e-9);
    CHECK(std::abs(pstd_of(a) - 1.0) < 1e-9);
  }
}

TEST_CASE("advantages are affine invariant") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> r(6), s(6);
    for (double& x : r) x = u(rng);
    const double scale = 0.5 + 3 * u(rng);
    const double offset = 4 * u(rng) - 2;
    for (std::size_t i = 0; i < r.size(); ++i) s[i] = scale * r[i] + offset;
    const auto a = advantages(r);
    const auto b = advantages(s);
    for (std::size_t i = 0; i < r.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-9);
  }
}

TEST_CASE("clipped term examples") {
  CHECK(clipped_term(1.5, 1.0, 0.2) == doctest::Approx(1.2).epsilon(1e-15));
  CHECK(clipped_term(0.5, -1.0, 0.2) == doctest::Approx(-0.8).epsilon(1e-15));
  CHECK(clipped_term(0.5, 1.0, 0.2) == 0.5);
  CHECK(clipped_term(1.5, -1.0, 0.2) == -1.5);
  CHECK(clipped_term(1.1, 2.0, 0.2) == doctest::Approx(2.2).epsilon(1e-15));
}

TEST_CASE("kl term") {
  CHECK(kl_term(-1.0, -1.0) == 0.0);
  CHECK(kl_term(0.0, std::log(2.0)) == doctest::Approx(1.0 - std::log(2.0)).epsilon(1e-12));
  CHECK(kl_term(0.0, std::log(2.0)) == doctest::Approx(0.3069).epsilon(1e-4));
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-20, 20);
  for (int i = 0; i < 100000; ++i) CHECK(kl_term(u(rng), u(rng)) >= 0.0);
  // precise near zero
  CHECK(kl_term(0.0, 1e-8) == doctest::Approx(0.5e-16).epsilon(1e-6));
}

TEST_CASE("identical policies reduce the objective to the mean advantage") {
  GrpoGroup g;
  g.rewards = {1, 2, 3};
  for (int i = 0; i < 3; ++i) g.outputs.push_back({{-1, -2}, {-1, -2}, {-1, -2}});
  const ObjectiveResult r = objective(g, GrpoConfig{});
  CHECK(std::abs(r.value) < 1e-15);
  CHECK(r.token_terms[2][0] == doctest::Approx(r.advantages[2]).epsilon(1e-15));
  CHECK(r.token_terms[2][1] == r.token_terms[2][0]);
}

TEST_CASE("objective validation") {
  GrpoGroup g;
  g.rewards = {1};
  g.outputs.push_back({{-1}, {-1}, {-1}});
  CHECK_THROWS_AS(objective(g, GrpoConfig{}), GroupTooSmall);
  g.rewards = {1, 2};
  g.outputs.push_back({{-1, -2}, {-1}, {-1}});
  CHECK_THROWS_WITH_AS(objective(g, GrpoConfig{}), doctest::Contains("unequal"), Error);
  g.outputs[1] = {{-1}, {-1}, {-1}};
  GrpoConfig bad;
  bad.epsilon = 1.5;
  CHECK_THROWS_AS(objective(g, bad), ConfigError);
  bad = GrpoConfig{};
  bad.beta = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = GrpoConfig{};
  bad.std_floor = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("objective matches a direct long-double evaluation") {
  std::mt19937_64 rng(10);
  GrpoConfig cfg;
  for (int trial = 0; trial < 200; ++trial) {
    const GrpoGroup g = random_group(rng, 2 + static_cast<std::size_t>(trial % 6), 1 + trial % 7);
    const ObjectiveResult r = objective(g, cfg);
    long double total = 0;
    for (std::size_t i = 0; i < g.outputs.size(); ++i) {
      const auto& o = g.outputs[i];
      long double s = 0;
      for (std::size_t t = 0; t < o.logp.size(); ++t) {
        s += term_ld(o.logp[t], o.logp_old[t], o.logp_ref[t], r.advantages[i], cfg.epsilon, cfg.beta);
      }
      total += s / static_cast<long double>(o.logp.size());
    }
    total /= static_cast<long double>(g.outputs.size());
    CHECK(std::abs(static_cast<double>(total) - r.value) < 1e-12);
  }
}

TEST_CASE("objective is invariant under output permutation") {
  std::mt19937_64 rng(11);
  GrpoConfig cfg;
  for (int trial = 0; trial < 300; ++trial) {
    GrpoGroup g = random_group(rng, 3 + static_cast<std::size_t>(trial % 8), 4);
    const ObjectiveResult base = objective(g, cfg);
    std::vector<std::size_t> perm(g.rewards.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    GrpoGroup p;
    for (std::size_t i : perm) {
      p.rewards.push_back(g.rewards[i]);
      p.outputs.push_back(g.outputs[i]);
    }
    const ObjectiveResult shuffled = objective(p, cfg);
    CHECK(shuffled.value == base.value);
    for (std::size_t j = 0; j < perm.size(); ++j) {
      CHECK(shuffled.advantages[j] == base.advantages[perm[j]]);
    }
  }
}

TEST_CASE("gradient coefficient agrees with central differences") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  std::normal_distribution<double> n(0, 1);
  int checked = 0;
  for (int trial = 0; trial < 3000; ++trial) {
    GrpoConfig cfg;
    cfg.epsilon = 0.05 + 0.4 * u(rng);
    cfg.beta = trial % 5 == 0 ? 0.0 : 0.2 * u(rng);
    TokenContext tok;
    tok.logp_theta = -3 * u(rng);
    tok.logp_old = tok.logp_theta + 0.3 * n(rng);
    tok.logp_ref = tok.logp_theta + 0.3 * n(rng);
    tok.advantage = 2 * n(rng);
    const long double h = 1e-6L;
    const long double r = expl(static_cast<long double>(tok.logp_theta) - tok.logp_old);
    const long double lo = 1.0L - cfg.epsilon, hi = 1.0L + cfg.epsilon;
    if (std::abs(static_cast<double>(r - lo)) < 1e-4 || std::abs(static_cast<double>(r - hi)) < 1e-4) {
      continue;
    }
    const long double fd = (term_ld(tok.logp_theta + h, tok.logp_old, tok.logp_ref, tok.advantage,
                                    cfg.epsilon, cfg.beta) -
                            term_ld(tok.logp_theta - h, tok.logp_old, tok.logp_ref, tok.advantage,
                                    cfg.epsilon, cfg.beta)) /
                           (2 * h);
    const double g = gradient_coefficient(GradientSource::kGrpo, tok, cfg);
    const double err = std::abs(static_cast<double>(fd) - g);
    CHECK(err <= 1e-5 * std::max(1.0, std::abs(g)));
    ++checked;
  }
  CHECK(checked >= 1000);
}

TEST_CASE("gradient coefficient special cases") {
  GrpoConfig cfg;
  TokenContext tok{-1.0, -1.0, -1.0, 0.7};
  CHECK(gradient_coefficient(GradientSource::kGrpo, tok, cfg) == doctest::Approx(0.7));
  CHECK(gradient_coefficient(GradientSource::kSft, tok, cfg) == 1.0);
  // ratio 1.5 > 1 + eps with positive advantage: clipped, only KL remains
  tok = {std::log(1.5), 0.0, std::log(1.5), 1.0};
  CHECK(gradient_coefficient(GradientSource::kGrpo, tok, cfg) == 0.0);
  // same ratio, negative advantage: unclipped branch is the min
  tok.advantage = -1.0;
  CHECK(gradient_coefficient(GradientSource::kGrpo, tok, cfg) == doctest::Approx(-1.5));
}

TEST_CASE("order independent sum") {
  std::vector<double> v = {1e16, 1.0, -1e16, 3.0};
  const double a = order_independent_sum(v);
  std::reverse(v.begin(), v.end());
  CHECK(order_independent_sum(v) == a);
}
