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

#include "sciex/grpo.hpp"

#include <algorithm>
#include <cmath>

#include "sciex/error.hpp"

namespace sciex {

void GrpoConfig::validate() const {
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon", "must lie in (0, 1)");
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta", "must be non-negative");
  if (!(std_floor > 0.0) || !std::isfinite(std_floor)) {
    throw ConfigError("std_floor", "must be positive");
  }
}

void GrpoGroup::validate() const {
  if (rewards.size() < 2) {
    throw GroupTooSmall("group has " + std::to_string(rewards.size()) + " outputs, need >= 2");
  }
  if (outputs.size() != rewards.size()) {
    throw Error(ErrorCode::kInvalidArgument, "rewards and outputs differ in length");
  }
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    const auto& o = outputs[i];
    if (o.logp.size() != o.logp_old.size() || o.logp.size() != o.logp_ref.size()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "output " + std::to_string(i) + " has logprob sequences of unequal length");
    }
    if (o.logp.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "output " + std::to_string(i) + " has no tokens");
    }
  }
}

double order_independent_sum(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum;
}

std::vector<double> advantages(std::span<const double> rewards, double std_floor) {
  if (rewards.size() < 2) {
    throw GroupTooSmall("group has " + std::to_string(rewards.size()) + " rewards, need >= 2");
  }
  const double n = static_cast<double>(rewards.size());
  const double mean = order_independent_sum({rewards.begin(), rewards.end()}) / n;
  std::vector<double> sq;
  sq.reserve(rewards.size());
  for (double r : rewards) sq.push_back((r - mean) * (r - mean));
  const double std = std::sqrt(order_independent_sum(std::move(sq)) / n);

  std::vector<double> out(rewards.size(), 0.0);
  if (!(std >= std_floor)) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / std;
  return out;
}

double clipped_term(double ratio, double advantage, double epsilon) {
  const double clipped = std::clamp(ratio, 1.0 - epsilon, 1.0 + epsilon);
  return std::min(ratio * advantage, clipped * advantage);
}

double kl_term(double logp_theta, double logp_ref) {
  const double d = logp_ref - logp_theta;
  // expm1 keeps precision near d = 0 where the estimator is O(d^2).
  return std::max(0.0, std::expm1(d) - d);
}

double per_token_term(double logp_theta, double logp_old, double logp_ref, double advantage,
                      const GrpoConfig& cfg) {
  const double ratio = std::exp(logp_theta - logp_old);
  return clipped_term(ratio, advantage, cfg.epsilon) - cfg.beta * kl_term(logp_theta, logp_ref);
}

ObjectiveResult objective(const GrpoGroup& group, const GrpoConfig& cfg) {
  group.validate();
  cfg.validate();
  ObjectiveResult result;
  result.advantages = advantages(group.rewards, cfg.std_floor);

  std::vector<double> per_output;
  per_output.reserve(group.outputs.size());
  for (std::size_t i = 0; i < group.outputs.size(); ++i) {
    const auto& o = group.outputs[i];
    std::vector<double> terms(o.logp.size());
    double sum = 0.0;
    for (std::size_t t = 0; t < o.logp.size(); ++t) {
      terms[t] = per_token_term(o.logp[t], o.logp_old[t], o.logp_ref[t], result.advantages[i], cfg);
      sum += terms[t];
    }
    per_output.push_back(sum / static_cast<double>(o.logp.size()));
    result.token_terms.push_back(std::move(terms));
  }
  result.value =
      order_independent_sum(std::move(per_output)) / static_cast<double>(group.outputs.size());
  return result;
}

double gradient_coefficient(GradientSource source, const TokenContext& token,
                            const GrpoConfig& cfg) {
  if (source == GradientSource::kSft) return 1.0;

  const double ratio = std::exp(token.logp_theta - token.logp_old);
  const double a = token.advantage;
  const double lo = 1.0 - cfg.epsilon;
  const double hi = 1.0 + cfg.epsilon;
  // The min picks the unclipped product unless the clipped one is strictly
  // smaller; the clipped branch is constant in logp_theta outside [lo, hi].
  double policy = ratio * a;
  if (ratio < lo || ratio > hi) {
    const double clipped = std::clamp(ratio, lo, hi) * a;
    if (clipped < ratio * a) policy = 0.0;
  }
  // d/dlogp of -beta * (exp(ref - logp) - (ref - logp) - 1).
  const double kl = cfg.beta * std::expm1(token.logp_ref - token.logp_theta);
  return policy + kl;
}

}  // namespace sciex
