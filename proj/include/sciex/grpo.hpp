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

// Group-relative policy optimization quantities. Nothing here updates
// parameters; an external trainer can check its own kernels against these.
//
// For a group of G sampled outputs with rewards R_i, the advantage of output i
// is (R_i - mean(R)) / std(R) (population std) on every one of its tokens. The
// per-token objective term is
//
//   min(r * A, clip(r, 1 - eps, 1 + eps) * A) - beta * kl
//   r  = exp(logp - logp_old)
//   kl = exp(logp_ref - logp) - (logp_ref - logp) - 1
//
// and the objective averages terms over tokens, then over outputs.

#ifndef SCIEX_GRPO_HPP_
#define SCIEX_GRPO_HPP_

#include <span>
#include <string>
#include <vector>

namespace sciex {

struct GrpoConfig {
  double epsilon = 0.2;
  double beta = 0.04;
  double std_floor = 1e-6;

  // Throws ConfigError.
  void validate() const;
};

struct OutputLogprobs {
  std::vector<double> logp;
  std::vector<double> logp_old;
  std::vector<double> logp_ref;
};

struct GrpoGroup {
  std::vector<double> rewards;
  std::vector<OutputLogprobs> outputs;

  // G >= 2, one logprob set per reward, equal-length sequences per output.
  // Throws GroupTooSmall or InvalidArgument.
  void validate() const;
};

// Throws GroupTooSmall for fewer than two rewards. A group whose std falls
// below std_floor gets all-zero advantages.
std::vector<double> advantages(std::span<const double> rewards, double std_floor = 1e-6);

double clipped_term(double ratio, double advantage, double epsilon);

double kl_term(double logp_theta, double logp_ref);

// One token's contribution before averaging.
double per_token_term(double logp_theta, double logp_old, double logp_ref, double advantage,
                      const GrpoConfig& cfg);

struct ObjectiveResult {
  double value = 0.0;
  std::vector<double> advantages;
  // token_terms[i][t] is output i's per-token term.
  std::vector<std::vector<double>> token_terms;
};

ObjectiveResult objective(const GrpoGroup& group, const GrpoConfig& cfg);

enum class GradientSource { kSft, kGrpo };

struct TokenContext {
  double logp_theta = 0.0;
  double logp_old = 0.0;
  double logp_ref = 0.0;
  double advantage = 0.0;
};

// Derivative of the per-token term with respect to logp_theta. SFT tokens all
// carry weight 1.
double gradient_coefficient(GradientSource source, const TokenContext& token,
                            const GrpoConfig& cfg);

// Sum in ascending order, so the result does not depend on input order.
double order_independent_sum(std::vector<double> values);

}  // namespace sciex

#endif  // SCIEX_GRPO_HPP_
