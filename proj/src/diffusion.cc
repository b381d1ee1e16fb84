// Copyright (c) the scodec authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "scodec/diffusion.h"

#include <cmath>

#include "scodec/error.h"

namespace scodec {

NoiseSchedule NoiseSchedule::Linear(int steps, double beta_start,
                                    double beta_end) {
  if (steps < 1) Fail(ErrorKind::kConfig, "schedule needs at least one step");
  std::vector<double> alpha_bar(static_cast<size_t>(steps));
  double prod = 1.0;
  for (int t = 0; t < steps; ++t) {
    const double beta =
        steps == 1 ? beta_start
                   : beta_start + (beta_end - beta_start) * t / (steps - 1);
    prod *= 1.0 - beta;
    alpha_bar[t] = prod;
  }
  return NoiseSchedule(std::move(alpha_bar));
}

NoiseSchedule::NoiseSchedule(std::vector<double> alpha_bar)
    : alpha_bar_(std::move(alpha_bar)) {
  if (alpha_bar_.empty()) Fail(ErrorKind::kConfig, "empty noise schedule");
  for (size_t t = 0; t < alpha_bar_.size(); ++t) {
    const double a = alpha_bar_[t];
    if (!(a > 0.0 && a <= 1.0) || (t > 0 && a > alpha_bar_[t - 1])) {
      Fail(ErrorKind::kConfig,
           "alpha_bar[" + std::to_string(t) + "] out of range or increasing");
    }
  }
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t < 0 || t >= steps()) {
    Fail(ErrorKind::kConfig, "timestep " + std::to_string(t) +
                                 " outside schedule of " +
                                 std::to_string(steps()) + " steps");
  }
  return alpha_bar_[static_cast<size_t>(t)];
}

Tensor ZeroPredictor::Predict(const Tensor& l_t, int) const {
  return Tensor(l_t.shape());
}

Tensor ToyPredictor::Predict(const Tensor& l_t, int t) const {
  return net_(l_t, static_cast<double>(t) / steps_);
}

std::unique_ptr<EpsilonPredictor> MakePredictor(const std::string& name,
                                                const ToyEpsilonNet& net,
                                                int schedule_steps) {
  if (name == "zero") return std::make_unique<ZeroPredictor>();
  if (name == "toy") return std::make_unique<ToyPredictor>(net, schedule_steps);
  Fail(ErrorKind::kConfig, "unknown predictor '" + name + "' (zero, toy)");
}

Tensor OneStepDenoise(const Tensor& l_t, const NoiseSchedule& schedule, int t,
                      const EpsilonPredictor& predictor) {
  const double a = schedule.alpha_bar(t);
  const Tensor eps = predictor.Predict(l_t, t);
  if (eps.shape() != l_t.shape()) {
    Fail(ErrorKind::kConfig, "predictor returned " + eps.shape().ToString() +
                                 " for input " + l_t.shape().ToString());
  }
  const double noise = std::sqrt(1.0 - a);
  const double inv = 1.0 / std::sqrt(a);
  Tensor out(l_t.shape());
  const float* x = l_t.data();
  const float* e = eps.data();
  float* o = out.data();
  for (size_t i = 0; i < out.size(); ++i) {
    o[i] = static_cast<float>((x[i] - noise * e[i]) * inv);
  }
  return out;
}

}  // namespace scodec
