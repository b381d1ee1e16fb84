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

#ifndef SCODEC_DIFFUSION_H_
#define SCODEC_DIFFUSION_H_

#include <memory>
#include <string>
#include <vector>

#include "scodec/nets.h"
#include "scodec/tensor.h"

namespace scodec {

inline constexpr int kDefaultScheduleSteps = 1000;
inline constexpr int kDefaultTimestep = kDefaultScheduleSteps - 1;

// Cumulative retention factors alpha_bar[t] for 0-based t.
class NoiseSchedule {
 public:
  // beta linear in [beta_start, beta_end], alpha_bar[t] = prod (1 - beta).
  static NoiseSchedule Linear(int steps = kDefaultScheduleSteps,
                              double beta_start = 1e-4, double beta_end = 0.02);
  // Values must lie in (0, 1] and be non-increasing.
  explicit NoiseSchedule(std::vector<double> alpha_bar);

  int steps() const { return static_cast<int>(alpha_bar_.size()); }
  double alpha_bar(int t) const;

 private:
  std::vector<double> alpha_bar_;
};

class EpsilonPredictor {
 public:
  virtual ~EpsilonPredictor() = default;
  // Output must have the shape of `l_t`.
  virtual Tensor Predict(const Tensor& l_t, int t) const = 0;
  // Receptive half-width in latent pixels, for tiling.
  virtual double Margin() const { return 0.0; }
};

class ZeroPredictor : public EpsilonPredictor {
 public:
  Tensor Predict(const Tensor& l_t, int t) const override;
};

// Runs the ToyEpsilonNet of a weight store.
class ToyPredictor : public EpsilonPredictor {
 public:
  ToyPredictor(const ToyEpsilonNet& net, int schedule_steps)
      : net_(net), steps_(schedule_steps) {}
  Tensor Predict(const Tensor& l_t, int t) const override;
  double Margin() const override { return net_.Margin(); }

 private:
  const ToyEpsilonNet& net_;
  int steps_;
};

// "zero" or "toy".
std::unique_ptr<EpsilonPredictor> MakePredictor(const std::string& name,
                                                const ToyEpsilonNet& net,
                                                int schedule_steps);

// l_0 = (l_t - sqrt(1 - a) * eps) / sqrt(a) with a = alpha_bar[t], evaluated
// per element in double precision and rounded to float once.
Tensor OneStepDenoise(const Tensor& l_t, const NoiseSchedule& schedule, int t,
                      const EpsilonPredictor& predictor);

}  // namespace scodec

#endif  // SCODEC_DIFFUSION_H_
