#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "storseismic/numerics/parameter.hpp"

namespace storseismic {

struct AdamOptions {
  double learning_rate = 5e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  //! RAdam variance rectification. Off gives plain bias-corrected Adam.
  bool rectify = true;
};

//! Adam with optional RAdam rectification (Liu et al., 2019). No weight decay.
//!
//! While the approximated SMA length rho_t is <= 5 the variance estimate is
//! considered intractable and the step falls back to the bias-corrected
//! momentum m_hat alone; afterwards the adaptive step is scaled by the
//! rectification term r_t. The threshold of 5 follows the reference
//! implementation shipped with common frameworks.
template <typename T>
class AdamOptimizer {
 public:
  struct Moments {
    std::vector<T> first;
    std::vector<T> second;
  };

  explicit AdamOptimizer(AdamOptions options = {}) : options_(options) {}

  //! Applies one update to every unfrozen parameter and drops all gradients.
  //! Throws ContractError if an unfrozen parameter has no gradient.
  void step(std::span<Parameter<T>* const> params);

  const AdamOptions& options() const { return options_; }
  void set_learning_rate(double lr) { options_.learning_rate = lr; }
  void set_rectify(bool on) { options_.rectify = on; }
  std::int64_t step_count() const { return step_; }

  //! Moment buffers keyed by parameter name, exposed for checkpointing.
  const std::map<std::string, Moments>& moments() const { return moments_; }
  void restore(std::int64_t step, std::map<std::string, Moments> moments);

 private:
  AdamOptions options_;
  std::int64_t step_ = 0;
  std::map<std::string, Moments> moments_;
};

extern template class AdamOptimizer<float>;
extern template class AdamOptimizer<double>;

}  // namespace storseismic
