#include "storseismic/numerics/optimizer.hpp"

#include <cmath>

#include "storseismic/errors.hpp"

namespace storseismic {

template <typename T>
void AdamOptimizer<T>::step(std::span<Parameter<T>* const> params) {
  for (const auto* p : params) {
    if (!p->frozen && !p->value.has_grad()) {
      throw ContractError("optimizer step: parameter '" + p->name +
                          "' has no gradient");
    }
  }
  ++step_;
  const double t = static_cast<double>(step_);
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double bias1 = 1.0 - std::pow(b1, t);
  const double bias2 = 1.0 - std::pow(b2, t);

  bool adaptive = true;
  double rect = 1.0;
  if (options_.rectify) {
    const double rho_inf = 2.0 / (1.0 - b2) - 1.0;
    const double rho_t = rho_inf - 2.0 * t * std::pow(b2, t) / bias2;
    adaptive = rho_t > 5.0;
    if (adaptive) {
      rect = std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                       ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
    }
  }
  const double lr = options_.learning_rate;

  for (auto* p : params) {
    if (p->frozen) {
      p->value.zero_grad();
      continue;
    }
    auto grad = p->value.grad();
    auto& m = moments_[p->name];
    if (m.first.empty()) {
      m.first.assign(grad.size(), T(0));
      m.second.assign(grad.size(), T(0));
    }
    if (m.first.size() != grad.size()) {
      throw ContractError("optimizer moments for '" + p->name +
                          "' do not match the parameter shape");
    }
    auto values = p->value.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double g = grad[i];
      const double mi = b1 * m.first[i] + (1.0 - b1) * g;
      const double vi = b2 * m.second[i] + (1.0 - b2) * g * g;
      m.first[i] = static_cast<T>(mi);
      m.second[i] = static_cast<T>(vi);
      const double m_hat = mi / bias1;
      double update = 0.0;
      if (adaptive) {
        const double v_hat = std::sqrt(vi / bias2);
        update = rect * m_hat / (v_hat + options_.epsilon);
      } else {
        update = m_hat;
      }
      values[i] = static_cast<T>(values[i] - lr * update);
    }
    p->value.zero_grad();
  }
}

template <typename T>
void AdamOptimizer<T>::restore(std::int64_t step,
                               std::map<std::string, Moments> moments) {
  step_ = step;
  moments_ = std::move(moments);
}

template class AdamOptimizer<float>;
template class AdamOptimizer<double>;

}  // namespace storseismic
