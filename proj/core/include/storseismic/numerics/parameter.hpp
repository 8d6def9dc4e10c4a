#pragma once

#include <string>

#include "storseismic/numerics/tensor.hpp"

namespace storseismic {

//! A named trainable tensor. Frozen parameters do not record gradients and
//! are skipped by every optimizer step.
template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  bool frozen = false;

  Parameter() = default;
  Parameter(std::string param_name, Tensor<T> initial)
      : name(std::move(param_name)), value(std::move(initial)) {
    value.set_requires_grad(true);
  }

  void set_frozen(bool flag) {
    frozen = flag;
    value.set_requires_grad(!flag);
    if (flag) {
      value.zero_grad();
    }
  }
};

}  // namespace storseismic
