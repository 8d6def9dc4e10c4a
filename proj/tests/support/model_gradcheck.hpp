#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "gradcheck.hpp"
#include "storseismic/model/model.hpp"

namespace storseismic::testing {

struct ModelGradCheck {
  //! Norm-wise relative error over every parameter gradient concatenated.
  double parameter_error = 0.0;
  double input_error = 0.0;
  //! Tensor with the largest absolute error norm, for diagnostics.
  std::string worst_param;
  double worst = 0.0;
};

//! Float autodiff gradients of sum(R * forward(x)) with respect to every
//! parameter and the input, against central differences on a 64-bit copy.
inline ModelGradCheck model_gradcheck(const Model& model, const Shape& shape,
                                      const std::vector<double>& input) {
  ModelGradCheck result;
  Model mf = model.cast<float>();
  auto xf = make_tensor<float>(shape, input);
  xf.set_requires_grad(true);
  weighted_sum(mf.forward(xf).output).backward();

  BasicModel<double> md = model.cast<double>();
  const auto xd = make_tensor<double>(shape, input);
  auto eval = [&](const Tensor<double>& x) {
    NoGradGuard guard;
    return weighted_sum(md.forward(x).output).item();
  };

  auto compare = [](const std::vector<double>& analytic,
                    const std::vector<double>& numeric) {
    std::vector<double> diff(numeric.size());
    for (std::size_t j = 0; j < numeric.size(); ++j) diff[j] = analytic[j] - numeric[j];
    return norm2(diff) / std::max(norm2(numeric), 1e-8);
  };

  auto pf = mf.parameters();
  auto pd = md.parameters();
  std::vector<double> all_analytic, all_numeric;
  double worst_abs = -1.0;
  for (std::size_t i = 0; i < pd.size(); ++i) {
    auto values = pd[i]->value.mutable_data();
    std::vector<double> numeric(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double v = values[j];
      const double h = 1e-6 * std::max(1.0, std::abs(v));
      values[j] = v + h;
      const double up = eval(xd);
      values[j] = v - h;
      const double down = eval(xd);
      values[j] = v;
      numeric[j] = (up - down) / (2.0 * h);
    }
    auto g = pf[i]->value.grad();
    double abs_err = 0.0;
    for (std::size_t j = 0; j < numeric.size(); ++j) {
      abs_err += (g[j] - numeric[j]) * (g[j] - numeric[j]);
    }
    if (abs_err > worst_abs) {
      worst_abs = abs_err;
      result.worst_param = pd[i]->name;
    }
    all_analytic.insert(all_analytic.end(), g.begin(), g.end());
    all_numeric.insert(all_numeric.end(), numeric.begin(), numeric.end());
  }
  result.parameter_error = compare(all_analytic, all_numeric);

  std::vector<double> numeric(input.size());
  auto work = input;
  for (std::size_t j = 0; j < input.size(); ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(input[j]));
    work[j] = input[j] + h;
    const double up = eval(make_tensor<double>(shape, work));
    work[j] = input[j] - h;
    const double down = eval(make_tensor<double>(shape, work));
    work[j] = input[j];
    numeric[j] = (up - down) / (2.0 * h);
  }
  auto gx = xf.grad();
  result.input_error = compare({gx.begin(), gx.end()}, numeric);
  result.worst = std::max(result.parameter_error, result.input_error);
  return result;
}

}  // namespace storseismic::testing
