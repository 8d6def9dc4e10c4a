#include "storseismic/numerics/tensor.hpp"

#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_set>

#include "storseismic/errors.hpp"

namespace storseismic {

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream ss;
  ss << "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    ss << shape[i];
    if (i + 1 != shape.size()) {
      ss << ", ";
    }
  }
  ss << "]";
  return ss.str();
}

namespace {
thread_local bool g_grad_enabled = true;
}  // namespace

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

template <typename T>
Tensor<T>::Tensor(Shape shape, T fill) : node_(std::make_shared<NodeType>()) {
  for (auto extent : shape) {
    if (extent == 0) {
      throw ShapeError("tensor extents must be positive: " +
                       shape_to_string(shape));
    }
  }
  node_->data.assign(shape_numel(shape), fill);
  node_->shape = std::move(shape);
}

template <typename T>
Tensor<T>::Tensor(Shape shape, std::vector<T> values)
    : node_(std::make_shared<NodeType>()) {
  for (auto extent : shape) {
    if (extent == 0) {
      throw ShapeError("tensor extents must be positive: " +
                       shape_to_string(shape));
    }
  }
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("shape " + shape_to_string(shape) + " needs " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
  node_->shape = std::move(shape);
  node_->data = std::move(values);
}

template <typename T>
Tensor<T> Tensor<T>::scalar(T value) {
  return Tensor(Shape{}, std::vector<T>{value});
}

template <typename T>
const typename Tensor<T>::NodeType& Tensor<T>::checked() const {
  if (!node_) {
    throw ContractError("use of an undefined tensor");
  }
  return *node_;
}

template <typename T>
typename Tensor<T>::NodeType& Tensor<T>::checked() {
  if (!node_) {
    throw ContractError("use of an undefined tensor");
  }
  return *node_;
}

template <typename T>
const Shape& Tensor<T>::shape() const {
  return checked().shape;
}

template <typename T>
std::size_t Tensor<T>::dim(std::size_t axis) const {
  const auto& s = shape();
  if (axis >= s.size()) {
    throw ShapeError("axis " + std::to_string(axis) + " out of range for " +
                     shape_to_string(s));
  }
  return s[axis];
}

template <typename T>
std::size_t Tensor<T>::numel() const {
  return checked().data.size();
}

template <typename T>
std::span<const T> Tensor<T>::data() const {
  return checked().data;
}

template <typename T>
std::span<T> Tensor<T>::mutable_data() {
  auto& n = checked();
  if (!n.is_leaf()) {
    throw ContractError("only leaf tensors expose mutable data");
  }
  return n.data;
}

template <typename T>
T Tensor<T>::item() const {
  const auto& n = checked();
  if (n.data.size() != 1) {
    throw ShapeError("item() needs a single-element tensor, got " +
                     shape_to_string(n.shape));
  }
  return n.data[0];
}

template <typename T>
bool Tensor<T>::requires_grad() const {
  return checked().requires_grad;
}

template <typename T>
Tensor<T>& Tensor<T>::set_requires_grad(bool flag) {
  auto& n = checked();
  if (!n.is_leaf()) {
    throw ContractError("requires_grad can only be changed on leaf tensors");
  }
  n.requires_grad = flag;
  return *this;
}

template <typename T>
bool Tensor<T>::has_grad() const {
  return !checked().grad.empty();
}

template <typename T>
std::span<const T> Tensor<T>::grad() const {
  const auto& n = checked();
  if (n.grad.empty()) {
    throw ContractError("tensor has no gradient");
  }
  return n.grad;
}

template <typename T>
std::span<T> Tensor<T>::mutable_grad() {
  auto& n = checked();
  n.ensure_grad();
  return n.grad;
}

template <typename T>
void Tensor<T>::zero_grad() {
  auto& n = checked();
  n.grad.clear();
  n.grad.shrink_to_fit();
}

template <typename T>
void Tensor<T>::backward() const {
  const auto& root = checked();
  if (root.data.size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        shape_to_string(root.shape));
  }
  if (!root.requires_grad) {
    throw ContractError("backward() called on a tensor that is not tracked");
  }

  // Iterative post-order DFS gives a topological order without recursion.
  std::vector<NodeType*> order;
  std::unordered_set<NodeType*> visited;
  std::vector<std::pair<NodeType*, std::size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [node, next_parent] = stack.back();
    if (next_parent < node->parents.size()) {
      NodeType* parent = node->parents[next_parent++].get();
      if (parent->requires_grad && visited.insert(parent).second) {
        stack.emplace_back(parent, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (NodeType* node : order) {
    if (!node->is_leaf()) {
      node->grad.assign(node->data.size(), T(0));
    }
  }
  node_->ensure_grad();
  node_->grad[0] += T(1);

  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeType* node = *it;
    if (node->backward_fn) {
      node->backward_fn(*node);
    }
  }
}

template <typename T>
Tensor<T> Tensor<T>::detach() const {
  const auto& n = checked();
  return Tensor(n.shape, n.data);
}

template <typename T>
Tensor<T> Tensor<T>::from_op(Shape shape, std::vector<T> values,
                             std::vector<Tensor> inputs,
                             std::function<void(NodeType&)> backward_fn) {
  auto node = std::make_shared<NodeType>();
  node->shape = std::move(shape);
  node->data = std::move(values);
  bool track = false;
  if (grad_enabled()) {
    for (const auto& input : inputs) {
      if (input.requires_grad()) {
        track = true;
        break;
      }
    }
  }
  if (track) {
    node->requires_grad = true;
    node->parents.reserve(inputs.size());
    for (auto& input : inputs) {
      node->parents.push_back(input.node_);
    }
    node->backward_fn = std::move(backward_fn);
  }
  return Tensor(std::move(node));
}

template class Tensor<float>;
template class Tensor<double>;

}  // namespace storseismic
