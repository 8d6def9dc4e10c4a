#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace storseismic {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {

//! One vertex of the define-by-run gradient tape.
template <typename T>
struct Node {
  Shape shape;
  std::vector<T> data;
  std::vector<T> grad;  // empty until populated
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  // Reads this node's grad and accumulates into parents that require grad.
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return parents.empty(); }
  void ensure_grad() {
    if (grad.empty()) {
      grad.assign(data.size(), T(0));
    }
  }
};

}  // namespace detail

//! True unless a NoGradGuard is alive on this thread.
bool grad_enabled();

//! Disables tape recording on the current thread for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

//! Dense row-major n-dimensional array with optional participation in the
//! gradient tape.
//!
//! Tensor is a shared handle: copies alias the same storage and tape node.
//! Values are fixed once an op has produced them; only leaves expose mutable
//! data (the optimizer writes parameters through it).
//!
//! Gradient policy: backward() zeroes every interior node of the graph it
//! walks, seeds the root with 1 and accumulates into leaves. Calling it twice
//! on the same graph therefore doubles leaf gradients, exactly as two
//! separate losses would. The graph lives as long as any handle to its root.
template <typename T>
class Tensor {
 public:
  using value_type = T;
  using NodeType = detail::Node<T>;

  Tensor() = default;
  explicit Tensor(Shape shape, T fill = T(0));
  Tensor(Shape shape, std::vector<T> values);

  static Tensor scalar(T value);
  static Tensor zeros(Shape shape) { return Tensor(std::move(shape)); }
  static Tensor ones(Shape shape) { return Tensor(std::move(shape), T(1)); }

  bool defined() const { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t numel() const;

  std::span<const T> data() const;
  //! Mutable view of a leaf's values. Throws ContractError on op outputs.
  std::span<T> mutable_data();
  T item() const;
  T operator[](std::size_t flat_index) const { return data()[flat_index]; }

  bool requires_grad() const;
  //! Only leaves may change their tracking flag.
  Tensor& set_requires_grad(bool flag);

  bool has_grad() const;
  std::span<const T> grad() const;
  std::span<T> mutable_grad();
  //! Drops the gradient buffer; has_grad() is false afterwards.
  void zero_grad();

  //! Reverse-mode sweep from this scalar. Throws ContractError if the tensor
  //! is not a tracked scalar.
  void backward() const;

  //! Fresh leaf holding a copy of the values, detached from any graph.
  Tensor detach() const;

  //! Used by op implementations to attach a result to the tape.
  static Tensor from_op(Shape shape, std::vector<T> values,
                        std::vector<Tensor> inputs,
                        std::function<void(NodeType&)> backward_fn);

  const std::shared_ptr<NodeType>& node() const { return node_; }

 private:
  explicit Tensor(std::shared_ptr<NodeType> node) : node_(std::move(node)) {}
  const NodeType& checked() const;
  NodeType& checked();

  std::shared_ptr<NodeType> node_;
};

extern template class Tensor<float>;
extern template class Tensor<double>;

}  // namespace storseismic
