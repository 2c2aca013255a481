#pragma once

#include <cstddef>
#include <deque>
#include <functional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "d2t/numerics/matrix.hpp"
#include "d2t/numerics/param_store.hpp"

namespace d2t::nn {

class Tape;

// Handle to a value recorded on a Tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;

  const Matrix& value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }
  // Value of a 1x1 node.
  double scalar() const;

  Tape* tape() const { return tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode gradient recorder. Ops append nodes in evaluation order;
// backward() visits them in exact reverse order. Parameters are borrowed
// from a ParamStore by reference and their gradients are exported with
// accumulate_into().
class Tape {
 public:
  // Receives the tape and the id of the node whose gradient is complete.
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  Tape();
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  Var constant(Matrix value);
  // Constant read by reference; the matrix must outlive the tape.
  Var borrow(const Matrix& value);
  // Same node for repeated requests of one name.
  Var param(const ParamStore& store, const std::string& name);

  // Low-level hook used by op implementations.
  Var record(const char* op, Matrix value, std::span<const Var> inputs, BackwardFn backward);
  Var record(const char* op, Matrix value, std::initializer_list<Var> inputs,
             BackwardFn backward) {
    return record(op, std::move(value), std::span<const Var>(inputs.begin(), inputs.size()),
                  std::move(backward));
  }

  const Matrix& value(std::size_t id) const;
  // Gradient buffer of a node, allocated as zeros on first access.
  Matrix& grad(std::size_t id);
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Seeds d(output)/d(output) = 1. Output must be 1x1.
  void backward(Var output);
  // Adds parameter-node gradients into store.grad(name).
  void accumulate_into(ParamStore& store) const;
  const Matrix* param_grad(const std::string& name) const;

  std::size_t size() const { return nodes_.size(); }
  void set_finite_checks(bool enabled) { check_finite_ = enabled; }
  // With gradients disabled, parameters bind as constants and no backward
  // closures are kept.
  void set_grad_enabled(bool enabled) { grad_enabled_ = enabled; }

 private:
  struct Node {
    Matrix owned;
    const Matrix* borrowed = nullptr;
    Matrix grad;
    BackwardFn backward;
    bool requires_grad = false;
    bool has_grad = false;
  };

  std::deque<Node> nodes_;
  std::unordered_map<std::string, std::size_t> params_;
  const ParamStore* store_ = nullptr;
  bool check_finite_;
  bool grad_enabled_ = true;
};

}  // namespace d2t::nn
