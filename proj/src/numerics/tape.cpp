#include "d2t/numerics/tape.hpp"

#include "d2t/errors.hpp"

namespace d2t::nn {

const Matrix& Var::value() const { return tape_->value(id_); }

double Var::scalar() const {
  const Matrix& m = value();
  if (m.size() != 1) throw DimensionError("scalar() on " + m.shape_string());
  return m[0];
}

Tape::Tape() {
#ifdef NDEBUG
  check_finite_ = false;
#else
  check_finite_ = true;
#endif
}

Var Tape::constant(Matrix value) {
  Node node;
  node.owned = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::borrow(const Matrix& value) {
  Node node;
  node.borrowed = &value;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::param(const ParamStore& store, const std::string& name) {
  if (store_ != nullptr && store_ != &store) {
    throw UsageError("tape already bound to a different parameter store");
  }
  store_ = &store;
  auto it = params_.find(name);
  if (it != params_.end()) return Var(this, it->second);
  Node node;
  node.borrowed = &store.value(name);
  node.requires_grad = grad_enabled_;
  nodes_.push_back(std::move(node));
  params_.emplace(name, nodes_.size() - 1);
  return Var(this, nodes_.size() - 1);
}

Var Tape::record(const char* op, Matrix value, std::span<const Var> inputs,
                 BackwardFn backward) {
  bool needs = false;
  for (const Var& in : inputs) {
    if (in.tape() != this) throw UsageError(std::string(op) + ": operand from another tape");
    needs = needs || nodes_[in.id()].requires_grad;
  }
  if (check_finite_ && !value.all_finite()) {
    throw NumericError(std::string(op) + " produced a non-finite value");
  }
  Node node;
  node.owned = std::move(value);
  node.requires_grad = needs;
  if (needs) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Matrix& Tape::value(std::size_t id) const {
  const Node& n = nodes_[id];
  return n.borrowed != nullptr ? *n.borrowed : n.owned;
}

Matrix& Tape::grad(std::size_t id) {
  Node& n = nodes_[id];
  if (!n.has_grad) {
    const Matrix& v = value(id);
    n.grad = Matrix(v.rows(), v.cols());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::backward(Var output) {
  if (output.tape() != this) throw UsageError("backward: output from another tape");
  if (output.value().size() != 1) {
    throw UsageError("backward needs a scalar output, got " + output.value().shape_string());
  }
  if (!nodes_[output.id()].requires_grad) return;
  grad(output.id())[0] += 1.0;
  for (std::size_t i = output.id() + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (n.has_grad && n.backward) n.backward(*this, i);
  }
}

void Tape::accumulate_into(ParamStore& store) const {
  for (const auto& [name, id] : params_) {
    const Node& n = nodes_[id];
    if (!n.has_grad) continue;
    Matrix& g = store.grad(name);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += n.grad[i];
  }
}

const Matrix* Tape::param_grad(const std::string& name) const {
  auto it = params_.find(name);
  if (it == params_.end() || !nodes_[it->second].has_grad) return nullptr;
  return &nodes_[it->second].grad;
}

}  // namespace d2t::nn
