#include "d2t/numerics/param_store.hpp"

#include <random>

#include "d2t/errors.hpp"

namespace d2t::nn {

Matrix& ParamStore::add(const std::string& name, std::size_t rows, std::size_t cols) {
  auto [it, inserted] = entries_.try_emplace(name);
  if (!inserted) throw UsageError("duplicate parameter name: " + name);
  it->second.value = Matrix(rows, cols);
  it->second.grad = Matrix(rows, cols);
  it->second.accum = Matrix(rows, cols);
  return it->second.value;
}

ParamStore::Entry& ParamStore::at(const std::string& name) {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

const ParamStore::Entry& ParamStore::at(const std::string& name) const {
  auto it = entries_.find(name);
  if (it == entries_.end()) throw UsageError("unknown parameter: " + name);
  return it->second;
}

Matrix& ParamStore::value(const std::string& name) { return at(name).value; }
const Matrix& ParamStore::value(const std::string& name) const { return at(name).value; }
Matrix& ParamStore::grad(const std::string& name) { return at(name).grad; }
const Matrix& ParamStore::grad(const std::string& name) const { return at(name).grad; }
Matrix& ParamStore::accum(const std::string& name) { return at(name).accum; }

std::vector<std::string> ParamStore::names() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [name, entry] : entries_) out.push_back(name);
  return out;
}

std::size_t ParamStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& [name, entry] : entries_) n += entry.value.size();
  return n;
}

void ParamStore::init_uniform(std::uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  // 53-bit draw mapped by hand; the stream does not depend on the stdlib.
  auto draw = [&]() {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return (2.0 * unit - 1.0) * scale;
  };
  for (auto& [name, entry] : entries_) {
    for (double& v : entry.value.values()) v = draw();
  }
}

void ParamStore::zero_grads() {
  for (auto& [name, entry] : entries_) entry.grad.fill(0.0);
}

}  // namespace d2t::nn
