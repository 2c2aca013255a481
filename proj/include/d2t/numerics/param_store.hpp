#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "d2t/numerics/matrix.hpp"

namespace d2t::nn {

// Named trainable parameters with gradient and Adagrad accumulator slots.
// Iteration order is lexicographic by name, which fixes initialization and
// serialization order.
class ParamStore {
 public:
  struct Entry {
    Matrix value;
    Matrix grad;
    Matrix accum;
  };

  // Registers a zero-initialized parameter. Names must be unique.
  Matrix& add(const std::string& name, std::size_t rows, std::size_t cols);

  bool contains(const std::string& name) const { return entries_.count(name) > 0; }
  Matrix& value(const std::string& name);
  const Matrix& value(const std::string& name) const;
  Matrix& grad(const std::string& name);
  const Matrix& grad(const std::string& name) const;
  Matrix& accum(const std::string& name);

  std::vector<std::string> names() const;
  std::size_t size() const { return entries_.size(); }
  std::size_t scalar_count() const;

  // Uniform in [-scale, scale], drawn in name order from a seeded generator.
  void init_uniform(std::uint64_t seed, double scale);
  void zero_grads();

  std::map<std::string, Entry>& entries() { return entries_; }
  const std::map<std::string, Entry>& entries() const { return entries_; }

 private:
  Entry& at(const std::string& name);
  const Entry& at(const std::string& name) const;

  std::map<std::string, Entry> entries_;
};

}  // namespace d2t::nn
