#include "d2t/numerics/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "d2t/errors.hpp"

namespace d2t::nn {
namespace {

Tape& tape_of(Var a) {
  if (!a.valid()) throw UsageError("operation on an empty Var");
  return *a.tape();
}

void require_same_shape(const char* op, const Matrix& a, const Matrix& b) {
  if (!a.same_shape(b)) {
    throw DimensionError(std::string(op) + ": " + a.shape_string() + " vs " + b.shape_string());
  }
}

void require_column(const char* op, const Matrix& v) {
  if (v.cols() != 1) throw DimensionError(std::string(op) + ": expected column vector, got " +
                                          v.shape_string());
}

// out += a * b^T
void add_a_bt(Matrix& out, const Matrix& a, const Matrix& b) {
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      double acc = 0.0;
      for (std::size_t k = 0; k < a.cols(); ++k) acc += a(i, k) * b(j, k);
      out(i, j) += acc;
    }
  }
}

// out += a^T * b
void add_at_b(Matrix& out, const Matrix& a, const Matrix& b) {
  for (std::size_t k = 0; k < a.rows(); ++k) {
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double aki = a(k, i);
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aki * b(k, j);
    }
  }
}

// Elementwise unary op whose derivative is expressed through input x and output y.
template <typename F, typename D>
Var unary(const char* name, Var a, F f, D dfdx) {
  Tape& t = tape_of(a);
  Matrix out = a.value();
  for (double& v : out.values()) v = f(v);
  const std::size_t ia = a.id();
  return t.record(name, std::move(out), {a}, [ia, dfdx](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    const Matrix& x = t.value(ia);
    const Matrix& y = t.value(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfdx(x[i], y[i]);
  });
}

void accumulate(Tape& t, std::size_t target, const Matrix& g, double factor = 1.0) {
  if (!t.requires_grad(target)) return;
  Matrix& gt = t.grad(target);
  for (std::size_t i = 0; i < g.size(); ++i) gt[i] += factor * g[i];
}

}  // namespace

Var matmul(Var a, Var b) {
  Tape& t = tape_of(a);
  Matrix out = matmul(a.value(), b.value());
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("matmul", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ia)) add_a_bt(t.grad(ia), g, t.value(ib));
    if (t.requires_grad(ib)) add_at_b(t.grad(ib), t.value(ia), g);
  });
}

Var transpose(Var a) {
  Tape& t = tape_of(a);
  const std::size_t ia = a.id();
  return t.record("transpose", transpose(a.value()), {a}, [ia](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < g.rows(); ++i) {
      for (std::size_t j = 0; j < g.cols(); ++j) ga(j, i) += g(i, j);
    }
  });
}

Var add(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape("add", a.value(), b.value());
  Matrix out = a.value();
  const Matrix& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("add", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    accumulate(t, ia, g);
    accumulate(t, ib, g);
  });
}

Var sub(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape("sub", a.value(), b.value());
  Matrix out = a.value();
  const Matrix& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] -= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("sub", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    accumulate(t, ia, g);
    accumulate(t, ib, g, -1.0);
  });
}

Var mul(Var a, Var b) {
  Tape& t = tape_of(a);
  require_same_shape("mul", a.value(), b.value());
  Matrix out = a.value();
  const Matrix& bv = b.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return t.record("mul", std::move(out), {a, b}, [ia, ib](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    if (t.requires_grad(ia)) {
      Matrix& ga = t.grad(ia);
      const Matrix& bv = t.value(ib);
      for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * bv[i];
    }
    if (t.requires_grad(ib)) {
      Matrix& gb = t.grad(ib);
      const Matrix& av = t.value(ia);
      for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * av[i];
    }
  });
}

Var scale(Var a, double factor) {
  Tape& t = tape_of(a);
  Matrix out = a.value();
  for (double& v : out.values()) v *= factor;
  const std::size_t ia = a.id();
  return t.record("scale", std::move(out), {a}, [ia, factor](Tape& t, std::size_t self) {
    accumulate(t, ia, t.grad(self), factor);
  });
}

Var one_minus(Var a) {
  return unary("one_minus", a, [](double x) { return 1.0 - x; },
               [](double, double) { return -1.0; });
}

Var sigmoid(Var a) {
  return unary(
      "sigmoid", a,
      [](double x) {
        if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var tanh(Var a) {
  return unary("tanh", a, [](double x) { return std::tanh(x); },
               [](double, double y) { return 1.0 - y * y; });
}

Var relu(Var a) {
  return unary("relu", a, [](double x) { return x > 0.0 ? x : 0.0; },
               [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var log(Var a) {
  return unary("log", a, [](double x) { return std::log(x); },
               [](double x, double) { return 1.0 / x; });
}

Var log_sigmoid(Var a) {
  return unary(
      "log_sigmoid", a,
      [](double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); },
      [](double x, double) {
        // 1 - sigmoid(x)
        if (x >= 0) {
          const double e = std::exp(-x);
          return e / (1.0 + e);
        }
        return 1.0 / (1.0 + std::exp(x));
      });
}

Var softmax(Var v) {
  Tape& t = tape_of(v);
  const Matrix& x = v.value();
  require_column("softmax", x);
  if (x.size() == 0) throw std::domain_error("softmax of an empty vector");
  Matrix out = x;
  const double mx = *std::max_element(out.values().begin(), out.values().end());
  double total = 0.0;
  for (double& e : out.values()) {
    e = std::exp(e - mx);
    total += e;
  }
  for (double& e : out.values()) e /= total;
  const std::size_t iv = v.id();
  return t.record("softmax", std::move(out), {v}, [iv](Tape& t, std::size_t self) {
    if (!t.requires_grad(iv)) return;
    const Matrix& g = t.grad(self);
    const Matrix& y = t.value(self);
    double dot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) dot += g[i] * y[i];
    Matrix& gv = t.grad(iv);
    for (std::size_t i = 0; i < y.size(); ++i) gv[i] += y[i] * (g[i] - dot);
  });
}

Var log_softmax(Var v) {
  Tape& t = tape_of(v);
  const Matrix& x = v.value();
  require_column("log_softmax", x);
  if (x.size() == 0) throw std::domain_error("log_softmax of an empty vector");
  const double mx = *std::max_element(x.values().begin(), x.values().end());
  double total = 0.0;
  for (double e : x.values()) total += std::exp(e - mx);
  const double lse = mx + std::log(total);
  Matrix out = x;
  for (double& e : out.values()) e -= lse;
  const std::size_t iv = v.id();
  return t.record("log_softmax", std::move(out), {v}, [iv](Tape& t, std::size_t self) {
    if (!t.requires_grad(iv)) return;
    const Matrix& g = t.grad(self);
    const Matrix& y = t.value(self);
    double gsum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) gsum += g[i];
    Matrix& gv = t.grad(iv);
    for (std::size_t i = 0; i < y.size(); ++i) gv[i] += g[i] - std::exp(y[i]) * gsum;
  });
}

Var masked_softmax_rows(Var m, const std::vector<bool>& mask) {
  Tape& t = tape_of(m);
  const Matrix& x = m.value();
  if (mask.size() != x.size()) {
    throw DimensionError("masked_softmax_rows: mask of " + std::to_string(mask.size()) +
                         " for " + x.shape_string());
  }
  Matrix out(x.rows(), x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const std::size_t base = r * x.cols();
    bool any = false;
    double mx = kMaskedLogit;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      if (mask[base + c]) {
        mx = any ? std::max(mx, x[base + c]) : x[base + c];
        any = true;
      }
    }
    if (!any) continue;
    double total = 0.0;
    for (std::size_t c = 0; c < x.cols(); ++c) {
      const double logit = mask[base + c] ? x[base + c] : kMaskedLogit;
      out[base + c] = std::exp(logit - mx);
      total += out[base + c];
    }
    for (std::size_t c = 0; c < x.cols(); ++c) out[base + c] /= total;
  }
  const std::size_t im = m.id();
  return t.record("masked_softmax_rows", std::move(out), {m},
                  [im, mask](Tape& t, std::size_t self) {
                    if (!t.requires_grad(im)) return;
                    const Matrix& g = t.grad(self);
                    const Matrix& y = t.value(self);
                    Matrix& gm = t.grad(im);
                    for (std::size_t r = 0; r < y.rows(); ++r) {
                      const std::size_t base = r * y.cols();
                      double dot = 0.0;
                      for (std::size_t c = 0; c < y.cols(); ++c) dot += g[base + c] * y[base + c];
                      for (std::size_t c = 0; c < y.cols(); ++c) {
                        if (mask[base + c]) gm[base + c] += y[base + c] * (g[base + c] - dot);
                      }
                    }
                  });
}

Var concat(std::span<const Var> parts) {
  if (parts.empty()) throw UsageError("concat of nothing");
  Tape& t = tape_of(parts[0]);
  const std::size_t cols = parts[0].cols();
  std::size_t rows = 0;
  for (const Var& p : parts) {
    if (p.cols() != cols) {
      throw DimensionError("concat: column mismatch " + parts[0].value().shape_string() +
                           " vs " + p.value().shape_string());
    }
    rows += p.rows();
  }
  Matrix out(rows, cols);
  std::vector<std::size_t> ids;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Matrix& v = p.value();
    std::copy(v.values().begin(), v.values().end(), out.values().begin() + offset);
    offset += v.size();
    ids.push_back(p.id());
  }
  return t.record("concat", std::move(out), parts, [ids](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t n = t.value(id).size();
      if (t.requires_grad(id)) {
        Matrix& gi = t.grad(id);
        for (std::size_t i = 0; i < n; ++i) gi[i] += g[offset + i];
      }
      offset += n;
    }
  });
}

Var concat(std::initializer_list<Var> parts) {
  return concat(std::span<const Var>(parts.begin(), parts.size()));
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw UsageError("concat_cols of nothing");
  Tape& t = tape_of(parts[0]);
  const std::size_t rows = parts[0].rows();
  std::size_t cols = 0;
  for (const Var& p : parts) {
    if (p.rows() != rows) {
      throw DimensionError("concat_cols: row mismatch " + parts[0].value().shape_string() +
                           " vs " + p.value().shape_string());
    }
    cols += p.cols();
  }
  Matrix out(rows, cols);
  std::vector<std::size_t> ids;
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Matrix& v = p.value();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < v.cols(); ++c) out(r, offset + c) = v(r, c);
    }
    offset += v.cols();
    ids.push_back(p.id());
  }
  return t.record("concat_cols", std::move(out), parts, [ids](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    std::size_t offset = 0;
    for (std::size_t id : ids) {
      const std::size_t w = t.value(id).cols();
      if (t.requires_grad(id)) {
        Matrix& gi = t.grad(id);
        for (std::size_t r = 0; r < g.rows(); ++r) {
          for (std::size_t c = 0; c < w; ++c) gi(r, c) += g(r, offset + c);
        }
      }
      offset += w;
    }
  });
}

Var slice_rows(Var a, std::size_t begin, std::size_t count) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (begin + count > x.rows()) {
    throw DimensionError("slice_rows: [" + std::to_string(begin) + ", +" +
                         std::to_string(count) + ") of " + x.shape_string());
  }
  Matrix out(count, x.cols());
  std::copy_n(x.values().begin() + begin * x.cols(), count * x.cols(), out.values().begin());
  const std::size_t ia = a.id();
  return t.record("slice_rows", std::move(out), {a}, [ia, begin](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    const std::size_t off = begin * ga.cols();
    for (std::size_t i = 0; i < g.size(); ++i) ga[off + i] += g[i];
  });
}

Var reshape(Var a, std::size_t rows, std::size_t cols) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (rows * cols != x.size()) {
    throw DimensionError("reshape " + x.shape_string() + " to " + std::to_string(rows) + "x" +
                         std::to_string(cols));
  }
  Matrix out(rows, cols);
  std::copy(x.values().begin(), x.values().end(), out.values().begin());
  const std::size_t ia = a.id();
  return t.record("reshape", std::move(out), {a}, [ia](Tape& t, std::size_t self) {
    accumulate(t, ia, t.grad(self));
  });
}

Var row(Var a, std::size_t r) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (r >= x.rows()) {
    throw DimensionError("row " + std::to_string(r) + " of " + x.shape_string());
  }
  Matrix out(x.cols(), 1);
  std::copy_n(x.values().begin() + r * x.cols(), x.cols(), out.values().begin());
  const std::size_t ia = a.id();
  return t.record("row", std::move(out), {a}, [ia, r](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t c = 0; c < g.size(); ++c) ga(r, c) += g[c];
  });
}

Var gather_rows(Var a, std::span<const long> indices) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix out(indices.size(), x.cols());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const long src = indices[i];
    if (src < 0) continue;
    if (static_cast<std::size_t>(src) >= x.rows()) {
      throw DimensionError("gather_rows: index " + std::to_string(src) + " of " +
                           x.shape_string());
    }
    std::copy_n(x.values().begin() + src * x.cols(), x.cols(), out.values().begin() + i * x.cols());
  }
  std::vector<long> idx(indices.begin(), indices.end());
  const std::size_t ia = a.id();
  return t.record("gather_rows", std::move(out), {a}, [ia, idx](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    const std::size_t cols = ga.cols();
    for (std::size_t i = 0; i < idx.size(); ++i) {
      if (idx[i] < 0) continue;
      for (std::size_t c = 0; c < cols; ++c) ga(idx[i], c) += g(i, c);
    }
  });
}

Var gather_entries(Var a, std::span<const std::size_t> indices) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  Matrix out(indices.size(), 1);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] >= x.size()) throw DimensionError("gather_entries: index out of range");
    out[i] = x[indices[i]];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  const std::size_t ia = a.id();
  return t.record("gather_entries", std::move(out), {a}, [ia, idx](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t i = 0; i < idx.size(); ++i) ga[idx[i]] += g[i];
  });
}

Var stack_rows(std::span<const Var> parts) {
  if (parts.empty()) throw UsageError("stack_rows of nothing");
  for (const Var& p : parts) require_column("stack_rows", p.value());
  // Row-major layout of stacked rows equals the vertical concatenation.
  Var joined = concat(parts);
  return reshape(joined, parts.size(), parts[0].rows());
}

Var mean_rows(Var a) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  if (x.rows() == 0) throw DimensionError("mean_rows of an empty matrix");
  Matrix out(x.cols(), 1);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out[c] += x(r, c);
  }
  const double inv = 1.0 / static_cast<double>(x.rows());
  for (double& v : out.values()) v *= inv;
  const std::size_t ia = a.id();
  return t.record("mean_rows", std::move(out), {a}, [ia, inv](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const Matrix& g = t.grad(self);
    Matrix& ga = t.grad(ia);
    for (std::size_t r = 0; r < ga.rows(); ++r) {
      for (std::size_t c = 0; c < ga.cols(); ++c) ga(r, c) += g[c] * inv;
    }
  });
}

Var sum(Var a) {
  Tape& t = tape_of(a);
  double total = 0.0;
  for (double v : a.value().values()) total += v;
  const std::size_t ia = a.id();
  return t.record("sum", Matrix(1, 1, total), {a}, [ia](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const double g = t.grad(self)[0];
    for (double& v : t.grad(ia).values()) v += g;
  });
}

Var pick(Var a, std::size_t flat_index) {
  const std::size_t idx[] = {flat_index};
  return gather_entries(a, idx);
}

Var sum_entries(Var a, std::span<const std::size_t> indices) {
  Tape& t = tape_of(a);
  const Matrix& x = a.value();
  double total = 0.0;
  for (std::size_t i : indices) {
    if (i >= x.size()) throw DimensionError("sum_entries: index out of range");
    total += x[i];
  }
  std::vector<std::size_t> idx(indices.begin(), indices.end());
  const std::size_t ia = a.id();
  return t.record("sum_entries", Matrix(1, 1, total), {a}, [ia, idx](Tape& t, std::size_t self) {
    if (!t.requires_grad(ia)) return;
    const double g = t.grad(self)[0];
    Matrix& ga = t.grad(ia);
    for (std::size_t i : idx) ga[i] += g;
  });
}

Var add_rowwise(Var m, Var v) {
  Tape& t = tape_of(m);
  const Matrix& x = m.value();
  const Matrix& b = v.value();
  require_column("add_rowwise", b);
  if (b.rows() != x.cols()) {
    throw DimensionError("add_rowwise: " + x.shape_string() + " + " + b.shape_string());
  }
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) += b[c];
  }
  const std::size_t im = m.id(), iv = v.id();
  return t.record("add_rowwise", std::move(out), {m, v}, [im, iv](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    accumulate(t, im, g);
    if (t.requires_grad(iv)) {
      Matrix& gv = t.grad(iv);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gv[c] += g(r, c);
      }
    }
  });
}

Var mul_rowwise(Var m, Var v) {
  Tape& t = tape_of(m);
  const Matrix& x = m.value();
  const Matrix& b = v.value();
  require_column("mul_rowwise", b);
  if (b.rows() != x.cols()) {
    throw DimensionError("mul_rowwise: " + x.shape_string() + " * " + b.shape_string());
  }
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) *= b[c];
  }
  const std::size_t im = m.id(), iv = v.id();
  return t.record("mul_rowwise", std::move(out), {m, v}, [im, iv](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& x = t.value(im);
    const Matrix& b = t.value(iv);
    if (t.requires_grad(im)) {
      Matrix& gm = t.grad(im);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gm(r, c) += g(r, c) * b[c];
      }
    }
    if (t.requires_grad(iv)) {
      Matrix& gv = t.grad(iv);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gv[c] += g(r, c) * x(r, c);
      }
    }
  });
}

Var repeat_rows(Var v, std::size_t count) {
  Tape& t = tape_of(v);
  const Matrix& b = v.value();
  require_column("repeat_rows", b);
  Matrix out(count, b.rows());
  for (std::size_t r = 0; r < count; ++r) {
    for (std::size_t c = 0; c < b.rows(); ++c) out(r, c) = b[c];
  }
  const std::size_t iv = v.id();
  return t.record("repeat_rows", std::move(out), {v}, [iv](Tape& t, std::size_t self) {
    if (!t.requires_grad(iv)) return;
    const Matrix& g = t.grad(self);
    Matrix& gv = t.grad(iv);
    for (std::size_t r = 0; r < g.rows(); ++r) {
      for (std::size_t c = 0; c < g.cols(); ++c) gv[c] += g(r, c);
    }
  });
}

Var scale_rows(Var m, Var v) {
  Tape& t = tape_of(m);
  const Matrix& x = m.value();
  const Matrix& s = v.value();
  require_column("scale_rows", s);
  if (s.rows() != x.rows()) {
    throw DimensionError("scale_rows: " + x.shape_string() + " by " + s.shape_string());
  }
  Matrix out = x;
  for (std::size_t r = 0; r < x.rows(); ++r) {
    for (std::size_t c = 0; c < x.cols(); ++c) out(r, c) *= s[r];
  }
  const std::size_t im = m.id(), iv = v.id();
  return t.record("scale_rows", std::move(out), {m, v}, [im, iv](Tape& t, std::size_t self) {
    const Matrix& g = t.grad(self);
    const Matrix& x = t.value(im);
    const Matrix& s = t.value(iv);
    if (t.requires_grad(im)) {
      Matrix& gm = t.grad(im);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gm(r, c) += g(r, c) * s[r];
      }
    }
    if (t.requires_grad(iv)) {
      Matrix& gv = t.grad(iv);
      for (std::size_t r = 0; r < g.rows(); ++r) {
        for (std::size_t c = 0; c < g.cols(); ++c) gv[r] += g(r, c) * x(r, c);
      }
    }
  });
}

Var grouped_mix(Var weights, Var cells) {
  Tape& t = tape_of(weights);
  const Matrix& w = weights.value();
  const Matrix& g = cells.value();
  if (g.rows() != w.size()) {
    throw DimensionError("grouped_mix: weights " + w.shape_string() + " cells " +
                         g.shape_string());
  }
  const std::size_t groups = w.rows(), width = w.cols(), n = g.cols();
  Matrix out(groups, n);
  for (std::size_t k = 0; k < groups; ++k) {
    for (std::size_t z = 0; z < width; ++z) {
      const double a = w(k, z);
      const std::size_t cell = k * width + z;
      for (std::size_t c = 0; c < n; ++c) out(k, c) += a * g(cell, c);
    }
  }
  const std::size_t iw = weights.id(), ig = cells.id();
  return t.record("grouped_mix", std::move(out), {weights, cells},
                  [iw, ig](Tape& t, std::size_t self) {
                    const Matrix& go = t.grad(self);
                    const Matrix& w = t.value(iw);
                    const Matrix& g = t.value(ig);
                    const std::size_t width = w.cols(), n = g.cols();
                    if (t.requires_grad(iw)) {
                      Matrix& gw = t.grad(iw);
                      for (std::size_t k = 0; k < w.rows(); ++k) {
                        for (std::size_t z = 0; z < width; ++z) {
                          double acc = 0.0;
                          for (std::size_t c = 0; c < n; ++c) acc += go(k, c) * g(k * width + z, c);
                          gw(k, z) += acc;
                        }
                      }
                    }
                    if (t.requires_grad(ig)) {
                      Matrix& gg = t.grad(ig);
                      for (std::size_t k = 0; k < w.rows(); ++k) {
                        for (std::size_t z = 0; z < width; ++z) {
                          const double a = w(k, z);
                          for (std::size_t c = 0; c < n; ++c) gg(k * width + z, c) += a * go(k, c);
                        }
                      }
                    }
                  });
}

}  // namespace d2t::nn
