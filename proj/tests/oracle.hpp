#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "d2t/numerics/matrix.hpp"

// Plain loop reference math, independent of the tape ops.
namespace d2t::oracle {

using Vec = std::vector<double>;

inline Vec col(const nn::Matrix& m) { return {m.values().begin(), m.values().end()}; }

inline Vec row_of(const nn::Matrix& m, std::size_t r) {
  Vec out(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) out[c] = m(r, c);
  return out;
}

inline Vec matvec(const nn::Matrix& w, const Vec& x) {
  Vec out(w.rows(), 0.0);
  for (std::size_t r = 0; r < w.rows(); ++r) {
    for (std::size_t c = 0; c < w.cols(); ++c) out[r] += w(r, c) * x[c];
  }
  return out;
}

inline Vec add(Vec a, const Vec& b) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

inline Vec cat(Vec a, const Vec& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline Vec softmax(const Vec& v) {
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  Vec out(v.size());
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += out[i] = std::exp(v[i] - mx);
  for (double& x : out) x /= s;
  return out;
}

struct LstmOut {
  Vec h, c;
};

// Gate blocks input, forget, output, candidate over [x; h].
inline LstmOut lstm(const nn::Matrix& w, const nn::Matrix& b, const Vec& x, const Vec& h,
                    const Vec& c) {
  const std::size_t n = h.size();
  const Vec z = add(matvec(w, cat(x, h)), col(b));
  LstmOut out{Vec(n), Vec(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double ig = sigmoid(z[i]), fg = sigmoid(z[n + i]), og = sigmoid(z[2 * n + i]);
    const double g = std::tanh(z[3 * n + i]);
    out.c[i] = fg * c[i] + ig * g;
    out.h[i] = og * std::tanh(out.c[i]);
  }
  return out;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = a.size() == b.size() ? 0.0 : INFINITY;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
  return m;
}

}  // namespace d2t::oracle
