#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "d2t/numerics/tape.hpp"

namespace d2t::nn {

// Logit assigned to masked cells before normalization.
inline constexpr double kMaskedLogit = -1e9;

Var matmul(Var a, Var b);
Var transpose(Var a);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);  // elementwise
Var scale(Var a, double factor);
Var one_minus(Var a);

Var sigmoid(Var a);
Var tanh(Var a);
Var relu(Var a);
Var log(Var a);

// log(sigmoid(x)) elementwise, stable for large |x|.
Var log_sigmoid(Var a);
// Column-vector softmax with max subtraction.
Var softmax(Var v);
// log(softmax(v)) computed as v - logsumexp(v).
Var log_softmax(Var v);
// Row-wise softmax of an R x C matrix. Cells with mask=false get kMaskedLogit;
// a row with no unmasked cell yields all zeros. mask is row-major R*C.
Var masked_softmax_rows(Var m, const std::vector<bool>& mask);

// Vertical concatenation of matrices with equal column counts.
Var concat(std::span<const Var> parts);
Var concat(std::initializer_list<Var> parts);
// Horizontal concatenation of matrices with equal row counts.
Var concat_cols(std::span<const Var> parts);
Var slice_rows(Var a, std::size_t begin, std::size_t count);
Var reshape(Var a, std::size_t rows, std::size_t cols);

// Row r of a as a column vector (embedding lookup).
Var row(Var a, std::size_t r);
// Selected rows of a; index -1 yields a zero row.
Var gather_rows(Var a, std::span<const long> indices);
// Flat entries of a (row-major) as a column vector.
Var gather_entries(Var a, std::span<const std::size_t> indices);
// Column vectors stacked as rows: result row i = parts[i]^T.
Var stack_rows(std::span<const Var> parts);
// Mean over rows as a column vector.
Var mean_rows(Var a);

Var sum(Var a);
Var pick(Var a, std::size_t flat_index);
Var sum_entries(Var a, std::span<const std::size_t> indices);

// Row-broadcast helpers for an R x C matrix m and a C x 1 vector v.
Var add_rowwise(Var m, Var v);
Var mul_rowwise(Var m, Var v);
Var repeat_rows(Var v, std::size_t count);
// Row r of m scaled by v[r]; v is R x 1.
Var scale_rows(Var m, Var v);
// weights: K x Z, cells: (K*Z) x n. Row k of the result is
// sum_z weights(k,z) * cells(k*Z + z).
Var grouped_mix(Var weights, Var cells);

}  // namespace d2t::nn
