#include "stvf/sparse.hpp"

#include <algorithm>
#include <stdexcept>

namespace stvf {

SparsityPattern::SparsityPattern(const Mesh& mesh) {
  const std::size_t nv = mesh.num_vertices();
  const std::size_t nt = mesh.num_triangles();
  row_ptr_.assign(nv + 1, 0);
  std::vector<std::int32_t> cols;
  for (std::size_t i = 0; i < nv; ++i) {
    cols.clear();
    for (auto t : mesh.vertex_triangles(static_cast<VertexId>(i))) {
      for (VertexId w : mesh.triangle(t)) cols.push_back(w);
    }
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    col_.insert(col_.end(), cols.begin(), cols.end());
    row_ptr_[i + 1] = static_cast<std::int32_t>(col_.size());
  }

  slots_.resize(9 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& v = mesh.triangle(t);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) slots_[9 * t + 3 * a + b] = find(v[a], v[b]);
    }
  }

  inc_ptr_.assign(nv + 1, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    inc_ptr_[i + 1] =
        inc_ptr_[i] + static_cast<std::int32_t>(mesh.vertex_triangles(static_cast<VertexId>(i)).size());
  }
  inc_tri_.resize(inc_ptr_.back());
  inc_local_.resize(inc_ptr_.back());
  for (std::size_t i = 0; i < nv; ++i) {
    std::int32_t k = inc_ptr_[i];
    for (auto t : mesh.vertex_triangles(static_cast<VertexId>(i))) {
      const auto& v = mesh.triangle(t);
      inc_tri_[k] = t;
      inc_local_[k] = static_cast<std::int8_t>(std::find(v.begin(), v.end(), static_cast<VertexId>(i)) - v.begin());
      ++k;
    }
  }
}

std::int32_t SparsityPattern::find(std::int32_t i, std::int32_t j) const {
  const auto first = col_.begin() + row_ptr_[i];
  const auto last = col_.begin() + row_ptr_[i + 1];
  const auto it = std::lower_bound(first, last, j);
  if (it == last || *it != j) return -1;
  return static_cast<std::int32_t>(it - col_.begin());
}

double SparseOperator::at(std::int32_t i, std::int32_t j) const {
  const auto s = pattern->find(i, j);
  return s < 0 ? 0.0 : values[s];
}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  kernels::parallel::spmv(*pattern, values, x, y);
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const {
  std::vector<double> y(dim());
  apply(x, y);
  return y;
}

std::vector<double> SparseOperator::diagonal() const {
  std::vector<double> d(dim());
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = at(static_cast<std::int32_t>(i), static_cast<std::int32_t>(i));
  }
  return d;
}

SparseOperator linear_combination(double a, const SparseOperator& A, double b,
                                  const SparseOperator& B) {
  if (A.pattern != B.pattern) throw std::invalid_argument("linear_combination: pattern mismatch");
  SparseOperator C{A.pattern, std::vector<double>(A.values.size())};
  const auto n = static_cast<std::int64_t>(C.values.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) C.values[k] = a * A.values[k] + b * B.values[k];
  return C;
}

SparseOperator eliminate_dirichlet(const SparseOperator& A, std::span<const std::uint8_t> mask) {
  SparseOperator C = A;
  const auto rp = A.pattern->row_ptr();
  const auto col = A.pattern->col();
  const auto n = static_cast<std::int64_t>(A.dim());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (auto k = rp[i]; k < rp[i + 1]; ++k) {
      if (mask[i] || mask[col[k]]) C.values[k] = (col[k] == i) ? 1.0 : 0.0;
    }
  }
  return C;
}

namespace kernels {

namespace serial {

void assemble(const SparsityPattern& p, std::span<const LocalMatrix> locals,
              std::span<double> values) {
  std::fill(values.begin(), values.end(), 0.0);
  for (std::size_t t = 0; t < locals.size(); ++t) {
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) values[p.slot(t, a, b)] += locals[t][3 * a + b];
    }
  }
}

void spmv(const SparsityPattern& p, std::span<const double> values, std::span<const double> x,
          std::span<double> y) {
  const auto rp = p.row_ptr();
  const auto col = p.col();
  for (std::size_t i = 0; i < p.dim(); ++i) {
    double s = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k) s += values[k] * x[col[k]];
    y[i] = s;
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double sum(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v;
  return s;
}

}  // namespace serial

namespace parallel {

void assemble(const SparsityPattern& p, std::span<const LocalMatrix> locals,
              std::span<double> values) {
  const auto rp = p.row_ptr();
  const auto n = static_cast<std::int64_t>(p.dim());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    for (auto k = rp[i]; k < rp[i + 1]; ++k) values[k] = 0.0;
    const auto tris = p.row_triangles(i);
    const auto locs = p.row_locals(i);
    for (std::size_t k = 0; k < tris.size(); ++k) {
      const auto t = static_cast<std::size_t>(tris[k]);
      const int a = locs[k];
      for (int b = 0; b < 3; ++b) values[p.slot(t, a, b)] += locals[t][3 * a + b];
    }
  }
}

void spmv(const SparsityPattern& p, std::span<const double> values, std::span<const double> x,
          std::span<double> y) {
  const auto rp = p.row_ptr();
  const auto col = p.col();
  const auto n = static_cast<std::int64_t>(p.dim());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (auto k = rp[i]; k < rp[i + 1]; ++k) s += values[k] * x[col[k]];
    y[i] = s;
  }
}

namespace {
template <typename Term>
double blocked_sum(std::size_t n, Term term) {
  const std::size_t nb = (n + kReductionBlock - 1) / kReductionBlock;
  if (nb <= 1) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += term(i);
    return s;
  }
  std::vector<double> partial(nb, 0.0);
#pragma omp parallel for schedule(static)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nb); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
    const std::size_t hi = std::min(n, lo + kReductionBlock);
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[b] = s;
  }
  double s = 0.0;
  for (double v : partial) s += v;
  return s;
}
}  // namespace

double dot(std::span<const double> a, std::span<const double> b) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double sum(std::span<const double> a) {
  return blocked_sum(a.size(), [&](std::size_t i) { return a[i]; });
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[i] += a * x[i];
}

}  // namespace parallel

}  // namespace kernels

}  // namespace stvf
