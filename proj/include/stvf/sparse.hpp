// Symmetric sparse operators on P1 vertex spaces and the data-parallel
// kernels behind them.
//
// Every kernel exists twice: kernels::serial is the reference used by the
// tests, kernels::parallel is the OpenMP version used in production. The
// parallel versions are deterministic for any thread count: assembly
// gathers by row in ascending triangle order (bitwise equal to the serial
// scatter) and reductions use fixed-size blocks summed in order.
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "stvf/mesh.hpp"

namespace stvf {

using LocalMatrix = std::array<double, 9>;  // row-major 3x3

class SparsityPattern {
 public:
  explicit SparsityPattern(const Mesh& mesh);

  std::size_t dim() const { return row_ptr_.size() - 1; }
  std::size_t nnz() const { return col_.size(); }
  std::span<const std::int32_t> row_ptr() const { return row_ptr_; }
  std::span<const std::int32_t> col() const { return col_; }
  // CSR slot of local entry (a, b) of triangle t.
  std::int32_t slot(std::size_t t, int a, int b) const { return slots_[9 * t + 3 * a + b]; }
  std::size_t num_triangles() const { return slots_.size() / 9; }
  // (triangle, local row) pairs contributing to each row, ascending triangle.
  std::span<const std::int32_t> row_triangles(std::size_t i) const {
    return {inc_tri_.data() + inc_ptr_[i], inc_tri_.data() + inc_ptr_[i + 1]};
  }
  std::span<const std::int8_t> row_locals(std::size_t i) const {
    return {inc_local_.data() + inc_ptr_[i], inc_local_.data() + inc_ptr_[i + 1]};
  }
  std::int32_t find(std::int32_t i, std::int32_t j) const;  // -1 if absent

 private:
  std::vector<std::int32_t> row_ptr_;
  std::vector<std::int32_t> col_;
  std::vector<std::int32_t> slots_;
  std::vector<std::int32_t> inc_ptr_;
  std::vector<std::int32_t> inc_tri_;
  std::vector<std::int8_t> inc_local_;
};

struct SparseOperator {
  std::shared_ptr<const SparsityPattern> pattern;
  std::vector<double> values;

  std::size_t dim() const { return pattern->dim(); }
  double at(std::int32_t i, std::int32_t j) const;
  // y = A x
  void apply(std::span<const double> x, std::span<double> y) const;
  std::vector<double> apply(std::span<const double> x) const;
  std::vector<double> diagonal() const;
};

// a*A + b*B; both operators must share one pattern.
SparseOperator linear_combination(double a, const SparseOperator& A, double b,
                                  const SparseOperator& B);

// Zeroes rows and columns of masked (Dirichlet) vertices and puts 1 on
// their diagonal, keeping the operator symmetric.
SparseOperator eliminate_dirichlet(const SparseOperator& A, std::span<const std::uint8_t> mask);

namespace kernels {

inline constexpr std::size_t kReductionBlock = 2048;

namespace serial {
void assemble(const SparsityPattern& p, std::span<const LocalMatrix> locals,
              std::span<double> values);
void spmv(const SparsityPattern& p, std::span<const double> values, std::span<const double> x,
          std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
}  // namespace serial

namespace parallel {
void assemble(const SparsityPattern& p, std::span<const LocalMatrix> locals,
              std::span<double> values);
void spmv(const SparsityPattern& p, std::span<const double> values, std::span<const double> x,
          std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double sum(std::span<const double> a);
// y += a * x
void axpy(double a, std::span<const double> x, std::span<double> y);
}  // namespace parallel

}  // namespace kernels

}  // namespace stvf
