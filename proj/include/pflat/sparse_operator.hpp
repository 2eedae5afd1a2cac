#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <span>
#include <vector>

namespace pflat {

///
/// A square vertex-indexed sparse matrix kept as a sorted, duplicate-free
/// entry list. Used for Laplacians, curvature Jacobians and Hessians.
///
class SparseOperator
{
public:
    struct Entry
    {
        int row = 0;
        int col = 0;
        double value = 0;
    };

    SparseOperator() = default;
    /// Sums duplicate (row, col) pairs and sorts row-major.
    SparseOperator(int size, std::vector<Entry> entries);

    int size() const noexcept { return size_; }
    std::span<const Entry> entries() const noexcept { return entries_; }
    /// Entry value, 0 when not stored.
    double operator()(int row, int col) const;

    std::vector<double> apply(std::span<const double> x) const;
    std::vector<double> row_sums() const;
    double max_abs() const;
    /// max |a_ij - a_ji|
    double symmetry_defect() const;

    Eigen::SparseMatrix<double> to_sparse() const;
    Eigen::MatrixXd to_dense() const;

private:
    int size_ = 0;
    std::vector<Entry> entries_;
};

} // namespace pflat
