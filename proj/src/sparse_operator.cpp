#include "pflat/sparse_operator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pflat {

SparseOperator::SparseOperator(int size, std::vector<Entry> entries) : size_(size)
{
    for (const auto& e : entries)
        if (e.row < 0 || e.row >= size || e.col < 0 || e.col >= size)
            throw std::out_of_range("SparseOperator: entry outside the matrix");
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    for (const auto& e : entries) {
        if (!entries_.empty() && entries_.back().row == e.row && entries_.back().col == e.col)
            entries_.back().value += e.value;
        else
            entries_.push_back(e);
    }
}

double SparseOperator::operator()(int row, int col) const
{
    const auto it = std::lower_bound(entries_.begin(), entries_.end(), Entry{row, col, 0.0},
                                     [](const Entry& a, const Entry& b) {
                                         return a.row != b.row ? a.row < b.row : a.col < b.col;
                                     });
    if (it != entries_.end() && it->row == row && it->col == col) return it->value;
    return 0.0;
}

std::vector<double> SparseOperator::apply(std::span<const double> x) const
{
    if (x.size() != static_cast<std::size_t>(size_)) throw std::invalid_argument("SparseOperator::apply: size mismatch");
    std::vector<double> y(x.size(), 0.0);
    for (const auto& e : entries_) y[static_cast<std::size_t>(e.row)] += e.value * x[static_cast<std::size_t>(e.col)];
    return y;
}

std::vector<double> SparseOperator::row_sums() const
{
    std::vector<double> s(static_cast<std::size_t>(size_), 0.0);
    for (const auto& e : entries_) s[static_cast<std::size_t>(e.row)] += e.value;
    return s;
}

double SparseOperator::max_abs() const
{
    double m = 0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value));
    return m;
}

double SparseOperator::symmetry_defect() const
{
    double m = 0;
    for (const auto& e : entries_) m = std::max(m, std::abs(e.value - (*this)(e.col, e.row)));
    return m;
}

Eigen::SparseMatrix<double> SparseOperator::to_sparse() const
{
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(entries_.size());
    for (const auto& e : entries_) t.emplace_back(e.row, e.col, e.value);
    Eigen::SparseMatrix<double> m(size_, size_);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

Eigen::MatrixXd SparseOperator::to_dense() const
{
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size_, size_);
    for (const auto& e : entries_) m(e.row, e.col) = e.value;
    return m;
}

} // namespace pflat
