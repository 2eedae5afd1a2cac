#pragma once

#include <Eigen/Core>

#include <functional>
#include <span>
#include <vector>

namespace pflat {

using ScalarFunction = std::function<double(std::span<const double>)>;
using VectorFunction = std::function<std::vector<double>(std::span<const double>)>;

struct FdOptions
{
    /// 0 selects the default 1e-5 * max(1, |x|_inf).
    double step = 0;
    /// One Richardson extrapolation level (steps h and h/2).
    bool richardson = false;
};

double default_fd_step(std::span<const double> x);

/// Central-difference gradient of a scalar function.
std::vector<double> fd_gradient(const ScalarFunction& fn, std::span<const double> x, FdOptions opts = {});

/// Central-difference Jacobian; entry (i, j) is d fn_i / d x_j.
Eigen::MatrixXd fd_jacobian(const VectorFunction& fn, std::span<const double> x, FdOptions opts = {});

/// d/dt fn(x + t v) at t = 0.
double fd_directional(const ScalarFunction& fn, std::span<const double> x, std::span<const double> v,
                      FdOptions opts = {});

/// d^2/dt^2 fn(x + t v) at t = 0. The default step is 1e-4 * max(1, |x|_inf):
/// second differences lose twice as many digits to rounding.
double fd_second_directional(const ScalarFunction& fn, std::span<const double> x, std::span<const double> v,
                             FdOptions opts = {});

} // namespace pflat
