#include "pflat/finite_difference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <type_traits>

namespace pflat {

namespace {

double inf_norm(std::span<const double> x)
{
    double m = 0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

template <class Central>
auto extrapolate(const Central& central, double h, bool richardson)
{
    auto coarse = central(h);
    if (!richardson) return coarse;
    auto fine = central(0.5 * h);
    if constexpr (std::is_same_v<decltype(coarse), double>) {
        return (4.0 * fine - coarse) / 3.0;
    } else {
        for (std::size_t i = 0; i < fine.size(); ++i) fine[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
        return fine;
    }
}

} // namespace

double default_fd_step(std::span<const double> x)
{
    return 1e-5 * std::max(1.0, inf_norm(x));
}

std::vector<double> fd_gradient(const ScalarFunction& fn, std::span<const double> x, FdOptions opts)
{
    const double h = opts.step > 0 ? opts.step : default_fd_step(x);
    std::vector<double> point(x.begin(), x.end());
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        auto central = [&](double step) {
            point[j] = x[j] + step;
            const double plus = fn(point);
            point[j] = x[j] - step;
            const double minus = fn(point);
            point[j] = x[j];
            return (plus - minus) / (2 * step);
        };
        g[j] = extrapolate(central, h, opts.richardson);
    }
    return g;
}

Eigen::MatrixXd fd_jacobian(const VectorFunction& fn, std::span<const double> x, FdOptions opts)
{
    const double h = opts.step > 0 ? opts.step : default_fd_step(x);
    std::vector<double> point(x.begin(), x.end());
    Eigen::MatrixXd jac;
    for (std::size_t j = 0; j < x.size(); ++j) {
        auto central = [&](double step) {
            point[j] = x[j] + step;
            auto plus = fn(point);
            point[j] = x[j] - step;
            const auto minus = fn(point);
            point[j] = x[j];
            if (plus.size() != minus.size()) throw std::runtime_error("fd_jacobian: output size changed");
            for (std::size_t i = 0; i < plus.size(); ++i) plus[i] = (plus[i] - minus[i]) / (2 * step);
            return plus;
        };
        const auto column = extrapolate(central, h, opts.richardson);
        if (j == 0) jac.resize(static_cast<Eigen::Index>(column.size()), static_cast<Eigen::Index>(x.size()));
        for (std::size_t i = 0; i < column.size(); ++i)
            jac(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = column[i];
    }
    return jac;
}

double fd_directional(const ScalarFunction& fn, std::span<const double> x, std::span<const double> v,
                      FdOptions opts)
{
    if (v.size() != x.size()) throw std::invalid_argument("fd_directional: size mismatch");
    const double h = opts.step > 0 ? opts.step : default_fd_step(x);
    std::vector<double> point(x.size());
    auto at = [&](double t) {
        for (std::size_t i = 0; i < x.size(); ++i) point[i] = x[i] + t * v[i];
        return fn(point);
    };
    auto central = [&](double step) { return (at(step) - at(-step)) / (2 * step); };
    return extrapolate(central, h, opts.richardson);
}

double fd_second_directional(const ScalarFunction& fn, std::span<const double> x, std::span<const double> v,
                             FdOptions opts)
{
    if (v.size() != x.size()) throw std::invalid_argument("fd_second_directional: size mismatch");
    const double h = opts.step > 0 ? opts.step : 1e-4 * std::max(1.0, inf_norm(x));
    std::vector<double> point(x.size());
    auto at = [&](double t) {
        for (std::size_t i = 0; i < x.size(); ++i) point[i] = x[i] + t * v[i];
        return fn(point);
    };
    const double center = at(0.0);
    auto central = [&](double step) { return (at(step) - 2 * center + at(-step)) / (step * step); };
    return extrapolate(central, h, opts.richardson);
}

} // namespace pflat
