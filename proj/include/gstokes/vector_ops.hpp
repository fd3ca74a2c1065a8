#pragma once

#include <cmath>
#include <span>

namespace gstokes {

inline double dot(std::span<const double> x, std::span<const double> y) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
    return sum;
}

inline double nrm2(std::span<const double> x) {
    return std::sqrt(dot(x, x));
}

/// y += a * x
inline void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

inline void scal(double a, std::span<double> x) {
    for (double& v : x) v *= a;
}

} // namespace gstokes
