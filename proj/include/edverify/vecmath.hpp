#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace edv {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline bool all_finite(const Vec& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

// Throws std::domain_error on a (near-)zero vector.
inline Vec normalized(const Vec& a) {
    const double n = norm(a);
    if (n < 1e-300) throw std::domain_error("normalized: zero-norm vector");
    Vec out(a);
    for (double& x : out) x /= n;
    return out;
}

inline bool is_unit(const Vec& a, double tol = 1e-9) {
    return std::abs(norm(a) - 1.0) <= tol;
}

inline void axpy(double c, const Vec& x, Vec& y) {
    if (x.size() != y.size())
        throw std::invalid_argument("axpy: dimension mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += c * x[i];
}

inline Vec scaled(const Vec& a, double c) {
    Vec out(a);
    for (double& x : out) x *= c;
    return out;
}

}  // namespace edv
