// Small dense-vector helpers used throughout the library.
// All state is std::vector<double>; dimensions are validated by callers.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace wdro {

using Vec = std::vector<double>;

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct DimensionMismatch : Error {
    explicit DimensionMismatch(const std::string& msg) : Error("dimension mismatch: " + msg) {}
};

struct NonFiniteValue : Error {
    explicit NonFiniteValue(const std::string& msg) : Error("non-finite value: " + msg) {}
};

struct UnsupportedLoss : Error {
    explicit UnsupportedLoss(const std::string& msg) : Error("unsupported loss: " + msg) {}
};

struct TooLarge : Error {
    explicit TooLarge(const std::string& msg) : Error("problem too large: " + msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

inline void check_dim(const Vec& v, std::size_t dim, const char* what) {
    if (v.size() != dim)
        throw DimensionMismatch(std::string(what) + ": expected " + std::to_string(dim) +
                                ", got " + std::to_string(v.size()));
}

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
}

inline double dist2(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dist2");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

inline double dist_inf(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("dist_inf");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline Vec add(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("add");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vec sub(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionMismatch("sub");
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vec scale(double c, const Vec& a) {
    Vec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

// r += c * a
inline void axpy(double c, const Vec& a, Vec& r) {
    if (a.size() != r.size()) throw DimensionMismatch("axpy");
    for (std::size_t i = 0; i < a.size(); ++i) r[i] += c * a[i];
}

inline Vec concat(const Vec& a, const Vec& b) {
    Vec r;
    r.reserve(a.size() + b.size());
    r.insert(r.end(), a.begin(), a.end());
    r.insert(r.end(), b.begin(), b.end());
    return r;
}

inline bool all_finite(const Vec& a) {
    for (double x : a)
        if (!std::isfinite(x)) return false;
    return true;
}

}  // namespace wdro
