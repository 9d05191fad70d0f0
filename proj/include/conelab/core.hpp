#pragma once

// Shared scalar types, error hierarchy and field traits used across conelab.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <exception>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <atomic>
#include <thread>
#include <vector>

namespace conelab {

using Complex = std::complex<double>;
using Rational = boost::multiprecision::cpp_rational;

inline constexpr double pi = std::numbers::pi;

// ---------------------------------------------------------------------------
// Errors. The CLI maps these onto exit codes (config/data 2, numerical 3).

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class NumericalError : public Error {
public:
    using Error::Error;
};

class PreconditionError : public Error {
public:
    using Error::Error;
};

class UnsupportedError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class DataError : public Error {
public:
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Rational helpers

inline Rational rational_from_double(double v) {
    if (!std::isfinite(v))
        throw NumericalError("rational_from_double: non-finite value");
    // Every finite double is a dyadic rational; the conversion is exact.
    return Rational(v);
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational make_rational(long long num, long long den = 1) {
    return Rational(num) / Rational(den);
}

/// Best rational approximation of `v` with denominator <= max_den, accepted
/// only if it reproduces v to `rel_tol` (relative, with an absolute floor).
inline std::optional<Rational> recognize_rational(double v, long long max_den = 1000,
                                                  double rel_tol = 1e-12) {
    if (!std::isfinite(v)) return std::nullopt;
    const double scale = std::max(1.0, std::abs(v));
    // Continued-fraction convergents.
    long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
    double x = v;
    for (int it = 0; it < 64; ++it) {
        const double a = std::floor(x);
        if (std::abs(a) > 1e15) break;
        const auto ai = static_cast<long long>(a);
        const long long p2 = ai * p1 + p0;
        const long long q2 = ai * q1 + q0;
        if (q2 > max_den || q2 <= 0) break;
        p0 = p1; q0 = q1; p1 = p2; q1 = q2;
        const double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - v) <= rel_tol * scale) return make_rational(p1, q1);
        const double frac = x - a;
        if (frac == 0.0) break;
        x = 1.0 / frac;
    }
    return std::nullopt;
}

inline std::string to_string(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

// ---------------------------------------------------------------------------
// Field traits: polynomials, rational families and the power-log calculus are
// templated on an exact field (Rational) or on floating complex numbers.

template <class T>
struct field_traits;

template <>
struct field_traits<Rational> {
    static constexpr bool exact = true;
    static bool is_zero(const Rational& v, double /*scale*/ = 1.0) { return v == 0; }
    static Complex to_complex(const Rational& v) { return {to_double(v), 0.0}; }
    static double magnitude(const Rational& v) { return std::abs(to_double(v)); }
    static Rational from_int(long long v) { return Rational(v); }
    static Rational from_rational(const Rational& v) { return v; }
    static bool equal(const Rational& a, const Rational& b, double /*tol*/) { return a == b; }
};

template <>
struct field_traits<Complex> {
    static constexpr bool exact = false;
    static constexpr double eps = 64 * std::numeric_limits<double>::epsilon();
    static bool is_zero(const Complex& v, double scale = 1.0) {
        return std::abs(v) <= eps * std::max(scale, 1e-300);
    }
    static Complex to_complex(const Complex& v) { return v; }
    static double magnitude(const Complex& v) { return std::abs(v); }
    static Complex from_int(long long v) { return {static_cast<double>(v), 0.0}; }
    static Complex from_rational(const Rational& v) { return {to_double(v), 0.0}; }
    static bool equal(const Complex& a, const Complex& b, double tol) {
        return std::abs(a - b) <= tol;
    }
};

// ---------------------------------------------------------------------------
// Worker count for per-mode / per-node loops (1 = sequential).

inline std::atomic<int>& thread_count() {
    static std::atomic<int> count{1};
    return count;
}

inline void set_thread_count(int n) { thread_count() = std::max(1, n); }

/// Runs f(i) for i in [0, count) on up to thread_count() workers. Each index
/// writes its own output slot, so results do not depend on scheduling.
template <class F>
void parallel_for(std::size_t count, F&& f) {
    const auto workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count().load()), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count && !failed; i = next++) {
                    try {
                        f(i);
                    } catch (...) {
                        if (!failed.exchange(true)) failure = std::current_exception();
                    }
                }
            });
    }
    if (failure) std::rethrow_exception(failure);
}

// Fixed 17-significant-digit formatting for every number written to disk.
inline std::string fmt17(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace conelab
