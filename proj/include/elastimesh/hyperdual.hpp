#pragma once

// Hyper-dual numbers: re + d1 e1 + d2 e2 + d12 e1e2 with e1^2 = e2^2 = 0.
//
// Seeding an input with d1 = a, d2 = b gives, for any smooth f,
//   f.d1 = f'.a,  f.d2 = f'.b,  f.d12 = a^T f'' b
// exactly, with no truncation error.

#include "elastimesh/activation.hpp"
#include "elastimesh/errors.hpp"

#include <cmath>
#include <concepts>

namespace elastimesh::ad {

inline constexpr double singular_guard = 1e-12;

template <std::floating_point F>
F primal(F x) {
    return x;
}

template <std::floating_point F>
F activate(Activation kind, int order, F x) {
    return activation_derivative(kind, order, x);
}

template <class T>
struct HyperDual {
    T re{};
    T d1{};
    T d2{};
    T d12{};

    HyperDual() = default;
    HyperDual(T value) : re(value) {}  // NOLINT: constants promote implicitly
    HyperDual(T r, T a, T b, T ab) : re(r), d1(a), d2(b), d12(ab) {}

    /// Independent variable with seed directions a (first slot) and b (second slot).
    static HyperDual variable(T value, T seed_a, T seed_b) { return {value, seed_a, seed_b, T(0)}; }
};

/// Applies a unary function given its value and first two derivatives at u.re.
template <class T>
HyperDual<T> chain(const HyperDual<T>& u, const T& f0, const T& f1, const T& f2) {
    return {f0, f1 * u.d1, f1 * u.d2, f2 * u.d1 * u.d2 + f1 * u.d12};
}

template <class T>
HyperDual<T> operator+(const HyperDual<T>& u, const HyperDual<T>& v) {
    return {u.re + v.re, u.d1 + v.d1, u.d2 + v.d2, u.d12 + v.d12};
}

template <class T>
HyperDual<T> operator-(const HyperDual<T>& u, const HyperDual<T>& v) {
    return {u.re - v.re, u.d1 - v.d1, u.d2 - v.d2, u.d12 - v.d12};
}

template <class T>
HyperDual<T> operator-(const HyperDual<T>& u) {
    return {-u.re, -u.d1, -u.d2, -u.d12};
}

template <class T>
HyperDual<T> operator*(const HyperDual<T>& u, const HyperDual<T>& v) {
    return {u.re * v.re, u.re * v.d1 + u.d1 * v.re, u.re * v.d2 + u.d2 * v.re,
            u.re * v.d12 + u.d1 * v.d2 + u.d2 * v.d1 + u.d12 * v.re};
}

// Scalar-by-hyper-dual products skip the zero infinitesimal parts.
template <class T, class S>
    requires(!std::same_as<S, HyperDual<T>>)
HyperDual<T> operator*(const S& s, const HyperDual<T>& u) {
    return {s * u.re, s * u.d1, s * u.d2, s * u.d12};
}

template <class T, class S>
    requires(!std::same_as<S, HyperDual<T>>)
HyperDual<T> operator*(const HyperDual<T>& u, const S& s) {
    return {u.re * s, u.d1 * s, u.d2 * s, u.d12 * s};
}

template <class T, class S>
    requires(!std::same_as<S, HyperDual<T>>)
HyperDual<T> operator+(const HyperDual<T>& u, const S& s) {
    return {u.re + s, u.d1, u.d2, u.d12};
}

template <class T, class S>
    requires(!std::same_as<S, HyperDual<T>>)
HyperDual<T> operator+(const S& s, const HyperDual<T>& u) {
    return {s + u.re, u.d1, u.d2, u.d12};
}

template <class T>
HyperDual<T>& operator+=(HyperDual<T>& u, const HyperDual<T>& v) {
    return u = u + v;
}

template <class T>
HyperDual<T> reciprocal(const HyperDual<T>& v) {
    using std::abs;
    if (abs(primal(v.re)) < singular_guard)
        throw DomainError("div", "denominator within 1e-12 of zero");
    const T inv = T(1) / v.re;
    const T inv2 = inv * inv;
    return chain(v, inv, -inv2, T(2) * inv2 * inv);
}

template <class T>
HyperDual<T> operator/(const HyperDual<T>& u, const HyperDual<T>& v) {
    return u * reciprocal(v);
}

template <class T>
HyperDual<T> exp(const HyperDual<T>& u) {
    using std::exp;
    const T e = exp(u.re);
    return chain(u, e, e, e);
}

template <class T>
HyperDual<T> log(const HyperDual<T>& u) {
    using std::log;
    if (!(primal(u.re) > 0.0)) throw DomainError("log", "argument must be positive");
    const T inv = T(1) / u.re;
    return chain(u, log(u.re), inv, -(inv * inv));
}

template <class T>
HyperDual<T> sin(const HyperDual<T>& u) {
    using std::cos;
    using std::sin;
    const T s = sin(u.re);
    const T c = cos(u.re);
    return chain(u, s, c, -s);
}

template <class T>
HyperDual<T> cos(const HyperDual<T>& u) {
    using std::cos;
    using std::sin;
    const T s = sin(u.re);
    const T c = cos(u.re);
    return chain(u, c, -s, -c);
}

template <class T>
HyperDual<T> tan(const HyperDual<T>& u) {
    using std::abs;
    using std::cos;
    using std::tan;
    if (abs(cos(primal(u.re))) < singular_guard)
        throw DomainError("tan", "|cos| within 1e-12 of zero");
    const T t = tan(u.re);
    const T d1 = T(1) + t * t;
    return chain(u, t, d1, T(2) * t * d1);
}

template <class T>
HyperDual<T> cot(const HyperDual<T>& u) {
    using std::abs;
    using std::sin;
    using std::tan;
    if (abs(sin(primal(u.re))) < singular_guard)
        throw DomainError("cot", "|sin| within 1e-12 of zero");
    const T c = T(1) / tan(u.re);
    const T d1 = -(T(1) + c * c);
    return chain(u, c, d1, T(-2) * c * d1);
}

template <class T>
HyperDual<T> tanh(const HyperDual<T>& u) {
    using std::tanh;
    const T t = tanh(u.re);
    const T d1 = T(1) - t * t;
    return chain(u, t, d1, T(-2) * t * d1);
}

template <class T>
HyperDual<T> activate(Activation kind, const HyperDual<T>& u) {
    return chain(u, activate(kind, 0, u.re), activate(kind, 1, u.re), activate(kind, 2, u.re));
}

template <class T>
HyperDual<T> sigmoid(const HyperDual<T>& u) {
    return activate(Activation::sigmoid, u);
}

/// u^v = exp(v log u), requires u > 0.
template <class T>
HyperDual<T> pow(const HyperDual<T>& u, const HyperDual<T>& v) {
    if (!(primal(u.re) > 0.0)) throw DomainError("power", "base must be positive");
    return exp(v * log(u));
}

template <class T>
double primal(const HyperDual<T>& u) {
    return static_cast<double>(primal(u.re));
}

template <class T>
bool all_finite(const HyperDual<T>& u) {
    using std::isfinite;
    return isfinite(static_cast<double>(primal(u.re))) && isfinite(static_cast<double>(primal(u.d1))) &&
           isfinite(static_cast<double>(primal(u.d2))) && isfinite(static_cast<double>(primal(u.d12)));
}

}  // namespace elastimesh::ad
