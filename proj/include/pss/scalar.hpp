#pragma once

// Forward-mode scalars. Dual<T> carries a gradient over a runtime number of
// seeds; Taylor<T> carries normalized coefficients c_k = f^(k)/k! of a
// univariate truncated series. Both nest: Taylor<Dual<double>>, Dual<Dual<double>>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <type_traits>
#include <vector>

namespace pss {

template <class T> struct Dual;
template <class T> struct Taylor;

template <class T> struct ScalarTraits;

template <> struct ScalarTraits<double> {
    static double constant(double c) { return c; }
    static double primal(double x) { return x; }
};

template <> struct ScalarTraits<long double> {
    static long double constant(double c) { return c; }
    static double primal(long double x) { return static_cast<double>(x); }
};

template <class T> T constant(double c) { return ScalarTraits<T>::constant(c); }
template <class T> double primal(const T& x) { return ScalarTraits<T>::primal(x); }

template <class T> struct Dual {
    T v{};
    std::vector<T> d;  // empty means zero gradient

    Dual() = default;
    Dual(T value) : v(std::move(value)) {}
    Dual(T value, std::vector<T> grad) : v(std::move(value)), d(std::move(grad)) {}

    static Dual variable(T value, std::size_t index, std::size_t n) {
        std::vector<T> g(n, constant<T>(0.0));
        g[index] = constant<T>(1.0);
        return Dual(std::move(value), std::move(g));
    }
    T grad(std::size_t i) const { return i < d.size() ? d[i] : constant<T>(0.0); }
};

template <class T> struct ScalarTraits<Dual<T>> {
    static Dual<T> constant(double c) { return Dual<T>(ScalarTraits<T>::constant(c)); }
    static double primal(const Dual<T>& x) { return ScalarTraits<T>::primal(x.v); }
};

template <class T> struct Taylor {
    std::vector<T> c;  // c[k] = f^(k)(0) / k!

    Taylor() : c(1, constant<T>(0.0)) {}
    Taylor(T value) : c{std::move(value)} {}
    explicit Taylor(std::vector<T> coeffs) : c(std::move(coeffs)) {
        if (c.empty()) c.push_back(constant<T>(0.0));
    }

    // x0 + eps, truncated at the given order
    static Taylor variable(T x0, std::size_t order) {
        std::vector<T> k(order + 1, constant<T>(0.0));
        k[0] = std::move(x0);
        if (order >= 1) k[1] = constant<T>(1.0);
        return Taylor(std::move(k));
    }
    std::size_t size() const { return c.size(); }
    T coeff(std::size_t k) const { return k < c.size() ? c[k] : constant<T>(0.0); }
    // k-th derivative at the expansion point
    T derivative(std::size_t k) const {
        T r = coeff(k);
        double f = 1.0;
        for (std::size_t i = 2; i <= k; ++i) f *= static_cast<double>(i);
        return r * f;
    }
};

template <class T> struct ScalarTraits<Taylor<T>> {
    static Taylor<T> constant(double c) { return Taylor<T>(ScalarTraits<T>::constant(c)); }
    static double primal(const Taylor<T>& x) { return ScalarTraits<T>::primal(x.c[0]); }
};

template <class T> struct is_ad_scalar : std::false_type {};
template <class T> struct is_ad_scalar<Dual<T>> : std::true_type {};
template <class T> struct is_ad_scalar<Taylor<T>> : std::true_type {};

// ---------------------------------------------------------------- Dual ops

namespace detail {
template <class T, class Fn>
std::vector<T> zip(const std::vector<T>& a, const std::vector<T>& b, Fn fn) {
    std::size_t n = std::max(a.size(), b.size());
    std::vector<T> r;
    r.reserve(n);
    T zero = constant<T>(0.0);
    for (std::size_t i = 0; i < n; ++i)
        r.push_back(fn(i < a.size() ? a[i] : zero, i < b.size() ? b[i] : zero));
    return r;
}
template <class T, class Fn> std::vector<T> map(const std::vector<T>& a, Fn fn) {
    std::vector<T> r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(fn(x));
    return r;
}
template <class T> Dual<T> chain(const Dual<T>& a, T value, const T& slope) {
    return Dual<T>(std::move(value), map(a.d, [&](const T& g) { return T(g * slope); }));
}
}  // namespace detail

template <class T> Dual<T> operator-(const Dual<T>& a) {
    return Dual<T>(-a.v, detail::map(a.d, [](const T& g) { return T(-g); }));
}
template <class T> Dual<T> operator+(const Dual<T>& a, const Dual<T>& b) {
    return Dual<T>(a.v + b.v, detail::zip(a.d, b.d, [](const T& x, const T& y) { return T(x + y); }));
}
template <class T> Dual<T> operator-(const Dual<T>& a, const Dual<T>& b) {
    return Dual<T>(a.v - b.v, detail::zip(a.d, b.d, [](const T& x, const T& y) { return T(x - y); }));
}
template <class T> Dual<T> operator*(const Dual<T>& a, const Dual<T>& b) {
    return Dual<T>(a.v * b.v, detail::zip(a.d, b.d, [&](const T& x, const T& y) { return T(x * b.v + a.v * y); }));
}
template <class T> Dual<T> operator/(const Dual<T>& a, const Dual<T>& b) {
    T q = a.v / b.v;
    return Dual<T>(q, detail::zip(a.d, b.d, [&](const T& x, const T& y) { return T((x - q * y) / b.v); }));
}
template <class T> Dual<T> operator+(const Dual<T>& a, double c) { return Dual<T>(a.v + c, a.d); }
template <class T> Dual<T> operator+(double c, const Dual<T>& a) { return a + c; }
template <class T> Dual<T> operator-(const Dual<T>& a, double c) { return Dual<T>(a.v - c, a.d); }
template <class T> Dual<T> operator-(double c, const Dual<T>& a) { return -a + c; }
template <class T> Dual<T> operator*(const Dual<T>& a, double c) {
    return Dual<T>(a.v * c, detail::map(a.d, [&](const T& g) { return T(g * c); }));
}
template <class T> Dual<T> operator*(double c, const Dual<T>& a) { return a * c; }
template <class T> Dual<T> operator/(const Dual<T>& a, double c) { return a * (1.0 / c); }
template <class T> Dual<T> operator/(double c, const Dual<T>& a) { return Dual<T>(constant<T>(c)) / a; }

template <class T> Dual<T> exp(const Dual<T>& a) {
    using std::exp;
    T e = exp(a.v);
    return detail::chain(a, e, e);
}
template <class T> Dual<T> sin(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return detail::chain(a, T(sin(a.v)), T(cos(a.v)));
}
template <class T> Dual<T> cos(const Dual<T>& a) {
    using std::cos;
    using std::sin;
    return detail::chain(a, T(cos(a.v)), T(-sin(a.v)));
}
template <class T> Dual<T> tan(const Dual<T>& a) {
    using std::tan;
    T t = tan(a.v);
    return detail::chain(a, t, T(1.0 + t * t));
}
template <class T> Dual<T> sqrt(const Dual<T>& a) {
    using std::sqrt;
    T r = sqrt(a.v);
    return detail::chain(a, r, T(0.5 / r));
}
template <class T> Dual<T> atan(const Dual<T>& a) {
    using std::atan;
    return detail::chain(a, T(atan(a.v)), T(1.0 / (1.0 + a.v * a.v)));
}

// -------------------------------------------------------------- Taylor ops

template <class T> Taylor<T> operator-(const Taylor<T>& a) {
    return Taylor<T>(detail::map(a.c, [](const T& x) { return T(-x); }));
}
template <class T> Taylor<T> operator+(const Taylor<T>& a, const Taylor<T>& b) {
    return Taylor<T>(detail::zip(a.c, b.c, [](const T& x, const T& y) { return T(x + y); }));
}
template <class T> Taylor<T> operator-(const Taylor<T>& a, const Taylor<T>& b) {
    return Taylor<T>(detail::zip(a.c, b.c, [](const T& x, const T& y) { return T(x - y); }));
}
template <class T> Taylor<T> operator*(const Taylor<T>& a, const Taylor<T>& b) {
    std::size_t n = std::max(a.size(), b.size());
    if (a.size() == 1) return Taylor<T>(detail::map(b.c, [&](const T& x) { return T(a.c[0] * x); }));
    if (b.size() == 1) return Taylor<T>(detail::map(a.c, [&](const T& x) { return T(x * b.c[0]); }));
    std::vector<T> r(n, constant<T>(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) r[i + j] = r[i + j] + a.c[i] * b.c[j];
    return Taylor<T>(std::move(r));
}
template <class T> Taylor<T> operator/(const Taylor<T>& a, const Taylor<T>& b) {
    std::size_t n = std::max(a.size(), b.size());
    if (b.size() == 1) return Taylor<T>(detail::map(a.c, [&](const T& x) { return T(x / b.c[0]); }));
    std::vector<T> q(n, constant<T>(0.0));
    for (std::size_t k = 0; k < n; ++k) {
        T acc = a.coeff(k);
        for (std::size_t j = 1; j <= k && j < b.size(); ++j) acc = acc - b.c[j] * q[k - j];
        q[k] = acc / b.c[0];
    }
    return Taylor<T>(std::move(q));
}
template <class T> Taylor<T> operator+(const Taylor<T>& a, double c) {
    Taylor<T> r = a;
    r.c[0] = r.c[0] + c;
    return r;
}
template <class T> Taylor<T> operator+(double c, const Taylor<T>& a) { return a + c; }
template <class T> Taylor<T> operator-(const Taylor<T>& a, double c) { return a + (-c); }
template <class T> Taylor<T> operator-(double c, const Taylor<T>& a) { return -a + c; }
template <class T> Taylor<T> operator*(const Taylor<T>& a, double c) {
    return Taylor<T>(detail::map(a.c, [&](const T& x) { return T(x * c); }));
}
template <class T> Taylor<T> operator*(double c, const Taylor<T>& a) { return a * c; }
template <class T> Taylor<T> operator/(const Taylor<T>& a, double c) { return a * (1.0 / c); }
template <class T> Taylor<T> operator/(double c, const Taylor<T>& a) { return Taylor<T>(constant<T>(c)) / a; }

namespace detail {
// y' = a' * s  =>  y_k = (1/k) sum_{j=1..k} j a_j s_{k-j}
template <class T> T deriv_conv(const Taylor<T>& a, const std::vector<T>& s, std::size_t k) {
    T acc = constant<T>(0.0);
    for (std::size_t j = 1; j <= k; ++j) acc = acc + a.coeff(j) * s[k - j] * static_cast<double>(j);
    return acc / static_cast<double>(k);
}
}  // namespace detail

template <class T> Taylor<T> exp(const Taylor<T>& a) {
    using std::exp;
    std::size_t n = a.size();
    std::vector<T> e(n, constant<T>(0.0));
    e[0] = exp(a.c[0]);
    for (std::size_t k = 1; k < n; ++k) e[k] = detail::deriv_conv(a, e, k);
    return Taylor<T>(std::move(e));
}

template <class T> void sincos(const Taylor<T>& a, Taylor<T>& s_out, Taylor<T>& c_out) {
    using std::cos;
    using std::sin;
    std::size_t n = a.size();
    std::vector<T> s(n, constant<T>(0.0)), c(n, constant<T>(0.0));
    s[0] = sin(a.c[0]);
    c[0] = cos(a.c[0]);
    for (std::size_t k = 1; k < n; ++k) {
        s[k] = detail::deriv_conv(a, c, k);
        c[k] = -detail::deriv_conv(a, s, k);
    }
    s_out = Taylor<T>(std::move(s));
    c_out = Taylor<T>(std::move(c));
}
template <class T> Taylor<T> sin(const Taylor<T>& a) {
    Taylor<T> s, c;
    sincos(a, s, c);
    return s;
}
template <class T> Taylor<T> cos(const Taylor<T>& a) {
    Taylor<T> s, c;
    sincos(a, s, c);
    return c;
}
template <class T> Taylor<T> tan(const Taylor<T>& a) {
    Taylor<T> s, c;
    sincos(a, s, c);
    return s / c;
}
template <class T> Taylor<T> sqrt(const Taylor<T>& a) {
    using std::sqrt;
    std::size_t n = a.size();
    std::vector<T> r(n, constant<T>(0.0));
    r[0] = sqrt(a.c[0]);
    for (std::size_t k = 1; k < n; ++k) {
        T acc = a.c[k];
        for (std::size_t j = 1; j < k; ++j) acc = acc - r[j] * r[k - j];
        r[k] = acc / (r[0] * 2.0);
    }
    return Taylor<T>(std::move(r));
}
template <class T> Taylor<T> atan(const Taylor<T>& a) {
    using std::atan;
    std::size_t n = a.size();
    // y' = a' / (1 + a^2)
    Taylor<T> slope = Taylor<T>(constant<T>(1.0)) / (a * a + 1.0);
    std::vector<T> y(n, constant<T>(0.0));
    y[0] = atan(a.c[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = detail::deriv_conv(a, slope.c, k);
    return Taylor<T>(std::move(y));
}

// integer power by repeated squaring; works for double and every AD scalar
template <class T> T powi(const T& x, int n) {
    if (n < 0) return T(constant<T>(1.0)) / powi(x, -n);
    T result = constant<T>(1.0);
    T base = x;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return result;
}

}  // namespace pss
