#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "selfaffine/rational.hpp"

namespace selfaffine {

// Absolute value usable from templates over {double, Rational}.
inline double num_abs(double x) { return std::fabs(x); }
inline Rational num_abs(const Rational& x) { return abs_rational(x); }

template <class T>
struct Vec {
    std::vector<T> a;

    Vec() = default;
    explicit Vec(std::size_t d, const T& fill = T(0)) : a(d, fill) {}
    Vec(std::initializer_list<T> init) : a(init) {}

    std::size_t dim() const { return a.size(); }
    T& operator[](std::size_t i) { return a[i]; }
    const T& operator[](std::size_t i) const { return a[i]; }

    bool operator==(const Vec& o) const { return a == o.a; }

    Vec& operator+=(const Vec& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        for (std::size_t i = 0; i < a.size(); ++i) a[i] -= o.a[i];
        return *this;
    }
    friend Vec operator+(Vec l, const Vec& r) { return l += r; }
    friend Vec operator-(Vec l, const Vec& r) { return l -= r; }
    friend Vec operator*(const T& s, Vec v) {
        for (auto& x : v.a) x *= s;
        return v;
    }
    Vec operator-() const {
        Vec v = *this;
        for (auto& x : v.a) x = -x;
        return v;
    }

    T inf_norm() const {
        T m(0);
        for (const auto& x : a)
            if (num_abs(x) > m) m = num_abs(x);
        return m;
    }
    bool is_zero() const {
        for (const auto& x : a)
            if (!(x == T(0))) return false;
        return true;
    }
};

// Dense square matrix, row-major.
template <class T>
struct Mat {
    std::size_t d = 0;
    std::vector<T> a;  // d*d entries

    Mat() = default;
    explicit Mat(std::size_t dim, const T& fill = T(0)) : d(dim), a(dim * dim, fill) {}

    T& at(std::size_t r, std::size_t c) { return a[r * d + c]; }
    const T& at(std::size_t r, std::size_t c) const { return a[r * d + c]; }

    bool operator==(const Mat& o) const { return d == o.d && a == o.a; }

    static Mat identity(std::size_t dim) {
        Mat m(dim);
        for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = T(1);
        return m;
    }

    Vec<T> operator*(const Vec<T>& v) const {
        Vec<T> out(d);
        for (std::size_t r = 0; r < d; ++r) {
            T s(0);
            for (std::size_t c = 0; c < d; ++c) s += at(r, c) * v[c];
            out[r] = s;
        }
        return out;
    }

    Mat operator*(const Mat& o) const {
        Mat out(d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t k = 0; k < d; ++k) {
                const T& m = at(r, k);
                if (m == T(0)) continue;
                for (std::size_t c = 0; c < d; ++c) out.at(r, c) += m * o.at(k, c);
            }
        return out;
    }

    friend Mat operator*(const T& s, Mat m) {
        for (auto& x : m.a) x *= s;
        return m;
    }

    // Operator infinity norm: max row sum of absolute values.
    T inf_norm() const {
        T best(0);
        for (std::size_t r = 0; r < d; ++r) {
            T s(0);
            for (std::size_t c = 0; c < d; ++c) s += num_abs(at(r, c));
            if (s > best) best = s;
        }
        return best;
    }
};

// out = m * x without allocating; `out` must not alias `x`.
template <class T>
void mat_mul_into(const Mat<T>& m, const Vec<T>& x, Vec<T>& out) {
    const std::size_t d = m.d;
    for (std::size_t r = 0; r < d; ++r) {
        out[r] = 0;
        for (std::size_t c = 0; c < d; ++c) {
            if (m.at(r, c) == T(0)) continue;
            out[r] += m.at(r, c) * x[c];
        }
    }
}

template <class T>
Mat<T> mat_pow(Mat<T> base, unsigned long e) {
    Mat<T> acc = Mat<T>::identity(base.d);
    while (e) {
        if (e & 1) acc = acc * base;
        base = base * base;
        e >>= 1;
    }
    return acc;
}

// Gaussian elimination with partial (max-|pivot|) pivoting. Works exactly for
// Rational and stably enough for double at these tiny dimensions.
template <class T>
T determinant(Mat<T> m) {
    const std::size_t d = m.d;
    T det(1);
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (num_abs(m.at(r, col)) > num_abs(m.at(piv, col))) piv = r;
        if (m.at(piv, col) == T(0)) return T(0);
        if (piv != col) {
            for (std::size_t c = 0; c < d; ++c) std::swap(m.at(piv, c), m.at(col, c));
            det = -det;
        }
        det *= m.at(col, col);
        for (std::size_t r = col + 1; r < d; ++r) {
            if (m.at(r, col) == T(0)) continue;
            T f = m.at(r, col) / m.at(col, col);
            for (std::size_t c = col; c < d; ++c) m.at(r, c) -= f * m.at(col, c);
        }
    }
    return det;
}

// Solve A x = b; throws std::invalid_argument if A is singular.
template <class T>
Vec<T> solve(Mat<T> m, Vec<T> b) {
    const std::size_t d = m.d;
    for (std::size_t col = 0; col < d; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < d; ++r)
            if (num_abs(m.at(r, col)) > num_abs(m.at(piv, col))) piv = r;
        if (m.at(piv, col) == T(0)) throw std::invalid_argument("singular linear system");
        if (piv != col) {
            for (std::size_t c = 0; c < d; ++c) std::swap(m.at(piv, c), m.at(col, c));
            std::swap(b[piv], b[col]);
        }
        for (std::size_t r = col + 1; r < d; ++r) {
            if (m.at(r, col) == T(0)) continue;
            T f = m.at(r, col) / m.at(col, col);
            for (std::size_t c = col; c < d; ++c) m.at(r, c) -= f * m.at(col, c);
            b[r] -= f * b[col];
        }
    }
    Vec<T> x(d);
    for (std::size_t r = d; r-- > 0;) {
        T s = b[r];
        for (std::size_t c = r + 1; c < d; ++c) s -= m.at(r, c) * x[c];
        x[r] = s / m.at(r, r);
    }
    return x;
}

template <class T>
Mat<T> inverse(const Mat<T>& m) {
    const std::size_t d = m.d;
    Mat<T> inv(d);
    for (std::size_t c = 0; c < d; ++c) {
        Vec<T> e(d);
        e[c] = T(1);
        Vec<T> col = solve(m, e);
        for (std::size_t r = 0; r < d; ++r) inv.at(r, c) = col[r];
    }
    return inv;
}

// Rank of the column list, exact when T = Rational. For double, `tol` is the
// threshold below which a pivot counts as zero (scaled by the largest entry).
template <class T>
std::size_t column_rank(std::vector<Vec<T>> cols, const T& tol = T(0)) {
    if (cols.empty()) return 0;
    const std::size_t d = cols[0].dim();
    T scale(1);
    for (const auto& v : cols)
        if (v.inf_norm() > scale) scale = v.inf_norm();
    std::size_t rank = 0;
    for (std::size_t row = 0; row < d && rank < cols.size(); ++row) {
        std::size_t piv = rank;
        for (std::size_t c = rank + 1; c < cols.size(); ++c)
            if (num_abs(cols[c][row]) > num_abs(cols[piv][row])) piv = c;
        if (!(num_abs(cols[piv][row]) > tol * scale)) continue;
        std::swap(cols[piv], cols[rank]);
        for (std::size_t c = rank + 1; c < cols.size(); ++c) {
            if (cols[c][row] == T(0)) continue;
            T f = cols[c][row] / cols[rank][row];
            cols[c] -= f * cols[rank];
        }
        ++rank;
    }
    return rank;
}

template <class T>
Vec<double> to_double_vec(const Vec<T>& v) {
    Vec<double> out(v.dim());
    for (std::size_t i = 0; i < v.dim(); ++i) {
        if constexpr (std::is_same_v<T, double>)
            out[i] = v[i];
        else
            out[i] = to_double(v[i]);
    }
    return out;
}

template <class T>
Mat<double> to_double_mat(const Mat<T>& m) {
    Mat<double> out(m.d);
    for (std::size_t i = 0; i < m.a.size(); ++i) {
        if constexpr (std::is_same_v<T, double>)
            out.a[i] = m.a[i];
        else
            out.a[i] = to_double(m.a[i]);
    }
    return out;
}

// Fixed 17-significant-digit decimal, the round-trip-safe CSV format.
std::string format_double17(double x);

}  // namespace selfaffine
