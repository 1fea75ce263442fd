#ifndef OFFLOADQ_MAT3_HPP
#define OFFLOADQ_MAT3_HPP

#include <array>
#include <cmath>
#include <cstddef>

#include "offloadq/errors.hpp"

// Small fixed-size linear algebra for the three service states.
// Everything here is value-semantic and allocation-free.

namespace offloadq {

using Vec3 = std::array<double, 3>;

inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}

inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline Vec3 operator*(double s, const Vec3& v) {
    return {s * v[0], s * v[1], s * v[2]};
}

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline double sum(const Vec3& v) { return v[0] + v[1] + v[2]; }

inline double max_abs(const Vec3& v) {
    return std::max({std::abs(v[0]), std::abs(v[1]), std::abs(v[2])});
}

struct Mat3 {
    // row-major
    std::array<double, 9> a{};

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(3 * i + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(3 * i + j)]; }

    static Mat3 zero() { return Mat3{}; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    static Mat3 diag(const Vec3& d) {
        Mat3 m;
        m(0, 0) = d[0];
        m(1, 1) = d[1];
        m(2, 2) = d[2];
        return m;
    }

    Mat3 transpose() const {
        Mat3 t;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t(i, j) = (*this)(j, i);
        return t;
    }

    Vec3 row(int i) const { return {(*this)(i, 0), (*this)(i, 1), (*this)(i, 2)}; }
    Vec3 col(int j) const { return {(*this)(0, j), (*this)(1, j), (*this)(2, j)}; }
};

inline Mat3 operator+(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline Mat3 operator-(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline Mat3 operator*(double s, const Mat3& x) {
    Mat3 r;
    for (std::size_t i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
    return r;
}

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

// matrix * column vector
inline Vec3 operator*(const Mat3& m, const Vec3& v) {
    return {dot(m.row(0), v), dot(m.row(1), v), dot(m.row(2), v)};
}

// row vector * matrix
inline Vec3 operator*(const Vec3& v, const Mat3& m) {
    return {dot(v, m.col(0)), dot(v, m.col(1)), dot(v, m.col(2))};
}

// Solve m x = b by Gaussian elimination with partial pivoting.
inline Vec3 solve(Mat3 m, Vec3 b) {
    int perm[3] = {0, 1, 2};
    for (int c = 0; c < 2; ++c) {
        int piv = c;
        for (int r = c + 1; r < 3; ++r)
            if (std::abs(m(perm[r], c)) > std::abs(m(perm[piv], c))) piv = r;
        std::swap(perm[c], perm[piv]);
        double d = m(perm[c], c);
        if (d == 0.0) throw SingularSystemError("3x3 solve: zero pivot");
        for (int r = c + 1; r < 3; ++r) {
            double f = m(perm[r], c) / d;
            for (int k = c; k < 3; ++k) m(perm[r], k) -= f * m(perm[c], k);
            b[static_cast<std::size_t>(perm[r])] -= f * b[static_cast<std::size_t>(perm[c])];
        }
    }
    if (m(perm[2], 2) == 0.0) throw SingularSystemError("3x3 solve: singular matrix");
    Vec3 x{};
    for (int i = 2; i >= 0; --i) {
        double s = b[static_cast<std::size_t>(perm[i])];
        for (int k = i + 1; k < 3; ++k) s -= m(perm[i], k) * x[static_cast<std::size_t>(k)];
        x[static_cast<std::size_t>(i)] = s / m(perm[i], i);
    }
    return x;
}

inline Mat3 inverse(const Mat3& m) {
    Mat3 inv;
    for (int j = 0; j < 3; ++j) {
        Vec3 e{};
        e[static_cast<std::size_t>(j)] = 1.0;
        Vec3 x = solve(m, e);
        for (int i = 0; i < 3; ++i) inv(i, j) = x[static_cast<std::size_t>(i)];
    }
    return inv;
}

inline Mat3 adjugate(const Mat3& m) {
    Mat3 adj;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            int r0 = (i + 1) % 3, r1 = (i + 2) % 3;
            int c0 = (j + 1) % 3, c1 = (j + 2) % 3;
            // adj(j,i) = cofactor(i,j); the cyclic index choice absorbs the sign
            adj(j, i) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
        }
    return adj;
}

// Left null vector of a rank-2 matrix (x m = 0), normalized to sum 1.
// Rows of adj(m) span the left null space when rank(m) = 2.
inline Vec3 left_null_vector(const Mat3& m) {
    Mat3 adj = adjugate(m);
    int best = 0;
    double best_norm = -1.0;
    for (int i = 0; i < 3; ++i) {
        double n = max_abs(adj.row(i));
        if (n > best_norm) {
            best_norm = n;
            best = i;
        }
    }
    if (best_norm <= 0.0) throw SingularSystemError("left_null_vector: adjugate vanished");
    Vec3 x = adj.row(best);
    double s = sum(x);
    if (s == 0.0) throw SingularSystemError("left_null_vector: zero-sum null vector");
    return (1.0 / s) * x;
}

} // namespace offloadq

#endif
