#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace lyap {

/// Product of two ascending coefficient lists.
template <class F>
std::vector<F> poly_mul(const std::vector<F>& a, const std::vector<F>& b)
{
    if (a.empty() || b.empty())
        return {};
    std::vector<F> c(a.size() + b.size() - 1, F(0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == F(0))
            continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            c[i + j] += a[i] * b[j];
    }
    return c;
}

/// Determinant by Gaussian elimination with partial pivoting on `magnitude`.
/// Works for any field type (complex floating point or exact rationals).
template <class F, class Magnitude>
F determinant(std::vector<std::vector<F>> m, Magnitude&& magnitude)
{
    const std::size_t n = m.size();
    F det(1);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        auto best = magnitude(m[col][col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            auto v = magnitude(m[r][col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (m[piv][col] == F(0))
            return F(0);
        if (piv != col) {
            std::swap(m[piv], m[col]);
            det = -det;
        }
        det *= m[col][col];
        for (std::size_t r = col + 1; r < n; ++r) {
            if (m[r][col] == F(0))
                continue;
            F factor = m[r][col] / m[col][col];
            for (std::size_t c = col; c < n; ++c)
                m[r][c] -= factor * m[col][c];
        }
    }
    return det;
}

/// Sylvester matrix of two binary forms of degree d given by ascending
/// coefficients of x^i y^(d-i). Its determinant is the homogeneous resultant.
template <class F>
std::vector<std::vector<F>> sylvester_matrix(const std::vector<F>& p, const std::vector<F>& q)
{
    const std::size_t d = p.size() - 1;
    const std::size_t n = 2 * d;
    std::vector<std::vector<F>> m(n, std::vector<F>(n, F(0)));
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t i = 0; i <= d; ++i) {
            m[r][r + i] = p[d - i];
            m[d + r][r + i] = q[d - i];
        }
    return m;
}

} // namespace lyap
