// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace sgfem {

/// Polynomial in the barycentric coordinates (l1,l2,l3), total degree <= 5.
///
/// Representations are not unique on the simplex (l1+l2+l3 = 1); physical
/// derivatives contracted with the constant gradients of the barycentric
/// coordinates are representation independent, so any representative works.
class BaryPoly {
public:
    static constexpr int kMaxDeg = 5;
    static constexpr int kTerms = 56; // #{(a,b,c): a+b+c <= 5}

    BaryPoly() { c_.fill(0.0); }

    static int index(int a, int b, int c) {
        static const auto table = [] {
            std::array<std::array<std::array<int, kMaxDeg + 1>, kMaxDeg + 1>, kMaxDeg + 1> t{};
            int idx = 0;
            for (int d = 0; d <= kMaxDeg; ++d)
                for (int a = d; a >= 0; --a)
                    for (int b = d - a; b >= 0; --b) t[a][b][d - a - b] = idx++;
            return t;
        }();
        return table[a][b][c];
    }

    static const std::array<std::array<int, 3>, kTerms>& exponents() {
        static const auto table = [] {
            std::array<std::array<int, 3>, kTerms> t{};
            int idx = 0;
            for (int d = 0; d <= kMaxDeg; ++d)
                for (int a = d; a >= 0; --a)
                    for (int b = d - a; b >= 0; --b) t[idx++] = {a, b, d - a - b};
            return t;
        }();
        return table;
    }

    double& coeff(int a, int b, int c) { return c_[index(a, b, c)]; }
    double coeff(int a, int b, int c) const { return c_[index(a, b, c)]; }
    const std::array<double, kTerms>& coeffs() const { return c_; }

    static BaryPoly constant(double v) {
        BaryPoly p;
        p.coeff(0, 0, 0) = v;
        return p;
    }
    static BaryPoly lambda(int i) {
        BaryPoly p;
        int e[3] = {0, 0, 0};
        e[i] = 1;
        p.coeff(e[0], e[1], e[2]) = 1.0;
        return p;
    }

    BaryPoly operator+(const BaryPoly& o) const {
        BaryPoly r;
        for (int i = 0; i < kTerms; ++i) r.c_[i] = c_[i] + o.c_[i];
        return r;
    }
    BaryPoly operator-(const BaryPoly& o) const {
        BaryPoly r;
        for (int i = 0; i < kTerms; ++i) r.c_[i] = c_[i] - o.c_[i];
        return r;
    }
    BaryPoly operator*(double s) const {
        BaryPoly r;
        for (int i = 0; i < kTerms; ++i) r.c_[i] = c_[i] * s;
        return r;
    }
    BaryPoly& operator+=(const BaryPoly& o) {
        for (int i = 0; i < kTerms; ++i) c_[i] += o.c_[i];
        return *this;
    }

    BaryPoly operator*(const BaryPoly& o) const {
        BaryPoly r;
        const auto& exp = exponents();
        for (int i = 0; i < kTerms; ++i) {
            if (c_[i] == 0.0) continue;
            const auto& ei = exp[i];
            for (int j = 0; j < kTerms; ++j) {
                if (o.c_[j] == 0.0) continue;
                const auto& ej = exp[j];
                const int a = ei[0] + ej[0], b = ei[1] + ej[1], c = ei[2] + ej[2];
                if (a + b + c > kMaxDeg)
                    throw std::domain_error("BaryPoly: product exceeds degree 5");
                r.c_[index(a, b, c)] += c_[i] * o.c_[j];
            }
        }
        return r;
    }

    /// Partial derivative with respect to barycentric coordinate i.
    BaryPoly dlam(int i) const {
        BaryPoly r;
        const auto& exp = exponents();
        for (int k = 0; k < kTerms; ++k) {
            if (c_[k] == 0.0) continue;
            auto e = exp[k];
            if (e[i] == 0) continue;
            const double f = c_[k] * e[i];
            --e[i];
            r.c_[index(e[0], e[1], e[2])] += f;
        }
        return r;
    }

    double eval(double l1, double l2, double l3) const {
        double p1[kMaxDeg + 1], p2[kMaxDeg + 1], p3[kMaxDeg + 1];
        p1[0] = p2[0] = p3[0] = 1.0;
        for (int d = 1; d <= kMaxDeg; ++d) {
            p1[d] = p1[d - 1] * l1;
            p2[d] = p2[d - 1] * l2;
            p3[d] = p3[d - 1] * l3;
        }
        const auto& exp = exponents();
        double s = 0.0;
        for (int k = 0; k < kTerms; ++k)
            if (c_[k] != 0.0) s += c_[k] * p1[exp[k][0]] * p2[exp[k][1]] * p3[exp[k][2]];
        return s;
    }

    double max_abs_coeff() const {
        double m = 0.0;
        for (double v : c_) m = std::max(m, std::abs(v));
        return m;
    }

private:
    std::array<double, kTerms> c_;
};

inline BaryPoly operator*(double s, const BaryPoly& p) { return p * s; }

} // namespace sgfem
