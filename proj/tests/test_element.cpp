// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "sgfem/element.hpp"
#include "test_helpers.hpp"

namespace sgfem {
namespace {

using testing::FnField;
using testing::PolyField;
using testing::random_triangle;

const TriangleRule& vol12() {
    static const TriangleRule r = triangle_rule(12);
    return r;
}
const EdgeRule& edge10() {
    static const EdgeRule r = edge_rule(10);
    return r;
}

TEST(DofFunctionals, ConstantField) {
    const auto g = make_geometry({0.1, 0.2}, {0.9, 0.3}, {0.4, 1.1});
    FnField one{[](Vec2) { return 1.0; }, [](Vec2) { return Vec2{0, 0}; }};
    const auto d = dof_functionals(g, one, vol12(), edge10());
    const std::array<double, 10> expect{1, 1, 1, 1, 1, 1, 0, 0, 0, 1};
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(d[i], expect[i], 1e-14) << i;
}

TEST(DofFunctionals, FirstBarycentricOnReference) {
    const auto g = make_geometry({0, 0}, {1, 0}, {0, 1});
    FnField lam1{[](Vec2 x) { return 1.0 - x.x - x.y; }, [](Vec2) { return Vec2{-1, -1}; }};
    const auto d = dof_functionals(g, lam1, vol12(), edge10());
    // Hand evaluation: vertex values, midpoint values, normal averages from
    // grad lambda_1 = (-1,-1), cell average 1/3.
    const std::array<double, 10> expect{1, 0, 0, 0, 0.5, 0.5, -std::sqrt(2.0), 1.0, 1.0, 1.0 / 3.0};
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(d[i], expect[i], 1e-13) << i;
}

TEST(DofFunctionals, CellBubbleHitsOnlyTheMean) {
    const auto g = make_geometry({0.2, -0.1}, {1.3, 0.4}, {0.1, 1.0});
    const auto basis = build_local_basis(g);
    PolyField phi0(g, basis.poly(9));
    const auto d = dof_functionals(g, phi0, vol12(), edge10());
    for (int i = 0; i < 9; ++i) EXPECT_NEAR(d[i], 0.0, 1e-12) << i;
    EXPECT_NEAR(d[9], 1.0, 1e-12);
}

TEST(BuildLocalBasis, EquilateralDofMatrixIsIdentity) {
    const auto g = make_geometry({0, 0}, {1, 0}, {0.5, std::sqrt(3.0) / 2.0});
    const auto basis = build_local_basis(g);
    // Cross-check the internal verification with the quadrature-based
    // functionals applied to the assembled polynomials.
    for (int j = 0; j < 10; ++j) {
        PolyField f(g, basis.poly(j));
        const auto d = dof_functionals(g, f, vol12(), edge10());
        for (int k = 0; k < 10; ++k)
            EXPECT_NEAR(d[k], k == j ? 1.0 : 0.0, 1e-10) << "dof " << k << " shape " << j;
    }
}

TEST(BuildLocalBasis, CellBubbleValueAtCentroid) {
    const auto g = make_geometry({0, 0}, {1, 0}, {0, 1});
    const auto basis = build_local_basis(g);
    EXPECT_NEAR(basis.poly(9).eval(1.0 / 3, 1.0 / 3, 1.0 / 3), 280.0 / 81.0, 1e-12);
}

TEST(BuildLocalBasis, RejectsDegenerateTriangle) {
    EXPECT_THROW(make_geometry({0, 0}, {1, 0}, {2, 0}), std::invalid_argument);
    EXPECT_THROW(make_geometry({0, 0}, {0, 1}, {1, 0}), std::invalid_argument); // clockwise
}

TEST(BuildLocalBasis, UnisolventOnRandomTriangles) {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const auto g = random_triangle(gen, 10.0);
        ASSERT_NO_THROW(build_local_basis(g)) << "trial " << trial;
    }
}

TEST(BuildLocalBasis, ShapeFunctionsSpanTenDimensions) {
    // Rank check plus exact membership in P2 + b_K (P1 + sum of lambda pairs):
    // decompose every shape function over that 10-dimensional generator set
    // by least squares on the raw monomial coefficients.
    const auto g = make_geometry({0, 0}, {1, 0}, {0, 1});
    const auto basis = build_local_basis(g);

    const BaryPoly l1 = BaryPoly::lambda(0), l2 = BaryPoly::lambda(1), l3 = BaryPoly::lambda(2);
    const BaryPoly bK = l1 * l2 * l3;
    std::vector<BaryPoly> span;
    span.push_back(BaryPoly::constant(1.0));
    span.push_back(l1);
    span.push_back(l2);
    span.push_back(l1 * l1);
    span.push_back(l1 * l2);
    span.push_back(l2 * l2); // P2 via (l1,l2), since l3 = 1-l1-l2 is not independent
    span.push_back(bK);
    span.push_back(bK * l1);
    span.push_back(bK * l2);
    span.push_back(bK * (l1 * l2 + l2 * l3 + l3 * l1));

    // Canonical representation: substitute l3 = 1 - l1 - l2 so coefficient
    // comparison is exact despite the simplex relation.
    auto reduce = [](const BaryPoly& p) {
        const BaryPoly l1 = BaryPoly::lambda(0), l2 = BaryPoly::lambda(1);
        const BaryPoly l3sub = BaryPoly::constant(1.0) - l1 - l2;
        BaryPoly out;
        const auto& exp = BaryPoly::exponents();
        for (int k = 0; k < BaryPoly::kTerms; ++k) {
            const double c = p.coeffs()[k];
            if (c == 0.0) continue;
            BaryPoly term = BaryPoly::constant(c);
            for (int r = 0; r < exp[k][0]; ++r) term = term * l1;
            for (int r = 0; r < exp[k][1]; ++r) term = term * l2;
            for (int r = 0; r < exp[k][2]; ++r) term = term * l3sub;
            out += term;
        }
        return out;
    };

    Eigen::MatrixXd G(BaryPoly::kTerms, 10), S(BaryPoly::kTerms, 10);
    for (int j = 0; j < 10; ++j) {
        const auto gp = reduce(span[j]);
        const auto sp = reduce(basis.poly(j));
        for (int k = 0; k < BaryPoly::kTerms; ++k) {
            G(k, j) = gp.coeffs()[k];
            S(k, j) = sp.coeffs()[k];
        }
    }
    const Eigen::MatrixXd sol = G.colPivHouseholderQr().solve(S);
    const double resid = (G * sol - S).cwiseAbs().maxCoeff();
    EXPECT_LT(resid, 1e-9);

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    EXPECT_GT(svd.singularValues()(9), 1e-8); // linear independence of the 10 shapes
}

TEST(InterpolateLocal, ReproducesQuadratics) {
    std::mt19937_64 gen(7);
    const auto g = random_triangle(gen);
    const auto basis = build_local_basis(g);
    FnField f{[](Vec2 x) { return 1.5 - 0.3 * x.x + 2.0 * x.y + 0.7 * x.x * x.x - 1.2 * x.x * x.y + 0.4 * x.y * x.y; },
              [](Vec2 x) { return Vec2{-0.3 + 1.4 * x.x - 1.2 * x.y, 2.0 - 1.2 * x.x + 0.8 * x.y}; }};
    const auto coeffs = interpolate_local(g, f, vol12(), edge10());

    std::array<double, 10> val;
    std::array<Vec2, 10> grad;
    std::array<Sym2, 10> hess;
    std::uniform_real_distribution<double> u(0.05, 0.9);
    for (int s = 0; s < 20; ++s) {
        double a = u(gen), b = u(gen) * (1.0 - a);
        basis.eval_all(1.0 - a - b, a, b, val, grad, hess);
        double uh = 0.0;
        for (int j = 0; j < 10; ++j) uh += coeffs[j] * val[j];
        const Vec2 x = g.point(1.0 - a - b, a, b);
        EXPECT_NEAR(uh, f.value(x), 1e-10);
    }
}

TEST(InterpolateLocal, ReproducesBubble) {
    const auto g = make_geometry({0.2, 0.1}, {1.1, 0.3}, {0.5, 0.9});
    const auto basis = build_local_basis(g);
    const BaryPoly bK = BaryPoly::lambda(0) * BaryPoly::lambda(1) * BaryPoly::lambda(2);
    PolyField f(g, bK);
    const auto coeffs = interpolate_local(g, f, vol12(), edge10());
    std::array<double, 10> val;
    std::array<Vec2, 10> grad;
    std::array<Sym2, 10> hess;
    for (double l1 : {0.1, 0.4, 0.7}) {
        const double l2 = 0.5 * (1.0 - l1);
        basis.eval_all(l1, l2, 1.0 - l1 - l2, val, grad, hess);
        double uh = 0.0;
        for (int j = 0; j < 10; ++j) uh += coeffs[j] * val[j];
        EXPECT_NEAR(uh, bK.eval(l1, l2, 1.0 - l1 - l2), 1e-12);
    }
}

TEST(InterpolateLocal, IsAProjection) {
    std::mt19937_64 gen(11);
    const auto g = random_triangle(gen);
    const auto basis = build_local_basis(g);
    FnField f{[](Vec2 x) { return std::sin(2 * x.x) * std::cos(x.y); },
              [](Vec2 x) {
                  return Vec2{2 * std::cos(2 * x.x) * std::cos(x.y), -std::sin(2 * x.x) * std::sin(x.y)};
              }};
    const auto c1 = interpolate_local(g, f, vol12(), edge10());
    PolyField fh(g, [&] {
        BaryPoly p;
        for (int j = 0; j < 10; ++j) p += basis.poly(j) * c1[j];
        return p;
    }());
    const auto c2 = interpolate_local(g, fh, vol12(), edge10());
    for (int j = 0; j < 10; ++j) EXPECT_NEAR(c2[j], c1[j], 1e-12) << j;
}

TEST(InterpolateLocal, ThirdOrderLocalError) {
    // ||f - pi_K f||_{L2(K)} <= C h^3 ||f||_{H3(K)} on a shrinking triangle
    // family. The element norm on the right itself scales like h, so the
    // bound is checked as a ratio; the raw error rate must be at least 3.
    FnField f{[](Vec2 x) { return std::sin(M_PI * x.x) * std::sin(M_PI * x.y); },
              [](Vec2 x) {
                  return Vec2{M_PI * std::cos(M_PI * x.x) * std::sin(M_PI * x.y),
                              M_PI * std::sin(M_PI * x.x) * std::cos(M_PI * x.y)};
              }};
    // third derivatives of sin(pi x) sin(pi y)
    auto d3 = [](Vec2 x) {
        const double p = M_PI, sx = std::sin(p * x.x), cx = std::cos(p * x.x);
        const double sy = std::sin(p * x.y), cy = std::cos(p * x.y);
        const double p3 = p * p * p;
        return std::array<double, 4>{-p3 * cx * sy, -p3 * sx * cy, -p3 * cx * sy, -p3 * sx * cy};
    };
    const auto rule = triangle_rule(14);

    auto measure = [&](double h) {
        const auto g = make_geometry({0.3, 0.4}, {0.3 + h, 0.4 + 0.1 * h}, {0.3 + 0.2 * h, 0.4 + h});
        const auto basis = build_local_basis(g);
        const auto coeffs = interpolate_local(g, f, vol12(), edge10());
        double err2 = 0.0, h3norm2 = 0.0;
        std::array<double, 10> val;
        std::array<Vec2, 10> grad;
        std::array<Sym2, 10> hess;
        for (const auto& q : rule.points) {
            basis.eval_all(q.l1, q.l2, q.l3, val, grad, hess);
            double uh = 0.0;
            for (int j = 0; j < 10; ++j) uh += coeffs[j] * val[j];
            const Vec2 x = g.point(q.l1, q.l2, q.l3);
            const double d = uh - f.value(x);
            err2 += q.w * d * d;
            const auto t = d3(x);
            h3norm2 += q.w * (t[0] * t[0] + 3 * t[1] * t[1] + 3 * t[2] * t[2] + t[3] * t[3]);
        }
        const double two_area = 2.0 * g.area;
        return std::pair<double, double>{std::sqrt(err2 * two_area), std::sqrt(h3norm2 * two_area)};
    };

    double prev_err = 0.0, prev_h = 0.0;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const auto [err, h3] = measure(h);
        const double bound_ratio = err / (h * h * h * h3);
        EXPECT_LT(bound_ratio, 0.1) << "h=" << h; // constant stays bounded
        if (prev_err > 0.0) {
            const double rate = std::log2(prev_err / err) / std::log2(prev_h / h);
            EXPECT_GE(rate, 3.0 - 0.1) << "h=" << h;
        }
        prev_err = err;
        prev_h = h;
    }
}

TEST(ElementTrace, SharedEdgeTracesMatch) {
    // Two triangles share the edge from (1,0) to (0,1). A function with equal
    // vertex and midpoint values on that edge has the same quadratic trace
    // from both sides, whatever the remaining DoFs are.
    const auto gL = make_geometry({0, 0}, {1, 0}, {0, 1});
    const auto gR = make_geometry({1, 0}, {1.2, 1.1}, {0, 1});
    const auto bL = build_local_basis(gL);
    const auto bR = build_local_basis(gR);

    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 10> cL{}, cR{};
    for (auto& c : cL) c = u(gen);
    for (auto& c : cR) c = u(gen);
    // Shared edge in gL: vertices (1,0)=slot1 and (0,1)=slot2, edge slot 0.
    // In gR: vertices (1,0)=slot0 and (0,1)=slot2, edge slot 1.
    cR[0] = cL[1];            // value at (1,0)
    cR[2] = cL[2];            // value at (0,1)
    cR[3 + 1] = cL[3 + 0];    // shared midpoint value

    std::array<double, 10> val;
    std::array<Vec2, 10> grad;
    std::array<Sym2, 10> hess;
    for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const Vec2 x = Vec2{1, 0} * (1.0 - t) + Vec2{0, 1} * t;
        const auto lL = gL.barycentric(x);
        const auto lR = gR.barycentric(x);
        bL.eval_all(lL[0], lL[1], lL[2], val, grad, hess);
        double vL = 0.0;
        for (int j = 0; j < 10; ++j) vL += cL[j] * val[j];
        bR.eval_all(lR[0], lR[1], lR[2], val, grad, hess);
        double vR = 0.0;
        for (int j = 0; j < 10; ++j) vR += cR[j] * val[j];
        EXPECT_NEAR(vL, vR, 1e-12) << "t=" << t;
    }
}

TEST(P1Basis, NodalAndGradientProperties) {
    std::mt19937_64 gen(5);
    const auto g = random_triangle(gen);
    const auto p1 = p1_basis(g);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const auto l = g.barycentric(g.v[j]);
            EXPECT_NEAR(p1.value(i, l[0], l[1], l[2]), i == j ? 1.0 : 0.0, 1e-13);
        }
    }
    const Vec2 gsum = p1.gradient(0) + p1.gradient(1) + p1.gradient(2);
    EXPECT_NEAR(gsum.x, 0.0, 1e-13);
    EXPECT_NEAR(gsum.y, 0.0, 1e-13);
    // reproduces f = x via nodal values
    const Vec2 probe{0.3, 0.4};
    const auto l = g.barycentric(probe);
    double fx = 0.0;
    for (int i = 0; i < 3; ++i) fx += g.v[i].x * p1.value(i, l[0], l[1], l[2]);
    EXPECT_NEAR(fx, probe.x, 1e-13);
}

TEST(BasisEval, GradientsMatchFiniteDifferences) {
    std::mt19937_64 gen(9);
    const auto g = random_triangle(gen);
    const auto basis = build_local_basis(g);
    std::array<double, 10> val;
    std::array<Vec2, 10> grad;
    std::array<Sym2, 10> hess;
    const Vec2 x = g.point(0.3, 0.45, 0.25);
    const auto l = g.barycentric(x);
    basis.eval_all(l[0], l[1], l[2], val, grad, hess);
    for (int j = 0; j < 10; ++j) {
        const auto fd = testing::fd_gradient(
            [&](Vec2 p) {
                const auto lp = g.barycentric(p);
                return basis.poly(j).eval(lp[0], lp[1], lp[2]);
            },
            x, 1e-4);
        EXPECT_NEAR(grad[j].x, fd.x, 2e-7) << j;
        EXPECT_NEAR(grad[j].y, fd.y, 2e-7) << j;
    }
}

} // namespace
} // namespace sgfem
