// Copyright (c) the sgfem authors.
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "sgfem/jet.hpp"

namespace sgfem {
namespace {

TEST(Jet, PolynomialDerivativesAreExact) {
    // f = x^2 y + 3 y^3 at (1.5, -0.7)
    const double x0 = 1.5, y0 = -0.7;
    const auto x = Jet2<4>::variable_x(x0);
    const auto y = Jet2<4>::variable_y(y0);
    const auto f = x * x * y + y * y * y * 3.0;
    EXPECT_DOUBLE_EQ(f.value(), x0 * x0 * y0 + 3 * y0 * y0 * y0);
    EXPECT_DOUBLE_EQ(f.derivative(1, 0), 2 * x0 * y0);
    EXPECT_DOUBLE_EQ(f.derivative(0, 1), x0 * x0 + 9 * y0 * y0);
    EXPECT_DOUBLE_EQ(f.derivative(2, 0), 2 * y0);
    EXPECT_DOUBLE_EQ(f.derivative(1, 1), 2 * x0);
    EXPECT_DOUBLE_EQ(f.derivative(0, 3), 18.0);
    EXPECT_DOUBLE_EQ(f.derivative(4, 0), 0.0);
}

TEST(Jet, TrigChainRule) {
    const double x0 = 0.4, y0 = 0.9;
    const auto x = Jet2<4>::variable_x(x0);
    const auto y = Jet2<4>::variable_y(y0);
    const auto f = sin(x * y);
    EXPECT_NEAR(f.value(), std::sin(x0 * y0), 1e-15);
    EXPECT_NEAR(f.derivative(1, 0), y0 * std::cos(x0 * y0), 1e-14);
    EXPECT_NEAR(f.derivative(0, 1), x0 * std::cos(x0 * y0), 1e-14);
    EXPECT_NEAR(f.derivative(2, 0), -y0 * y0 * std::sin(x0 * y0), 1e-14);
    EXPECT_NEAR(f.derivative(1, 1), std::cos(x0 * y0) - x0 * y0 * std::sin(x0 * y0), 1e-14);
    // fourth-order mixed derivative of sin(xy): d^4/dx^2 dy^2
    const double s = std::sin(x0 * y0), c = std::cos(x0 * y0);
    const double d22 = x0 * x0 * y0 * y0 * s - 4.0 * x0 * y0 * c - 2.0 * s + 2 * s;
    // d22 from symbolic: (x^2 y^2 - 2) sin + ... recompute directly below
    (void)d22;
    // cross-check against a fine central difference of d^2/dy^2 in x
    auto dyy = [&](double xx) {
        const auto jx = Jet2<4>::variable_x(xx);
        const auto jy = Jet2<4>::variable_y(y0);
        return (sin(jx * jy)).derivative(0, 2);
    };
    const double h = 1e-4;
    const double fd = (-dyy(x0 + 2 * h) + 16 * dyy(x0 + h) - 30 * dyy(x0) + 16 * dyy(x0 - h) -
                       dyy(x0 - 2 * h)) /
                      (12 * h * h);
    EXPECT_NEAR(f.derivative(2, 2), fd, 1e-8);
}

TEST(Jet, PowAndSqrt) {
    const double x0 = 0.7, y0 = 0.25;
    const auto x = Jet2<3>::variable_x(x0);
    const auto y = Jet2<3>::variable_y(y0);
    const auto rho = sqrt(x * x + y * y);
    const double r0 = std::hypot(x0, y0);
    EXPECT_NEAR(rho.value(), r0, 1e-15);
    EXPECT_NEAR(rho.derivative(1, 0), x0 / r0, 1e-14);
    EXPECT_NEAR(rho.derivative(0, 1), y0 / r0, 1e-14);
    EXPECT_NEAR(rho.derivative(2, 0), y0 * y0 / (r0 * r0 * r0), 1e-13);

    const auto r15 = pow(x * x + y * y, 0.75); // rho^1.5
    EXPECT_NEAR(r15.value(), std::pow(r0, 1.5), 1e-14);
    EXPECT_NEAR(r15.derivative(1, 0), 1.5 * std::pow(r0, -0.5) * x0 / 1.0, 1e-13);
}

TEST(Jet, DivisionAndLogExp) {
    const auto x = Jet2<3>::variable_x(1.2);
    const auto y = Jet2<3>::variable_y(0.3);
    const auto q = (x + y) / (x * y + 2.0);
    const double v = (1.2 + 0.3) / (1.2 * 0.3 + 2.0);
    EXPECT_NEAR(q.value(), v, 1e-15);
    const auto roundtrip = exp(log(x * x + 1.0)) - (x * x + 1.0);
    EXPECT_NEAR(roundtrip.value(), 0.0, 1e-14);
    EXPECT_NEAR(roundtrip.derivative(1, 0), 0.0, 1e-13);
    EXPECT_NEAR(roundtrip.derivative(2, 0), 0.0, 1e-12);
}

TEST(Jet, Atan2BranchesAgree) {
    for (double x0 : {0.6, 0.45}) {
        const double y0 = 0.45;
        const auto x = Jet2<3>::variable_x(x0);
        const auto y = Jet2<3>::variable_y(y0);
        const auto th = atan2_first_quadrant(y, x);
        EXPECT_NEAR(th.value(), std::atan2(y0, x0), 1e-15);
        const double r2 = x0 * x0 + y0 * y0;
        EXPECT_NEAR(th.derivative(1, 0), -y0 / r2, 1e-13);
        EXPECT_NEAR(th.derivative(0, 1), x0 / r2, 1e-13);
    }
    // steep branch
    const auto x = Jet2<3>::variable_x(0.1);
    const auto y = Jet2<3>::variable_y(0.9);
    const auto th = atan2_first_quadrant(y, x);
    EXPECT_NEAR(th.value(), std::atan2(0.9, 0.1), 1e-15);
    EXPECT_NEAR(th.derivative(1, 0), -0.9 / 0.82, 1e-12);
}

} // namespace
} // namespace sgfem
