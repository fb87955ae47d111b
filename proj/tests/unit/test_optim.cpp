#include "xpa/optim.hpp"

#include <gtest/gtest.h>

using namespace xpa;
using namespace xpa::optim;

TEST(BoxLbfgs, UnconstrainedQuadratic)
{
    const Vector target = (Vector(3) << 1, -2, 3).finished();
    auto f = [&](const Vector& x, Vector& g) {
        g = 2 * (x - target);
        return (x - target).squaredNorm();
    };
    const Vector lo = Vector::Constant(3, -10), hi = Vector::Constant(3, 10);
    const auto r = minimize_box(f, Vector::Zero(3), lo, hi);
    EXPECT_TRUE(r.converged) << r.reason;
    EXPECT_TRUE(r.x.isApprox(target, 1e-8));
}

TEST(BoxLbfgs, ActiveBound)
{
    auto f = [](const Vector& x, Vector& g) {
        g = 2 * (x.array() + 1).matrix();
        return (x.array() + 1).square().sum();
    };
    const Vector lo = Vector::Zero(2), hi = Vector::Ones(2);
    const auto r = minimize_box(f, Vector::Constant(2, 0.5), lo, hi);
    EXPECT_TRUE(r.converged) << r.reason;
    EXPECT_DOUBLE_EQ(r.x[0], 0);
    EXPECT_DOUBLE_EQ(r.x[1], 0);
}

TEST(BoxLbfgs, Rosenbrock)
{
    auto f = [](const Vector& x, Vector& g) {
        const double a = 1 - x[0], b = x[1] - x[0] * x[0];
        g.resize(2);
        g[0] = -2 * a - 400 * x[0] * b;
        g[1] = 200 * b;
        return a * a + 100 * b * b;
    };
    const Vector lo = Vector::Constant(2, -5), hi = Vector::Constant(2, 5);
    const auto r = minimize_box(f, (Vector(2) << -1.2, 1).finished(), lo, hi);
    EXPECT_NEAR(r.x[0], 1, 1e-5);
    EXPECT_NEAR(r.x[1], 1, 1e-5);
}

TEST(BoxLbfgs, ProjectionHelpers)
{
    const Vector lo = Vector::Zero(3), hi = Vector::Ones(3);
    const Vector x = (Vector(3) << -1, 0.5, 2).finished();
    const Vector p = project(x, lo, hi);
    EXPECT_EQ(p, (Vector(3) << 0, 0.5, 1).finished());
    // gradient pushing out of the box at a bound does not count
    const Vector at = (Vector(3) << 0, 0.5, 1).finished();
    const Vector g = (Vector(3) << 5, 0.25, -7).finished();
    EXPECT_DOUBLE_EQ(projected_gradient_norm(at, g, lo, hi), 0.25);
}
