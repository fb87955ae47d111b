#pragma once

#include "xpa/types.hpp"

#include <functional>
#include <string>

namespace xpa::optim {

// f(x, grad) -> value; must fill grad.
using Objective = std::function<double(const Vector& x, Vector& grad)>;

struct BoxLbfgsOptions
{
    int memory = 10;
    int max_iter = 5000;
    double pgtol = 1e-12;  // on the infinity norm of the projected gradient
    double ftol = 1e-13;   // relative decrease between iterations
    double fzero = 1e-24;  // absolute value considered an exact fit
    int max_backtracks = 50;
};

struct BoxLbfgsResult
{
    Vector x;
    double value = 0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string reason;
};

// Quasi-Newton minimization subject to lo <= x <= hi. Search directions come
// from the L-BFGS two-loop recursion restricted to the free variables; the
// step is projected back onto the box and accepted by Armijo backtracking.
BoxLbfgsResult minimize_box(const Objective& f, Vector x0, const Vector& lo, const Vector& hi,
                            const BoxLbfgsOptions& opts = {});

Vector project(const Vector& x, const Vector& lo, const Vector& hi);

// Infinity norm of the projected gradient.
double projected_gradient_norm(const Vector& x, const Vector& g, const Vector& lo, const Vector& hi);

} // namespace xpa::optim
