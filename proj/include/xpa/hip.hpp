#pragma once

#include "xpa/optim.hpp"
#include "xpa/types.hpp"

#include <cstdint>

namespace xpa::hip {

// x[t] = gamma [t=0] + eta [t>0] + alpha s[t] + C sum_{tau=1..t} x[t-tau] (tau+c)^-(1+theta)
struct HipParams
{
    double gamma = 0; // initial impulse
    double eta = 0;   // background rate
    double alpha = 0; // sensitivity to promotion
    double C = 0;     // content quality (kernel scale)
    double c = 0;     // kernel shift
    double theta = 1; // power-law exponent

    Eigen::Matrix<double, 6, 1> as_vector() const { return {gamma, eta, alpha, C, c, theta}; }
    static HipParams from_vector(const Eigen::Ref<const Vector>& v);

    // Throws DomainError if any bound is violated.
    void validate() const;
};

// Expected daily views over T days. `promotion` is zero-padded to T.
Vector simulate(const HipParams& p, const Eigen::Ref<const Vector>& promotion, Eigen::Index T);

// Same as simulate, also returning d x[t] / d param as a T x 6 matrix
// (columns in HipParams::as_vector order).
Vector simulate(const HipParams& p, const Eigen::Ref<const Vector>& promotion, Eigen::Index T, Matrix& jacobian);

// sum_{tau>=1} (tau + c)^-(1+theta).
double kernel_mass(double c, double theta);

inline double branching_factor(const HipParams& p)
{
    return p.C * kernel_mass(p.c, p.theta);
}

struct ViralPotential
{
    double value;      // +inf when supercritical
    bool supercritical;
};

// Area under the impulse response: alpha / (1 - C K).
ViralPotential viral_potential(const HipParams& p);

struct FitOptions
{
    Eigen::Index fit_days = 120;
    int restarts = 5;
    std::uint64_t seed = 20170101;
    optim::BoxLbfgsOptions optimizer{};
};

struct FitBounds
{
    HipParams lo;
    HipParams hi;
};

// gamma, eta in [0, 10 max(x)]; alpha in [0, 1e4]; C in [0, 10]; c in [0, 300]; theta in [1e-3, 30].
FitBounds default_bounds(const Eigen::Ref<const Vector>& views);

struct FitResult
{
    HipParams params;
    double residual = 0;   // sum of squared errors over the fit window
    double rel_rmse = 0;   // RMSE / mean(views)
    int restarts = 0;
    int converged_restarts = 0;
    bool supercritical = false;
};

class FitError : public ConvergenceError
{
public:
    FitError(const std::string& what, FitResult best)
        : ConvergenceError(what, best.residual), best_(best)
    {
    }
    const FitResult& best() const { return best_; }

private:
    FitResult best_;
};

// Bound-constrained least squares from several seeded starting points; the
// best residual wins (ties keep the earliest restart).
// Throws DomainError for all-zero views and FitError when no restart converges.
FitResult fit(const Eigen::Ref<const Vector>& views, const Eigen::Ref<const Vector>& promotion,
              const FitOptions& opts = {});

} // namespace xpa::hip
