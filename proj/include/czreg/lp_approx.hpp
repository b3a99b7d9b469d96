#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "czreg/grid.hpp"
#include "czreg/jet.hpp"

namespace czreg {

// Ball B(center, radius) with integration exponent p in [1, inf]
// (p = infinity is the sup over grid points in the ball).
struct BallSpec {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
    double p = 2.0;

    static BallSpec line(double x, double r, double p) { return {{x, 0.0}, r, p}; }
};

// Flat indices of grid points whose cells count toward the ball: centers g
// with |g - center| <= radius (closed, with a spacing*1e-9 slack against
// boundary roundoff).  Throws DomainError when the ball exceeds the window.
std::vector<Eigen::Index> ball_points(const SampledFunction& f, const BallSpec& ball);

// Riemann-sum L^p norm over the ball: (sum |f(g)|^p h^d)^{1/p}, or the max
// for p = inf.  Throws InsufficientSamplesError on an empty intersection.
double lp_ball_norm(const SampledFunction& f, const BallSpec& ball);

// Same, for f - P without materializing the difference.
double lp_ball_norm_residual(const SampledFunction& f, const PolyJet& jet, const BallSpec& ball);

struct BestPoly {
    PolyJet jet;
    double residual = 0.0;  // attained L^p(B) norm, same convention as lp_ball_norm
    int irls_iterations = 0;
};

struct BestPolyOptions {
    double irls_tol = 1e-10;  // relative residual change
    int irls_max_iter = 200;
};

// IRLS hit the iteration cap; carries the last iterate.
struct IterationLimitError : Error {
    IterationLimitError(const std::string& what, BestPoly iterate)
        : Error(what), last(std::move(iterate)) {}
    BestPoly last;
};

// Best degree-<=n polynomial in L^p(B): p=2 by orthogonalized least squares
// in the radius-scaled monomial basis, p=inf by linear programming on the
// sample points (discrete Chebyshev), p in (1,inf) by IRLS warm-started from
// the p=2 fit.  p below 1.1 is rejected (IRLS degeneracy).
BestPoly best_poly(const SampledFunction& f, const BallSpec& ball, int degree,
                   const BestPolyOptions& opts = {});

namespace detail {

// minimize max_i |f_i - (A c)_i| over c; returns (c, attained bound).
// Revised two-phase simplex on the dual; deterministic tie-breaking, and the
// coefficient vector is recovered from the optimal basis by a minimum-norm
// solve.
std::pair<Eigen::VectorXd, double> chebyshev_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& f);

}  // namespace detail

}  // namespace czreg
