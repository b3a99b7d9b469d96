#pragma once

#include <Eigen/Core>
#include <optional>
#include <span>
#include <vector>

#include "czreg/bump.hpp"
#include "czreg/grid.hpp"
#include "czreg/jet.hpp"

namespace czreg {

namespace detail {

// dense bivariate polynomial, coeff(i,j) * y1^i * y2^j
struct Poly2 {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(1, 1);
    double eval(double y1, double y2) const;
    Poly2 diff(int axis) const;
    Poly2 mul_axis(int axis) const;  // multiply by y_axis
    static Poly2 constant(double v);
};

// sum of terms P_k(y) (1-s)^{-m_k}, all times exp(-1/(1-s)), s = |y|^2
struct RadialExpr {
    std::vector<std::pair<Poly2, int>> terms;
    RadialExpr diff(int axis) const;
    double eval(const Eigen::Vector2d& y) const;
};

}  // namespace detail

// Mollifier with vanishing moments: kernel(y) = q(y) * bump(y) supported on
// the closed unit ball, with integral one and vanishing moments
// int y^alpha kernel(y) dy = 0 for 1 <= |alpha| <= degree, so that
// kernel_eps * P = P for every polynomial P of degree <= degree.
// Derivatives are analytic (the closed form is differentiated), never
// finite-differenced.
class MollifierKernel {
public:
    MollifierKernel(int degree, int dim);

    int degree() const { return degree_; }
    int dim() const { return dim_; }

    double value(const Eigen::Vector2d& y) const { return derivative({0, 0}, y); }
    double value(double y) const { return derivative(0, y); }
    double derivative(const std::array<int, 2>& alpha, const Eigen::Vector2d& y) const;
    double derivative(int alpha, double y) const;

    // coefficients of the polynomial correction q in multi-index order
    const Eigen::VectorXd& correction() const { return q_; }

private:
    int degree_;
    int dim_;
    Eigen::VectorXd q_;
    std::vector<std::array<int, 2>> idx_;
    BumpProfile bump_;                          // d = 1
    std::vector<detail::RadialExpr> radial_;    // d = 2: D^alpha of the radial gauge
};

// Cached kernels, shared read-only across threads.
const MollifierKernel& make_kernel(int degree, int dim);

// Default dyadic ladder from 256*spacing down to 4*spacing, clipped so the
// kernel support stays inside the window around interior points.
std::vector<double> default_epsilon_ladder(const SampledFunction& f);

struct JetExtraction {
    PolyJet jet;                    // extrapolated coefficients
    std::vector<double> epsilons;   // decreasing
    Eigen::MatrixXd per_epsilon;    // (#eps) x (#alpha): D^alpha(kernel_eps * f)(x)
    Eigen::VectorXd rate;           // per-alpha extrapolation rate gamma
    bool extrapolated = true;
};

// Constructive jet at x: D^alpha(kernel_eps * f)(x) by discrete convolution
// with the analytically differentiated kernel, extrapolated across the
// epsilon ladder by fitting value(eps) = a + b eps^gamma; gamma comes from
// the supplied Boyd lower index (gamma = b(phi) - |alpha|) when available,
// else gamma = 1.  Throws ExtractionUnstableError when the per-epsilon
// differences grow toward small epsilon.
JetExtraction extract_jet(const SampledFunction& f, const Eigen::Vector2d& x, int degree,
                          std::span<const double> epsilons,
                          std::optional<double> boyd_lower = std::nullopt);

}  // namespace czreg
