#pragma once

#include <span>
#include <vector>

#include "czreg/boyd.hpp"
#include "czreg/bump.hpp"
#include "czreg/jet.hpp"

namespace czreg {

// Jet field on a finite sample of a closed set E in R: one degree-n jet per
// point, a weight phi, and the uniform bound M of the hypothesis.
struct JetField {
    std::vector<double> points;  // strictly increasing
    std::vector<PolyJet> jets;   // centers == points, common degree
    BoydExpr phi;
    double bound = 1.0;  // M

    int degree() const;
    void validate() const;  // throws DomainError
};

struct CompatibilityResult {
    double constant = 0.0;  // max over pairs and |beta| <= n of the Whitney quotient
    double cap = 0.0;
    bool within_cap = false;
    std::size_t argmax_i = 0, argmax_j = 0;
    int argmax_beta = 0;
};

// max over ordered pairs (x,y), x != y, and |beta| <= n of
//   |D^beta(P_x - P_y)(y)| / (phi(|x-y|) |x-y|^{-|beta|})
CompatibilityResult check_compatibility(const JetField& field, double cap_factor = 10.0);

struct WhitneyInterval {
    double a = 0.0, b = 0.0;
    std::size_t nearest = 0;  // index of the closest data point to the midpoint
};

// Dyadic tiling of [min E - margin, max E + margin] \ E with
// length(I) in [dist(I,E)/4, dist(I,E)]; ladders stop at min_length and the
// leftover stub adjacent to a data point is kept as one interval.
std::vector<WhitneyInterval> whitney_decompose(std::span<const double> points, double margin,
                                               double min_length);

// F(x) = sum_I theta_I(x) P_{s(I)}(x) off E, with {theta_I} a smooth
// partition of unity subordinate to the 1.5-dilated Whitney intervals, and
// F = the jet data on E.  C^n by construction; derivatives are analytic.
class WhitneyExtension {
public:
    double operator()(double x) const { return derivative(0, x); }
    double derivative(int order, double x) const;

    double domain_min() const { return umin_; }
    double domain_max() const { return umax_; }
    int degree() const { return degree_; }
    const std::vector<WhitneyInterval>& intervals() const { return intervals_; }

    // sum of theta_I over every interval of the gap containing x (tests)
    double partition_sum(double x) const;

private:
    friend WhitneyExtension extend(const JetField&, double, double);
    std::vector<double> points_;
    std::vector<PolyJet> jets_;
    std::vector<WhitneyInterval> intervals_;
    std::vector<std::size_t> gap_begin_;  // intervals_ slice per gap, gaps = points.size()+1
    BumpProfile bump_;
    double umin_ = 0.0, umax_ = 0.0;
    int degree_ = 0;

    struct Blend {
        std::size_t first = 0, count = 0;  // contributing interval range
    };
    Blend locate(double x) const;
    // psi_I and derivatives up to `order` at x
    void psi(std::size_t interval, double x, int order, double* out) const;
};

// throws CompatibilityError when the gate fails
WhitneyExtension extend(const JetField& field, double margin = 1.0, double cap_factor = 10.0);

struct BoundCheck {
    double constant = 0.0;  // empirical C of |Delta_h^{m-n} D^n F(x)| <= C phi(|h|) |h|^{-n}
    double argmax_x = 0.0, argmax_h = 0.0;
    int x_samples = 0, h_samples = 0;
};

// sup over a grid of (x, h) with [x, x+(m-n)h] inside the domain; requires
// n < b(phi) <= bbar(phi) < m.
BoundCheck verify_bound(const WhitneyExtension& ext, const BoydExpr& phi, int n, int m,
                        int x_samples = 400, int h_samples = 48);

}  // namespace czreg
