#pragma once

#include <Eigen/Core>
#include <vector>

namespace czreg {

namespace detail {

// Dense 1-d polynomial helpers; coefficients ascending.
double poly_eval(const Eigen::VectorXd& c, double x);
Eigen::VectorXd poly_derivative(const Eigen::VectorXd& c);
Eigen::VectorXd poly_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace detail

// The standard smooth compactly supported profile exp(-1/(1-t^2)) on (-1,1),
// extended by zero, with exact derivatives up to a fixed order.
// Derivative k has the closed form P_k(t) (1-t^2)^{-2k} exp(-1/(1-t^2)),
// where the P_k satisfy
//   P_{k+1} = (P_k' (1-t^2) + 4k t P_k)(1-t^2) - 2t P_k.
class BumpProfile {
public:
    explicit BumpProfile(int max_order = 0);

    int max_order() const { return static_cast<int>(numer_.size()) - 1; }

    double value(double t) const { return derivative(0, t); }
    double derivative(int order, double t) const;

private:
    std::vector<Eigen::VectorXd> numer_;  // P_k, ascending coefficients
};

// Binomial coefficient as double (small arguments only).
double binomial(int n, int k);

}  // namespace czreg
