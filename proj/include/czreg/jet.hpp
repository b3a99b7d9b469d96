#pragma once

#include <Eigen/Core>
#include <array>
#include <vector>

#include "czreg/errors.hpp"

namespace czreg {

// Multi-indices alpha with |alpha| <= degree in graded lexicographic order;
// dim 1 uses (k, 0).
std::vector<std::array<int, 2>> multi_indices(int dim, int degree);
Eigen::Index poly_space_dim(int dim, int degree);

// Centered polynomial: P(x) = sum_{|alpha| <= n} c_alpha (x - x0)^alpha,
// so c_alpha = D^alpha P(x0) / alpha!.
class PolyJet {
public:
    PolyJet(int dim, const Eigen::Vector2d& center, int degree);
    PolyJet(double center, int degree);  // 1-d convenience

    int dim() const { return dim_; }
    int degree() const { return degree_; }
    const Eigen::Vector2d& center() const { return center_; }

    const Eigen::VectorXd& coeffs() const { return coeffs_; }
    Eigen::VectorXd& coeffs() { return coeffs_; }
    const std::vector<std::array<int, 2>>& index_set() const { return idx_; }

    double coeff(int i, int j = 0) const;
    void set_coeff(int i, int j, double v);
    void set_coeff(int i, double v) { set_coeff(i, 0, v); }

    double operator()(const Eigen::Vector2d& x) const;
    double operator()(double x) const;

    // D^beta P evaluated at y
    double derivative(const std::array<int, 2>& beta, const Eigen::Vector2d& y) const;
    double derivative(int beta, double y) const;

private:
    int dim_;
    int degree_;
    Eigen::Vector2d center_;
    std::vector<std::array<int, 2>> idx_;
    Eigen::VectorXd coeffs_;
};

}  // namespace czreg
