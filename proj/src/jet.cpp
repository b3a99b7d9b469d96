#include "czreg/jet.hpp"

#include <cmath>

namespace czreg {

std::vector<std::array<int, 2>> multi_indices(int dim, int degree) {
    if (dim != 1 && dim != 2) throw DomainError("multi_indices: dim must be 1 or 2");
    if (degree < 0) throw DomainError("multi_indices: degree must be >= 0");
    std::vector<std::array<int, 2>> out;
    for (int total = 0; total <= degree; ++total) {
        if (dim == 1) {
            out.push_back({total, 0});
        } else {
            for (int i = total; i >= 0; --i) out.push_back({i, total - i});
        }
    }
    return out;
}

Eigen::Index poly_space_dim(int dim, int degree) {
    if (dim == 1) return degree + 1;
    return static_cast<Eigen::Index>((degree + 1) * (degree + 2) / 2);
}

PolyJet::PolyJet(int dim, const Eigen::Vector2d& center, int degree)
    : dim_(dim), degree_(degree), center_(center), idx_(multi_indices(dim, degree)) {
    coeffs_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(idx_.size()));
}

PolyJet::PolyJet(double center, int degree) : PolyJet(1, {center, 0.0}, degree) {}

double PolyJet::coeff(int i, int j) const {
    for (std::size_t k = 0; k < idx_.size(); ++k)
        if (idx_[k][0] == i && idx_[k][1] == j) return coeffs_[static_cast<Eigen::Index>(k)];
    throw DomainError("coeff: multi-index out of range");
}

void PolyJet::set_coeff(int i, int j, double v) {
    for (std::size_t k = 0; k < idx_.size(); ++k)
        if (idx_[k][0] == i && idx_[k][1] == j) {
            coeffs_[static_cast<Eigen::Index>(k)] = v;
            return;
        }
    throw DomainError("set_coeff: multi-index out of range");
}

double PolyJet::operator()(const Eigen::Vector2d& x) const {
    const double dx = x[0] - center_[0];
    const double dy = x[1] - center_[1];
    if (dim_ == 1) return (*this)(x[0]);
    double v = 0.0;
    for (std::size_t k = 0; k < idx_.size(); ++k)
        v += coeffs_[static_cast<Eigen::Index>(k)] * std::pow(dx, idx_[k][0]) * std::pow(dy, idx_[k][1]);
    return v;
}

double PolyJet::operator()(double x) const {
    if (dim_ != 1) throw DomainError("1-d evaluation of a 2-d jet");
    const double dx = x - center_[0];
    double v = 0.0;
    for (Eigen::Index k = coeffs_.size() - 1; k >= 0; --k) v = v * dx + coeffs_[k];
    return v;
}

namespace {

// alpha! / (alpha - beta)! along one axis
double falling_factorial(int a, int b) {
    double r = 1.0;
    for (int i = 0; i < b; ++i) r *= static_cast<double>(a - i);
    return r;
}

}  // namespace

double PolyJet::derivative(const std::array<int, 2>& beta, const Eigen::Vector2d& y) const {
    const double dx = y[0] - center_[0];
    const double dy = y[1] - center_[1];
    double v = 0.0;
    for (std::size_t k = 0; k < idx_.size(); ++k) {
        const int ax = idx_[k][0], ay = idx_[k][1];
        if (ax < beta[0] || ay < beta[1]) continue;
        double term = coeffs_[static_cast<Eigen::Index>(k)];
        term *= falling_factorial(ax, beta[0]) * falling_factorial(ay, beta[1]);
        term *= std::pow(dx, ax - beta[0]) * std::pow(dy, ay - beta[1]);
        v += term;
    }
    return v;
}

double PolyJet::derivative(int beta, double y) const {
    return derivative({beta, 0}, {y, center_[1]});
}

}  // namespace czreg
