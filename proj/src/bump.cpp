#include "czreg/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace czreg {

namespace detail {

double poly_eval(const Eigen::VectorXd& c, double x) {
    double v = 0.0;
    for (Eigen::Index i = c.size() - 1; i >= 0; --i) v = v * x + c[i];
    return v;
}

Eigen::VectorXd poly_derivative(const Eigen::VectorXd& c) {
    if (c.size() <= 1) return Eigen::VectorXd::Zero(1);
    Eigen::VectorXd d(c.size() - 1);
    for (Eigen::Index i = 1; i < c.size(); ++i) d[i - 1] = c[i] * static_cast<double>(i);
    return d;
}

Eigen::VectorXd poly_mul(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Eigen::VectorXd r = Eigen::VectorXd::Zero(a.size() + b.size() - 1);
    for (Eigen::Index i = 0; i < a.size(); ++i)
        for (Eigen::Index j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
    return r;
}

}  // namespace detail

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

BumpProfile::BumpProfile(int max_order) {
    if (max_order < 0) throw std::invalid_argument("BumpProfile: negative order");
    numer_.reserve(static_cast<std::size_t>(max_order) + 1);
    Eigen::VectorXd one(1);
    one << 1.0;
    numer_.push_back(one);
    Eigen::VectorXd u2(3);  // 1 - t^2
    u2 << 1.0, 0.0, -1.0;
    Eigen::VectorXd two_t(2);
    two_t << 0.0, 2.0;
    for (int k = 0; k < max_order; ++k) {
        const Eigen::VectorXd& p = numer_.back();
        Eigen::VectorXd inner = detail::poly_mul(detail::poly_derivative(p), u2) +
                                2.0 * static_cast<double>(k) * detail::poly_mul(two_t, p);
        Eigen::VectorXd next = detail::poly_mul(inner, u2) - detail::poly_mul(two_t, p);
        numer_.push_back(next);
    }
}

double BumpProfile::derivative(int order, double t) const {
    if (order < 0 || order > max_order())
        throw std::invalid_argument("BumpProfile: derivative order out of range");
    const double u = 1.0 - t * t;
    // exp(-1/u) underflows long before this cutoff matters
    if (u < 1.0 / 700.0) return 0.0;
    const double base = std::exp(-1.0 / u);
    if (order == 0) return base;
    const double pk = detail::poly_eval(numer_[static_cast<std::size_t>(order)], t);
    return pk * std::pow(u, -2.0 * order) * base;
}

}  // namespace czreg
