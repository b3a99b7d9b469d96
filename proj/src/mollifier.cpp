#include "czreg/mollifier.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace czreg {

namespace detail {

double Poly2::eval(double y1, double y2) const {
    double v = 0.0;
    for (Eigen::Index i = c.rows() - 1; i >= 0; --i) {
        double row = 0.0;
        for (Eigen::Index j = c.cols() - 1; j >= 0; --j) row = row * y2 + c(i, j);
        v = v * y1 + row;
    }
    return v;
}

Poly2 Poly2::diff(int axis) const {
    Poly2 out;
    if (axis == 0) {
        if (c.rows() <= 1) return out;
        out.c = Eigen::MatrixXd::Zero(c.rows() - 1, c.cols());
        for (Eigen::Index i = 1; i < c.rows(); ++i) out.c.row(i - 1) = c.row(i) * static_cast<double>(i);
    } else {
        if (c.cols() <= 1) return out;
        out.c = Eigen::MatrixXd::Zero(c.rows(), c.cols() - 1);
        for (Eigen::Index j = 1; j < c.cols(); ++j) out.c.col(j - 1) = c.col(j) * static_cast<double>(j);
    }
    return out;
}

Poly2 Poly2::mul_axis(int axis) const {
    Poly2 out;
    if (axis == 0) {
        out.c = Eigen::MatrixXd::Zero(c.rows() + 1, c.cols());
        out.c.bottomRows(c.rows()) = c;
    } else {
        out.c = Eigen::MatrixXd::Zero(c.rows(), c.cols() + 1);
        out.c.rightCols(c.cols()) = c;
    }
    return out;
}

Poly2 Poly2::constant(double v) {
    Poly2 p;
    p.c(0, 0) = v;
    return p;
}

RadialExpr RadialExpr::diff(int axis) const {
    // d/dy_a [P (1-s)^{-m} G] with G = exp(-1/(1-s)), dG/ds = (1-s)^{-2} G:
    //   (dP/dy_a, m) + (2 m y_a P, m+1) + (2 y_a P, m+2)
    RadialExpr out;
    for (const auto& [p, m] : terms) {
        Poly2 dp = p.diff(axis);
        if (dp.c.size() > 0 && dp.c.cwiseAbs().maxCoeff() > 0.0) out.terms.emplace_back(dp, m);
        Poly2 ya_p = p.mul_axis(axis);
        if (m > 0) {
            Poly2 t;
            t.c = 2.0 * static_cast<double>(m) * ya_p.c;
            out.terms.emplace_back(t, m + 1);
        }
        Poly2 t2;
        t2.c = 2.0 * ya_p.c;
        out.terms.emplace_back(t2, m + 2);
    }
    // merge terms sharing the same power
    std::map<int, Poly2> merged;
    for (const auto& [p, m] : out.terms) {
        auto it = merged.find(m);
        if (it == merged.end()) {
            merged.emplace(m, p);
        } else {
            Eigen::Index r = std::max(it->second.c.rows(), p.c.rows());
            Eigen::Index cc = std::max(it->second.c.cols(), p.c.cols());
            Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(r, cc);
            sum.topLeftCorner(it->second.c.rows(), it->second.c.cols()) = it->second.c;
            sum.topLeftCorner(p.c.rows(), p.c.cols()) += p.c;
            it->second.c = sum;
        }
    }
    RadialExpr compact;
    for (auto& [m, p] : merged) compact.terms.emplace_back(std::move(p), m);
    return compact;
}

double RadialExpr::eval(const Eigen::Vector2d& y) const {
    const double s = y.squaredNorm();
    const double u = 1.0 - s;
    if (u < 1.0 / 700.0) return 0.0;
    const double g = std::exp(-1.0 / u);
    double v = 0.0;
    for (const auto& [p, m] : terms) v += p.eval(y[0], y[1]) * std::pow(u, -static_cast<double>(m));
    return v * g;
}

}  // namespace detail

namespace {

// composite midpoint rule; integrands here are smooth and compactly
// supported, so convergence is superalgebraic
Eigen::VectorXd bump_moments_1d(int max_power) {
    const int cells = 1 << 16;
    const double h = 2.0 / cells;
    BumpProfile bump(0);
    Eigen::VectorXd mom = Eigen::VectorXd::Zero(max_power + 1);
    for (int i = 0; i < cells; ++i) {
        const double t = -1.0 + (i + 0.5) * h;
        const double b = bump.value(t);
        if (b == 0.0) continue;
        double tp = 1.0;
        for (int l = 0; l <= max_power; ++l) {
            mom[l] += b * tp;
            tp *= t;
        }
    }
    return mom * h;
}

Eigen::MatrixXd gauge_moments_2d(int max_total) {
    const int cells = 1500;
    const double h = 2.0 / cells;
    Eigen::MatrixXd mom = Eigen::MatrixXd::Zero(max_total + 1, max_total + 1);
    for (int i = 0; i < cells; ++i) {
        const double y1 = -1.0 + (i + 0.5) * h;
        for (int j = 0; j < cells; ++j) {
            const double y2 = -1.0 + (j + 0.5) * h;
            const double u = 1.0 - y1 * y1 - y2 * y2;
            if (u < 1.0 / 700.0) continue;
            const double g = std::exp(-1.0 / u);
            double p1 = 1.0;
            for (int a = 0; a <= max_total; ++a) {
                double p2 = 1.0;
                for (int b = 0; a + b <= max_total; ++b) {
                    mom(a, b) += g * p1 * p2;
                    p2 *= y2;
                }
                p1 *= y1;
            }
        }
    }
    return mom * (h * h);
}

}  // namespace

MollifierKernel::MollifierKernel(int degree, int dim)
    : degree_(degree), dim_(dim), idx_(multi_indices(dim, degree)), bump_(degree) {
    if (degree < 0) throw DomainError("kernel degree must be >= 0");
    if (dim != 1 && dim != 2) throw DomainError("kernel dim must be 1 or 2");
    const Eigen::Index msize = static_cast<Eigen::Index>(idx_.size());
    Eigen::MatrixXd M(msize, msize);
    if (dim == 1) {
        const Eigen::VectorXd mom = bump_moments_1d(2 * degree);
        for (Eigen::Index a = 0; a < msize; ++a)
            for (Eigen::Index b = 0; b < msize; ++b)
                M(a, b) = mom[idx_[static_cast<std::size_t>(a)][0] + idx_[static_cast<std::size_t>(b)][0]];
    } else {
        const Eigen::MatrixXd mom = gauge_moments_2d(2 * degree);
        for (Eigen::Index a = 0; a < msize; ++a)
            for (Eigen::Index b = 0; b < msize; ++b)
                M(a, b) = mom(idx_[static_cast<std::size_t>(a)][0] + idx_[static_cast<std::size_t>(b)][0],
                              idx_[static_cast<std::size_t>(a)][1] + idx_[static_cast<std::size_t>(b)][1]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw Error("mollifier moment matrix is singular");  // cannot occur for the bump; guarded anyway
    Eigen::VectorXd e0 = Eigen::VectorXd::Zero(msize);
    e0[0] = 1.0;
    q_ = lu.solve(e0);

    if (dim == 2) {
        // precompute D^alpha of the radial gauge for all |alpha| <= degree
        radial_.resize(idx_.size());
        detail::RadialExpr base;
        base.terms.emplace_back(detail::Poly2::constant(1.0), 0);
        radial_[0] = base;
        for (std::size_t k = 1; k < idx_.size(); ++k) {
            // find a predecessor with one fewer derivative along some axis
            const auto a = idx_[k];
            for (int axis = 0; axis < 2; ++axis) {
                if (a[static_cast<std::size_t>(axis)] == 0) continue;
                auto prev = a;
                --prev[static_cast<std::size_t>(axis)];
                for (std::size_t pk = 0; pk < idx_.size(); ++pk)
                    if (idx_[pk] == prev) {
                        radial_[k] = radial_[pk].diff(axis);
                        break;
                    }
                break;
            }
        }
    }
}

double MollifierKernel::derivative(int alpha, double y) const {
    if (dim_ != 1) throw DomainError("1-d derivative of a 2-d kernel");
    if (alpha < 0 || alpha > degree_) throw DomainError("kernel derivative order out of range");
    if (std::abs(y) >= 1.0) return 0.0;
    // D^a (q * bump) by Leibniz
    double v = 0.0;
    for (int i = 0; i <= alpha; ++i) {
        double qi = 0.0;  // i-th derivative of q at y
        for (Eigen::Index kk = i; kk < q_.size(); ++kk) {
            double fall = 1.0;
            for (int l = 0; l < i; ++l) fall *= static_cast<double>(kk - l);
            qi += q_[kk] * fall * std::pow(y, static_cast<double>(kk - i));
        }
        v += binomial(alpha, i) * qi * bump_.derivative(alpha - i, y);
    }
    return v;
}

double MollifierKernel::derivative(const std::array<int, 2>& alpha, const Eigen::Vector2d& y) const {
    if (dim_ == 1) return derivative(alpha[0], y[0]);
    if (alpha[0] < 0 || alpha[1] < 0 || alpha[0] + alpha[1] > degree_)
        throw DomainError("kernel derivative order out of range");
    if (y.squaredNorm() >= 1.0) return 0.0;
    // D^alpha (q * G) = sum_{beta <= alpha} C(alpha,beta) D^beta q * D^{alpha-beta} G
    double v = 0.0;
    for (int b1 = 0; b1 <= alpha[0]; ++b1)
        for (int b2 = 0; b2 <= alpha[1]; ++b2) {
            // D^{(b1,b2)} q at y
            double qd = 0.0;
            for (std::size_t k = 0; k < idx_.size(); ++k) {
                const int a1 = idx_[k][0], a2 = idx_[k][1];
                if (a1 < b1 || a2 < b2) continue;
                double fall = 1.0;
                for (int l = 0; l < b1; ++l) fall *= static_cast<double>(a1 - l);
                for (int l = 0; l < b2; ++l) fall *= static_cast<double>(a2 - l);
                qd += q_[static_cast<Eigen::Index>(k)] * fall * std::pow(y[0], a1 - b1) * std::pow(y[1], a2 - b2);
            }
            if (qd == 0.0) continue;
            const std::array<int, 2> rem = {alpha[0] - b1, alpha[1] - b2};
            double gd = 0.0;
            for (std::size_t k = 0; k < idx_.size(); ++k)
                if (idx_[k] == rem) {
                    gd = radial_[k].eval(y);
                    break;
                }
            v += binomial(alpha[0], b1) * binomial(alpha[1], b2) * qd * gd;
        }
    return v;
}

const MollifierKernel& make_kernel(int degree, int dim) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, std::unique_ptr<const MollifierKernel>> cache;
    std::scoped_lock lock(mu);
    auto key = std::make_pair(degree, dim);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<const MollifierKernel>(degree, dim)).first;
    return *it->second;
}

std::vector<double> default_epsilon_ladder(const SampledFunction& f) {
    std::vector<double> eps;
    for (double e = 256.0 * f.spacing(); e >= 4.0 * f.spacing() * (1.0 - 1e-12); e *= 0.5)
        eps.push_back(e);
    return eps;
}

JetExtraction extract_jet(const SampledFunction& f, const Eigen::Vector2d& x, int degree,
                          std::span<const double> epsilons, std::optional<double> boyd_lower) {
    if (epsilons.empty()) throw DomainError("extract_jet: empty epsilon ladder");
    for (std::size_t k = 1; k < epsilons.size(); ++k)
        if (!(epsilons[k] < epsilons[k - 1])) throw DomainError("extract_jet: epsilons must decrease");
    const double h = f.spacing();
    if (epsilons.back() < 3.0 * h * (1.0 - 1e-12))
        throw DomainError("extract_jet: smallest epsilon must be >= 3*spacing");
    const double eps_max = epsilons.front();
    for (int a = 0; a < f.dim(); ++a)
        if (x[a] - eps_max < f.grid().axis_min(a) - 1e-12 * h ||
            x[a] + eps_max > f.grid().axis_max(a) + 1e-12 * h)
            throw DomainError("extract_jet: x is not interior at the largest epsilon");

    const MollifierKernel& kernel = make_kernel(degree, f.dim());
    const auto idx = multi_indices(f.dim(), degree);
    const Eigen::Index m = static_cast<Eigen::Index>(idx.size());
    const Eigen::Index ne = static_cast<Eigen::Index>(epsilons.size());
    Eigen::MatrixXd table(ne, m);

    const GridSpec& g = f.grid();
    const double cellvol = (f.dim() == 1) ? h : h * h;
    for (Eigen::Index ei = 0; ei < ne; ++ei) {
        const double eps = epsilons[static_cast<std::size_t>(ei)];
        // grid points with |x - g| <= eps
        Eigen::Index i0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((x[0] - eps - g.origin[0]) / h)));
        Eigen::Index i1 = std::min<Eigen::Index>(g.shape[0] - 1,
                                                 static_cast<Eigen::Index>(std::floor((x[0] + eps - g.origin[0]) / h)));
        Eigen::Index j0 = 0, j1 = 0;
        if (f.dim() == 2) {
            j0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil((x[1] - eps - g.origin[1]) / h)));
            j1 = std::min<Eigen::Index>(g.shape[1] - 1,
                                        static_cast<Eigen::Index>(std::floor((x[1] + eps - g.origin[1]) / h)));
        }
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(m);
        for (Eigen::Index i = i0; i <= i1; ++i)
            for (Eigen::Index j = j0; j <= j1; ++j) {
                const Eigen::Vector2d gp = g.point(i, j);
                const Eigen::Vector2d arg = (x - gp) / eps;
                if (f.dim() == 2 && arg.squaredNorm() > 1.0) continue;
                if (f.dim() == 1 && std::abs(arg[0]) > 1.0) continue;
                const double fv = f.value(i, j);
                for (Eigen::Index c = 0; c < m; ++c)
                    acc[c] += kernel.derivative(idx[static_cast<std::size_t>(c)], arg) * fv;
            }
        for (Eigen::Index c = 0; c < m; ++c) {
            const int total = idx[static_cast<std::size_t>(c)][0] + idx[static_cast<std::size_t>(c)][1];
            table(ei, c) = acc[c] * cellvol * std::pow(eps, -static_cast<double>(f.dim() + total));
        }
    }

    // divergence check: per-step differences must not grow toward small eps
    const double floor_abs = 1e-8 * (1.0 + f.values().abs().maxCoeff());
    if (ne >= 3) {
        for (Eigen::Index c = 0; c < m; ++c) {
            const double d_first = std::abs(table(1, c) - table(0, c));
            const double d_last = std::abs(table(ne - 1, c) - table(ne - 2, c));
            if (d_last > floor_abs && d_last > 4.0 * std::max(d_first, floor_abs))
                throw ExtractionUnstableError(
                    "per-epsilon derivative values diverge toward small epsilon (multi-index " +
                    std::to_string(idx[static_cast<std::size_t>(c)][0]) + "," +
                    std::to_string(idx[static_cast<std::size_t>(c)][1]) + ")");
        }
    }

    JetExtraction out{PolyJet(f.dim(), x, degree), std::vector<double>(epsilons.begin(), epsilons.end()),
                      table, Eigen::VectorXd::Ones(m), ne >= 2};
    for (Eigen::Index c = 0; c < m; ++c) {
        const int total = idx[static_cast<std::size_t>(c)][0] + idx[static_cast<std::size_t>(c)][1];
        double gamma = 1.0;
        if (boyd_lower) gamma = *boyd_lower - static_cast<double>(total);
        double limit;
        if (ne >= 2 && gamma > 0.0) {
            // least squares for value(eps) = a + b eps^gamma
            double s1 = 0, sx = 0, sxx = 0, sy = 0, sxy = 0;
            for (Eigen::Index ei = 0; ei < ne; ++ei) {
                const double xx = std::pow(epsilons[static_cast<std::size_t>(ei)], gamma);
                const double yy = table(ei, c);
                s1 += 1;
                sx += xx;
                sxx += xx * xx;
                sy += yy;
                sxy += xx * yy;
            }
            const double det = s1 * sxx - sx * sx;
            limit = (det != 0.0) ? (sxx * sy - sx * sxy) / det : table(ne - 1, c);
        } else {
            limit = table(ne - 1, c);
            gamma = 0.0;
        }
        out.rate[c] = gamma;
        // D^alpha(kernel_eps * f)(x) -> D^alpha P(x) = alpha! c_alpha
        double fact = 1.0;
        for (int l = 2; l <= idx[static_cast<std::size_t>(c)][0]; ++l) fact *= l;
        for (int l = 2; l <= idx[static_cast<std::size_t>(c)][1]; ++l) fact *= l;
        out.jet.coeffs()[c] = limit / fact;
    }
    out.extrapolated = ne >= 2;
    return out;
}

}  // namespace czreg
