#include "czreg/lp_approx.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace czreg {

std::vector<Eigen::Index> ball_points(const SampledFunction& f, const BallSpec& ball) {
    if (!(ball.radius > 0.0)) throw DomainError("ball radius must be positive");
    const GridSpec& g = f.grid();
    const double h = g.spacing;
    const double slack = h * 1e-9;
    for (int a = 0; a < g.dim; ++a) {
        if (ball.center[a] - ball.radius < g.axis_min(a) - 0.5 * h - slack ||
            ball.center[a] + ball.radius > g.axis_max(a) + 0.5 * h + slack)
            throw DomainError("ball exceeds the sampled window");
    }
    std::vector<Eigen::Index> out;
    const double r2 = (ball.radius + slack) * (ball.radius + slack);
    auto axis_range = [&](int a) {
        const double lo = (ball.center[a] - ball.radius - slack - g.origin[a]) / h;
        const double hi = (ball.center[a] + ball.radius + slack - g.origin[a]) / h;
        Eigen::Index i0 = std::max<Eigen::Index>(0, static_cast<Eigen::Index>(std::ceil(lo)));
        Eigen::Index i1 = std::min<Eigen::Index>(g.shape[static_cast<std::size_t>(a)] - 1,
                                                 static_cast<Eigen::Index>(std::floor(hi)));
        return std::pair<Eigen::Index, Eigen::Index>(i0, i1);
    };
    const auto [i0, i1] = axis_range(0);
    if (g.dim == 1) {
        for (Eigen::Index i = i0; i <= i1; ++i) out.push_back(i);
        return out;
    }
    const auto [j0, j1] = axis_range(1);
    for (Eigen::Index i = i0; i <= i1; ++i)
        for (Eigen::Index j = j0; j <= j1; ++j) {
            const Eigen::Vector2d p = g.point(i, j);
            if ((p - ball.center).squaredNorm() <= r2) out.push_back(i * g.shape[1] + j);
        }
    return out;
}

namespace {

double cell_volume(const SampledFunction& f) {
    return (f.dim() == 1) ? f.spacing() : f.spacing() * f.spacing();
}

double norm_from_residuals(const Eigen::VectorXd& res, double p, double cellvol) {
    if (std::isinf(p)) return res.size() ? res.cwiseAbs().maxCoeff() : 0.0;
    double s = 0.0;
    for (Eigen::Index i = 0; i < res.size(); ++i) s += std::pow(std::abs(res[i]), p);
    return std::pow(s * cellvol, 1.0 / p);
}

Eigen::Vector2d point_of(const SampledFunction& f, Eigen::Index flat) {
    const Eigen::Index cols = f.grid().shape[1];
    return f.point(flat / cols, flat % cols);
}

}  // namespace

double lp_ball_norm(const SampledFunction& f, const BallSpec& ball) {
    if (!(ball.p >= 1.0)) throw DomainError("p must lie in [1, inf]");
    const auto pts = ball_points(f, ball);
    if (pts.empty()) throw InsufficientSamplesError("ball contains no grid points");
    Eigen::VectorXd vals(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) vals[static_cast<Eigen::Index>(k)] = f.values()[pts[k]];
    return norm_from_residuals(vals, ball.p, cell_volume(f));
}

double lp_ball_norm_residual(const SampledFunction& f, const PolyJet& jet, const BallSpec& ball) {
    if (!(ball.p >= 1.0)) throw DomainError("p must lie in [1, inf]");
    const auto pts = ball_points(f, ball);
    if (pts.empty()) throw InsufficientSamplesError("ball contains no grid points");
    Eigen::VectorXd vals(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t k = 0; k < pts.size(); ++k) {
        const Eigen::Index id = pts[k];
        vals[static_cast<Eigen::Index>(k)] = f.values()[id] - jet(point_of(f, id));
    }
    return norm_from_residuals(vals, ball.p, cell_volume(f));
}

namespace detail {

// Dual LP of  min e  s.t.  -e <= f - A c <= e :
//   max  sum_j cost_j w_j   s.t.  [col_j] w = e_{m+1},  w >= 0,
// where col_j = [-A_j; 1] with cost f_j (residual pinned at +e) and
// col_{n+j} = [A_j; 1] with cost -f_j (pinned at -e).  The optimal dual
// multipliers y of the equality rows carry the primal solution:
// c = -y_{1..m}, e = y_{m+1}.
std::pair<Eigen::VectorXd, double> chebyshev_fit(const Eigen::MatrixXd& A, const Eigen::VectorXd& f) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = A.cols();
    const Eigen::Index rows = m + 1;
    const double tol = 1e-11;

    std::vector<Eigen::Index> basis(static_cast<std::size_t>(rows));
    for (Eigen::Index i = 0; i < rows; ++i) basis[static_cast<std::size_t>(i)] = 2 * n + i;  // artificials
    Eigen::VectorXd xb = Eigen::VectorXd::Zero(rows);
    xb[m] = 1.0;
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(rows, rows);

    auto column = [&](Eigen::Index j, Eigen::VectorXd& out) {
        out.resize(rows);
        if (j < n) {
            out.head(m) = -A.row(j).transpose();
            out[m] = 1.0;
        } else if (j < 2 * n) {
            out.head(m) = A.row(j - n).transpose();
            out[m] = 1.0;
        } else {
            out.setZero();
            out[j - 2 * n] = 1.0;
        }
    };
    auto cost = [&](Eigen::Index j, bool phase1) -> double {
        if (j >= 2 * n) return phase1 ? -1.0 : 0.0;
        if (phase1) return 0.0;
        return (j < n) ? f[j] : -f[j - n];
    };

    Eigen::VectorXd col(rows), dir(rows), cb(rows), y(rows);
    const Eigen::Index max_iter = 500 * (rows + 2) + 128;
    const Eigen::Index bland_after = 80 * (rows + 2);

    auto run_phase = [&](bool phase1) {
        for (Eigen::Index iter = 0;; ++iter) {
            if (iter > max_iter) throw ConditioningError("chebyshev_fit: simplex iteration limit");
            for (Eigen::Index i = 0; i < rows; ++i)
                cb[i] = cost(basis[static_cast<std::size_t>(i)], phase1);
            Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
            y = lu.transpose().solve(cb);
            const Eigen::VectorXd Ay = A * y.head(m);
            // reduced costs: block 1 (j<n): c_j + A_j.y_head - y_m
            //                block 2      : c_j - A_j.y_head - y_m
            Eigen::VectorXd red1, red2;
            if (phase1) {
                red1 = Ay.array() - y[m];
                red2 = -Ay.array() - y[m];
            } else {
                red1 = (f + Ay).array() - y[m];
                red2 = (-f - Ay).array() - y[m];
            }
            Eigen::Index enter = -1;
            const bool bland = iter > bland_after;
            double best = tol;
            for (Eigen::Index j = 0; j < 2 * n; ++j) {
                const double d = (j < n) ? red1[j] : red2[j - n];
                if (d > best) {
                    best = d;
                    enter = j;
                    if (bland) break;
                }
                if (bland && d > tol) {
                    enter = j;
                    break;
                }
            }
            if (enter < 0) return;
            column(enter, col);
            dir = lu.solve(col);
            Eigen::Index leave = -1;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (Eigen::Index i = 0; i < rows; ++i) {
                if (dir[i] > tol) {
                    const double ratio = xb[i] / dir[i];
                    if (ratio < best_ratio * (1.0 - 1e-12) - 1e-300) {
                        best_ratio = ratio;
                        leave = i;
                    } else if (leave >= 0 && ratio <= best_ratio * (1.0 + 1e-12) + 1e-300 &&
                               basis[static_cast<std::size_t>(i)] > basis[static_cast<std::size_t>(leave)]) {
                        leave = i;  // kick artificials (largest indices) first on ties
                    }
                }
            }
            if (leave < 0) throw ConditioningError("chebyshev_fit: unbounded direction");
            xb -= best_ratio * dir;
            xb = xb.cwiseMax(0.0);
            xb[leave] = best_ratio;
            basis[static_cast<std::size_t>(leave)] = enter;
            column(enter, col);
            B.col(leave) = col;
        }
    };

    run_phase(true);
    double art_sum = 0.0;
    for (Eigen::Index i = 0; i < rows; ++i)
        if (basis[static_cast<std::size_t>(i)] >= 2 * n) art_sum += xb[i];
    if (art_sum > 1e-7) throw ConditioningError("chebyshev_fit: phase-1 infeasible");

    // drive zero-valued artificials out of the basis where possible
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (basis[static_cast<std::size_t>(i)] < 2 * n) continue;
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
        Eigen::Index found = -1;
        for (Eigen::Index j = 0; j < 2 * n && found < 0; ++j) {
            column(j, col);
            dir = lu.solve(col);
            if (std::abs(dir[i]) > 1e-7) found = j;
        }
        if (found >= 0) {
            column(found, col);
            basis[static_cast<std::size_t>(i)] = found;
            B.col(i) = col;
            // degenerate swap: xb[i] stays 0
        }
        // else: redundant row; the artificial stays basic at zero with cost 0
    }

    run_phase(false);

    for (Eigen::Index i = 0; i < rows; ++i) cb[i] = cost(basis[static_cast<std::size_t>(i)], false);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(B);
    y = lu.transpose().solve(cb);
    const double e_dual = std::max(0.0, y[m]);

    // deterministic minimum-norm refinement on the tight basis equations
    Eigen::Index nb = 0;
    for (Eigen::Index i = 0; i < rows; ++i)
        if (basis[static_cast<std::size_t>(i)] < 2 * n) ++nb;
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    if (nb > 0) {
        Eigen::MatrixXd E(nb, m);
        Eigen::VectorXd rhs(nb);
        Eigen::Index r = 0;
        for (Eigen::Index i = 0; i < rows; ++i) {
            const Eigen::Index j = basis[static_cast<std::size_t>(i)];
            if (j >= 2 * n) continue;
            if (j < n) {
                E.row(r) = A.row(j);
                rhs[r] = f[j] - e_dual;
            } else {
                E.row(r) = A.row(j - n);
                rhs[r] = f[j - n] + e_dual;
            }
            ++r;
        }
        c = E.completeOrthogonalDecomposition().solve(rhs);
    }
    const Eigen::VectorXd c_dual = -y.head(m);
    const double att_ref = (f - A * c).cwiseAbs().maxCoeff();
    const double att_dual = (f - A * c_dual).cwiseAbs().maxCoeff();
    if (att_dual < att_ref - 1e-12 * (1.0 + att_ref)) return {c_dual, att_dual};
    return {c, att_ref};
}

}  // namespace detail

BestPoly best_poly(const SampledFunction& f, const BallSpec& ball, int degree,
                   const BestPolyOptions& opts) {
    if (degree < 0) throw DomainError("degree must be >= 0");
    const bool p_inf = std::isinf(ball.p);
    if (!p_inf && !(ball.p >= 1.1))
        throw DomainError("best_poly requires p >= 1.1 or p = inf (IRLS degeneracy below)");
    const auto pts = ball_points(f, ball);
    const Eigen::Index m = poly_space_dim(f.dim(), degree);
    if (static_cast<Eigen::Index>(pts.size()) < m)
        throw InsufficientSamplesError("ball holds " + std::to_string(pts.size()) +
                                       " grid points, need " + std::to_string(m));
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    const auto idx = multi_indices(f.dim(), degree);

    // design in the radius-scaled monomial basis ((g - x)/r)^alpha
    Eigen::MatrixXd A(n, m);
    Eigen::VectorXd rhs(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Vector2d d = (point_of(f, pts[static_cast<std::size_t>(k)]) - ball.center) / ball.radius;
        for (Eigen::Index c = 0; c < m; ++c)
            A(k, c) = std::pow(d[0], idx[static_cast<std::size_t>(c)][0]) *
                      std::pow(d[1], idx[static_cast<std::size_t>(c)][1]);
        rhs[k] = f.values()[pts[static_cast<std::size_t>(k)]];
    }

    const double cellvol = cell_volume(f);
    auto to_jet = [&](const Eigen::VectorXd& scaled) {
        PolyJet jet(f.dim(), ball.center, degree);
        for (Eigen::Index c = 0; c < m; ++c) {
            const int total = idx[static_cast<std::size_t>(c)][0] + idx[static_cast<std::size_t>(c)][1];
            jet.coeffs()[c] = scaled[c] / std::pow(ball.radius, total);
        }
        return jet;
    };

    if (p_inf) {
        auto [c, e] = detail::chebyshev_fit(A, rhs);
        return {to_jet(c), e, 0};
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    qr.setThreshold(1e-10);
    if (qr.rank() < m)
        throw ConditioningError("degenerate point configuration: design rank " +
                                std::to_string(qr.rank()) + " < " + std::to_string(m));
    Eigen::VectorXd c = qr.solve(rhs);
    Eigen::VectorXd res = rhs - A * c;

    if (ball.p == 2.0) {
        return {to_jet(c), norm_from_residuals(res, 2.0, cellvol), 0};
    }

    // IRLS for p in (1, inf), warm-started from the p=2 fit
    const double p = ball.p;
    const double scale = rhs.cwiseAbs().maxCoeff() + 1.0;
    const double floor_r = 1e-14 * scale;
    double prev = norm_from_residuals(res, p, cellvol);
    int it = 0;
    for (; it < opts.irls_max_iter; ++it) {
        Eigen::VectorXd w(n);
        for (Eigen::Index i = 0; i < n; ++i)
            w[i] = std::pow(std::max(std::abs(res[i]), floor_r), (p - 2.0) / 2.0);
        Eigen::MatrixXd Aw = w.asDiagonal() * A;
        Eigen::VectorXd bw = w.asDiagonal() * rhs;
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> wqr(Aw);
        if (wqr.rank() < m) throw ConditioningError("IRLS: weighted design lost rank");
        c = wqr.solve(bw);
        res = rhs - A * c;
        const double cur = norm_from_residuals(res, p, cellvol);
        if (std::abs(cur - prev) <= opts.irls_tol * std::max(cur, 1e-300)) {
            return {to_jet(c), cur, it + 1};
        }
        prev = cur;
    }
    throw IterationLimitError("IRLS did not converge in " + std::to_string(opts.irls_max_iter) +
                                  " iterations",
                              BestPoly{to_jet(c), prev, it});
}

}  // namespace czreg
