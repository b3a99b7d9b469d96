#include "czreg/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "czreg/util.hpp"

namespace czreg {

bool OscillationProfile::valid(std::size_t k) const {
    return k < residual.size() && std::isfinite(residual[k]);
}

std::size_t OscillationProfile::valid_count() const {
    std::size_t n = 0;
    for (std::size_t k = 0; k < residual.size(); ++k)
        if (valid(k)) ++n;
    return n;
}

std::vector<double> default_radii(const SampledFunction& f, const Eigen::Vector2d& x, int levels) {
    double window = std::numeric_limits<double>::infinity();
    double margin = std::numeric_limits<double>::infinity();
    for (int a = 0; a < f.dim(); ++a) {
        window = std::min(window, f.grid().extent(a));
        margin = std::min({margin, x[a] - f.grid().axis_min(a), f.grid().axis_max(a) - x[a]});
    }
    const double rmin = 8.0 * f.spacing();
    double r = std::min(window / 4.0, margin);
    std::vector<double> out;
    for (int k = 0; k < levels && r >= rmin * (1.0 - 1e-12); ++k, r *= 0.5) out.push_back(r);
    if (out.empty()) throw DomainError("no admissible radii: window too small around x");
    return out;
}

OscillationProfile profile(const SampledFunction& f, const Eigen::Vector2d& x, double p, int degree,
                           std::span<const double> radii, ResidualPolicy policy, const PolyJet* jet) {
    if (radii.empty()) throw DomainError("profile: empty radii ladder");
    for (std::size_t k = 1; k < radii.size(); ++k)
        if (!(radii[k] < radii[k - 1])) throw DomainError("profile: radii must strictly decrease");
    if (policy == ResidualPolicy::FixedJet && jet == nullptr)
        throw DomainError("profile: fixed-jet policy requires a jet");

    OscillationProfile out;
    out.x = x;
    out.p = p;
    out.degree = degree;
    out.dim = f.dim();
    out.policy = policy;
    out.radii.assign(radii.begin(), radii.end());
    out.residual.assign(radii.size(), std::numeric_limits<double>::quiet_NaN());
    out.errors.assign(radii.size(), "");
    if (policy == ResidualPolicy::FixedJet) out.jets.push_back(*jet);

    const double d_over_p = std::isinf(p) ? 0.0 : static_cast<double>(f.dim()) / p;
    for (std::size_t k = 0; k < radii.size(); ++k) {
        const BallSpec ball{x, radii[k], p};
        try {
            double res;
            if (policy == ResidualPolicy::PerBall) {
                BestPoly bp = best_poly(f, ball, degree);
                res = bp.residual;
                out.jets.push_back(std::move(bp.jet));
            } else {
                res = lp_ball_norm_residual(f, *jet, ball);
            }
            out.residual[k] = std::pow(radii[k], -d_over_p) * res;
        } catch (const Error& e) {
            out.errors[k] = e.what();  // entry stays missing, batch goes on
            if (policy == ResidualPolicy::PerBall) out.jets.emplace_back(f.dim(), x, degree);
        }
    }
    return out;
}

SeminormEstimate seminorm(const OscillationProfile& prof, const BoydExpr& phi) {
    const Admissibility adm = admissible(phi, prof.p, prof.dim);
    if (adm != Admissibility::True)
        throw DomainError("seminorm requires an admissible weight (b(phi) > -d/p)");
    SeminormEstimate est;
    for (std::size_t k = 0; k < prof.radii.size(); ++k) {
        if (!prof.valid(k)) continue;
        const double v = prof.residual[k] / phi(prof.radii[k]);
        if (v > est.value) {
            est.value = v;
            est.argmax_radius = prof.radii[k];
        }
    }
    return est;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Fail: return "fail";
        default: return "indeterminate";
    }
}

namespace {

struct RhoCurve {
    std::vector<double> rho;        // aligned with radii, NaN for missing
    std::vector<double> log_r_fine, log_rho_fine;
    double rho_min = 0.0, rho_max = 0.0;
    std::size_t nvalid = 0;
};

RhoCurve rho_curve(const OscillationProfile& prof, const BoydExpr& phi) {
    RhoCurve c;
    c.rho.assign(prof.radii.size(), std::numeric_limits<double>::quiet_NaN());
    std::vector<std::size_t> valid;
    for (std::size_t k = 0; k < prof.radii.size(); ++k) {
        if (!prof.valid(k)) continue;
        c.rho[k] = prof.residual[k] / phi(prof.radii[k]);
        valid.push_back(k);
    }
    c.nvalid = valid.size();
    if (valid.empty()) return c;
    c.rho_max = 0.0;
    for (std::size_t k : valid) c.rho_max = std::max(c.rho_max, c.rho[k]);
    c.rho_min = c.rho[valid.back()];  // smallest valid radius
    // finer half of the valid radii
    const std::size_t half = valid.size() / 2;
    for (std::size_t i = half; i < valid.size(); ++i) {
        const std::size_t k = valid[i];
        if (c.rho[k] > 0.0) {
            c.log_r_fine.push_back(std::log(prof.radii[k]));
            c.log_rho_fine.push_back(std::log(c.rho[k]));
        }
    }
    return c;
}

}  // namespace

LittleOResult little_o_test(const OscillationProfile& prof, const BoydExpr& phi,
                            const LittleOOptions& opts) {
    if (prof.valid_count() < 6) throw DomainError("little_o_test needs >= 6 valid radii");
    RhoCurve c = rho_curve(prof, phi);
    LittleOResult res;
    res.rho = c.rho;
    if (c.rho_max <= 1e-300) {  // exactly representable residual zero
        res.verdict = Verdict::Pass;
        res.rho_min_over_max = 0.0;
        return res;
    }
    res.rho_min_over_max = c.rho_min / c.rho_max;
    if (res.rho_min_over_max <= 1e-13) {  // decayed to relative zero
        res.verdict = Verdict::Pass;
        return res;
    }
    if (c.log_r_fine.size() >= 2) {
        res.slope = fit_line(c.log_r_fine, c.log_rho_fine).slope;
    }
    if (res.slope >= opts.delta && c.rho_min <= opts.tau * c.rho_max)
        res.verdict = Verdict::Pass;
    else if (res.slope <= opts.delta / 4.0 && c.rho_min >= (1.0 - opts.tau) * c.rho_max)
        res.verdict = Verdict::Fail;
    else
        res.verdict = Verdict::Indeterminate;
    return res;
}

PExponentEstimate p_exponent(const SampledFunction& f, const Eigen::Vector2d& x, double p, int n_max,
                             std::span<const double> radii) {
    if (radii.size() < 6) throw DomainError("p_exponent needs >= 6 radii");
    OscillationProfile prof = profile(f, x, p, n_max, radii, ResidualPolicy::PerBall);
    PExponentEstimate est;
    std::vector<double> lr, lres;
    std::size_t nonpositive = 0, valid = 0;
    for (std::size_t k = 0; k < prof.radii.size(); ++k) {
        if (!prof.valid(k)) continue;
        ++valid;
        if (prof.residual[k] <= 1e-300) {
            ++nonpositive;
            continue;
        }
        lr.push_back(std::log(prof.radii[k]));
        lres.push_back(std::log(prof.residual[k]));
    }
    if (valid == 0 || nonpositive * 2 >= valid) {
        est.infinite = true;
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }
    // finer half of the surviving radii
    const std::size_t half = lr.size() / 2;
    std::vector<double> xs(lr.begin() + static_cast<std::ptrdiff_t>(half), lr.end());
    std::vector<double> ys(lres.begin() + static_cast<std::ptrdiff_t>(half), lres.end());
    if (xs.size() < 2) {
        est.infinite = true;
        est.value = std::numeric_limits<double>::infinity();
        return est;
    }
    LineFit fit = fit_line(xs, ys);
    est.value = fit.slope;
    est.ci_halfwidth = 2.0 * fit.slope_stderr;
    est.at_degree_ceiling = est.value >= static_cast<double>(n_max + 1) - 0.25;
    return est;
}

namespace {

bool bounded_T_verdict(const std::vector<double>& rho, double delta, double* slope_out) {
    // split valid entries into coarser/finer halves
    std::vector<std::size_t> valid;
    for (std::size_t k = 0; k < rho.size(); ++k)
        if (std::isfinite(rho[k])) valid.push_back(k);
    if (valid.size() < 4) return false;
    const std::size_t half = valid.size() / 2;
    double coarse_max = 0.0, fine_max = 0.0;
    for (std::size_t i = 0; i < valid.size(); ++i) {
        const double v = rho[valid[i]];
        if (i < half)
            coarse_max = std::max(coarse_max, v);
        else
            fine_max = std::max(fine_max, v);
    }
    *slope_out = 0.0;
    if (fine_max <= 1e-300) return true;
    return fine_max <= 2.0 * coarse_max;
}

}  // namespace

BatchResult batch_membership(const SampledFunction& f, std::span<const Eigen::Vector2d> points,
                             double p, const BoydExpr& phi, int degree, std::span<const double> radii,
                             const LittleOOptions& opts, int jobs) {
    BatchResult out;
    out.reports.resize(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        MembershipReport rep;
        rep.x = points[i];
        rep.radii.assign(radii.begin(), radii.end());
        try {
            OscillationProfile prof_T = profile(f, points[i], p, degree, radii, ResidualPolicy::PerBall);
            OscillationProfile prof_t = profile(f, points[i], p, degree + 1, radii, ResidualPolicy::PerBall);
            rep.seminorm = seminorm(prof_T, phi).value;
            RhoCurve cT = rho_curve(prof_T, phi);
            rep.rho_T = cT.rho;
            if (cT.log_r_fine.size() >= 2) rep.T_slope = fit_line(cT.log_r_fine, cT.log_rho_fine).slope;
            double dummy = 0.0;
            rep.verdict_T = bounded_T_verdict(cT.rho, opts.delta, &dummy) || rep.T_slope >= -opts.delta;
            LittleOResult lo = little_o_test(prof_t, phi, opts);
            rep.verdict_t = lo.verdict;
            rep.t_slope = lo.slope;
            rep.rho_t = lo.rho;
            // p-exponent from the same degree-(n+1) per-ball residuals
            std::vector<double> lr, lres;
            for (std::size_t k = 0; k < prof_t.radii.size(); ++k)
                if (prof_t.valid(k) && prof_t.residual[k] > 1e-300) {
                    lr.push_back(std::log(prof_t.radii[k]));
                    lres.push_back(std::log(prof_t.residual[k]));
                }
            if (lr.size() >= 4) {
                const std::size_t half = lr.size() / 2;
                std::vector<double> xs(lr.begin() + static_cast<std::ptrdiff_t>(half), lr.end());
                std::vector<double> ys(lres.begin() + static_cast<std::ptrdiff_t>(half), lres.end());
                rep.p_exponent = fit_line(xs, ys).slope;
            } else {
                rep.p_exponent = std::numeric_limits<double>::infinity();
            }
        } catch (const Error& e) {
            rep.error = e.what();
        }
        out.reports[i] = std::move(rep);
    }, jobs);

    std::sort(out.reports.begin(), out.reports.end(),
              [](const MembershipReport& a, const MembershipReport& b) {
                  return a.x[0] < b.x[0] || (a.x[0] == b.x[0] && a.x[1] < b.x[1]);
              });

    BatchSummary& s = out.summary;
    s.radii.assign(radii.begin(), radii.end());
    s.near_peak_fraction.assign(radii.size(), 0.0);
    std::size_t counted = 0;
    for (const auto& rep : out.reports) {
        if (!rep.error.empty()) {
            ++s.errored;
            continue;
        }
        ++counted;
        switch (rep.verdict_t) {
            case Verdict::Pass: ++s.pass; break;
            case Verdict::Fail: ++s.fail; break;
            default: ++s.indeterminate; break;
        }
        double peak = 0.0;
        for (double v : rep.rho_t)
            if (std::isfinite(v)) peak = std::max(peak, v);
        if (peak <= 0.0) continue;
        for (std::size_t k = 0; k < rep.rho_t.size() && k < s.near_peak_fraction.size(); ++k)
            if (std::isfinite(rep.rho_t[k]) && rep.rho_t[k] >= (1.0 - opts.tau) * peak)
                s.near_peak_fraction[k] += 1.0;
    }
    if (counted > 0)
        for (double& v : s.near_peak_fraction) v /= static_cast<double>(counted);
    return out;
}

}  // namespace czreg
