#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "czreg/boyd.hpp"
#include "czreg/lp_approx.hpp"

namespace czreg {

enum class ResidualPolicy { PerBall, FixedJet };

// Normalized local oscillation r^{-d/p} ||f - P_r||_{L^p(B(x,r))} over a
// ladder of radii.  Per-ball policy re-fits the minimizer at every radius
// (the infimum); fixed-jet pins one polynomial for all radii.
struct OscillationProfile {
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    double p = 2.0;
    int degree = 0;
    int dim = 1;
    ResidualPolicy policy = ResidualPolicy::PerBall;
    std::vector<double> radii;        // strictly decreasing
    std::vector<double> residual;     // NaN marks a missing entry
    std::vector<std::string> errors;  // per-radius notes, "" when clean
    std::vector<PolyJet> jets;        // per radius (per-ball) or a single entry (fixed-jet)

    bool valid(std::size_t k) const;
    std::size_t valid_count() const;
};

// Dyadic ladder from window/4 downward: at least 8*spacing, at most `levels`
// entries, clipped so balls stay inside the window around x.
std::vector<double> default_radii(const SampledFunction& f, const Eigen::Vector2d& x, int levels = 12);

OscillationProfile profile(const SampledFunction& f, const Eigen::Vector2d& x, double p, int degree,
                           std::span<const double> radii, ResidualPolicy policy,
                           const PolyJet* jet = nullptr);

struct SeminormEstimate {
    double value = 0.0;          // max over probed radii of residual/phi(r)
    double argmax_radius = 0.0;
    bool lower_bound = true;     // a finite ladder only bounds the true sup from below
};

// requires admissible(phi, p, dim); throws DomainError otherwise
SeminormEstimate seminorm(const OscillationProfile& prof, const BoydExpr& phi);

enum class Verdict { Pass, Fail, Indeterminate };
std::string to_string(Verdict v);

struct LittleOOptions {
    double delta = 0.05;  // decades per decade
    double tau = 0.2;
};

struct LittleOResult {
    Verdict verdict = Verdict::Indeterminate;
    double slope = 0.0;           // log-log slope of rho over the finer half
    double rho_min_over_max = 0.0;
    std::vector<double> rho;      // residual/phi(r), aligned with profile radii
};

// pass: slope >= delta and rho(r_min) <= tau * max rho
// fail: slope <= delta/4 and rho(r_min) >= (1-tau) * max rho
// else indeterminate (a numerical test cannot certify a limit).
// Needs >= 6 valid radii.
LittleOResult little_o_test(const OscillationProfile& prof, const BoydExpr& phi,
                            const LittleOOptions& opts = {});

struct PExponentEstimate {
    double value = 0.0;
    double ci_halfwidth = 0.0;  // 2 x slope standard error
    bool at_degree_ceiling = false;
    bool infinite = false;      // exact polynomial: residuals vanish
};

// slope of log residual(r) against log r (per-ball, degree n_max) over the
// finer half of the ladder
PExponentEstimate p_exponent(const SampledFunction& f, const Eigen::Vector2d& x, double p, int n_max,
                             std::span<const double> radii);

struct MembershipReport {
    Eigen::Vector2d x = Eigen::Vector2d::Zero();
    double seminorm = 0.0;
    bool verdict_T = false;
    double T_slope = 0.0;
    Verdict verdict_t = Verdict::Indeterminate;
    double t_slope = 0.0;
    double p_exponent = 0.0;
    std::vector<double> radii;
    std::vector<double> rho_T;  // degree-n ratios
    std::vector<double> rho_t;  // degree-(n+1) ratios
    std::string error;          // per-point failures are recorded, not fatal
};

struct BatchSummary {
    std::size_t pass = 0, fail = 0, indeterminate = 0, errored = 0;
    std::vector<double> radii;
    // fraction of points whose degree-(n+1) ratio at this scale is still
    // within (1-tau) of its own peak
    std::vector<double> near_peak_fraction;
};

struct BatchResult {
    std::vector<MembershipReport> reports;  // sorted by x
    BatchSummary summary;
};

// T-membership probed with degree-n jets, t-membership with degree-(n+1)
// (the Rademacher asymmetry); verdict_T is the boundedness surrogate:
// max rho over the finer half <= 2 x max over the coarser half, or the
// finer-half slope >= -delta.
BatchResult batch_membership(const SampledFunction& f, std::span<const Eigen::Vector2d> points,
                             double p, const BoydExpr& phi, int degree, std::span<const double> radii,
                             const LittleOOptions& opts = {}, int jobs = 0);

}  // namespace czreg
