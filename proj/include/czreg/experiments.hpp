#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "czreg/oscillation.hpp"
#include "czreg/signals.hpp"

namespace czreg {

struct GeneratorSpec {
    std::string kind;  // brownian | weierstrass | cusp | poly | sin | exp
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
};

SampledFunction build_generator(const GeneratorSpec& spec);

// Largest term count whose finest series component b^{-(terms-1)} stays no
// finer than the given scale (unresolvable terms only alias into samples).
int matched_weierstrass_terms(int b, double finest_scale);

// Seeded, reproducible experiment outcome.  Wall-clock runtime is kept out
// of the serialized report so identical configurations serialize to
// identical bytes.
struct ExperimentReport {
    std::string name;
    nlohmann::ordered_json parameters;
    nlohmann::ordered_json results;
    std::vector<std::string> csv_lines;  // first line is the header
    double runtime_seconds = 0.0;

    nlohmann::ordered_json to_json() const;
    std::string csv() const;
};

struct RademacherOptions {
    int npoints = 256;
    int radii_levels = 16;
    double probe_lo = 0.3, probe_hi = 0.7;  // window fractions
    LittleOOptions thresholds;
    int jobs = 0;
};

// Hypothesis side: degree-n membership ratios bounded (verdict_T) with
// finite seminorms; conclusion side: degree-(n+1) little-o verdicts and the
// full-span decay comparison rho(r_finest) < rho(r_coarsest).
// Requires fractional_band(phi) == degree and p in (1, inf).
ExperimentReport exp_rademacher(const GeneratorSpec& gen, double p, const BoydExpr& phi, int degree,
                                const RademacherOptions& opts = {});

struct BrownianLilOptions {
    int npoints = 512;
    int coarse_level = 2;  // coarsest radius 2^-coarse_level
    int jobs = 0;
};

// Example statistics for the iterated-logarithm weight t^1/2 L2^1/2:
// (a) degree-0 fixed-jet ratios with P = B(t0), their per-point maxima over
//     the dyadic ladder (the asymptotic constant is sqrt(2));
// (b) degree-1 per-ball ratios and their full-span decay fractions.
ExperimentReport exp_brownian_lil(std::uint64_t seed, Eigen::Index n_samples, double p,
                                  const BrownianLilOptions& opts = {});

struct SmoothRemarkOptions {
    int npoints = 65;
    int radii_levels = 12;
    double eta = 0.1;
    double probe_lo = 0.3, probe_hi = 0.7;
    LittleOOptions thresholds;
    int jobs = 0;
};

// For C^{n+1} generators with bbar(phi) < n+1: degree-n little-o passes
// everywhere with ratio decay slope at least n+1-bbar(phi)-eta.
ExperimentReport exp_smooth_remark(const GeneratorSpec& gen, const BoydExpr& phi, double p, int degree,
                                   const SmoothRemarkOptions& opts = {});

struct InclusionsOptions {
    double eta = 0.2;
    int npoints = 128;
    int radii_levels = 16;
    double probe_lo = 0.3, probe_hi = 0.7;
    LittleOOptions thresholds;
    int jobs = 0;
};

// Verdict chain over the four levels
//   A = (t^{bbar+eta}, n), B = (phi, n), C = (phi, n+1), D = (t^{b-eta}, n+1):
// zero tolerated violations (pass at k and fail at k+1); strictness
// witnesses are counted per arrow as (fail at k, pass at k+1), and verdict
// improvements (strictly better at k+1) are reported alongside.
ExperimentReport exp_inclusions(std::span<const GeneratorSpec> suite, const BoydExpr& phi, double p,
                                int degree, const InclusionsOptions& opts = {});

std::vector<GeneratorSpec> default_inclusion_suite(std::uint64_t seed);

}  // namespace czreg
