#include "czreg/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>

#include "czreg/util.hpp"

namespace czreg {

namespace {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string csv_num(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

// grid-aligned probe points between window fractions
std::vector<Eigen::Vector2d> probe_points(const SampledFunction& f, double lo, double hi, int count) {
    const Eigen::Index n = f.grid().shape[0];
    const Eigen::Index i_lo = static_cast<Eigen::Index>(std::llround(lo * static_cast<double>(n - 1)));
    const Eigen::Index i_hi = static_cast<Eigen::Index>(std::llround(hi * static_cast<double>(n - 1)));
    std::vector<Eigen::Vector2d> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double frac = (count == 1) ? 0.5 : static_cast<double>(k) / (count - 1);
        const Eigen::Index i = i_lo + static_cast<Eigen::Index>(
                                          std::llround(frac * static_cast<double>(i_hi - i_lo)));
        out.push_back(f.point(i));
    }
    out.erase(std::unique(out.begin(), out.end(),
                          [](const auto& a, const auto& b) { return a[0] == b[0]; }),
              out.end());
    return out;
}

std::vector<double> dyadic_radii(const SampledFunction& f, int levels) {
    double window = std::numeric_limits<double>::infinity();
    for (int a = 0; a < f.dim(); ++a) window = std::min(window, f.grid().extent(a));
    const double rmin = 8.0 * f.spacing();
    std::vector<double> radii;
    for (double r = window / 4.0; static_cast<int>(radii.size()) < levels && r >= rmin * (1.0 - 1e-12);
         r *= 0.5)
        radii.push_back(r);
    if (radii.size() < 6) throw DomainError("radii ladder too short: refine the grid");
    return radii;
}

double quantile(std::vector<double> v, double q) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    if (i + 1 >= v.size()) return v.back();
    const double w = pos - static_cast<double>(i);
    return v[i] * (1.0 - w) + v[i + 1] * w;
}

int verdict_rank(Verdict v) {
    switch (v) {
        case Verdict::Fail: return 0;
        case Verdict::Indeterminate: return 1;
        default: return 2;
    }
}

}  // namespace

int matched_weierstrass_terms(int b, double finest_scale) {
    if (b < 2 || !(finest_scale > 0.0) || finest_scale >= 1.0)
        throw DomainError("matched_weierstrass_terms: need b >= 2 and finest_scale in (0,1)");
    return static_cast<int>(std::floor(std::log(1.0 / finest_scale) / std::log(static_cast<double>(b)))) + 1;
}

SampledFunction build_generator(const GeneratorSpec& spec) {
    const auto& p = spec.params;
    auto geti = [&](const char* key, Eigen::Index dflt) -> Eigen::Index {
        return p.contains(key) ? p.at(key).get<Eigen::Index>() : dflt;
    };
    auto getd = [&](const char* key, double dflt) -> double {
        return p.contains(key) ? p.at(key).get<double>() : dflt;
    };
    if (spec.kind == "brownian") {
        return gen_brownian(geti("n", (1 << 20) + 1), getd("horizon", 1.0), spec.seed);
    }
    const Eigen::Index n = geti("n", (1 << 18) + 1);
    const GridSpec grid = GridSpec::line(getd("xmin", 0.0), getd("xmax", 1.0), n);
    if (spec.kind == "weierstrass") {
        const double a = getd("a", 0.5);
        const int b = static_cast<int>(geti("b", 3));
        int terms;
        if (p.contains("terms")) {
            terms = static_cast<int>(p.at("terms").get<Eigen::Index>());
        } else {
            terms = matched_weierstrass_terms(b, 8.0 * grid.spacing);
        }
        return gen_weierstrass(a, b, terms, grid);
    }
    if (spec.kind == "cusp") return gen_cusp(getd("x0", 0.5), getd("u", 0.5), grid);
    if (spec.kind == "poly") {
        const int degree = static_cast<int>(geti("degree", 2));
        PolyJet jet(getd("center", 0.0), degree);
        if (p.contains("coeffs")) {
            const auto c = p.at("coeffs").get<std::vector<double>>();
            for (std::size_t k = 0; k < c.size() && k < static_cast<std::size_t>(jet.coeffs().size()); ++k)
                jet.coeffs()[static_cast<Eigen::Index>(k)] = c[k];
        } else {
            for (Eigen::Index k = 0; k < jet.coeffs().size(); ++k)
                jet.coeffs()[k] = 1.0 / static_cast<double>(k + 1);
        }
        return gen_poly(jet, grid);
    }
    if (spec.kind == "sin")
        return sample_function(grid, [](Eigen::Vector2d x) { return std::sin(x[0]); }, "sin");
    if (spec.kind == "exp")
        return sample_function(grid, [](Eigen::Vector2d x) { return std::exp(x[0]); }, "exp");
    throw DomainError("unknown generator kind '" + spec.kind + "'");
}

nlohmann::ordered_json ExperimentReport::to_json() const {
    nlohmann::ordered_json j;
    j["experiment"] = name;
    j["parameters"] = parameters;
    j["results"] = results;
    return j;
}

std::string ExperimentReport::csv() const {
    std::string out;
    for (const auto& line : csv_lines) {
        out += line;
        out += '\n';
    }
    return out;
}

ExperimentReport exp_rademacher(const GeneratorSpec& gen, double p, const BoydExpr& phi, int degree,
                                const RademacherOptions& opts) {
    Stopwatch watch;
    if (std::isinf(p) || !(p > 1.0)) throw DomainError("exp_rademacher requires p in (1, inf)");
    if (fractional_band(phi) != degree)
        throw DomainError("exp_rademacher requires fractional_band(phi) == degree");
    SampledFunction f = build_generator(gen);
    const std::vector<double> radii = dyadic_radii(f, opts.radii_levels);
    const std::vector<Eigen::Vector2d> points = probe_points(f, opts.probe_lo, opts.probe_hi, opts.npoints);

    BatchResult batch =
        batch_membership(f, points, p, phi, degree, radii, opts.thresholds, opts.jobs);

    std::size_t t_pass = 0, decay = 0, usable = 0;
    std::vector<double> seminorms;
    for (const auto& rep : batch.reports) {
        if (!rep.error.empty()) continue;
        ++usable;
        if (rep.verdict_T) ++t_pass;
        seminorms.push_back(rep.seminorm);
        if (!rep.rho_t.empty() && std::isfinite(rep.rho_t.front()) && std::isfinite(rep.rho_t.back()) &&
            rep.rho_t.back() < rep.rho_t.front())
            ++decay;
    }
    if (usable == 0 || static_cast<double>(t_pass) < 0.5 * static_cast<double>(usable))
        throw ExperimentInapplicableError("hypothesis side fails broadly: T-pass fraction " +
                                          std::to_string(static_cast<double>(t_pass) /
                                                         std::max<std::size_t>(usable, 1)));

    ExperimentReport rep;
    rep.name = "rademacher";
    rep.parameters = {{"generator", {{"kind", gen.kind}, {"params", gen.params}, {"seed", gen.seed}}},
                      {"generator_meta", f.meta().params},
                      {"p", p},
                      {"phi", phi.str()},
                      {"degree", degree},
                      {"npoints", points.size()},
                      {"radii", radii},
                      {"delta", opts.thresholds.delta},
                      {"tau", opts.thresholds.tau},
                      {"decay_rule", "rho_t at finest radius < rho_t at coarsest probed radius"}};
    rep.results = {{"usable_points", usable},
                   {"verdict_T_pass_fraction", static_cast<double>(t_pass) / usable},
                   {"conclusion_decay_fraction", static_cast<double>(decay) / usable},
                   {"verdict_t_counts",
                    {{"pass", batch.summary.pass},
                     {"fail", batch.summary.fail},
                     {"indeterminate", batch.summary.indeterminate},
                     {"errored", batch.summary.errored}}},
                   {"near_peak_fraction_per_scale", batch.summary.near_peak_fraction},
                   {"seminorm_quartiles",
                    {quantile(seminorms, 0.25), quantile(seminorms, 0.5), quantile(seminorms, 0.75)}}};
    rep.csv_lines.push_back("x,r,rho_T,rho_t");
    for (const auto& r : batch.reports) {
        if (!r.error.empty()) continue;
        for (std::size_t k = 0; k < r.radii.size(); ++k)
            rep.csv_lines.push_back(csv_num(r.x[0]) + "," + csv_num(r.radii[k]) + "," +
                                    csv_num(r.rho_T[k]) + "," + csv_num(r.rho_t[k]));
    }
    rep.runtime_seconds = watch.seconds();
    return rep;
}

ExperimentReport exp_brownian_lil(std::uint64_t seed, Eigen::Index n_samples, double p,
                                  const BrownianLilOptions& opts) {
    Stopwatch watch;
    if (n_samples < (1 << 16)) throw DomainError("exp_brownian_lil requires n_samples >= 2^16");
    if (!(p >= 1.1) || std::isinf(p)) throw DomainError("exp_brownian_lil requires finite p >= 1.1");
    const BoydExpr phi = BoydExpr::power(0.5) * BoydExpr::log_factor(2, 0.5);
    SampledFunction B = gen_brownian(n_samples, 1.0, seed);

    std::vector<double> radii;
    const double rmin = 8.0 * B.spacing();
    for (double r = std::ldexp(1.0, -opts.coarse_level); r >= rmin * (1.0 - 1e-12); r *= 0.5)
        radii.push_back(r);
    if (radii.size() < 6) throw DomainError("exp_brownian_lil: ladder too short");
    const double rmax = radii.front();
    const std::vector<Eigen::Vector2d> points =
        probe_points(B, rmax, 1.0 - rmax, opts.npoints);

    struct Row {
        double t0 = 0.0, max_ratio0 = 0.0, argmax_r = 0.0, rho1_fine = 0.0, rho1_coarse = 0.0;
        bool ok = false;
    };
    std::vector<Row> rows(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        Row row;
        row.t0 = points[i][0];
        try {
            const auto node = B.nearest_node(points[i]);
            PolyJet pinned(points[i][0], 0);
            pinned.coeffs()[0] = B.value(node[0]);
            OscillationProfile prof0 =
                profile(B, points[i], p, 0, radii, ResidualPolicy::FixedJet, &pinned);
            for (std::size_t k = 0; k < radii.size(); ++k) {
                if (!prof0.valid(k)) continue;
                const double rho = prof0.residual[k] / phi(radii[k]);
                if (rho > row.max_ratio0) {
                    row.max_ratio0 = rho;
                    row.argmax_r = radii[k];
                }
            }
            OscillationProfile prof1 = profile(B, points[i], p, 1, radii, ResidualPolicy::PerBall);
            if (prof1.valid(0) && prof1.valid(radii.size() - 1)) {
                row.rho1_coarse = prof1.residual[0] / phi(radii[0]);
                row.rho1_fine = prof1.residual[radii.size() - 1] / phi(radii.back());
                row.ok = true;
            }
        } catch (const Error&) {
            row.ok = false;
        }
        rows[i] = row;
    }, opts.jobs);

    std::vector<double> maxima;
    std::size_t usable = 0, strict = 0, strong = 0;
    for (const auto& r : rows) {
        if (!r.ok) continue;
        ++usable;
        maxima.push_back(r.max_ratio0);
        if (r.rho1_fine < r.rho1_coarse) ++strict;
        if (r.rho1_fine <= 0.7 * r.rho1_coarse) ++strong;
    }
    if (usable == 0) throw ExperimentInapplicableError("no usable probe points");

    ExperimentReport rep;
    rep.name = "brownian-lil";
    rep.parameters = {{"seed", seed},
                      {"n_samples", n_samples},
                      {"p", p},
                      {"phi", phi.str()},
                      {"npoints", points.size()},
                      {"radii", radii},
                      {"decay_rule", "rho_1 at finest radius vs rho_1 at coarsest probed radius"}};
    rep.results = {{"usable_points", usable},
                   {"max_ratio0_quartiles",
                    {quantile(maxima, 0.25), quantile(maxima, 0.5), quantile(maxima, 0.75)}},
                   {"max_ratio0_median", quantile(maxima, 0.5)},
                   {"asymptotic_reference", std::numbers::sqrt2},
                   {"decay_strict_fraction", static_cast<double>(strict) / usable},
                   {"decay_0.7_fraction", static_cast<double>(strong) / usable}};
    rep.csv_lines.push_back("t0,max_ratio0,argmax_r,rho1_fine,rho1_coarse");
    for (const auto& r : rows) {
        if (!r.ok) continue;
        rep.csv_lines.push_back(csv_num(r.t0) + "," + csv_num(r.max_ratio0) + "," + csv_num(r.argmax_r) +
                                "," + csv_num(r.rho1_fine) + "," + csv_num(r.rho1_coarse));
    }
    rep.runtime_seconds = watch.seconds();
    return rep;
}

ExperimentReport exp_smooth_remark(const GeneratorSpec& gen, const BoydExpr& phi, double p, int degree,
                                   const SmoothRemarkOptions& opts) {
    Stopwatch watch;
    const BoydIndices ix = indices(phi);
    if (!(ix.upper < static_cast<double>(degree + 1)))
        throw DomainError("exp_smooth_remark requires bbar(phi) < degree + 1");
    SampledFunction f = build_generator(gen);
    const std::vector<double> radii = dyadic_radii(f, opts.radii_levels);
    const std::vector<Eigen::Vector2d> points = probe_points(f, opts.probe_lo, opts.probe_hi, opts.npoints);
    const double slope_floor = static_cast<double>(degree + 1) - ix.upper - opts.eta;

    struct Row {
        double x = 0.0, slope = 0.0;
        Verdict verdict = Verdict::Indeterminate;
        bool ok = false;
    };
    std::vector<Row> rows(points.size());
    parallel_for(points.size(), [&](std::size_t i) {
        Row row;
        row.x = points[i][0];
        try {
            OscillationProfile prof = profile(f, points[i], p, degree, radii, ResidualPolicy::PerBall);
            LittleOResult lo = little_o_test(prof, phi, opts.thresholds);
            row.slope = lo.slope;
            row.verdict = lo.verdict;
            row.ok = true;
        } catch (const Error&) {
        }
        rows[i] = row;
    }, opts.jobs);

    std::size_t usable = 0, pass = 0, steep = 0;
    double min_slope = std::numeric_limits<double>::infinity();
    for (const auto& r : rows) {
        if (!r.ok) continue;
        ++usable;
        if (r.verdict == Verdict::Pass) ++pass;
        if (r.slope >= slope_floor) ++steep;
        min_slope = std::min(min_slope, r.slope);
    }
    if (usable == 0) throw ExperimentInapplicableError("no usable probe points");

    ExperimentReport rep;
    rep.name = "smooth-remark";
    rep.parameters = {{"generator", {{"kind", gen.kind}, {"params", gen.params}, {"seed", gen.seed}}},
                      {"p", p},
                      {"phi", phi.str()},
                      {"degree", degree},
                      {"eta", opts.eta},
                      {"slope_floor", slope_floor},
                      {"npoints", points.size()},
                      {"radii", radii}};
    rep.results = {{"usable_points", usable},
                   {"pass_fraction", static_cast<double>(pass) / usable},
                   {"slope_floor_fraction", static_cast<double>(steep) / usable},
                   {"min_slope", min_slope}};
    rep.csv_lines.push_back("x,slope,verdict");
    for (const auto& r : rows)
        if (r.ok)
            rep.csv_lines.push_back(csv_num(r.x) + "," + csv_num(r.slope) + "," + to_string(r.verdict));
    rep.runtime_seconds = watch.seconds();
    return rep;
}

std::vector<GeneratorSpec> default_inclusion_suite(std::uint64_t seed) {
    const Eigen::Index n = (1 << 18) + 1;
    std::vector<GeneratorSpec> suite;
    suite.push_back({"poly", {{"n", n}, {"degree", 2}}, 0});
    suite.push_back({"sin", {{"n", n}, {"xmin", 0.0}, {"xmax", 1.0}}, 0});
    suite.push_back({"cusp", {{"n", n}, {"u", 0.7}, {"x0", 0.5}}, 0});
    suite.push_back({"cusp", {{"n", n}, {"u", 0.55}, {"x0", 0.5}}, 0});
    suite.push_back({"weierstrass", {{"n", n}, {"a", 0.5}, {"b", 3}}, 0});
    suite.push_back({"brownian", {{"n", n}}, seed});
    return suite;
}

ExperimentReport exp_inclusions(std::span<const GeneratorSpec> suite, const BoydExpr& phi, double p,
                                int degree, const InclusionsOptions& opts) {
    Stopwatch watch;
    if (fractional_band(phi) != degree)
        throw DomainError("exp_inclusions requires fractional_band(phi) == degree");
    const BoydIndices ix = indices(phi);
    const BoydExpr phi_upper = BoydExpr::power(ix.upper + opts.eta);
    const BoydExpr phi_lower = BoydExpr::power(ix.lower - opts.eta);

    ExperimentReport rep;
    rep.name = "inclusions";
    rep.parameters = {{"phi", phi.str()},
                      {"p", p},
                      {"degree", degree},
                      {"eta", opts.eta},
                      {"levels",
                       {{"A", phi_upper.str() + " deg " + std::to_string(degree)},
                        {"B", phi.str() + " deg " + std::to_string(degree)},
                        {"C", phi.str() + " deg " + std::to_string(degree + 1)},
                        {"D", phi_lower.str() + " deg " + std::to_string(degree + 1)}}},
                      {"npoints", opts.npoints},
                      {"delta", opts.thresholds.delta},
                      {"tau", opts.thresholds.tau}};
    rep.csv_lines.push_back("generator,x,verdict_A,verdict_B,verdict_C,verdict_D");

    nlohmann::ordered_json per_gen = nlohmann::ordered_json::array();
    std::size_t total_violations = 0;
    std::array<std::size_t, 3> total_witnesses = {0, 0, 0};
    std::array<std::size_t, 3> total_improvements = {0, 0, 0};

    for (const auto& gen : suite) {
        SampledFunction f = build_generator(gen);
        const std::vector<double> radii = dyadic_radii(f, opts.radii_levels);
        const std::vector<Eigen::Vector2d> points =
            probe_points(f, opts.probe_lo, opts.probe_hi, opts.npoints);

        struct Row {
            double x = 0.0;
            std::array<Verdict, 4> v{};
            bool ok = false;
        };
        std::vector<Row> rows(points.size());
        parallel_for(points.size(), [&](std::size_t i) {
            Row row;
            row.x = points[i][0];
            try {
                OscillationProfile prof_n =
                    profile(f, points[i], p, degree, radii, ResidualPolicy::PerBall);
                OscillationProfile prof_n1 =
                    profile(f, points[i], p, degree + 1, radii, ResidualPolicy::PerBall);
                row.v[0] = little_o_test(prof_n, phi_upper, opts.thresholds).verdict;
                row.v[1] = little_o_test(prof_n, phi, opts.thresholds).verdict;
                row.v[2] = little_o_test(prof_n1, phi, opts.thresholds).verdict;
                row.v[3] = little_o_test(prof_n1, phi_lower, opts.thresholds).verdict;
                row.ok = true;
            } catch (const Error&) {
            }
            rows[i] = row;
        }, opts.jobs);

        std::size_t violations = 0;
        std::array<std::size_t, 3> witnesses = {0, 0, 0};
        std::array<std::size_t, 3> improvements = {0, 0, 0};
        std::array<std::array<std::size_t, 3>, 4> counts{};  // level x {fail,indet,pass}
        std::size_t usable = 0;
        for (const auto& row : rows) {
            if (!row.ok) continue;
            ++usable;
            for (int lvl = 0; lvl < 4; ++lvl) ++counts[static_cast<std::size_t>(lvl)][static_cast<std::size_t>(verdict_rank(row.v[static_cast<std::size_t>(lvl)]))];
            for (int arrow = 0; arrow < 3; ++arrow) {
                const Verdict a = row.v[static_cast<std::size_t>(arrow)];
                const Verdict b = row.v[static_cast<std::size_t>(arrow) + 1];
                if (a == Verdict::Pass && b == Verdict::Fail) ++violations;
                if (a == Verdict::Fail && b == Verdict::Pass) ++witnesses[static_cast<std::size_t>(arrow)];
                if (verdict_rank(b) > verdict_rank(a)) ++improvements[static_cast<std::size_t>(arrow)];
            }
            rep.csv_lines.push_back(gen.kind + "," + csv_num(row.x) + "," + to_string(row.v[0]) + "," +
                                    to_string(row.v[1]) + "," + to_string(row.v[2]) + "," +
                                    to_string(row.v[3]));
        }
        total_violations += violations;
        for (int a = 0; a < 3; ++a) {
            total_witnesses[static_cast<std::size_t>(a)] += witnesses[static_cast<std::size_t>(a)];
            total_improvements[static_cast<std::size_t>(a)] += improvements[static_cast<std::size_t>(a)];
        }
        nlohmann::ordered_json gj;
        gj["kind"] = gen.kind;
        gj["params"] = gen.params;
        gj["seed"] = gen.seed;
        gj["usable_points"] = usable;
        gj["violations"] = violations;
        gj["witnesses"] = witnesses;
        gj["verdict_improvements"] = improvements;
        nlohmann::ordered_json cj = nlohmann::ordered_json::array();
        for (int lvl = 0; lvl < 4; ++lvl)
            cj.push_back({{"fail", counts[static_cast<std::size_t>(lvl)][0]},
                          {"indeterminate", counts[static_cast<std::size_t>(lvl)][1]},
                          {"pass", counts[static_cast<std::size_t>(lvl)][2]}});
        gj["level_counts"] = cj;
        per_gen.push_back(gj);
    }

    rep.results = {{"per_generator", per_gen},
                   {"total_violations", total_violations},
                   {"total_witnesses_by_arrow", total_witnesses},
                   {"middle_witnesses", total_witnesses[1]},
                   {"total_verdict_improvements_by_arrow", total_improvements}};
    rep.runtime_seconds = watch.seconds();
    return rep;
}

}  // namespace czreg
