// czreg: local regularity analysis of sampled functions.
// Subcommands: generate, analyze, jet, extend, boyd, experiment.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "czreg/experiments.hpp"
#include "czreg/mollifier.hpp"
#include "czreg/oscillation.hpp"
#include "czreg/signals.hpp"
#include "czreg/util.hpp"
#include "czreg/version.hpp"
#include "czreg/whitney.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

double parse_p(const std::string& s) {
    if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
        return std::stod(s);
    } catch (const std::exception&) {
        throw CLI::ValidationError("--p", "expected a number or 'inf'");
    }
}

fs::path resolve_out(const fs::path& p) {
    if (p.is_absolute()) return p;
    if (const char* dir = std::getenv("CZREG_OUT_DIR"); dir && *dir) return fs::path(dir) / p;
    return p;
}

json tool_envelope(const json& config) {
    json j;
    j["tool"] = "czreg";
    j["version"] = czreg::kVersion;
    j["config"] = config;
    return j;
}

void write_json_atomic(const fs::path& path, const json& j) {
    czreg::write_file_atomic(path, j.dump(2) + "\n");
}

struct GenerateArgs {
    std::string kind;
    Eigen::Index n = (1 << 18) + 1;
    std::uint64_t seed = 0;
    double a = 0.5, u = 0.5, x0 = 0.5, horizon = 1.0, xmin = 0.0, xmax = 1.0;
    int b = 3, terms = 0, degree = 2;
    std::vector<double> coeffs;
    std::string out;
    std::string csv;
};

int run_generate(const GenerateArgs& args) {
    czreg::GeneratorSpec spec;
    spec.kind = args.kind;
    spec.seed = args.seed;
    spec.params = {{"n", args.n}, {"xmin", args.xmin}, {"xmax", args.xmax}};
    if (args.kind == "brownian") spec.params = {{"n", args.n}, {"horizon", args.horizon}};
    if (args.kind == "weierstrass") {
        spec.params["a"] = args.a;
        spec.params["b"] = args.b;
        if (args.terms > 0) spec.params["terms"] = args.terms;
    }
    if (args.kind == "cusp") {
        spec.params["u"] = args.u;
        spec.params["x0"] = args.x0;
    }
    if (args.kind == "poly") {
        spec.params["degree"] = args.degree;
        if (!args.coeffs.empty()) spec.params["coeffs"] = args.coeffs;
    }
    czreg::SampledFunction f = czreg::build_generator(spec);
    const fs::path out = resolve_out(args.out);
    // write via temp + rename for atomicity
    const fs::path tmp = out.parent_path() / (out.filename().string() + ".tmp");
    fs::create_directories(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    czreg::save_szf(f, tmp);
    fs::rename(tmp, out);
    if (!args.csv.empty()) {
        const fs::path cout = resolve_out(args.csv);
        const fs::path ctmp = cout.parent_path() / (cout.filename().string() + ".tmp");
        czreg::save_csv(f, ctmp);
        fs::rename(ctmp, cout);
    }
    std::cerr << "wrote " << out.string() << " (" << f.count() << " samples)\n";
    return 0;
}

struct AnalyzeArgs {
    std::string in, phi_text, p_text = "2", policy = "per-ball", out;
    int degree = 0, points = 64, radii_levels = 12, jobs = 0;
    double delta = 0.05, tau = 0.2;
};

int run_analyze(const AnalyzeArgs& args) {
    const czreg::SampledFunction f = czreg::load_szf(args.in);
    const czreg::BoydExpr phi = czreg::parse_weight(args.phi_text);
    const double p = parse_p(args.p_text);
    czreg::LittleOOptions thr{args.delta, args.tau};

    // probe points: grid-aligned, inside the analyzable margin
    std::vector<Eigen::Vector2d> pts;
    {
        const Eigen::Index n = f.grid().shape[0];
        const Eigen::Index lo = n / 4, hi = n - 1 - n / 4;
        for (int k = 0; k < args.points; ++k) {
            const double frac = (args.points == 1) ? 0.5 : static_cast<double>(k) / (args.points - 1);
            pts.push_back(f.point(lo + static_cast<Eigen::Index>(std::llround(
                                           frac * static_cast<double>(hi - lo)))));
        }
    }
    const std::vector<double> radii = czreg::default_radii(f, pts.front(), args.radii_levels);
    czreg::BatchResult batch =
        czreg::batch_membership(f, pts, p, phi, args.degree, radii, thr, args.jobs);

    json config{{"in", args.in},         {"phi", phi.str()},
                {"p", args.p_text},      {"degree", args.degree},
                {"policy", args.policy}, {"points", args.points},
                {"radii_levels", args.radii_levels}, {"delta", args.delta},
                {"tau", args.tau}};
    json report = tool_envelope(config);
    json entries = json::array();
    for (const auto& r : batch.reports) {
        json e;
        e["point"] = r.x[0];
        if (!r.error.empty()) {
            e["error"] = r.error;
            entries.push_back(e);
            continue;
        }
        e["seminorm"] = r.seminorm;
        e["verdict_T"] = r.verdict_T;
        e["verdict_t"] = czreg::to_string(r.verdict_t);
        e["p_exponent"] = r.p_exponent;
        json ratios = json::array();
        for (std::size_t k = 0; k < r.radii.size(); ++k)
            ratios.push_back({{"r", r.radii[k]}, {"rho", r.rho_t[k]}});
        e["ratios"] = ratios;
        entries.push_back(e);
    }
    report["points"] = entries;
    report["summary"] = {{"pass", batch.summary.pass},
                         {"fail", batch.summary.fail},
                         {"indeterminate", batch.summary.indeterminate},
                         {"errored", batch.summary.errored}};
    write_json_atomic(resolve_out(args.out), report);
    return 0;
}

struct JetArgs {
    std::string in, out;
    double x = 0.5, eps_max = 0.0;
    int degree = 1, eps_levels = 0;
};

int run_jet(const JetArgs& args) {
    const czreg::SampledFunction f = czreg::load_szf(args.in);
    std::vector<double> eps;
    if (args.eps_max > 0.0 && args.eps_levels > 0) {
        double e = args.eps_max;
        for (int k = 0; k < args.eps_levels && e >= 3.0 * f.spacing(); ++k, e *= 0.5) eps.push_back(e);
    } else {
        eps = czreg::default_epsilon_ladder(f);
    }
    czreg::JetExtraction ex = czreg::extract_jet(f, {args.x, 0.0}, args.degree, eps);
    json config{{"in", args.in}, {"x", args.x}, {"degree", args.degree},
                {"eps_max", args.eps_max}, {"eps_levels", args.eps_levels}};
    json report = tool_envelope(config);
    report["coefficients"] =
        std::vector<double>(ex.jet.coeffs().data(), ex.jet.coeffs().data() + ex.jet.coeffs().size());
    json per_eps = json::array();
    for (std::size_t ei = 0; ei < ex.epsilons.size(); ++ei) {
        json row;
        row["epsilon"] = ex.epsilons[ei];
        std::vector<double> vals;
        for (Eigen::Index c = 0; c < ex.per_epsilon.cols(); ++c)
            vals.push_back(ex.per_epsilon(static_cast<Eigen::Index>(ei), c));
        row["derivatives"] = vals;
        per_eps.push_back(row);
    }
    report["per_epsilon"] = per_eps;
    report["extrapolation_rates"] =
        std::vector<double>(ex.rate.data(), ex.rate.data() + ex.rate.size());
    if (args.out.empty()) {
        std::cout << report.dump(2) << "\n";
    } else {
        write_json_atomic(resolve_out(args.out), report);
    }
    return 0;
}

struct ExtendArgs {
    std::string jets, phi_text, out;
    int degree = 0, m = 1, samples = 2048;
    double bound = 1.0, margin = 1.0;
    bool verify = false;
};

int run_extend(const ExtendArgs& args) {
    std::ifstream in(args.jets);
    if (!in) throw czreg::Error("cannot open: " + args.jets);
    json jfield = json::parse(in);
    czreg::JetField field;
    field.phi = czreg::parse_weight(args.phi_text);
    field.bound = args.bound;
    for (const auto& entry : jfield) {
        const double x = entry.at("x").get<double>();
        czreg::PolyJet jet(x, args.degree);
        const auto coeffs = entry.at("coeffs").get<std::vector<double>>();
        for (std::size_t k = 0; k < coeffs.size() && k < static_cast<std::size_t>(jet.coeffs().size()); ++k)
            jet.coeffs()[static_cast<Eigen::Index>(k)] = coeffs[k];
        field.points.push_back(x);
        field.jets.push_back(jet);
    }
    czreg::WhitneyExtension ext = czreg::extend(field, args.margin);
    czreg::GridSpec grid = czreg::GridSpec::line(ext.domain_min(), ext.domain_max(), args.samples);
    czreg::SampledFunction samples = czreg::sample_function(
        grid, [&](Eigen::Vector2d x) { return ext(x[0]); }, "whitney-extension");
    const fs::path out = resolve_out(args.out);
    const fs::path tmp = out.parent_path() / (out.filename().string() + ".tmp");
    fs::create_directories(out.parent_path().empty() ? fs::path(".") : out.parent_path());
    czreg::save_szf(samples, tmp);
    fs::rename(tmp, out);
    std::cerr << "wrote " << out.string() << "\n";
    if (args.verify) {
        czreg::BoundCheck check = czreg::verify_bound(ext, field.phi, args.degree, args.m);
        std::cout << "measured C = " << check.constant << " (argmax x = " << check.argmax_x
                  << ", h = " << check.argmax_h << ")\n";
    }
    return 0;
}

struct BoydArgs {
    std::string phi_text;
    bool show_indices = false, numeric = false, band = false;
    std::optional<double> eval_t, dilation_t, adm_p;
    int dim = 1;
    std::optional<double> power_q;
};

int run_boyd(const BoydArgs& args) {
    const czreg::BoydExpr phi = czreg::parse_weight(args.phi_text);
    std::cout << "phi = " << phi.str() << "\n";
    if (args.eval_t) std::cout << "phi(" << *args.eval_t << ") = " << phi(*args.eval_t) << "\n";
    if (args.dilation_t) {
        const auto d = czreg::dilation_detail(phi, *args.dilation_t);
        std::cout << "dilation(" << *args.dilation_t << ") = " << d.value
                  << (d.exact ? " (exact)" : " (grid sup)") << "\n";
    }
    if (args.show_indices) {
        const auto exact = czreg::indices(phi);
        std::cout << "indices (exact): lower = " << exact.lower << ", upper = " << exact.upper << "\n";
        if (args.numeric) {
            const auto num = czreg::numeric_indices(phi);
            std::cout << "indices (numeric): lower = " << num.lower << ", upper = " << num.upper
                      << ", uncertainty = " << num.uncertainty << "\n";
        }
    }
    if (args.adm_p) {
        const auto a = czreg::admissible(phi, *args.adm_p, args.dim);
        const char* text = a == czreg::Admissibility::True
                               ? "true"
                               : (a == czreg::Admissibility::False ? "false" : "indeterminate");
        std::cout << "admissible(p = " << *args.adm_p << ", d = " << args.dim << ") = " << text << "\n";
    }
    if (args.band) {
        const int n = czreg::fractional_band(phi);
        std::cout << "fractional band: n = " << n << "\n";
    }
    if (args.power_q) std::cout << "phi^" << *args.power_q << " = " << phi.pow(*args.power_q).str() << "\n";
    return 0;
}

struct ExperimentArgs {
    std::string name;
    std::uint64_t seed = 20250810;
    Eigen::Index n = 0;
    std::string phi_text, p_text = "2", kind = "weierstrass", out = ".";
    int degree = 0, points = 0, jobs = 0;
    double a = 0.5, u = 0.6, x0 = 0.5;
    int b = 3, terms = 0;
};

int run_experiment(const ExperimentArgs& args) {
    czreg::ExperimentReport rep;
    const double p = parse_p(args.p_text);
    if (args.name == "rademacher") {
        czreg::GeneratorSpec gen;
        gen.kind = args.kind;
        gen.seed = args.seed;
        if (args.n > 0) gen.params["n"] = args.n;
        if (args.kind == "weierstrass") {
            gen.params["a"] = args.a;
            gen.params["b"] = args.b;
            if (args.terms > 0) gen.params["terms"] = args.terms;
        }
        if (args.kind == "cusp") {
            gen.params["u"] = args.u;
            gen.params["x0"] = args.x0;
        }
        czreg::BoydExpr phi = args.phi_text.empty()
                                  ? czreg::BoydExpr::power(std::log(2.0) / std::log(3.0))
                                  : czreg::parse_weight(args.phi_text);
        czreg::RademacherOptions opts;
        if (args.points > 0) opts.npoints = args.points;
        opts.jobs = args.jobs;
        rep = czreg::exp_rademacher(gen, p, phi, args.degree, opts);
    } else if (args.name == "brownian-lil") {
        czreg::BrownianLilOptions opts;
        if (args.points > 0) opts.npoints = args.points;
        opts.jobs = args.jobs;
        rep = czreg::exp_brownian_lil(args.seed, args.n > 0 ? args.n : (1 << 20) + 1, p, opts);
    } else if (args.name == "smooth-remark") {
        czreg::GeneratorSpec gen;
        gen.kind = args.kind.empty() ? "sin" : args.kind;
        gen.seed = args.seed;
        if (args.n > 0) gen.params["n"] = args.n;
        czreg::BoydExpr phi = args.phi_text.empty() ? czreg::BoydExpr::power(0.5)
                                                    : czreg::parse_weight(args.phi_text);
        czreg::SmoothRemarkOptions opts;
        if (args.points > 0) opts.npoints = args.points;
        opts.jobs = args.jobs;
        rep = czreg::exp_smooth_remark(gen, phi, p, args.degree, opts);
    } else if (args.name == "inclusions") {
        czreg::BoydExpr phi = args.phi_text.empty()
                                  ? czreg::BoydExpr::power(0.5) * czreg::BoydExpr::log_factor(2, 0.5)
                                  : czreg::parse_weight(args.phi_text);
        czreg::InclusionsOptions opts;
        if (args.points > 0) opts.npoints = args.points;
        opts.jobs = args.jobs;
        const auto suite = czreg::default_inclusion_suite(args.seed);
        rep = czreg::exp_inclusions(suite, phi, p, args.degree, opts);
    } else {
        throw CLI::ValidationError("experiment",
                                   "unknown experiment '" + args.name +
                                       "' (rademacher|brownian-lil|smooth-remark|inclusions)");
    }
    const fs::path dir = resolve_out(args.out);
    json wrapped = tool_envelope(rep.parameters);
    wrapped["report"] = rep.to_json();
    write_json_atomic(dir / (rep.name + ".report.json"), wrapped);
    czreg::write_file_atomic(dir / (rep.name + ".ratios.csv"), rep.csv());
    std::cerr << rep.name << ": done in " << rep.runtime_seconds << " s; report at "
              << (dir / (rep.name + ".report.json")).string() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"czreg: weighted local-regularity analysis of sampled functions"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* cgen = app.add_subcommand("generate", "generate a sampled test function (.szf)");
    cgen->add_option("--kind", gen.kind, "brownian|weierstrass|cusp|poly|sin|exp")->required();
    cgen->add_option("--n", gen.n, "sample count");
    cgen->add_option("--seed", gen.seed, "RNG seed (brownian)");
    cgen->add_option("--a", gen.a, "weierstrass amplitude ratio in (0,1)");
    cgen->add_option("--b", gen.b, "weierstrass frequency base (integer >= 2)");
    cgen->add_option("--terms", gen.terms, "weierstrass terms (default: matched to grid)");
    cgen->add_option("--u", gen.u, "cusp exponent");
    cgen->add_option("--x0", gen.x0, "cusp location");
    cgen->add_option("--horizon", gen.horizon, "brownian horizon");
    cgen->add_option("--xmin", gen.xmin, "window start");
    cgen->add_option("--xmax", gen.xmax, "window end");
    cgen->add_option("--degree", gen.degree, "poly degree");
    cgen->add_option("--coeffs", gen.coeffs, "poly coefficients (centered)");
    cgen->add_option("--out", gen.out, "output .szf path")->required();
    cgen->add_option("--csv", gen.csv, "also export values as CSV");

    AnalyzeArgs an;
    auto* can = app.add_subcommand("analyze", "membership analysis over probe points");
    can->add_option("--in", an.in, "input .szf")->required();
    can->add_option("--phi", an.phi_text, "weight, e.g. 't^0.5 * L2^0.5'")->required();
    can->add_option("--p", an.p_text, "integrability exponent or 'inf'");
    can->add_option("--degree", an.degree, "T-side polynomial degree n");
    can->add_option("--policy", an.policy, "per-ball|fixed-jet (report notes the policy)");
    can->add_option("--points", an.points, "number of probe points");
    can->add_option("--radii-levels", an.radii_levels, "dyadic radii count");
    can->add_option("--delta", an.delta, "little-o slope threshold");
    can->add_option("--tau", an.tau, "little-o drop threshold");
    can->add_option("--jobs", an.jobs, "worker threads (0 = auto)");
    can->add_option("--out", an.out, "report JSON path")->required();

    JetArgs jt;
    auto* cjet = app.add_subcommand("jet", "extract a jet by mollification");
    cjet->add_option("--in", jt.in, "input .szf")->required();
    cjet->add_option("--x", jt.x, "extraction point")->required();
    cjet->add_option("--degree", jt.degree, "jet degree");
    cjet->add_option("--eps-max", jt.eps_max, "largest epsilon");
    cjet->add_option("--eps-levels", jt.eps_levels, "dyadic epsilon count");
    cjet->add_option("--out", jt.out, "report JSON path (stdout when omitted)");

    ExtendArgs ex;
    auto* cext = app.add_subcommand("extend", "Whitney extension from a jet field");
    cext->add_option("--jets", ex.jets, "jets JSON: [{\"x\":..,\"coeffs\":[..]},...]")->required();
    cext->add_option("--phi", ex.phi_text, "weight")->required();
    cext->add_option("--degree", ex.degree, "jet degree n");
    cext->add_option("--m", ex.m, "difference order bound m > bbar(phi)");
    cext->add_option("--bound", ex.bound, "uniform bound M");
    cext->add_option("--margin", ex.margin, "domain margin beyond the data");
    cext->add_option("--samples", ex.samples, "output sample count");
    cext->add_option("--out", ex.out, "output .szf path")->required();
    cext->add_flag("--verify", ex.verify, "print the measured finite-difference constant");

    BoydArgs bd;
    auto* cboyd = app.add_subcommand("boyd", "weight diagnostics");
    cboyd->add_option("--phi", bd.phi_text, "weight")->required();
    cboyd->add_flag("--indices", bd.show_indices, "print Boyd indices");
    cboyd->add_flag("--numeric", bd.numeric, "also run the numeric index path");
    cboyd->add_flag("--band", bd.band, "print the fractional band");
    double eval_t = 0, dil_t = 0, adm_p = 0, pow_q = 0;
    auto* oeval = cboyd->add_option("--eval", eval_t, "evaluate phi(t)");
    auto* odil = cboyd->add_option("--dilation", dil_t, "evaluate the dilation at t");
    auto* oadm = cboyd->add_option("--admissible", adm_p, "admissibility at this p");
    cboyd->add_option("--dim", bd.dim, "dimension for admissibility");
    auto* opow = cboyd->add_option("--power", pow_q, "print phi^q");

    ExperimentArgs xp;
    auto* cexp = app.add_subcommand("experiment", "run a named experiment");
    cexp->add_option("name", xp.name, "rademacher|brownian-lil|smooth-remark|inclusions")->required();
    cexp->add_option("--seed", xp.seed, "RNG seed");
    cexp->add_option("--n", xp.n, "sample count");
    cexp->add_option("--phi", xp.phi_text, "weight (experiment default when omitted)");
    cexp->add_option("--p", xp.p_text, "integrability exponent");
    cexp->add_option("--degree", xp.degree, "band degree n");
    cexp->add_option("--kind", xp.kind, "generator kind (rademacher/smooth-remark)");
    cexp->add_option("--a", xp.a, "weierstrass a");
    cexp->add_option("--b", xp.b, "weierstrass b");
    cexp->add_option("--terms", xp.terms, "weierstrass terms");
    cexp->add_option("--u", xp.u, "cusp exponent");
    cexp->add_option("--x0", xp.x0, "cusp location");
    cexp->add_option("--points", xp.points, "probe points");
    cexp->add_option("--jobs", xp.jobs, "worker threads (0 = auto)");
    cexp->add_option("--out", xp.out, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (*cgen) return run_generate(gen);
        if (*can) return run_analyze(an);
        if (*cjet) return run_jet(jt);
        if (*cext) return run_extend(ex);
        if (*cboyd) {
            if (*oeval) bd.eval_t = eval_t;
            if (*odil) bd.dilation_t = dil_t;
            if (*oadm) bd.adm_p = adm_p;
            if (*opow) bd.power_q = pow_q;
            return run_boyd(bd);
        }
        if (*cexp) return run_experiment(xp);
    } catch (const czreg::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const czreg::FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const czreg::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
