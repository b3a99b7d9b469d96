#include "czreg/boyd.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <vector>

namespace czreg {

BoydExpr BoydExpr::power(double u) {
    if (!std::isfinite(u)) throw DomainError("power exponent must be finite");
    BoydExpr e;
    e.power_ = u;
    return e;
}

BoydExpr BoydExpr::log_factor(int depth, double exponent) {
    if (depth < 1) throw DomainError("log factor depth must be >= 1");
    if (!std::isfinite(exponent)) throw DomainError("log factor exponent must be finite");
    BoydExpr e;
    if (exponent != 0.0) e.logs_[depth] = exponent;
    return e;
}

BoydExpr operator*(const BoydExpr& a, const BoydExpr& b) {
    BoydExpr r = a;
    r.power_ += b.power_;
    for (const auto& [k, v] : b.logs_) {
        double& slot = r.logs_[k];
        slot += v;
        if (slot == 0.0) r.logs_.erase(k);
    }
    return r;
}

BoydExpr BoydExpr::pow(double q) const {
    if (!(q > 0.0)) throw DomainError("weight power requires q > 0");
    BoydExpr r;
    r.power_ = power_ * q;
    for (const auto& [k, v] : logs_) r.logs_[k] = v * q;
    return r;
}

BoydExpr pow(const BoydExpr& phi, double q) { return phi.pow(q); }

double iterated_log(int depth, double t) {
    if (depth < 1) throw DomainError("iterated_log depth must be >= 1");
    if (!(t > 0.0)) throw DomainError("iterated_log requires t > 0");
    double v = 1.0 + std::abs(std::log(t));
    for (int k = 1; k < depth; ++k) v = 1.0 + std::log(v);
    return v;
}

double BoydExpr::operator()(double t) const {
    if (!(t > 0.0)) throw DomainError("Boyd weight requires t > 0");
    double v = std::pow(t, power_);
    for (const auto& [k, a] : logs_) v *= std::pow(iterated_log(k, t), a);
    return v;
}

namespace {

std::string format_real(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::string BoydExpr::str() const {
    std::vector<std::string> factors;
    if (power_ != 0.0 || logs_.empty()) {
        if (power_ == 1.0)
            factors.push_back("t");
        else
            factors.push_back("t^" + format_real(power_));
    }
    for (const auto& [k, a] : logs_) {
        std::string f = "L" + std::to_string(k);
        if (a != 1.0) f += "^" + format_real(a);
        factors.push_back(f);
    }
    std::string out;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) out += " * ";
        out += factors[i];
    }
    return out;
}

namespace {

std::size_t skip_ws(std::string_view s, std::size_t i) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return i;
}

double parse_real(std::string_view s, std::size_t& i) {
    std::size_t start = i;
    double value = 0.0;
    auto res = std::from_chars(s.data() + i, s.data() + s.size(), value);
    if (res.ec != std::errc{}) throw ParseError("expected real exponent", start);
    i = static_cast<std::size_t>(res.ptr - s.data());
    return value;
}

BoydExpr parse_factor(std::string_view s, std::size_t& i) {
    i = skip_ws(s, i);
    if (i >= s.size()) throw ParseError("expected weight factor", i);
    if (s[i] == 't') {
        ++i;
        double u = 1.0;
        if (i < s.size() && s[i] == '^') {
            ++i;
            u = parse_real(s, i);
        }
        return BoydExpr::power(u);
    }
    if (s[i] == 'L') {
        std::size_t start = ++i;
        int depth = 0;
        auto res = std::from_chars(s.data() + i, s.data() + s.size(), depth);
        if (res.ec != std::errc{} || depth < 1) throw ParseError("expected log depth >= 1", start);
        i = static_cast<std::size_t>(res.ptr - s.data());
        double a = 1.0;
        if (i < s.size() && s[i] == '^') {
            ++i;
            a = parse_real(s, i);
        }
        return BoydExpr::log_factor(depth, a);
    }
    throw ParseError("expected 't' or 'L<k>'", i);
}

}  // namespace

BoydExpr parse_weight(std::string_view text) {
    std::size_t i = 0;
    BoydExpr acc = parse_factor(text, i);
    while (true) {
        i = skip_ws(text, i);
        if (i >= text.size()) break;
        if (text[i] != '*') throw ParseError("expected '*' between factors", i);
        ++i;
        acc = acc * parse_factor(text, i);
    }
    return acc;
}

DilationEstimate dilation_detail(const BoydExpr& phi, double t, const DilationGrid& grid) {
    if (!(t > 0.0)) throw DomainError("dilation requires t > 0");
    if (phi.is_pure_power()) {
        DilationEstimate e;
        e.value = std::pow(t, phi.power_exponent());
        e.exact = true;
        return e;
    }
    if (grid.points < 8 || !(grid.s_max > grid.s_min) || !(grid.s_min > 0.0))
        throw DomainError("invalid dilation grid");
    const double log_lo = std::log(grid.s_min);
    const double log_hi = std::log(grid.s_max);
    double best = -std::numeric_limits<double>::infinity();
    int best_i = -1;
    auto ratio = [&](double s) { return phi(s * t) / phi(s); };
    for (int i = 0; i < grid.points; ++i) {
        const double s = std::exp(log_lo + (log_hi - log_lo) * i / (grid.points - 1));
        const double v = ratio(s);
        if (v > best) {
            best = v;
            best_i = i;
        }
    }
    best = std::max(best, ratio(1.0));  // s = 1 dominates phi(t) by definition
    if (!std::isfinite(best)) throw UnboundedDilationError("non-finite dilation estimate");
    if (best_i == 0 || best_i == grid.points - 1) {
        // outward growth at the boundary means the grid did not capture the sup
        const double step = (log_hi - log_lo) / (grid.points - 1);
        const double s_edge = (best_i == 0) ? grid.s_min : grid.s_max;
        const double s_out = (best_i == 0) ? std::exp(std::log(s_edge) - step)
                                           : std::exp(std::log(s_edge) + step);
        if (ratio(s_out) > best * (1.0 + 1e-12))
            throw UnboundedDilationError("dilation supremum grows at grid boundary");
    }
    DilationEstimate e;
    e.value = best;
    e.s_min = grid.s_min;
    e.s_max = grid.s_max;
    e.grid_points = grid.points;
    return e;
}

double dilation(const BoydExpr& phi, double t) { return dilation_detail(phi, t).value; }

BoydIndices indices(const BoydExpr& phi) {
    BoydIndices ix;
    ix.lower = ix.upper = phi.power_exponent();
    ix.method = IndexMethod::Exact;
    ix.uncertainty = 0.0;
    return ix;
}

namespace {

struct FitResult {
    double slope;
    double max_residual;
};

FitResult fit_log_slope(const BoydExpr& phi, const DilationGrid& grid, bool toward_zero) {
    std::vector<double> xs, ys;
    for (int j = 10; j <= 40; ++j) {
        const double t = toward_zero ? std::ldexp(1.0, -j) : std::ldexp(1.0, j);
        const double bar = dilation_detail(phi, t, grid).value;
        if (!(bar > 0.0) || !std::isfinite(bar))
            throw IndexEstimationError("dilation not finite on index ladder");
        xs.push_back(std::log(t));
        ys.push_back(std::log(bar));
    }
    const std::size_t n = xs.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    FitResult r;
    r.slope = sxy / sxx;
    const double intercept = my - r.slope * mx;
    r.max_residual = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        r.max_residual = std::max(r.max_residual, std::abs(ys[i] - (intercept + r.slope * xs[i])));
    return r;
}

}  // namespace

BoydIndices numeric_indices(const BoydExpr& phi, const DilationGrid& grid) {
    FitResult lo = fit_log_slope(phi, grid, true);
    FitResult hi = fit_log_slope(phi, grid, false);
    BoydIndices ix;
    ix.lower = lo.slope;
    ix.upper = hi.slope;
    ix.method = IndexMethod::Numeric;
    ix.uncertainty = std::max(lo.max_residual, hi.max_residual);
    if (!std::isfinite(ix.lower) || !std::isfinite(ix.upper) || ix.uncertainty > 0.5)
        throw IndexEstimationError("index fit residual too large (lower " +
                                   std::to_string(ix.lower) + ", upper " +
                                   std::to_string(ix.upper) + ", residual " +
                                   std::to_string(ix.uncertainty) + ")");
    return ix;
}

Admissibility admissible(const BoydIndices& ix, double p, int dim) {
    if (dim != 1 && dim != 2) throw DomainError("dimension must be 1 or 2");
    if (!(p >= 1.0)) throw DomainError("p must lie in [1, inf]");
    const double threshold = std::isinf(p) ? 0.0 : -static_cast<double>(dim) / p;
    if (ix.lower - ix.uncertainty > threshold) return Admissibility::True;
    if (ix.lower + ix.uncertainty <= threshold) return Admissibility::False;
    return Admissibility::Indeterminate;
}

Admissibility admissible(const BoydExpr& phi, double p, int dim) {
    return admissible(indices(phi), p, dim);
}

int fractional_band(const BoydIndices& ix) {
    const double lo = ix.lower - ix.uncertainty;
    const double hi = ix.upper + ix.uncertainty;
    const int n = static_cast<int>(std::floor(lo));
    if (n < 0 || !(static_cast<double>(n) < lo) || !(hi < static_cast<double>(n) + 1.0))
        throw NoBandError("indices [" + std::to_string(ix.lower) + ", " + std::to_string(ix.upper) +
                          "] do not lie strictly inside an integer band");
    return n;
}

int fractional_band(const BoydExpr& phi) { return fractional_band(indices(phi)); }

}  // namespace czreg
