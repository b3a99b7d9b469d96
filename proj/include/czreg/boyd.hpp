#pragma once

#include <map>
#include <string>
#include <string_view>

#include "czreg/errors.hpp"

namespace czreg {

// Weight function phi(t) = t^u * prod_k L_k(t)^{a_k}, where
//   L_1(t) = 1 + |log t|,   L_{k+1}(t) = 1 + log L_k(t).
// The grammar (powers, iterated-log factors, products, powers of
// expressions) is closed under * and ^, so expressions are kept in this
// canonical product form.  Every expressible weight satisfies phi(1) = 1,
// is continuous and positive on (0,inf), and has equal exact Boyd indices
// b(phi) = bbar(phi) = u.
class BoydExpr {
public:
    BoydExpr() = default;  // the constant weight 1

    static BoydExpr power(double u);
    // L_depth(t)^exponent, depth >= 1
    static BoydExpr log_factor(int depth, double exponent);

    friend BoydExpr operator*(const BoydExpr& a, const BoydExpr& b);
    BoydExpr pow(double q) const;  // phi^q, q > 0

    // eval; throws DomainError for t <= 0
    double operator()(double t) const;

    double power_exponent() const { return power_; }
    const std::map<int, double>& log_exponents() const { return logs_; }
    bool is_pure_power() const { return logs_.empty(); }

    // canonical text form, re-parseable by parse_weight
    std::string str() const;

    friend bool operator==(const BoydExpr&, const BoydExpr&) = default;

private:
    double power_ = 0.0;
    std::map<int, double> logs_;  // depth -> exponent, zeros erased
};

// phi^q as a free function
BoydExpr pow(const BoydExpr& phi, double q);

// iterated logarithm L_k(t); k >= 1, t > 0
double iterated_log(int depth, double t);

// Grammar: factors `t`, `t^u`, `Lk`, `Lk^a` joined with `*`; u, a real
// literals; whitespace allowed.  Throws ParseError citing the byte position.
BoydExpr parse_weight(std::string_view text);

// Geometric search grid for the dilation supremum.  The point s = 1 is
// always included so that the estimate dominates phi(t) itself.
struct DilationGrid {
    double s_min = 1e-12;
    double s_max = 1e12;
    int points = 4096;
};

struct DilationEstimate {
    double value = 0.0;
    bool exact = false;  // true for pure powers
    double s_min = 1.0, s_max = 1.0;
    int grid_points = 0;
};

// Dilation function phibar(t) = sup_{s>0} phi(st)/phi(s).  Exact for pure
// powers (phibar = t^u); otherwise a supremum over the geometric grid,
// reported with the grid bounds.  Throws UnboundedDilationError when the
// maximizer sits on the grid boundary with outward growth.
DilationEstimate dilation_detail(const BoydExpr& phi, double t, const DilationGrid& grid = {});
double dilation(const BoydExpr& phi, double t);

enum class IndexMethod { Exact, Numeric };

struct BoydIndices {
    double lower = 0.0;  // b(phi)
    double upper = 0.0;  // bbar(phi)
    IndexMethod method = IndexMethod::Exact;
    double uncertainty = 0.0;
};

// Exact path: indices of the power part (log factors do not move the limit
// of log phibar(t)/log t).  Always available for the grammar.
BoydIndices indices(const BoydExpr& phi);

// Numeric path: least-squares fit of log phibar(t) against log t over
// t = 2^{-10..-40} (lower) and 2^{10..40} (upper); uncertainty is the
// maximum fit residual.  Throws IndexEstimationError on divergence.
BoydIndices numeric_indices(const BoydExpr& phi, const DilationGrid& grid = {});

enum class Admissibility { True, False, Indeterminate };

// True iff b(phi) > -d/p within the uncertainty margin.
Admissibility admissible(const BoydIndices& ix, double p, int dim);
Admissibility admissible(const BoydExpr& phi, double p, int dim);

// The unique n in N_0 with n < b(phi) <= bbar(phi) < n+1.  Throws
// NoBandError for integer or band-straddling indices.
int fractional_band(const BoydIndices& ix);
int fractional_band(const BoydExpr& phi);

}  // namespace czreg
