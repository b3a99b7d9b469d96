#include "czreg/whitney.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace czreg {

int JetField::degree() const {
    return jets.empty() ? 0 : jets.front().degree();
}

void JetField::validate() const {
    if (points.size() < 1) throw DomainError("jet field needs at least one point");
    if (points.size() != jets.size()) throw DomainError("jet field: points/jets size mismatch");
    for (std::size_t i = 0; i + 1 < points.size(); ++i)
        if (!(points[i] < points[i + 1])) throw DomainError("jet field points must strictly increase");
    const int n = jets.front().degree();
    for (std::size_t i = 0; i < jets.size(); ++i) {
        if (jets[i].degree() != n) throw DomainError("jet field jets must share one degree");
        if (jets[i].dim() != 1) throw DomainError("jet field is 1-d");
        if (jets[i].center()[0] != points[i]) throw DomainError("jet center must equal its data point");
    }
    if (!(bound > 0.0)) throw DomainError("jet field bound M must be positive");
}

CompatibilityResult check_compatibility(const JetField& field, double cap_factor) {
    field.validate();
    const int n = field.degree();
    CompatibilityResult res;
    res.cap = cap_factor * field.bound;  // phi(1) = 1 normalization
    for (std::size_t i = 0; i < field.points.size(); ++i)
        for (std::size_t j = 0; j < field.points.size(); ++j) {
            if (i == j) continue;
            const double dist = std::abs(field.points[i] - field.points[j]);
            for (int beta = 0; beta <= n; ++beta) {
                const double y = field.points[j];
                const double diff =
                    std::abs(field.jets[i].derivative(beta, y) - field.jets[j].derivative(beta, y));
                const double denom = field.phi(dist) * std::pow(dist, -static_cast<double>(beta));
                const double q = diff / denom;
                if (q > res.constant) {
                    res.constant = q;
                    res.argmax_i = i;
                    res.argmax_j = j;
                    res.argmax_beta = beta;
                }
            }
        }
    res.within_cap = res.constant <= res.cap;
    return res;
}

namespace {

std::size_t nearest_point(std::span<const double> points, double x) {
    auto it = std::lower_bound(points.begin(), points.end(), x);
    if (it == points.begin()) return 0;
    if (it == points.end()) return points.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - points.begin());
    const std::size_t lo = hi - 1;
    // ties break toward the left
    return (x - points[lo] <= points[hi] - x) ? lo : hi;
}

void push_interval(std::vector<WhitneyInterval>& out, std::span<const double> points, double a, double b) {
    WhitneyInterval iv;
    iv.a = a;
    iv.b = b;
    iv.nearest = nearest_point(points, 0.5 * (a + b));
    out.push_back(iv);
}

// ladder of dyadic intervals filling (lo, hi] shrinking toward `toward`
// (toward == hi) or [lo, hi) shrinking toward lo (toward == lo)
void ladder(std::vector<WhitneyInterval>& out, std::span<const double> points, double lo, double hi,
            bool toward_hi, double min_length) {
    const double span = hi - lo;
    double len = 0.5 * span;
    double outer = toward_hi ? lo : hi;  // far edge of the next interval
    while (len >= min_length) {
        if (toward_hi)
            push_interval(out, points, outer, outer + len);
        else
            push_interval(out, points, outer - len, outer);
        outer = toward_hi ? outer + len : outer - len;
        len *= 0.5;
    }
    // stub adjacent to the data point
    if (toward_hi) {
        if (outer < hi) push_interval(out, points, outer, hi);
    } else {
        if (outer > lo) push_interval(out, points, lo, outer);
    }
}

}  // namespace

std::vector<WhitneyInterval> whitney_decompose(std::span<const double> points, double margin,
                                               double min_length) {
    if (points.empty()) throw DomainError("whitney_decompose needs points");
    if (!(margin > 0.0)) throw DomainError("margin must be positive");
    if (!(min_length > 0.0)) throw DomainError("min_length must be positive");
    std::vector<WhitneyInterval> out;
    // left boundary gap [p0 - margin, p0]: one big interval then a ladder
    // shrinking toward the data point at the right edge
    ladder(out, points, points.front() - margin, points.front(), true, min_length);
    // interior gaps
    for (std::size_t g = 0; g + 1 < points.size(); ++g) {
        const double a = points[g], b = points[g + 1];
        const double L = b - a;
        if (0.25 * L < min_length) {
            // too small to ladder; split at the midpoint
            push_interval(out, points, a, 0.5 * (a + b));
            push_interval(out, points, 0.5 * (a + b), b);
            continue;
        }
        ladder(out, points, a, 0.5 * (a + b), false, min_length);  // shrink toward a
        ladder(out, points, 0.5 * (a + b), b, true, min_length);   // shrink toward b
    }
    // right boundary gap, shrinking toward the data point at the left edge
    ladder(out, points, points.back(), points.back() + margin, false, min_length);
    std::sort(out.begin(), out.end(), [](const WhitneyInterval& x, const WhitneyInterval& y) {
        return x.a < y.a;
    });
    return out;
}

WhitneyExtension extend(const JetField& field, double margin, double cap_factor) {
    field.validate();
    if (field.points.size() >= 2) {
        CompatibilityResult comp = check_compatibility(field, cap_factor);
        if (!comp.within_cap)
            throw CompatibilityError("jet field fails the Whitney compatibility gate (measured " +
                                         std::to_string(comp.constant) + " > cap " +
                                         std::to_string(comp.cap) + ")",
                                     comp.constant);
    }
    WhitneyExtension ext;
    ext.points_ = field.points;
    ext.jets_ = field.jets;
    ext.degree_ = field.degree();
    ext.umin_ = field.points.front() - margin;
    ext.umax_ = field.points.back() + margin;
    const double span = ext.umax_ - ext.umin_;
    ext.intervals_ = whitney_decompose(field.points, margin, 1e-9 * span);
    ext.bump_ = BumpProfile(ext.degree_);
    // slice intervals per gap: gap g spans (points[g-1], points[g])
    const std::size_t ngaps = field.points.size() + 1;
    if (ext.degree_ > 16) throw DomainError("extension degree above 16 is unsupported");
    ext.gap_begin_.assign(ngaps + 1, 0);
    std::size_t iv = 0;
    for (std::size_t g = 0; g < ngaps; ++g) {
        ext.gap_begin_[g] = iv;
        // an interval starting at a data point belongs to the gap right of it
        const double hi = (g < field.points.size()) ? field.points[g]
                                                    : std::numeric_limits<double>::infinity();
        while (iv < ext.intervals_.size() && ext.intervals_[iv].a < hi) ++iv;
    }
    ext.gap_begin_[ngaps] = ext.intervals_.size();
    return ext;
}

WhitneyExtension::Blend WhitneyExtension::locate(double x) const {
    // gap index: number of points strictly below x
    const std::size_t g = static_cast<std::size_t>(
        std::upper_bound(points_.begin(), points_.end(), x) - points_.begin());
    const std::size_t lo = gap_begin_[g], hi = gap_begin_[g + 1];
    if (lo >= hi) return {0, 0};
    // interval containing x within the slice
    std::size_t j = lo;
    {
        std::size_t a = lo, b = hi;
        while (a + 1 < b) {
            const std::size_t mid = (a + b) / 2;
            if (intervals_[mid].a <= x)
                a = mid;
            else
                b = mid;
        }
        j = a;
    }
    const std::size_t first = (j > lo) ? j - 1 : lo;
    const std::size_t last = std::min(hi - 1, j + 1);
    return {first, last - first + 1};
}

void WhitneyExtension::psi(std::size_t interval, double x, int order, double* out) const {
    const WhitneyInterval& iv = intervals_[interval];
    const double c = 0.5 * (iv.a + iv.b);
    const double w = 0.75 * (iv.b - iv.a);  // support half-width of the 1.5-dilated interval
    const double t = (x - c) / w;
    double scale = 1.0;
    for (int k = 0; k <= order; ++k) {
        out[k] = bump_.derivative(k, t) * scale;
        scale /= w;
    }
}

double WhitneyExtension::derivative(int order, double x) const {
    if (order < 0 || order > degree_) throw DomainError("extension derivative order out of range");
    if (x < umin_ - 1e-12 || x > umax_ + 1e-12) throw DomainError("x outside the extension domain");
    // exact jet data on E
    auto it = std::lower_bound(points_.begin(), points_.end(), x);
    if (it != points_.end() && *it == x) {
        const std::size_t i = static_cast<std::size_t>(it - points_.begin());
        return jets_[i].derivative(order, x);
    }
    const Blend blend = locate(x);
    if (blend.count == 0) throw DomainError("x outside the decomposed domain");

    constexpr int kMaxOrder = 16;
    double psi_d[3][kMaxOrder + 1];
    double S[kMaxOrder + 1] = {0};
    std::size_t active[3];
    std::size_t na = 0;
    for (std::size_t k = 0; k < blend.count; ++k) {
        const std::size_t iv = blend.first + k;
        psi(iv, x, order, psi_d[na]);
        if (psi_d[na][0] == 0.0) {
            bool any = false;
            for (int o = 1; o <= order; ++o) any = any || psi_d[na][o] != 0.0;
            if (!any) continue;
        }
        active[na] = iv;
        for (int o = 0; o <= order; ++o) S[o] += psi_d[na][o];
        ++na;
    }
    if (S[0] <= 0.0) throw DomainError("partition of unity vanished (outside every support)");

    // derivatives of T = 1/S via  sum_j C(k,j) S^(j) T^(k-j) = 0
    double T[kMaxOrder + 1];
    T[0] = 1.0 / S[0];
    for (int k = 1; k <= order; ++k) {
        double acc = 0.0;
        for (int j = 1; j <= k; ++j) acc += binomial(k, j) * S[j] * T[k - j];
        T[k] = -T[0] * acc;
    }

    double value = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
        const PolyJet& jet = jets_[intervals_[active[a]].nearest];
        // theta^(j) = sum_i C(j,i) psi^(i) T^(j-i)
        for (int j = 0; j <= order; ++j) {
            double theta_j = 0.0;
            for (int i = 0; i <= j; ++i) theta_j += binomial(j, i) * psi_d[a][i] * T[j - i];
            value += binomial(order, j) * theta_j * jet.derivative(order - j, x);
        }
    }
    return value;
}

double WhitneyExtension::partition_sum(double x) const {
    const std::size_t g = static_cast<std::size_t>(
        std::upper_bound(points_.begin(), points_.end(), x) - points_.begin());
    const std::size_t lo = gap_begin_[g], hi = gap_begin_[g + 1];
    double full = 0.0;
    for (std::size_t iv = lo; iv < hi; ++iv) {
        double v[1];
        psi(iv, x, 0, v);
        full += v[0];
    }
    const Blend blend = locate(x);
    double window = 0.0;
    for (std::size_t k = 0; k < blend.count; ++k) {
        double v[1];
        psi(blend.first + k, x, 0, v);
        window += v[0];
    }
    if (window <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return full / window;
}

BoundCheck verify_bound(const WhitneyExtension& ext, const BoydExpr& phi, int n, int m,
                        int x_samples, int h_samples) {
    const BoydIndices ix = indices(phi);
    if (!(static_cast<double>(n) < ix.lower && ix.upper < static_cast<double>(m)))
        throw DomainError("verify_bound requires n < b(phi) <= bbar(phi) < m");
    if (n > ext.degree()) throw DomainError("derivative order exceeds extension degree");
    const int k = m - n;  // finite-difference order
    const double span = ext.domain_max() - ext.domain_min();
    const double h_max = span / (2.0 * k);
    const double h_min = span * 1e-5;
    BoundCheck out;
    out.x_samples = x_samples;
    out.h_samples = h_samples;
    for (int hi = 0; hi < h_samples; ++hi) {
        const double h = h_min * std::pow(h_max / h_min, static_cast<double>(hi) / (h_samples - 1));
        const double denom = phi(h) * std::pow(h, -static_cast<double>(n));
        const double x_hi = ext.domain_max() - k * h;
        for (int xi = 0; xi < x_samples; ++xi) {
            const double x = ext.domain_min() +
                             (x_hi - ext.domain_min()) * static_cast<double>(xi) / (x_samples - 1);
            double delta = 0.0;
            for (int j = 0; j <= k; ++j)
                delta += ((k - j) % 2 == 0 ? 1.0 : -1.0) * binomial(k, j) * ext.derivative(n, x + j * h);
            const double v = std::abs(delta) / denom;
            if (v > out.constant) {
                out.constant = v;
                out.argmax_x = x;
                out.argmax_h = h;
            }
        }
    }
    return out;
}

}  // namespace czreg
