#include "czreg/grid.hpp"

#include <algorithm>
#include <cmath>

namespace czreg {

void GridSpec::validate() const {
    if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid spacing must be positive");
    if (shape[0] < 1 || shape[1] < 1) throw DomainError("grid shape must be positive");
    if (dim == 1 && shape[1] != 1) throw DomainError("1-d grid requires shape[1] == 1");
    if (!origin.allFinite()) throw DomainError("grid origin must be finite");
}

GridSpec GridSpec::line(double lo, double hi, Eigen::Index n) {
    if (n < 2 || !(hi > lo)) throw DomainError("line grid requires n >= 2 and hi > lo");
    GridSpec g;
    g.dim = 1;
    g.origin = {lo, 0.0};
    g.spacing = (hi - lo) / static_cast<double>(n - 1);
    g.shape = {n, 1};
    return g;
}

GridSpec GridSpec::cells(double lo, double hi, Eigen::Index n) {
    if (n < 1 || !(hi > lo)) throw DomainError("cell grid requires n >= 1 and hi > lo");
    GridSpec g;
    g.dim = 1;
    g.spacing = (hi - lo) / static_cast<double>(n);
    g.origin = {lo + 0.5 * g.spacing, 0.0};
    g.shape = {n, 1};
    return g;
}

GridSpec GridSpec::square(double lo, double hi, Eigen::Index n) {
    if (n < 2 || !(hi > lo)) throw DomainError("square grid requires n >= 2 and hi > lo");
    GridSpec g;
    g.dim = 2;
    g.origin = {lo, lo};
    g.spacing = (hi - lo) / static_cast<double>(n - 1);
    g.shape = {n, n};
    return g;
}

SampledFunction::SampledFunction(GridSpec grid, Eigen::ArrayXd values, SampleMeta meta)
    : grid_(grid), values_(std::move(values)), meta_(std::move(meta)) {
    grid_.validate();
    if (values_.size() != grid_.count())
        throw DomainError("value count does not match grid shape");
    check_finite();
}

std::array<Eigen::Index, 2> SampledFunction::nearest_node(const Eigen::Vector2d& x) const {
    std::array<Eigen::Index, 2> out = {0, 0};
    for (int a = 0; a < grid_.dim; ++a) {
        const double raw = (x[a] - grid_.origin[a]) / grid_.spacing;
        Eigen::Index i = static_cast<Eigen::Index>(std::llround(raw));
        i = std::clamp<Eigen::Index>(i, 0, grid_.shape[static_cast<std::size_t>(a)] - 1);
        out[static_cast<std::size_t>(a)] = i;
    }
    return out;
}

void SampledFunction::check_finite() const {
    if (!values_.allFinite()) throw DomainError("sample values must be finite");
}

}  // namespace czreg
