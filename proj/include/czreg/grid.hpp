#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>

#include "json.hpp"

#include "czreg/errors.hpp"

namespace czreg {

// Uniform grid on R^d, d in {1,2}; spacing is shared by both axes.
struct GridSpec {
    int dim = 1;
    Eigen::Vector2d origin = Eigen::Vector2d::Zero();
    double spacing = 1.0;
    std::array<Eigen::Index, 2> shape = {0, 1};  // shape[1] == 1 when dim == 1

    Eigen::Index count() const { return shape[0] * shape[1]; }
    Eigen::Vector2d point(Eigen::Index i, Eigen::Index j = 0) const {
        return {origin[0] + spacing * static_cast<double>(i),
                origin[1] + spacing * static_cast<double>(j)};
    }
    // window extent along an axis (distance from first to last sample)
    double extent(int axis) const { return spacing * static_cast<double>(shape[static_cast<std::size_t>(axis)] - 1); }
    double axis_min(int axis) const { return origin[axis]; }
    double axis_max(int axis) const { return origin[axis] + extent(axis); }

    void validate() const;

    // 1-d grid covering [lo, hi] with n nodes (endpoints included)
    static GridSpec line(double lo, double hi, Eigen::Index n);
    // 1-d grid of n cell centers tiling [lo, hi]
    static GridSpec cells(double lo, double hi, Eigen::Index n);
    // d=2 square grid of n x n nodes on [lo,hi]^2
    static GridSpec square(double lo, double hi, Eigen::Index n);
};

struct SampleMeta {
    std::string generator;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
};

// Uniform-grid sample of a function on R^d with row-major values.
class SampledFunction {
public:
    SampledFunction(GridSpec grid, Eigen::ArrayXd values, SampleMeta meta = {});

    const GridSpec& grid() const { return grid_; }
    const Eigen::ArrayXd& values() const { return values_; }
    Eigen::ArrayXd& values() { return values_; }
    const SampleMeta& meta() const { return meta_; }
    SampleMeta& meta() { return meta_; }

    int dim() const { return grid_.dim; }
    double spacing() const { return grid_.spacing; }
    Eigen::Index count() const { return grid_.count(); }
    double value(Eigen::Index i, Eigen::Index j = 0) const {
        return values_[i * grid_.shape[1] + j];
    }
    Eigen::Vector2d point(Eigen::Index i, Eigen::Index j = 0) const { return grid_.point(i, j); }

    // the nearest grid node to x (clamped to the window)
    std::array<Eigen::Index, 2> nearest_node(const Eigen::Vector2d& x) const;

    void check_finite() const;  // throws DomainError on non-finite samples

private:
    GridSpec grid_;
    Eigen::ArrayXd values_;
    SampleMeta meta_;
};

}  // namespace czreg
