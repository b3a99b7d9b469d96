#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "czreg/grid.hpp"
#include "czreg/jet.hpp"

namespace czreg {

// Deterministic standard-normal stream (mt19937_64 + Box-Muller on explicit
// 53-bit uniforms); identical output for identical seeds on every platform.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}
    double next();

private:
    double uniform01();
    std::mt19937_64 rng_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Brownian path on [0, horizon]: B(0) = 0, exact Gaussian increments of
// variance = spacing on the n grid nodes.
SampledFunction gen_brownian(Eigen::Index n, double horizon, std::uint64_t seed);

// W(x) = sum_{k < terms} a^k cos(b^k pi x); requires a in (0,1), integer
// b >= 2, a*b >= 1.  Truncation error a^terms/(1-a) recorded in meta.
SampledFunction gen_weierstrass(double a, int b, int terms, const GridSpec& grid);

// f(x) = |x - x0|^u
SampledFunction gen_cusp(const Eigen::Vector2d& x0, double u, const GridSpec& grid);
SampledFunction gen_cusp(double x0, double u, const GridSpec& grid);

// exact polynomial samples
SampledFunction gen_poly(const PolyJet& jet, const GridSpec& grid);

// generic sampler for analytic test functions
SampledFunction sample_function(const GridSpec& grid, const std::function<double(Eigen::Vector2d)>& f,
                                const std::string& name);

// .szf: one-line JSON header (dim, origin, spacing, shape, meta) + newline +
// raw little-endian 64-bit floats, row-major.  save/load round-trips
// bit-for-bit.
void save_szf(const SampledFunction& f, const std::filesystem::path& path);
SampledFunction load_szf(const std::filesystem::path& path);

// CSV interop: one value per row (d=1) or one grid row per line (d=2).
void save_csv(const SampledFunction& f, const std::filesystem::path& path);
SampledFunction load_csv(const std::filesystem::path& path, const GridSpec& grid);

}  // namespace czreg
