#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace czreg {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_residual = 0.0;
};

// ordinary least squares y ~ intercept + slope*x; needs >= 2 points
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// index-parallel loop; jobs <= 0 means hardware concurrency.  Results must
// be written to per-index slots so the outcome is order-independent.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body, int jobs = 0);

// write via temp file + rename in the target directory
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace czreg
