#include "czreg/signals.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

namespace czreg {

static_assert(std::endian::native == std::endian::little, "szf writer assumes a little-endian host");

double GaussianStream::uniform01() {
    // 53-bit mantissa draw shifted to the open interval (0,1)
    return (static_cast<double>(rng_() >> 11) + 0.5) * 0x1.0p-53;
}

double GaussianStream::next() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
}

SampledFunction gen_brownian(Eigen::Index n, double horizon, std::uint64_t seed) {
    if (n < 2) throw DomainError("gen_brownian requires n >= 2");
    if (!(horizon > 0.0)) throw DomainError("gen_brownian requires horizon > 0");
    GridSpec grid = GridSpec::line(0.0, horizon, n);
    GaussianStream g(seed);
    Eigen::ArrayXd v(n);
    v[0] = 0.0;
    const double step = std::sqrt(grid.spacing);
    for (Eigen::Index i = 1; i < n; ++i) v[i] = v[i - 1] + step * g.next();
    SampleMeta meta;
    meta.generator = "brownian";
    meta.seed = seed;
    meta.params = {{"n", n}, {"horizon", horizon}};
    return SampledFunction(grid, std::move(v), std::move(meta));
}

SampledFunction gen_weierstrass(double a, int b, int terms, const GridSpec& grid) {
    if (!(a > 0.0 && a < 1.0)) throw DomainError("gen_weierstrass requires a in (0,1)");
    if (b < 2) throw DomainError("gen_weierstrass requires integer b >= 2");
    if (terms < 1) throw DomainError("gen_weierstrass requires terms >= 1");
    if (!(a * b >= 1.0)) throw DomainError("gen_weierstrass requires a*b >= 1");
    grid.validate();
    if (grid.dim != 1) throw DomainError("gen_weierstrass is 1-d");
    Eigen::ArrayXd v = Eigen::ArrayXd::Zero(grid.count());
    double amp = 1.0;
    double freq = std::numbers::pi;
    for (int k = 0; k < terms; ++k) {
        for (Eigen::Index i = 0; i < grid.shape[0]; ++i)
            v[i] += amp * std::cos(freq * grid.point(i)[0]);
        amp *= a;
        freq *= b;
    }
    SampleMeta meta;
    meta.generator = "weierstrass";
    meta.params = {{"a", a},
                   {"b", b},
                   {"terms", terms},
                   {"truncation_error", std::pow(a, terms) / (1.0 - a)}};
    return SampledFunction(grid, std::move(v), std::move(meta));
}

SampledFunction gen_cusp(const Eigen::Vector2d& x0, double u, const GridSpec& grid) {
    if (!(u > 0.0)) throw DomainError("gen_cusp requires u > 0");
    grid.validate();
    Eigen::ArrayXd v(grid.count());
    for (Eigen::Index i = 0; i < grid.shape[0]; ++i)
        for (Eigen::Index j = 0; j < grid.shape[1]; ++j) {
            const Eigen::Vector2d p = grid.point(i, j);
            const double d = (grid.dim == 1) ? std::abs(p[0] - x0[0]) : (p - x0).norm();
            v[i * grid.shape[1] + j] = std::pow(d, u);
        }
    SampleMeta meta;
    meta.generator = "cusp";
    meta.params = {{"u", u}, {"x0", {x0[0], x0[1]}}};
    return SampledFunction(grid, std::move(v), std::move(meta));
}

SampledFunction gen_cusp(double x0, double u, const GridSpec& grid) {
    return gen_cusp(Eigen::Vector2d{x0, 0.0}, u, grid);
}

SampledFunction gen_poly(const PolyJet& jet, const GridSpec& grid) {
    grid.validate();
    if (jet.dim() != grid.dim) throw DomainError("gen_poly: jet and grid dimension mismatch");
    Eigen::ArrayXd v(grid.count());
    for (Eigen::Index i = 0; i < grid.shape[0]; ++i)
        for (Eigen::Index j = 0; j < grid.shape[1]; ++j)
            v[i * grid.shape[1] + j] = jet(grid.point(i, j));
    SampleMeta meta;
    meta.generator = "poly";
    meta.params = {{"degree", jet.degree()},
                   {"center", {jet.center()[0], jet.center()[1]}},
                   {"coeffs", std::vector<double>(jet.coeffs().data(),
                                                  jet.coeffs().data() + jet.coeffs().size())}};
    return SampledFunction(grid, std::move(v), std::move(meta));
}

SampledFunction sample_function(const GridSpec& grid, const std::function<double(Eigen::Vector2d)>& f,
                                const std::string& name) {
    grid.validate();
    Eigen::ArrayXd v(grid.count());
    for (Eigen::Index i = 0; i < grid.shape[0]; ++i)
        for (Eigen::Index j = 0; j < grid.shape[1]; ++j)
            v[i * grid.shape[1] + j] = f(grid.point(i, j));
    SampleMeta meta;
    meta.generator = name;
    return SampledFunction(grid, std::move(v), std::move(meta));
}

void save_szf(const SampledFunction& f, const std::filesystem::path& path) {
    nlohmann::ordered_json header;
    header["szf"] = 1;
    header["dim"] = f.dim();
    header["origin"] = (f.dim() == 1) ? std::vector<double>{f.grid().origin[0]}
                                      : std::vector<double>{f.grid().origin[0], f.grid().origin[1]};
    header["spacing"] = f.spacing();
    header["shape"] = (f.dim() == 1)
                          ? std::vector<Eigen::Index>{f.grid().shape[0]}
                          : std::vector<Eigen::Index>{f.grid().shape[0], f.grid().shape[1]};
    header["meta"] = {{"generator", f.meta().generator},
                      {"seed", f.meta().seed},
                      {"params", f.meta().params}};
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    const std::string h = header.dump();
    out.write(h.data(), static_cast<std::streamsize>(h.size()));
    out.put('\n');
    out.write(reinterpret_cast<const char*>(f.values().data()),
              static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(f.count())));
    if (!out) throw Error("write failed: " + path.string());
}

SampledFunction load_szf(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open: " + path.string());
    std::string header_line;
    if (!std::getline(in, header_line)) throw FormatError("missing szf header", 0);
    nlohmann::ordered_json header;
    try {
        header = nlohmann::ordered_json::parse(header_line);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("bad szf header: ") + e.what(), e.byte);
    }
    const std::size_t header_len = header_line.size() + 1;
    GridSpec grid;
    SampleMeta meta;
    try {
        if (header.value("szf", 0) != 1) throw FormatError("unsupported szf version", 0);
        grid.dim = header.at("dim").get<int>();
        const auto origin = header.at("origin").get<std::vector<double>>();
        for (std::size_t a = 0; a < origin.size() && a < 2; ++a) grid.origin[static_cast<int>(a)] = origin[a];
        grid.spacing = header.at("spacing").get<double>();
        const auto shape = header.at("shape").get<std::vector<Eigen::Index>>();
        grid.shape = {shape.at(0), grid.dim == 2 ? shape.at(1) : 1};
        if (header.contains("meta")) {
            meta.generator = header["meta"].value("generator", "");
            meta.seed = header["meta"].value("seed", std::uint64_t{0});
            if (header["meta"].contains("params")) meta.params = header["meta"]["params"];
        }
        grid.validate();
    } catch (const FormatError&) {
        throw;
    } catch (const std::exception& e) {
        throw FormatError(std::string("bad szf header: ") + e.what(), 0);
    }
    Eigen::ArrayXd v(grid.count());
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(grid.count())));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(grid.count())))
        throw FormatError("truncated value block", header_len + static_cast<std::size_t>(in.gcount()));
    return SampledFunction(grid, std::move(v), std::move(meta));
}

void save_csv(const SampledFunction& f, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.precision(17);
    for (Eigen::Index i = 0; i < f.grid().shape[0]; ++i) {
        for (Eigen::Index j = 0; j < f.grid().shape[1]; ++j) {
            if (j) out << ',';
            out << f.value(i, j);
        }
        out << '\n';
    }
}

SampledFunction load_csv(const std::filesystem::path& path, const GridSpec& grid) {
    grid.validate();
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path.string());
    Eigen::ArrayXd v(grid.count());
    Eigen::Index k = 0;
    std::string line;
    std::size_t offset = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            offset += 1;
            continue;
        }
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            if (k >= grid.count()) throw FormatError("more values than grid slots", offset);
            try {
                v[k++] = std::stod(cell);
            } catch (const std::exception&) {
                throw FormatError("bad numeric cell '" + cell + "'", offset);
            }
        }
        offset += line.size() + 1;
    }
    if (k != grid.count()) throw FormatError("fewer values than grid slots", offset);
    return SampledFunction(grid, std::move(v), SampleMeta{});
}

}  // namespace czreg
