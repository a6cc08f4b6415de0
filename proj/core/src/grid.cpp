#include "fpme/grid.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"

#include <cmath>
#include <sstream>

namespace fpme {

Grid::Grid(double a, double b, int n) : a_(a), b_(b), n_(n), h_(0.0) {
    if (!(std::isfinite(a) && std::isfinite(b)) || !(b > a)) {
        throw Error(ErrorKind::InvalidDomain, "need a < b, got a=" + format_double(a) + " b=" + format_double(b));
    }
    if (n < kMinNodes) {
        throw Error(ErrorKind::InvalidDomain, "need n >= 8 interior nodes, got " + std::to_string(n));
    }
    h_ = (b - a) / (n + 1);
}

std::vector<double> Grid::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = node(i);
    return x;
}

Grid make_grid(double a, double b, int n) { return Grid(a, b, n); }

GridFunction::GridFunction(const Grid& grid) : grid_(grid), values_(Eigen::VectorXd::Zero(grid.n())) {}

GridFunction::GridFunction(const Grid& grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n()) {
        throw Error(ErrorKind::GridMismatch, "expected " + std::to_string(grid_.n()) + " values, got " +
                                                 std::to_string(values_.size()));
    }
    if (!values_.allFinite()) throw Error(ErrorKind::InvalidArgument, "grid function has non-finite values");
}

void require_same_grid(const Grid& g1, const Grid& g2) {
    if (!(g1 == g2)) throw Error(ErrorKind::GridMismatch, "grid functions live on different grids");
}

GridFunction operator+(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid());
    return GridFunction(f.grid(), f.values() + g.values());
}

GridFunction operator-(const GridFunction& f, const GridFunction& g) {
    require_same_grid(f.grid(), g.grid());
    return GridFunction(f.grid(), f.values() - g.values());
}

GridFunction operator*(double c, const GridFunction& f) { return GridFunction(f.grid(), c * f.values()); }

EnergyParams::EnergyParams(double s, double m, double alpha) : s_(s), m_(m), alpha_(alpha) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidArgument, "s must lie in (0,1), got " + format_double(s));
    if (!(m > 1.0) || !std::isfinite(m)) throw Error(ErrorKind::InvalidArgument, "m must exceed 1, got " + format_double(m));
    if (!(alpha > 0.0) || !std::isfinite(alpha)) {
        throw Error(ErrorKind::InvalidArgument, "alpha must be positive, got " + format_double(alpha));
    }
}

EnergyParams EnergyParams::with_default_alpha(double s, double m) {
    if (!(m > 1.0)) throw Error(ErrorKind::InvalidArgument, "m must exceed 1, got " + format_double(m));
    return EnergyParams(s, m, 1.0 / (m - 1.0));
}

double signed_pow(double t, double e) noexcept {
    if (t == 0.0) return 0.0;
    const double a = std::pow(std::abs(t), e) * std::abs(t);
    return t > 0.0 ? a : -a;
}

double lumped_power_sum(const Eigen::VectorXd& values, double h, double q) {
    double sum = 0.0;
    for (double v : values) sum += std::pow(std::abs(v), q);
    return h * sum;
}

double lp_norm(const GridFunction& f, double p) {
    if (!(p >= 1.0)) throw Error(ErrorKind::InvalidArgument, "lp_norm needs p >= 1");
    const double sum = lumped_power_sum(f.values(), f.grid().h(), p);
    return sum == 0.0 ? 0.0 : std::pow(sum, 1.0 / p);
}

double lumped_integral(const GridFunction& f) { return f.grid().h() * f.values().sum(); }

namespace {

GridFunction map_signed_pow(const GridFunction& f, double e) {
    Eigen::VectorXd out(f.size());
    for (int i = 0; i < f.size(); ++i) out[i] = signed_pow(f[i], e);
    return GridFunction(f.grid(), std::move(out));
}

}  // namespace

GridFunction phi_map(const GridFunction& v, double m) {
    if (!(m > 1.0)) throw Error(ErrorKind::InvalidArgument, "phi_map needs m > 1");
    return map_signed_pow(v, m - 1.0);
}

GridFunction phi_inv(const GridFunction& p, double q) {
    if (!(q > 1.0 && q < 2.0)) throw Error(ErrorKind::InvalidArgument, "phi_inv needs 1 < q < 2");
    return map_signed_pow(p, q - 2.0);
}

GridFunction g_map(const GridFunction& v, double m) {
    if (!(m > 1.0)) throw Error(ErrorKind::InvalidArgument, "g_map needs m > 1");
    return map_signed_pow(v, 0.5 * (m - 1.0));
}

GridFunction pos_part(const GridFunction& f) { return GridFunction(f.grid(), f.values().cwiseMax(0.0)); }

GridFunction neg_part(const GridFunction& f) { return GridFunction(f.grid(), (-f.values()).cwiseMax(0.0)); }

std::string to_csv(const GridFunction& f) {
    std::string out = "x,value\n";
    out.reserve(out.size() + static_cast<std::size_t>(f.size()) * 48);
    for (int i = 0; i < f.size(); ++i) {
        out += format_double(f.grid().node(i));
        out += ',';
        out += format_double(f[i]);
        out += '\n';
    }
    return out;
}

void write_csv(const std::filesystem::path& path, const GridFunction& f) { write_text_atomic(path, to_csv(f)); }

GridFunction read_csv(const std::filesystem::path& path, const Grid& grid) {
    std::istringstream in(read_text(path));
    std::string line;
    if (!std::getline(in, line) || line.rfind("x,value", 0) != 0) {
        throw Error(ErrorKind::Io, path.string() + ": missing `x,value` header");
    }
    Eigen::VectorXd values(grid.n());
    int i = 0;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(lineno) + ": expected two columns");
        if (i >= grid.n()) throw Error(ErrorKind::GridMismatch, path.string() + ": more rows than grid nodes");
        const double x = std::stod(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        if (std::abs(x - grid.node(i)) > 1e-9 * (1.0 + std::abs(grid.node(i)))) {
            throw Error(ErrorKind::GridMismatch, path.string() + ":" + std::to_string(lineno) + ": node does not match grid");
        }
        values[i++] = v;
    }
    if (i != grid.n()) throw Error(ErrorKind::GridMismatch, path.string() + ": fewer rows than grid nodes");
    return GridFunction(grid, std::move(values));
}

}  // namespace fpme
