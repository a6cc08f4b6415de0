#include "fpme/frlap.hpp"

#include "fpme/error.hpp"
#include "fpme/io.hpp"
#include "fpme/parallel.hpp"
#include "fpme/quadrature.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <random>

#include <Eigen/Eigenvalues>

namespace fpme {

ExteriorDensity::ExteriorDensity(double a, double b, double s) : a_(a), b_(b), s_(s) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidArgument, "s must lie in (0,1)");
    if (!(b > a)) throw Error(ErrorKind::InvalidDomain, "need a < b");
}

double ExteriorDensity::operator()(double x) const {
    if (!(x > a_ && x < b_)) {
        throw Error(ErrorKind::DomainBoundary, "exterior density evaluated at x=" + format_double(x));
    }
    return (std::pow(x - a_, -2.0 * s_) + std::pow(b_ - x, -2.0 * s_)) / (2.0 * s_);
}

ExteriorDensity exterior_density(const Grid& grid, double s) { return ExteriorDensity(grid.a(), grid.b(), s); }

namespace {

using Poly = std::vector<double>;  // ascending coefficients

// c0 + cx*xi + cy*eta on the reference pair square [0,1]^2
struct Affine {
    double c0;
    double cx;
    double cy;
    double operator()(double xi, double eta) const { return c0 + cx * xi + cy * eta; }
};

using BiQuad = std::array<std::array<double, 3>, 3>;  // [a][b] -> xi^a eta^b

BiQuad product(const Affine& p, const Affine& r) {
    BiQuad c{};
    const std::array<double, 3> pc{p.c0, p.cx, p.cy};
    const std::array<double, 3> rc{r.c0, r.cx, r.cy};
    // monomial exponents for the three affine terms: 1, xi, eta
    constexpr std::array<std::array<int, 2>, 3> mono{{{0, 0}, {1, 0}, {0, 1}}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const int a = mono[i][0] + mono[j][0];
            const int b = mono[i][1] + mono[j][1];
            c[a][b] += pc[i] * rc[j];
        }
    }
    return c;
}

Poly poly_mul(const Poly& p, const Poly& q) {
    Poly out(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
        for (std::size_t j = 0; j < q.size(); ++j) out[i + j] += p[i] * q[j];
    return out;
}

Poly poly_pow(const Poly& p, int e) {
    Poly out{1.0};
    for (int k = 0; k < e; ++k) out = poly_mul(out, p);
    return out;
}

void poly_axpy(Poly& acc, double c, const Poly& p) {
    if (acc.size() < p.size()) acc.resize(p.size(), 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) acc[i] += c * p[i];
}

// p(b0 + b1 t)
Poly compose_affine(const Poly& p, double b0, double b1) {
    Poly out{0.0};
    const Poly lin{b0, b1};
    for (std::size_t k = 0; k < p.size(); ++k) poly_axpy(out, p[k], poly_pow(lin, static_cast<int>(k)));
    return out;
}

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

// Q(z) = integral of P(xi, xi - z) over the xi-range of the unit square at
// fixed z = xi - eta; `upper` selects z in [0,1] (xi in [z,1]) versus
// z in [-1,0] (xi in [0,1+z]).
Poly diagonal_reduction(const BiQuad& P, bool upper) {
    // R(xi, z) coefficients r[i][j] of xi^i z^j
    std::array<std::array<double, 3>, 5> r{};
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; a + b < 3; ++b) {
            if (P[a][b] == 0.0) continue;
            for (int k = 0; k <= b; ++k) {
                const double sign = ((b - k) % 2 == 0) ? 1.0 : -1.0;
                r[a + k][b - k] += P[a][b] * binom(b, k) * sign;
            }
        }
    }
    const Poly upper_lim = upper ? Poly{1.0, 0.0} : Poly{1.0, 1.0};
    const Poly lower_lim = upper ? Poly{0.0, 1.0} : Poly{0.0, 0.0};
    Poly Q{0.0};
    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 3; ++j) {
            if (r[i][j] == 0.0) continue;
            Poly term = poly_pow(upper_lim, i + 1);
            poly_axpy(term, -1.0, poly_pow(lower_lim, i + 1));
            Poly zj(static_cast<std::size_t>(j) + 1, 0.0);
            zj[static_cast<std::size_t>(j)] = 1.0;
            poly_axpy(Q, r[i][j] / (i + 1), poly_mul(term, zj));
        }
    }
    return Q;
}

// Integral of S(t) t^(-1-2s) over [lo, hi]; when lo = 0 the coefficients of
// t^0 and t^1 must vanish analytically and are dropped after a sanity check.
double integrate_against_kernel(const Poly& S, double s, double lo, double hi, double coef_scale) {
    double acc = 0.0;
    for (std::size_t j = 0; j < S.size(); ++j) {
        if (lo == 0.0 && j < 2) {
            if (std::abs(S[j]) > 1e-12 * coef_scale) {
                throw Error(ErrorKind::AssemblyFailure, "singular pair integrand does not vanish at coincidence");
            }
            continue;
        }
        if (S[j] == 0.0) continue;
        acc += S[j] * power_moment(static_cast<int>(j), s, lo, hi);
    }
    return acc;
}

// Offsets integrated with exact power moments; larger offsets use tensor
// Gauss quadrature (the polynomial expansion in t = d - z cancels badly as d grows).
constexpr int kExactOffsets = 4;

struct SlotLayout {
    int slots;
    std::array<int, 4> shift;
    std::array<Affine, 4> coef;
};

SlotLayout slot_layout(int d) {
    if (d == 0) {
        // u(x) - u(y) with both points in the same element
        return {2, {0, 1, 0, 0}, {Affine{0, -1, 1}, Affine{0, 1, -1}, Affine{}, Affine{}}};
    }
    if (d == 1) {
        return {3, {0, 1, 2, 0}, {Affine{1, -1, 0}, Affine{-1, 1, 1}, Affine{0, 0, -1}, Affine{}}};
    }
    return {4, {0, 1, d, d + 1}, {Affine{1, -1, 0}, Affine{0, 1, 0}, Affine{-1, 0, 1}, Affine{0, 0, -1}}};
}

double exact_pair_entry(const BiQuad& P, int d, double s) {
    double scale = 0.0;
    for (const auto& row : P)
        for (double c : row) scale = std::max(scale, std::abs(c));
    const Poly q_up = diagonal_reduction(P, true);
    const Poly q_lo = diagonal_reduction(P, false);
    if (d == 0) {
        // |z|: fold the lower half onto t = -z
        Poly S = q_up;
        poly_axpy(S, 1.0, compose_affine(q_lo, 0.0, -1.0));
        return integrate_against_kernel(S, s, 0.0, 1.0, scale);
    }
    // d >= 1: t = d - z, upper half -> t in [d-1, d], lower half -> t in [d, d+1]
    const Poly s_up = compose_affine(q_up, d, -1.0);
    const Poly s_lo = compose_affine(q_lo, d, -1.0);
    return integrate_against_kernel(s_up, s, d - 1.0, d, scale) + integrate_against_kernel(s_lo, s, d, d + 1.0, scale);
}

}  // namespace

PairBlock pair_block(int offset, double s, double h, int quad_order) {
    if (offset < 0) throw Error(ErrorKind::InvalidArgument, "pair offset must be nonnegative");
    const SlotLayout layout = slot_layout(offset);
    PairBlock block;
    block.offset = offset;
    block.slots = layout.slots;
    block.node_shift = layout.shift;
    const double factor = std::pow(h, 1.0 - 2.0 * s);
    if (offset <= kExactOffsets) {
        for (int p = 0; p < layout.slots; ++p) {
            for (int r = p; r < layout.slots; ++r) {
                const double v = factor * exact_pair_entry(product(layout.coef[p], layout.coef[r]), offset, s);
                block.values(p, r) = v;
                block.values(r, p) = v;
            }
        }
        return block;
    }
    const GaussRule rule = gauss_legendre(quad_order);
    const auto nq = rule.nodes.size();
    for (std::size_t i = 0; i < nq; ++i) {
        const double xi = rule.nodes[i];
        for (std::size_t j = 0; j < nq; ++j) {
            const double eta = rule.nodes[j];
            const double kern = rule.weights[i] * rule.weights[j] * std::pow(offset + eta - xi, -1.0 - 2.0 * s);
            std::array<double, 4> c{};
            for (int p = 0; p < 4; ++p) c[static_cast<std::size_t>(p)] = layout.coef[static_cast<std::size_t>(p)](xi, eta);
            for (int p = 0; p < 4; ++p)
                for (int r = p; r < 4; ++r) block.values(p, r) += kern * c[static_cast<std::size_t>(p)] * c[static_cast<std::size_t>(r)];
        }
    }
    for (int p = 0; p < 4; ++p)
        for (int r = p; r < 4; ++r) {
            block.values(p, r) *= factor;
            block.values(r, p) = block.values(p, r);
        }
    return block;
}

namespace {

// Exterior 2x2 element matrix on element e (nodes e, e+1):
// 2 * h * integral_0^1 N_p N_r rho(x_e + h xi) dxi, N_0 = 1 - xi, N_1 = xi.
Eigen::Matrix2d exterior_element(int e, int n, double s, double h, const GaussRule& rule) {
    const int elements = n + 1;
    Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
    const bool keep_left = e != 0;
    const bool keep_right = e != elements - 1;
    auto kept = [&](int p) { return p == 0 ? keep_left : keep_right; };

    // Term from the left endpoint: (e + xi)^(-2s); t = e + xi.
    // N_0 = (1 + e) - t, N_1 = t - e.
    const std::array<Poly, 2> left_shape{Poly{1.0 + e, -1.0}, Poly{-static_cast<double>(e), 1.0}};
    // Term from the right endpoint: (n + 1 - e - xi)^(-2s); t = n + 1 - e - xi.
    // N_0 = t - (n - e), N_1 = (n + 1 - e) - t.
    const double m = n - e;
    const std::array<Poly, 2> right_shape{Poly{-m, 1.0}, Poly{m + 1.0, -1.0}};

    constexpr int kExactBand = 8;
    for (int p = 0; p < 2; ++p) {
        if (!kept(p)) continue;
        for (int r = p; r < 2; ++r) {
            if (!kept(r)) continue;
            double total = 0.0;
            if (e < kExactBand) {
                const Poly prod = poly_mul(left_shape[static_cast<std::size_t>(p)], left_shape[static_cast<std::size_t>(r)]);
                for (std::size_t j = 0; j < prod.size(); ++j)
                    if (prod[j] != 0.0) total += prod[j] * power_moment(static_cast<int>(j) + 1, s, e, e + 1.0);
            } else {
                for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                    const double xi = rule.nodes[k];
                    const double np = p == 0 ? 1.0 - xi : xi;
                    const double nr = r == 0 ? 1.0 - xi : xi;
                    total += rule.weights[k] * np * nr * std::pow(e + xi, -2.0 * s);
                }
            }
            if (elements - 1 - e < kExactBand) {
                const Poly prod = poly_mul(right_shape[static_cast<std::size_t>(p)], right_shape[static_cast<std::size_t>(r)]);
                for (std::size_t j = 0; j < prod.size(); ++j)
                    if (prod[j] != 0.0) total += prod[j] * power_moment(static_cast<int>(j) + 1, s, m, m + 1.0);
            } else {
                for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
                    const double xi = rule.nodes[k];
                    const double np = p == 0 ? 1.0 - xi : xi;
                    const double nr = r == 0 ? 1.0 - xi : xi;
                    total += rule.weights[k] * np * nr * std::pow(n + 1.0 - e - xi, -2.0 * s);
                }
            }
            // 2 * h * h^(-2s)/(2s) * total
            const double v = std::pow(h, 1.0 - 2.0 * s) / s * total;
            out(p, r) = v;
            out(r, p) = v;
        }
    }
    return out;
}

}  // namespace

std::shared_ptr<const StiffnessForm::Data> StiffnessForm::finalize(Data data, const Grid& grid) {
    const int n = grid.n();
    if (data.matrix.rows() != n || data.matrix.cols() != n) {
        throw Error(ErrorKind::AssemblyFailure, "matrix dimension does not match grid");
    }
    if (!data.matrix.allFinite()) throw Error(ErrorKind::AssemblyFailure, "non-finite stiffness entries");
    const double max_abs = data.matrix.cwiseAbs().maxCoeff();
    const double asym = (data.matrix - data.matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * max_abs) {
        throw Error(ErrorKind::AssemblyFailure, "stiffness matrix not symmetric (" + format_double(asym) + ")");
    }
    if (data.ext_diag.size() == 0) data.ext_diag = Eigen::VectorXd::Zero(n);
    if (data.ext_off.size() == 0) data.ext_off = Eigen::VectorXd::Zero(std::max(0, n - 1));
    data.llt.compute(data.matrix);
    if (data.llt.info() != Eigen::Success) {
        throw Error(ErrorKind::AssemblyFailure, "stiffness matrix is not positive definite");
    }
    return std::make_shared<const Data>(std::move(data));
}

StiffnessForm StiffnessForm::from_matrix(const Grid& grid, double s, Eigen::MatrixXd matrix) {
    Data data;
    data.matrix = std::move(matrix);
    return StiffnessForm(grid, s, 0, finalize(std::move(data), grid));
}

Eigen::MatrixXd StiffnessForm::interior_matrix() const {
    Eigen::MatrixXd out = data_->matrix;
    const int n = grid_.n();
    for (int i = 0; i < n; ++i) out(i, i) -= data_->ext_diag[i];
    for (int i = 0; i + 1 < n; ++i) {
        out(i, i + 1) -= data_->ext_off[i];
        out(i + 1, i) -= data_->ext_off[i];
    }
    return out;
}

StiffnessForm assemble_form(const Grid& grid, double s, const AssemblyOptions& options) {
    if (!(s > 0.0 && s < 1.0)) throw Error(ErrorKind::InvalidArgument, "s must lie in (0,1)");
    if (options.quad_order < 4) throw Error(ErrorKind::InvalidArgument, "quad_order must be at least 4");
    const int n = grid.n();
    const int elements = n + 1;
    const double h = grid.h();

    StiffnessForm::Data data;
    data.blocks.resize(static_cast<std::size_t>(elements));
    parallel_for(0, elements, [&](int d) {
        data.blocks[static_cast<std::size_t>(d)] = pair_block(d, s, h, options.quad_order);
    });

    // Scatter every unordered element pair into the upper triangle; global
    // node k (0..n+1) maps to unknown k-1, boundary nodes are dropped.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
    for (int d = 0; d < elements; ++d) {
        const PairBlock& blk = data.blocks[static_cast<std::size_t>(d)];
        const double weight = d == 0 ? 1.0 : 2.0;
        for (int e = 0; e + d < elements; ++e) {
            for (int p = 0; p < blk.slots; ++p) {
                const int I = e + blk.node_shift[static_cast<std::size_t>(p)] - 1;
                if (I < 0 || I >= n) continue;
                for (int r = 0; r < blk.slots; ++r) {
                    const int J = e + blk.node_shift[static_cast<std::size_t>(r)] - 1;
                    if (J < I || J >= n) continue;
                    A(I, J) += weight * blk.values(p, r);
                }
            }
        }
    }

    data.ext_diag = Eigen::VectorXd::Zero(n);
    data.ext_off = Eigen::VectorXd::Zero(std::max(0, n - 1));
    if (options.include_exterior) {
        const GaussRule rule = gauss_legendre(options.quad_order);
        std::vector<Eigen::Matrix2d> local(static_cast<std::size_t>(elements));
        parallel_for(0, elements, [&](int e) { local[static_cast<std::size_t>(e)] = exterior_element(e, n, s, h, rule); });
        for (int e = 0; e < elements; ++e) {
            const Eigen::Matrix2d& m = local[static_cast<std::size_t>(e)];
            const int left = e - 1;  // unknown index of node e
            const int right = e;     // unknown index of node e+1
            if (left >= 0) data.ext_diag[left] += m(0, 0);
            if (right < n) data.ext_diag[right] += m(1, 1);
            if (left >= 0 && right < n) data.ext_off[left] += m(0, 1);
        }
        for (int i = 0; i < n; ++i) A(i, i) += data.ext_diag[i];
        for (int i = 0; i + 1 < n; ++i) A(i, i + 1) += data.ext_off[i];
        data.has_exterior = true;
    }
    A.triangularView<Eigen::StrictlyLower>() = A.transpose().triangularView<Eigen::StrictlyLower>();
    data.matrix = std::move(A);
    return StiffnessForm(grid, s, options.quad_order, StiffnessForm::finalize(std::move(data), grid));
}

double bilinear(const StiffnessForm& form, const GridFunction& phi, const GridFunction& psi) {
    require_same_grid(form.grid(), phi.grid());
    require_same_grid(form.grid(), psi.grid());
    return phi.values().dot(form.matrix() * psi.values());
}

double seminorm_sq(const StiffnessForm& form, const GridFunction& phi) { return bilinear(form, phi, phi); }

MStructureReport check_m_structure(const Eigen::MatrixXd& matrix) {
    MStructureReport rep;
    const Eigen::Index n = matrix.rows();
    rep.tolerance = 1e-12 * matrix.cwiseAbs().maxCoeff();
    rep.max_offdiag = -std::numeric_limits<double>::infinity();
    rep.min_row_sum = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
        double row = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            row += matrix(i, j);
            if (i != j) rep.max_offdiag = std::max(rep.max_offdiag, matrix(i, j));
        }
        rep.min_row_sum = std::min(rep.min_row_sum, row);
    }
    if (n == 1) rep.max_offdiag = 0.0;
    rep.offdiag_ok = rep.max_offdiag <= rep.tolerance;
    rep.row_sum_ok = rep.min_row_sum >= -rep.tolerance;
    return rep;
}

SpectralEstimate largest_eigenvalue(const Eigen::MatrixXd& matrix, double rel_tol, int max_steps) {
    const Eigen::Index n = matrix.rows();
    const Eigen::Index steps = std::min<Eigen::Index>(n, max_steps);
    Eigen::MatrixXd Q(n, steps);
    std::vector<double> alpha;
    std::vector<double> beta;
    std::mt19937_64 rng(0x5eed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    Eigen::VectorXd q(n);
    for (auto& v : q) v = unif(rng);
    q.normalize();
    SpectralEstimate est;
    int stable = 0;
    for (Eigen::Index j = 0; j < steps; ++j) {
        Q.col(j) = q;
        Eigen::VectorXd w = matrix * q;
        alpha.push_back(q.dot(w));
        // full reorthogonalization, applied twice
        for (int pass = 0; pass < 2; ++pass) w -= Q.leftCols(j + 1) * (Q.leftCols(j + 1).transpose() * w);
        const double b = w.norm();

        const auto m = static_cast<Eigen::Index>(alpha.size());
        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub = Eigen::Map<const Eigen::VectorXd>(beta.data(), m - 1);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
        eig.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
        const double theta = eig.eigenvalues()[m - 1];
        const double change = std::abs(theta - est.rayleigh);
        est.rayleigh = theta;
        est.iterations = static_cast<int>(j + 1);
        stable = (j > 0 && change <= rel_tol * std::abs(theta)) ? stable + 1 : 0;
        if (stable >= 3 || b <= 1e-300 || j + 1 == n) {
            est.bound = 1.01 * theta;
            return est;
        }
        beta.push_back(b);
        q = w / b;
    }
    throw Error(ErrorKind::NoConvergence, "Lanczos did not converge in " + std::to_string(max_steps) + " steps");
}

double spectral_bound(const StiffnessForm& form) { return largest_eigenvalue(form.matrix()).bound; }

void save_form_binary(const std::filesystem::path& path, const StiffnessForm& form) {
    static_assert(std::endian::native == std::endian::little, "binary cache assumes a little-endian host");
    const Eigen::MatrixXd& A = form.matrix();
    const std::int64_t rows = A.rows();
    const std::int64_t cols = A.cols();
    std::string buf = "FPMEA001";
    buf.append(reinterpret_cast<const char*>(&rows), sizeof rows);
    buf.append(reinterpret_cast<const char*>(&cols), sizeof cols);
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            const double v = A(i, j);
            buf.append(reinterpret_cast<const char*>(&v), sizeof v);
        }
    write_text_atomic(path, buf);
}

StiffnessForm load_form_binary(const std::filesystem::path& path, const Grid& grid, double s) {
    const std::string buf = read_text(path);
    if (buf.size() < 24 || buf.compare(0, 8, "FPMEA001") != 0) {
        throw Error(ErrorKind::Io, path.string() + ": bad magic header");
    }
    std::int64_t rows = 0;
    std::int64_t cols = 0;
    std::memcpy(&rows, buf.data() + 8, sizeof rows);
    std::memcpy(&cols, buf.data() + 16, sizeof cols);
    if (rows != grid.n() || cols != grid.n()) throw Error(ErrorKind::GridMismatch, path.string() + ": dimension mismatch");
    const auto expected = 24 + static_cast<std::size_t>(rows * cols) * sizeof(double);
    if (buf.size() != expected) throw Error(ErrorKind::Io, path.string() + ": truncated payload");
    Eigen::MatrixXd A(rows, cols);
    const char* p = buf.data() + 24;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) {
            double v = 0.0;
            std::memcpy(&v, p, sizeof v);
            p += sizeof v;
            A(i, j) = v;
        }
    return StiffnessForm::from_matrix(grid, s, std::move(A));
}

}  // namespace fpme
