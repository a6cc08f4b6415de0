#pragma once

#include "fpme/grid.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

namespace fpme {

/// rho(x) = [(x - a)^(-2s) + (b - x)^(-2s)]/(2s) = integral over R \ (a,b) of
/// |x - y|^(-1-2s) dy. For functions vanishing outside (a,b) the exterior
/// part of the double integral is 2 * integral of u v rho over (a,b).
class ExteriorDensity {
public:
    ExteriorDensity(double a, double b, double s);
    double operator()(double x) const;

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double s() const noexcept { return s_; }

private:
    double a_;
    double b_;
    double s_;
};

ExteriorDensity exterior_density(const Grid& grid, double s);

struct AssemblyOptions {
    int quad_order = 8;
    bool include_exterior = true;
};

/// Local stiffness block for an ordered element pair (E_e, E_{e+d}): rows and
/// columns are the distinct nodes touched by the pair, in the order
/// (e, e+1, e+d, e+d+1) with coincident nodes merged (2 slots for d = 0,
/// 3 for d = 1, 4 otherwise). Blocks depend only on the offset d.
struct PairBlock {
    int offset = 0;
    int slots = 0;
    std::array<int, 4> node_shift{};  // node index relative to e, per slot
    Eigen::Matrix4d values = Eigen::Matrix4d::Zero();
};

/// Dense symmetric matrix of the Gagliardo form a(u,v) = double integral over
/// R x R of (u(x)-u(y))(v(x)-v(y))|x-y|^(-1-2s) on the hat basis, without
/// normalization constant.
class StiffnessForm {
public:
    /// Wraps an explicit matrix (synthetic tests, cached dumps). No blocks or
    /// exterior split are recorded.
    static StiffnessForm from_matrix(const Grid& grid, double s, Eigen::MatrixXd matrix);

    const Grid& grid() const noexcept { return grid_; }
    double s() const noexcept { return s_; }
    int quad_order() const noexcept { return quad_order_; }

    const Eigen::MatrixXd& matrix() const noexcept { return data_->matrix; }
    const std::vector<PairBlock>& pair_blocks() const noexcept { return data_->blocks; }
    const Eigen::VectorXd& exterior_diag() const noexcept { return data_->ext_diag; }
    const Eigen::VectorXd& exterior_offdiag() const noexcept { return data_->ext_off; }
    bool has_exterior() const noexcept { return data_->has_exterior; }

    /// The Omega x Omega part: matrix() minus the exterior tridiagonal.
    Eigen::MatrixXd interior_matrix() const;

    /// Cholesky factor of the matrix, computed once at construction.
    const Eigen::LLT<Eigen::MatrixXd>& cholesky() const noexcept { return data_->llt; }

    Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return data_->matrix * x; }
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs) const { return data_->llt.solve(rhs); }

private:
    struct Data {
        Eigen::MatrixXd matrix;
        std::vector<PairBlock> blocks;
        Eigen::VectorXd ext_diag;
        Eigen::VectorXd ext_off;
        bool has_exterior = false;
        Eigen::LLT<Eigen::MatrixXd> llt;
    };

    StiffnessForm(const Grid& grid, double s, int quad_order, std::shared_ptr<const Data> data)
        : grid_(grid), s_(s), quad_order_(quad_order), data_(std::move(data)) {}

    friend StiffnessForm assemble_form(const Grid&, double, const AssemblyOptions&);
    static std::shared_ptr<const Data> finalize(Data data, const Grid& grid);

    Grid grid_;
    double s_;
    int quad_order_;
    std::shared_ptr<const Data> data_;
};

StiffnessForm assemble_form(const Grid& grid, double s, const AssemblyOptions& options = {});
inline StiffnessForm assemble_form(const Grid& grid, double s, int quad_order) {
    return assemble_form(grid, s, AssemblyOptions{quad_order, true});
}

/// Local block for element offset d on a reference element of width h.
PairBlock pair_block(int offset, double s, double h, int quad_order);

double bilinear(const StiffnessForm& form, const GridFunction& phi, const GridFunction& psi);
double seminorm_sq(const StiffnessForm& form, const GridFunction& phi);

struct MStructureReport {
    double max_offdiag = 0.0;   // largest off-diagonal entry (should be <= 0)
    double min_row_sum = 0.0;   // smallest row sum (should be >= 0)
    double tolerance = 0.0;     // 1e-12 * max|A|
    bool offdiag_ok = false;
    bool row_sum_ok = false;
    bool passed() const noexcept { return offdiag_ok && row_sum_ok; }
};

MStructureReport check_m_structure(const Eigen::MatrixXd& matrix);
inline MStructureReport check_m_structure(const StiffnessForm& form) { return check_m_structure(form.matrix()); }

struct SpectralEstimate {
    double rayleigh = 0.0;  // largest Ritz value, a lower bound on lambda_max
    double bound = 0.0;     // rayleigh * 1.01
    int iterations = 0;
};

/// Lanczos with full reorthogonalization from a fixed-seed start vector;
/// stops once the top Ritz value changes by at most rel_tol (relative) for three
/// consecutive steps. Throws NoConvergence after max_steps.
SpectralEstimate largest_eigenvalue(const Eigen::MatrixXd& matrix, double rel_tol = 1e-7, int max_steps = 1000);
/// Upper bound L >= lambda_max(A) for proximal-gradient step sizes.
double spectral_bound(const StiffnessForm& form);

// Binary cache: magic "FPMEA001", rows and cols as little-endian int64,
// then row-major float64 entries.
void save_form_binary(const std::filesystem::path& path, const StiffnessForm& form);
StiffnessForm load_form_binary(const std::filesystem::path& path, const Grid& grid, double s);

}  // namespace fpme
