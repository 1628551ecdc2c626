#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "weinstein/radial_grid.hpp"

namespace weinstein {

enum class OperatorKind { Laplacian, ConjugatedHyperbolic, Shifted };

const char* to_string(OperatorKind kind) noexcept;

/// How -Delta is discretized on a hyperbolic grid.
///
/// Conjugated: L_H = Phi (L_R + diag(V_n + K2)) Phi^{-1} built from the matched
/// Euclidean stencil. It is flux form with face coefficients
/// |S^{n-1}| r_face^{n-1} / (phi_i phi_{i+1}) plus an O(h^2) diagonal term, and
/// the conjugation identity holds exactly at the discrete level.
///
/// SinhFlux: plain divergence form with sinh^{n-1} face areas. Consistent with
/// the same continuum operator; conjugates to L_R + V_n + K2 only up to O(h^2).
enum class HyperbolicScheme { Conjugated, SinhFlux };

/// Eigenpairs of a radial operator. Columns of `eigenvectors` are orthonormal
/// in the grid's weighted inner product.
struct SpectralData {
    std::vector<double> eigenvalues; // increasing
    Eigen::MatrixXd eigenvectors;
};

/// Tridiagonal operator L = W^{-1} S with S symmetric, so L is self-adjoint
/// in <f, g>_w = sum w_i f_i g_i. Immutable after construction; the
/// eigendecomposition is computed once on first use.
class RadialOperator {
public:
    RadialOperator(GridPtr grid, OperatorKind kind, std::vector<double> diagonal,
                   std::vector<double> off_diagonal);

    const GridPtr& grid() const noexcept { return grid_; }
    OperatorKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return diagonal_.size(); }

    /// Stiffness matrix S: diagonal and first off-diagonal (size N-1).
    std::span<const double> stiffness_diagonal() const noexcept { return diagonal_; }
    std::span<const double> stiffness_off_diagonal() const noexcept { return off_diagonal_; }

    RadialFunction apply(const RadialFunction& f) const;
    /// S f, no division by the weights.
    std::vector<double> apply_stiffness(std::span<const double> f) const;

    /// Solves (t W + S) g = rhs for t >= 0 (LDL^T, no pivoting; S + tW is SPD).
    std::vector<double> solve_shifted_stiffness(double t, std::span<const double> rhs) const;

    /// Upper bound on the spectrum from Gershgorin discs of W^{-1/2} S W^{-1/2}.
    double spectral_upper_bound() const;

    const SpectralData& spectral() const;
    bool has_spectral() const noexcept;

private:
    struct SpectralCache {
        std::once_flag once;
        SpectralData data;
        bool ready = false;
    };

    GridPtr grid_;
    OperatorKind kind_;
    std::vector<double> diagonal_;
    std::vector<double> off_diagonal_;
    std::shared_ptr<SpectralCache> cache_;
};

/// Radial -Delta with zero flux at the origin and a zero ghost value at r = R.
RadialOperator build_laplacian(const GridPtr& grid,
                               HyperbolicScheme scheme = HyperbolicScheme::Conjugated);

/// L_R + diag(V_n + K2) on a Euclidean grid: phi^{-1} (-Delta_H) phi restricted to radial functions.
RadialOperator build_conjugated_hyperbolic(const GridPtr& euclidean_grid);

/// op + shift * I.
RadialOperator shifted(const RadialOperator& op, double shift);

/// <L f, f>_w.
double quadratic_form(const RadialOperator& op, const RadialFunction& f);

/// The same form summed over faces: sum_faces (-S_{i,i+1}) (f_{i+1} - f_i)^2 + sum_i rowsum_i f_i^2.
double quadratic_form_by_faces(const RadialOperator& op, const RadialFunction& f);

/// Solves (t I + L) g = f; throws NumericFailure if the weighted residual exceeds 1e-10 relative.
RadialFunction apply_resolvent(const RadialOperator& op, double t, const RadialFunction& f);

/// sum_k g(lambda_k) <f, e_k>_w e_k.
RadialFunction apply_spectral_function(const RadialOperator& op,
                                       const std::function<double(double)>& g,
                                       const RadialFunction& f);

/// L^a f through the eigendecomposition, a in (0, 1].
RadialFunction fractional_apply_spectral(const RadialOperator& op, double a, const RadialFunction& f);

/// Log-substituted midpoint rule for Balakrishnan-type integrals over t in (0, inf).
///
/// With t = e^s the integrand t^{a-1} (t + lambda)^{-1} lambda dt becomes
/// e^{as} lambda / (e^s + lambda) ds. The range [s_lo, s_hi] is chosen so that
/// both neglected tails are below `truncation_tol` relative to lambda^a for every
/// lambda in [lambda_floor, lambda_max].
struct QuadratureSpec {
    double step = 0.05;
    double truncation_tol = 1e-13;
    double lambda_floor = 1e-4;
    double tolerance = 1e-8; // accepted relative error estimate (node doubling)
};

struct LogQuadrature {
    double s_lo = 0.0;
    double s_hi = 0.0;
    double step = 0.0;
    std::size_t count = 0;
    double node(std::size_t k) const { return s_lo + (static_cast<double>(k) + 0.5) * step; }
};

LogQuadrature log_quadrature(double a, double lambda_max, const QuadratureSpec& quad,
                             double step_override = 0.0);

struct BalakrishnanResult {
    RadialFunction value;
    double error_estimate; // relative, from the doubled rule
    std::size_t nodes;
};

/// L^a f = (sin a pi / pi) int_0^inf t^{a-1} (t + L)^{-1} L f dt.
BalakrishnanResult fractional_apply_balakrishnan_detailed(const RadialOperator& op, double a,
                                                          const RadialFunction& f,
                                                          const QuadratureSpec& quad = {});
RadialFunction fractional_apply_balakrishnan(const RadialOperator& op, double a,
                                             const RadialFunction& f,
                                             const QuadratureSpec& quad = {});

/// e^{-tL} f.
RadialFunction heat_apply(const RadialOperator& op, double t, const RadialFunction& f);

/// e^{-t L^a} f.
RadialFunction fractional_heat_apply(const RadialOperator& op, double t, double a,
                                     const RadialFunction& f);

/// Kernel K of e^{-tL} against the weights: (e^{-tL} f)_i = sum_j K_ij w_j f_j.
Eigen::MatrixXd heat_kernel(const RadialOperator& op, double t);

/// Density f_{t,a}(s) with e^{-t lambda^a} = int_0^inf f_{t,a}(s) e^{-s lambda} ds.
/// Closed form only for a = 1/2: t (4 pi)^{-1/2} s^{-3/2} exp(-t^2 / (4 s)).
double subordination_density(double t, double a, double s);
/// int_0^inf f_{t,a}(s) e^{-sL} f ds by a log-substituted midpoint rule over the spectrum.
/// Requires a closed-form density (a = 1/2).
RadialFunction subordinated_heat_apply(const RadialOperator& op, double t, double a,
                                      const RadialFunction& f, double step = 0.02);

} // namespace weinstein
