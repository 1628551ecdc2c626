#include "weinstein/radial_operators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <lapacke.h>

#include "weinstein/error.hpp"
#include "weinstein/potentials.hpp"

namespace weinstein {

const char* to_string(OperatorKind kind) noexcept {
    switch (kind) {
    case OperatorKind::Laplacian: return "laplacian";
    case OperatorKind::ConjugatedHyperbolic: return "conjugated-hyperbolic";
    case OperatorKind::Shifted: return "shifted";
    }
    return "unknown";
}

RadialOperator::RadialOperator(GridPtr grid, OperatorKind kind, std::vector<double> diagonal,
                               std::vector<double> off_diagonal)
    : grid_(std::move(grid)), kind_(kind), diagonal_(std::move(diagonal)),
      off_diagonal_(std::move(off_diagonal)), cache_(std::make_shared<SpectralCache>()) {
    if (diagonal_.size() != grid_->size() || off_diagonal_.size() + 1 != diagonal_.size()) {
        throw Error(ErrorCode::GridMismatch, "stiffness shape does not match the grid");
    }
}

std::vector<double> RadialOperator::apply_stiffness(std::span<const double> f) const {
    const std::size_t n = size();
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = diagonal_[i] * f[i];
        if (i > 0) {
            acc += off_diagonal_[i - 1] * f[i - 1];
        }
        if (i + 1 < n) {
            acc += off_diagonal_[i] * f[i + 1];
        }
        out[i] = acc;
    }
    return out;
}

RadialFunction RadialOperator::apply(const RadialFunction& f) const {
    require_same_grid(*grid_, f);
    auto out = apply_stiffness(f.values());
    const auto w = grid_->weights();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] /= w[i];
    }
    return RadialFunction(grid_, std::move(out));
}

std::vector<double> RadialOperator::solve_shifted_stiffness(double t,
                                                            std::span<const double> rhs) const {
    const std::size_t n = size();
    const auto w = grid_->weights();
    std::vector<double> pivots(n);
    std::vector<double> lower(n > 0 ? n - 1 : 0);
    std::vector<double> x(rhs.begin(), rhs.end());
    pivots[0] = diagonal_[0] + t * w[0];
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (!(pivots[i] > 0.0)) {
            throw Error(ErrorCode::NumericFailure, "shifted stiffness is not positive definite");
        }
        lower[i] = off_diagonal_[i] / pivots[i];
        pivots[i + 1] = diagonal_[i + 1] + t * w[i + 1] - lower[i] * off_diagonal_[i];
    }
    if (!(pivots[n - 1] > 0.0)) {
        throw Error(ErrorCode::NumericFailure, "shifted stiffness is not positive definite");
    }
    for (std::size_t i = 1; i < n; ++i) {
        x[i] -= lower[i - 1] * x[i - 1];
    }
    x[n - 1] /= pivots[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
        x[i] = x[i] / pivots[i] - lower[i] * x[i + 1];
    }
    return x;
}

double RadialOperator::spectral_upper_bound() const {
    const auto w = grid_->weights();
    const std::size_t n = size();
    double bound = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double row = diagonal_[i] / w[i];
        if (i > 0) {
            row += std::abs(off_diagonal_[i - 1]) / std::sqrt(w[i - 1] * w[i]);
        }
        if (i + 1 < n) {
            row += std::abs(off_diagonal_[i]) / std::sqrt(w[i] * w[i + 1]);
        }
        bound = std::max(bound, row);
    }
    return bound;
}

bool RadialOperator::has_spectral() const noexcept { return cache_->ready; }

const SpectralData& RadialOperator::spectral() const {
    std::call_once(cache_->once, [this] {
        const std::size_t n = size();
        const auto w = grid_->weights();
        std::vector<double> d(n);
        std::vector<double> e(n > 1 ? n - 1 : 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            d[i] = diagonal_[i] / w[i];
        }
        for (std::size_t i = 0; i + 1 < n; ++i) {
            e[i] = off_diagonal_[i] / std::sqrt(w[i] * w[i + 1]);
        }
        Eigen::MatrixXd z(n, n);
        const auto ni = static_cast<lapack_int>(n);
        const lapack_int info =
            LAPACKE_dstevd(LAPACK_COL_MAJOR, 'V', ni, d.data(), e.data(), z.data(), ni);
        if (info != 0) {
            throw Error(ErrorCode::SpectralFailure,
                        "tridiagonal eigensolver failed, info = " + std::to_string(info));
        }
        for (std::size_t i = 0; i < n; ++i) {
            z.row(static_cast<Eigen::Index>(i)) /= std::sqrt(w[i]);
        }
        cache_->data.eigenvalues = std::move(d);
        cache_->data.eigenvectors = std::move(z);
        cache_->ready = true;
    });
    return cache_->data;
}

namespace {

RadialOperator flux_laplacian(const GridPtr& grid, std::span<const double> face_areas) {
    const std::size_t n = grid->size();
    const double h = grid->spacing();
    std::vector<double> diag(n);
    std::vector<double> off(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double inner_face = i == 0 ? 0.0 : face_areas[i - 1];
        diag[i] = (inner_face + face_areas[i]) / h;
        if (i + 1 < n) {
            off[i] = -face_areas[i] / h;
        }
    }
    return RadialOperator(grid, OperatorKind::Laplacian, std::move(diag), std::move(off));
}

std::vector<double> phi_values(const RadialGrid& grid) {
    std::vector<double> out(grid.size());
    const auto r = grid.nodes();
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = phi(r[i], grid.dimension());
    }
    return out;
}

} // namespace

RadialOperator build_conjugated_hyperbolic(const GridPtr& euclidean_grid) {
    if (euclidean_grid->space() != Space::Euclidean) {
        throw Error(ErrorCode::GridMismatch, "conjugated operator lives on a Euclidean grid");
    }
    const auto base = flux_laplacian(euclidean_grid, euclidean_grid->face_areas());
    std::vector<double> diag(base.stiffness_diagonal().begin(), base.stiffness_diagonal().end());
    std::vector<double> off(base.stiffness_off_diagonal().begin(),
                            base.stiffness_off_diagonal().end());
    const auto r = euclidean_grid->nodes();
    const auto w = euclidean_grid->weights();
    const int n = euclidean_grid->dimension();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        diag[i] += w[i] * conjugation_potential(r[i], n);
    }
    return RadialOperator(euclidean_grid, OperatorKind::ConjugatedHyperbolic, std::move(diag),
                          std::move(off));
}

RadialOperator build_laplacian(const GridPtr& grid, HyperbolicScheme scheme) {
    if (grid->space() == Space::Euclidean || scheme == HyperbolicScheme::SinhFlux) {
        return flux_laplacian(grid, grid->face_areas());
    }
    // S_H = Phi^{-1} (S_R + W_R D) Phi^{-1}, using W_H Phi^2 = W_R.
    const auto conj = build_conjugated_hyperbolic(matched_grid(grid, Space::Euclidean));
    const auto p = phi_values(*grid);
    std::vector<double> diag(conj.size());
    std::vector<double> off(conj.size() - 1);
    const auto cd = conj.stiffness_diagonal();
    const auto co = conj.stiffness_off_diagonal();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        diag[i] = cd[i] / (p[i] * p[i]);
        if (i + 1 < diag.size()) {
            off[i] = co[i] / (p[i] * p[i + 1]);
        }
    }
    return RadialOperator(grid, OperatorKind::Laplacian, std::move(diag), std::move(off));
}

RadialOperator shifted(const RadialOperator& op, double shift) {
    std::vector<double> diag(op.stiffness_diagonal().begin(), op.stiffness_diagonal().end());
    const auto w = op.grid()->weights();
    for (std::size_t i = 0; i < diag.size(); ++i) {
        diag[i] += shift * w[i];
    }
    return RadialOperator(op.grid(), OperatorKind::Shifted, std::move(diag),
                          std::vector<double>(op.stiffness_off_diagonal().begin(),
                                              op.stiffness_off_diagonal().end()));
}

double quadratic_form(const RadialOperator& op, const RadialFunction& f) {
    require_same_grid(*op.grid(), f);
    const auto sf = op.apply_stiffness(f.values());
    double sum = 0.0;
    for (std::size_t i = 0; i < sf.size(); ++i) {
        sum += sf[i] * f[i];
    }
    return sum;
}

double quadratic_form_by_faces(const RadialOperator& op, const RadialFunction& f) {
    require_same_grid(*op.grid(), f);
    const auto d = op.stiffness_diagonal();
    const auto o = op.stiffness_off_diagonal();
    const std::size_t n = d.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double rowsum = d[i];
        if (i > 0) {
            rowsum += o[i - 1];
        }
        if (i + 1 < n) {
            rowsum += o[i];
            const double diff = f[i + 1] - f[i];
            sum += -o[i] * diff * diff;
        }
        sum += rowsum * f[i] * f[i];
    }
    return sum;
}

RadialFunction apply_resolvent(const RadialOperator& op, double t, const RadialFunction& f) {
    if (!(t > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "resolvent parameter must be positive");
    }
    require_same_grid(*op.grid(), f);
    const auto w = op.grid()->weights();
    const std::size_t n = op.size();
    std::vector<double> rhs(n);
    for (std::size_t i = 0; i < n; ++i) {
        rhs[i] = w[i] * f[i];
    }
    auto g = op.solve_shifted_stiffness(t, rhs);

    const double fnorm = std::sqrt(lp_power(f, 2.0));
    auto residual_of = [&](const std::vector<double>& x, std::vector<double>& res) {
        const auto sx = op.apply_stiffness(x);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            res[i] = rhs[i] - (sx[i] + t * w[i] * x[i]);
            acc += res[i] * res[i] / w[i];
        }
        return std::sqrt(acc);
    };
    std::vector<double> res(n);
    double rnorm = residual_of(g, res);
    if (fnorm > 0.0 && rnorm > 1e-12 * fnorm) {
        // one step of iterative refinement
        const auto correction = op.solve_shifted_stiffness(t, res);
        for (std::size_t i = 0; i < n; ++i) {
            g[i] += correction[i];
        }
        rnorm = residual_of(g, res);
    }
    if (fnorm > 0.0 && !(rnorm <= 1e-10 * fnorm)) {
        throw Error(ErrorCode::NumericFailure,
                    "resolvent residual " + std::to_string(rnorm / fnorm) + " exceeds 1e-10");
    }
    return RadialFunction(op.grid(), std::move(g));
}

RadialFunction apply_spectral_function(const RadialOperator& op,
                                       const std::function<double(double)>& g,
                                       const RadialFunction& f) {
    require_same_grid(*op.grid(), f);
    const auto& sd = op.spectral();
    const auto w = op.grid()->weights();
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::VectorXd wf(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        wf[i] = w[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd coeff = sd.eigenvectors.transpose() * wf;
    for (Eigen::Index k = 0; k < n; ++k) {
        coeff[k] *= g(sd.eigenvalues[static_cast<std::size_t>(k)]);
    }
    const Eigen::VectorXd out = sd.eigenvectors * coeff;
    return RadialFunction(op.grid(), std::vector<double>(out.data(), out.data() + n));
}

RadialFunction fractional_apply_spectral(const RadialOperator& op, double a,
                                         const RadialFunction& f) {
    if (!(a > 0.0 && a <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "fractional exponent must lie in (0, 1]");
    }
    return apply_spectral_function(
        op, [a](double lambda) { return lambda > 0.0 ? std::pow(lambda, a) : 0.0; }, f);
}

LogQuadrature log_quadrature(double a, double lambda_max, const QuadratureSpec& quad,
                             double step_override) {
    LogQuadrature q;
    q.s_lo = std::log(quad.truncation_tol * a) / a + std::log(quad.lambda_floor);
    q.s_hi = std::log(std::max(lambda_max, 1.0)) -
             std::log(quad.truncation_tol * (1.0 - a)) / (1.0 - a);
    const double step = step_override > 0.0 ? step_override : quad.step;
    const double nodes = std::ceil((q.s_hi - q.s_lo) / step);
    if (!(nodes >= 1.0 && nodes <= 4e6)) {
        throw Error(ErrorCode::QuadratureNonConvergence,
                    "log quadrature window needs " + std::to_string(nodes) + " nodes");
    }
    q.count = static_cast<std::size_t>(nodes);
    q.step = (q.s_hi - q.s_lo) / static_cast<double>(q.count);
    return q;
}

namespace {

std::vector<double> balakrishnan_sum(const RadialOperator& op, double a,
                                     std::span<const double> stiff_f, const LogQuadrature& q) {
    const std::size_t n = op.size();
    std::vector<double> acc(n, 0.0);
    for (std::size_t k = 0; k < q.count; ++k) {
        const double s = q.node(k);
        const double t = std::exp(s);
        // (tW + S) g = S f  <=>  g = (t + L)^{-1} L f
        const auto g = op.solve_shifted_stiffness(t, stiff_f);
        const double weight = std::exp(a * s) * q.step;
        for (std::size_t i = 0; i < n; ++i) {
            acc[i] += weight * g[i];
        }
    }
    const double c = std::sin(a * std::numbers::pi) / std::numbers::pi;
    for (double& v : acc) {
        v *= c;
    }
    return acc;
}

} // namespace

BalakrishnanResult fractional_apply_balakrishnan_detailed(const RadialOperator& op, double a,
                                                          const RadialFunction& f,
                                                          const QuadratureSpec& quad) {
    if (!(a > 0.0 && a < 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "Balakrishnan exponent must lie in (0, 1)");
    }
    require_same_grid(*op.grid(), f);
    const auto stiff_f = op.apply_stiffness(f.values());
    const double lambda_max = op.spectral_upper_bound();
    const auto coarse_rule = log_quadrature(a, lambda_max, quad);
    const auto fine_rule = log_quadrature(a, lambda_max, quad, 0.5 * coarse_rule.step);
    const auto coarse = balakrishnan_sum(op, a, stiff_f, coarse_rule);
    auto fine = balakrishnan_sum(op, a, stiff_f, fine_rule);

    const auto w = op.grid()->weights();
    double diff = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < fine.size(); ++i) {
        diff += w[i] * (fine[i] - coarse[i]) * (fine[i] - coarse[i]);
        norm += w[i] * fine[i] * fine[i];
    }
    const double estimate = norm > 0.0 ? std::sqrt(diff / norm) : std::sqrt(diff);
    if (!(estimate <= quad.tolerance)) {
        throw Error(ErrorCode::QuadratureNonConvergence,
                    "Balakrishnan quadrature error estimate " + std::to_string(estimate));
    }
    return {RadialFunction(op.grid(), std::move(fine)), estimate, fine_rule.count};
}

RadialFunction fractional_apply_balakrishnan(const RadialOperator& op, double a,
                                             const RadialFunction& f, const QuadratureSpec& quad) {
    return fractional_apply_balakrishnan_detailed(op, a, f, quad).value;
}

RadialFunction heat_apply(const RadialOperator& op, double t, const RadialFunction& f) {
    if (!(t > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "heat time must be positive");
    }
    return apply_spectral_function(op, [t](double lambda) { return std::exp(-t * lambda); }, f);
}

RadialFunction fractional_heat_apply(const RadialOperator& op, double t, double a,
                                     const RadialFunction& f) {
    if (!(t > 0.0) || !(a > 0.0 && a <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "need t > 0 and a in (0, 1]");
    }
    return apply_spectral_function(
        op, [t, a](double lambda) { return std::exp(-t * std::pow(std::max(lambda, 0.0), a)); },
        f);
}

Eigen::MatrixXd heat_kernel(const RadialOperator& op, double t) {
    if (!(t > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "heat time must be positive");
    }
    const auto& sd = op.spectral();
    const auto n = static_cast<Eigen::Index>(op.size());
    Eigen::VectorXd decay(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        decay[k] = std::exp(-t * sd.eigenvalues[static_cast<std::size_t>(k)]);
    }
    return sd.eigenvectors * decay.asDiagonal() * sd.eigenvectors.transpose();
}

double subordination_density(double t, double a, double s) {
    if (!(t > 0.0) || !(s > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "subordination density needs t, s > 0");
    }
    if (a != 0.5) {
        throw Error(ErrorCode::UnsupportedExponent,
                    "closed-form subordination density is only available for a = 1/2");
    }
    return t / std::sqrt(4.0 * std::numbers::pi) * std::pow(s, -1.5) * std::exp(-t * t / (4.0 * s));
}

RadialFunction subordinated_heat_apply(const RadialOperator& op, double t, double a,
                                      const RadialFunction& f, double step) {
    if (!(t > 0.0) || !(step > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "need t > 0 and a positive step");
    }
    require_same_grid(*op.grid(), f);
    const auto& sd = op.spectral();
    const double lambda_min = sd.eigenvalues.front();
    if (!(lambda_min > 0.0)) {
        throw Error(ErrorCode::SpectralFailure, "subordination needs a strictly positive operator");
    }
    // s = e^sigma; the density is below e^{-40} left of t^2/160 and the
    // heat factor is below e^{-50} right of 50/lambda_min.
    const double lo = std::log(t * t / 160.0) - 1.0;
    // A very stiff operator leaves nothing between the two cutoffs.
    const double hi = std::max(std::log(50.0 / lambda_min) + 1.0, lo + step);
    const auto count = static_cast<std::size_t>(std::ceil((hi - lo) / step));
    const double h = (hi - lo) / static_cast<double>(count);
    std::vector<double> nodes(count);
    std::vector<double> mass(count);
    for (std::size_t q = 0; q < count; ++q) {
        const double s = std::exp(lo + (static_cast<double>(q) + 0.5) * h);
        nodes[q] = s;
        mass[q] = subordination_density(t, a, s) * s * h;
    }
    return apply_spectral_function(
        op,
        [&](double lambda) {
            double acc = 0.0;
            for (std::size_t q = 0; q < count; ++q) {
                acc += mass[q] * std::exp(-nodes[q] * lambda);
            }
            return acc;
        },
        f);
}

} // namespace weinstein
