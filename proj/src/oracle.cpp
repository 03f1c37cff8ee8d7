#include "qrm/oracle.hpp"

#include "qrm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qrm {

TruncatedOperator parity_matrix(int M, Parity parity, const ModelParams& p)
{
    p.validate();
    if (M < 2) throw DomainError("truncation M must be at least 2");
    TruncatedOperator op;
    op.M = M;
    op.sector = parity == Parity::Plus ? Sector::Plus : Sector::Minus;
    op.params = p;
    op.H = Eigen::MatrixXd::Zero(M, M);
    const double s = parity_sign(parity);
    for (int n = 0; n < M; ++n) {
        op.H(n, n) = n + s * p.delta * ((n % 2 == 0) ? 1.0 : -1.0);
        if (n + 1 < M) op.H(n, n + 1) = op.H(n + 1, n) = p.g * std::sqrt(n + 1.0);
    }
    return op;
}

TruncatedOperator full_matrix(int M, const ModelParams& p)
{
    p.validate();
    if (M < 2) throw DomainError("truncation M must be at least 2");
    TruncatedOperator op;
    op.M = M;
    op.sector = Sector::Full;
    op.params = p;
    op.H = Eigen::MatrixXd::Zero(2 * M, 2 * M);
    for (int n = 0; n < M; ++n) {
        op.H(2 * n, 2 * n) = n + p.delta;
        op.H(2 * n + 1, 2 * n + 1) = n - p.delta;
        if (n + 1 < M) {
            // g (a + a^dag) sigma_x couples |n, s> with |n+1, 1-s>
            const double c = p.g * std::sqrt(n + 1.0);
            op.H(2 * n, 2 * (n + 1) + 1) = op.H(2 * (n + 1) + 1, 2 * n) = c;
            op.H(2 * n + 1, 2 * (n + 1)) = op.H(2 * (n + 1), 2 * n + 1) = c;
        }
    }
    return op;
}

Spectrum spectrum(const TruncatedOperator& op)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.H, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
    Spectrum s;
    s.sector = op.sector;
    s.M = op.M;
    s.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    return s;
}

void hermite_states(int count, double x, double* out)
{
    if (count <= 0) return;
    if (count > 2001) throw DomainError("hermite_state index above 2000");
    // Run the three-term recurrence on scaled values; the Gaussian factor is
    // kept as a separate exponent so large |x| neither under- nor overflows.
    double log_scale = -0.5 * x * x;
    double prev = 0.0;
    double cur = std::pow(std::numbers::pi, -0.25);
    auto emit = [&](int n) {
        out[n] = cur == 0.0 ? 0.0 : std::copysign(std::exp(log_scale + std::log(std::abs(cur))), cur);
    };
    emit(0);
    for (int n = 0; n + 1 < count; ++n) {
        double next = std::sqrt(2.0 / (n + 1.0)) * x * cur - std::sqrt(n / (n + 1.0)) * prev;
        prev = cur;
        cur = next;
        double a = std::abs(cur);
        if (a > 1e150) {
            double f = std::log(a);
            prev /= a;
            cur /= a;
            log_scale += f;
        }
        emit(n + 1);
    }
}

double hermite_state(int n, double x)
{
    if (n < 0 || n > 2000) throw DomainError("hermite_state index out of range [0, 2000]");
    std::vector<double> v(n + 1);
    hermite_states(n + 1, x, v.data());
    return v[n];
}

int counting(double T, const Spectrum& spec)
{
    std::size_t trusted = spec.trusted();
    if (trusted == 0) throw DomainError("spectrum has no trusted eigenvalues");
    if (T > spec.values[trusted - 1]) throw DomainError("T beyond the trusted range of the truncated spectrum");
    return static_cast<int>(std::upper_bound(spec.values.begin(), spec.values.begin() + trusted, T) - spec.values.begin());
}

SpectralOracle::SpectralOracle(const TruncatedOperator& op) : op_M_(op.M)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(op.H);
    if (es.info() != Eigen::Success) throw ConvergenceError("symmetric eigensolver failed");
    spec_.sector = op.sector;
    spec_.M = op.M;
    spec_.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    vectors_ = es.eigenvectors();
}

std::array<double, 4> SpectralOracle::heat_kernel(double x, double y, double t) const
{
    const int M = op_M_;
    const int n_modes = static_cast<int>(spec_.trusted());
    std::vector<double> hx(M), hy(M);
    hermite_states(M, x, hx.data());
    hermite_states(M, y, hy.data());
    std::array<double, 4> K{0.0, 0.0, 0.0, 0.0};
    const double e0 = spec_.values[0];
    if (spec_.sector == Sector::Full) {
        for (int j = 0; j < n_modes; ++j) {
            double w = std::exp(-t * spec_.values[j]);
            if (w < 1e-300 * std::exp(-t * e0)) break;
            double ux = 0, dx = 0, uy = 0, dy = 0;
            for (int n = 0; n < M; ++n) {
                ux += vectors_(2 * n, j) * hx[n];
                dx += vectors_(2 * n + 1, j) * hx[n];
                uy += vectors_(2 * n, j) * hy[n];
                dy += vectors_(2 * n + 1, j) * hy[n];
            }
            K[0] += w * ux * uy;
            K[1] += w * ux * dy;
            K[2] += w * dx * uy;
            K[3] += w * dx * dy;
        }
    } else {
        for (int j = 0; j < n_modes; ++j) {
            double w = std::exp(-t * spec_.values[j]);
            if (w < 1e-300 * std::exp(-t * e0)) break;
            double px = 0, py = 0;
            for (int n = 0; n < M; ++n) {
                px += vectors_(n, j) * hx[n];
                py += vectors_(n, j) * hy[n];
            }
            K[0] += w * px * py;
        }
    }
    return K;
}

double SpectralOracle::truncation_weight(double t) const
{
    std::size_t k = spec_.trusted();
    return std::exp(-t * (spec_.values[k] - spec_.values[0]));
}

Eigen::MatrixXd SpectralOracle::eigenfunctions(const std::vector<double>& grid, int modes, int component) const
{
    const int M = op_M_;
    const int stride = spec_.sector == Sector::Full ? 2 : 1;
    Eigen::MatrixXd hermite(grid.size(), M);
    std::vector<double> h(M);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        hermite_states(M, grid[i], h.data());
        for (int n = 0; n < M; ++n) hermite(i, n) = h[n];
    }
    Eigen::MatrixXd coef(M, modes);
    for (int j = 0; j < modes; ++j)
        for (int n = 0; n < M; ++n) coef(n, j) = vectors_(stride * n + component, j);
    return hermite * coef;
}

double SpectralOracle::partition(double beta) const
{
    double z = 0.0;
    for (std::size_t j = 0; j < spec_.trusted(); ++j) z += std::exp(-beta * spec_.values[j]);
    return z;
}

} // namespace qrm
