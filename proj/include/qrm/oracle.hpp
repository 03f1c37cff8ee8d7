#pragma once

#include "qrm/params.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace qrm {

// Truncated Fock-basis matrix.  Parity blocks act on |0>..|M-1>; the full
// Hamiltonian on |n, s> with index 2n + s, s = 0 for spin up (sigma_z = +1).
struct TruncatedOperator {
    int M = 0;
    Sector sector = Sector::Full;
    ModelParams params;
    Eigen::MatrixXd H;
};

struct Spectrum {
    std::vector<double> values;   // ascending
    Sector sector = Sector::Full;
    int M = 0;

    // Eigenvalues below the truncation edge: the lowest floor(dim/2).
    std::size_t trusted() const { return values.size() / 2; }
};

TruncatedOperator parity_matrix(int M, Parity parity, const ModelParams& p);
TruncatedOperator full_matrix(int M, const ModelParams& p);
Spectrum spectrum(const TruncatedOperator& op);

// Normalized oscillator eigenfunction psi_n(x), 0 <= n <= 2000.
double hermite_state(int n, double x);
// psi_0(x) .. psi_{count-1}(x) in one sweep.
void hermite_states(int count, double x, double* out);

// Number of trusted eigenvalues <= T.  Throws DomainError if T is beyond
// the largest trusted eigenvalue.
int counting(double T, const Spectrum& spec);

// Eigen-decomposition of a truncated operator with helpers for spectral
// expansions in the position representation.
class SpectralOracle {
public:
    explicit SpectralOracle(const TruncatedOperator& op);

    const Spectrum& spec() const { return spec_; }
    const Eigen::MatrixXd& vectors() const { return vectors_; }
    int M() const { return op_M_; }
    Sector sector() const { return spec_.sector; }

    // sum_j e^{-t lambda_j} Phi_j(x) Phi_j(y)^T over the trusted range.
    // Full sector: 2x2 (row-major up/down); parity: a single entry.
    std::array<double, 4> heat_kernel(double x, double y, double t) const;
    // Largest omitted weight e^{-t lambda} relative to the kept ground term.
    double truncation_weight(double t) const;

    // Eigenfunction components on a grid: rows = grid points, cols = modes
    // (first `modes` eigenvectors); for the full sector two blocks (up, down).
    Eigen::MatrixXd eigenfunctions(const std::vector<double>& grid, int modes, int component = 0) const;

    // Partition sum over the trusted range.
    double partition(double beta) const;

private:
    int op_M_;
    Spectrum spec_;
    Eigen::MatrixXd vectors_;
};

} // namespace qrm
