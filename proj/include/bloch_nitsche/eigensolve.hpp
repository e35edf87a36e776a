// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

// Smallest eigenpairs of the Hermitian pencil A x = E B x.

#pragma once

#include <cstdint>

#include "bloch_nitsche/types.hpp"

namespace bloch_nitsche {

struct EigenResult {
    Eigen::VectorXd eigenvalues;  // ascending
    MatXc eigenvectors;           // B-orthonormal columns
    Eigen::VectorXd residuals;    // |A x - E B x|_2 / |x|_B
    double shift = 0.0;
    int iterations = 0;

    int size() const { return static_cast<int>(eigenvalues.size()); }
};

/// Non-convergence; `partial()` holds the pairs that did meet the residual contract.
class SolverError : public Error {
public:
    SolverError(const std::string& what, EigenResult partial) : Error(what), partial_(std::move(partial)) {}
    const EigenResult& partial() const { return partial_; }

private:
    EigenResult partial_;
};

struct EigenOptions {
    double shift = -1.0;
    double tol = 1e-9;
    int maxIter = 0;  // 0 selects 500 * nev block steps
    int blockSize = 4;
    std::uint64_t seed = 20190813;
};

/// Shift-invert block Lanczos in the B inner product with full reorthogonalization
/// and thick restarts. Each returned pair satisfies
/// |A x - E B x|_2 <= tol * max|A_ij| * |x|_2.
EigenResult solve_smallest(const SpMat& A, const SpMat& B, int nev, const EigenOptions& options = {});
EigenResult solve_smallest(const SpMat& A, const SpMat& B, int nev, double shift, double tol, int maxIter = 0);

inline constexpr int kDenseCap = 2000;

/// Full spectrum via B = L L^H and a standard Hermitian eigensolve.
EigenResult solve_dense(const MatXc& A, const MatXc& B, int cap = kDenseCap);
EigenResult solve_dense(const SpMat& A, const SpMat& B, int cap = kDenseCap);

/// Max |M^H B M - I|.
double b_orthonormality_defect(const MatXc& X, const SpMat& B);

}  // namespace bloch_nitsche
