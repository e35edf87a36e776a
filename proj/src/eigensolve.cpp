// Copyright bloch-nitsche contributors
// SPDX-License-Identifier: Apache-2.0

#include "bloch_nitsche/eigensolve.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bloch_nitsche {

namespace {

double max_abs_entry(const SpMat& M)
{
    double m = 0.0;
    for (int c = 0; c < M.outerSize(); ++c)
        for (SpMat::InnerIterator it(M, c); it; ++it) m = std::max(m, std::abs(it.value()));
    return m;
}

enum class FactorStatus { Ok, Singular, Indefinite };

class ShiftInvert {
public:
    ShiftInvert(const SpMat& A, const SpMat& B) : A_(A), B_(B) {}

    FactorStatus factor(double sigma)
    {
        sigma_ = sigma;
        const SpMat K = A_ - sigma * B_;
        ldlt_.compute(K);
        if (ldlt_.info() != Eigen::Success) return FactorStatus::Singular;
        const VecXc d = ldlt_.vectorD();
        double dmax = 0.0;
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (!std::isfinite(d[i].real())) return FactorStatus::Singular;
            dmax = std::max(dmax, std::abs(d[i].real()));
        }
        for (Eigen::Index i = 0; i < d.size(); ++i) {
            if (std::abs(d[i].real()) <= 1e-14 * dmax) return FactorStatus::Singular;
            if (d[i].real() < 0.0) return FactorStatus::Indefinite;
        }
        return FactorStatus::Ok;
    }

    /// (A - sigma B)^-1 B X
    MatXc apply(const MatXc& X) const { return ldlt_.solve(MatXc(B_ * X)); }
    double sigma() const { return sigma_; }

private:
    const SpMat& A_;
    const SpMat& B_;
    Eigen::SimplicialLDLT<SpMat, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt_;
    double sigma_ = 0.0;
};

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    VecXc vector(Eigen::Index n)
    {
        VecXc v(n);
        for (Eigen::Index i = 0; i < n; ++i) v[i] = cplx(dist_(gen_), dist_(gen_));
        return v;
    }

private:
    std::mt19937_64 gen_;
    std::normal_distribution<double> dist_;
};

// B-orthonormal basis with its B-image kept alongside.
struct Basis {
    MatXc V, BV;
    int cols = 0;

    // Orthogonalizes x against the basis (twice) and appends it; a column that
    // collapses is replaced by a fresh random direction.
    void append(VecXc x, const SpMat& B, Rng& rng)
    {
        for (int attempt = 0; attempt < 8; ++attempt) {
            const double before = std::sqrt(std::max(x.dot(B * x).real(), 0.0));
            for (int pass = 0; pass < 2; ++pass) {
                const VecXc c = BV.leftCols(cols).adjoint() * x;
                x.noalias() -= V.leftCols(cols) * c;
            }
            const VecXc bx = B * x;
            const double nrm = std::sqrt(std::max(x.dot(bx).real(), 0.0));
            if (before > 0.0 && nrm > 1e-10 * before) {
                V.col(cols) = x / nrm;
                BV.col(cols) = bx / nrm;
                ++cols;
                return;
            }
            x = rng.vector(x.size());
        }
        throw Error("unable to extend the Krylov basis");
    }
};

struct RitzCheck {
    std::vector<char> ok;
    Eigen::VectorXd residual;  // scaled by |x|_B = 1
    int prefix = 0;            // leading pairs that all pass
};

RitzCheck check_pairs(const SpMat& A, const SpMat& B, const Eigen::VectorXd& E, const MatXc& X, double tol,
                      double normA)
{
    RitzCheck rc;
    const int k = static_cast<int>(E.size());
    rc.ok.assign(k, 0);
    rc.residual.resize(k);
    const MatXc AX = A * X, BX = B * X;
    bool leading = true;
    for (int i = 0; i < k; ++i) {
        const double r = (AX.col(i) - E[i] * BX.col(i)).norm();
        const double xb = std::sqrt(std::max(X.col(i).dot(BX.col(i)).real(), 0.0));
        rc.residual[i] = xb > 0.0 ? r / xb : r;
        rc.ok[i] = r <= tol * normA * X.col(i).norm();
        if (leading && rc.ok[i])
            ++rc.prefix;
        else
            leading = false;
    }
    return rc;
}

EigenResult select(const EigenResult& full, const std::vector<int>& idx)
{
    EigenResult out;
    out.shift = full.shift;
    out.iterations = full.iterations;
    out.eigenvalues.resize(static_cast<Eigen::Index>(idx.size()));
    out.residuals.resize(static_cast<Eigen::Index>(idx.size()));
    out.eigenvectors.resize(full.eigenvectors.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out.eigenvalues[i] = full.eigenvalues[idx[i]];
        out.residuals[i] = full.residuals[idx[i]];
        out.eigenvectors.col(i) = full.eigenvectors.col(idx[i]);
    }
    return out;
}

EigenResult dense_smallest(const SpMat& A, const SpMat& B, int nev, double tol)
{
    EigenResult full = solve_dense(A, B, std::numeric_limits<int>::max());
    const int n = static_cast<int>(A.rows());
    std::vector<int> idx(nev);
    for (int i = 0; i < nev; ++i) idx[i] = i;
    EigenResult out = select(full, idx);
    const RitzCheck rc = check_pairs(A, B, out.eigenvalues, out.eigenvectors, tol, max_abs_entry(A));
    out.residuals = rc.residual;
    if (rc.prefix < nev && n > 0) {
        std::vector<int> good;
        for (int i = 0; i < nev; ++i)
            if (rc.ok[i]) good.push_back(i);
        throw SolverError("dense eigensolve did not meet the residual tolerance", select(out, good));
    }
    return out;
}

}  // namespace

EigenResult solve_smallest(const SpMat& A, const SpMat& B, int nev, double shift, double tol, int maxIter)
{
    EigenOptions o;
    o.shift = shift;
    o.tol = tol;
    o.maxIter = maxIter;
    return solve_smallest(A, B, nev, o);
}

EigenResult solve_smallest(const SpMat& A, const SpMat& B, int nev, const EigenOptions& options)
{
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || B.rows() != n || B.cols() != n) throw Error("eigensolve: matrix dimensions disagree");
    if (nev < 1 || nev > n) {
        std::ostringstream os;
        os << "eigensolve: nev = " << nev << " outside [1, " << n << "]";
        throw Error(os.str());
    }
    if (!(options.tol > 0.0)) throw Error("eigensolve: tolerance must be positive");

    const int p = std::max(1, std::min(options.blockSize, n));
    const int kKeep = (nev + 2 * p + p - 1) / p * p;
    const int m = 2 * kKeep;
    if (m + p > n) return dense_smallest(A, B, nev, options.tol);

    ShiftInvert op(A, B);
    double sigma = options.shift;
    FactorStatus status = op.factor(sigma);
    if (status != FactorStatus::Ok) {
        sigma -= 1.0;
        status = op.factor(sigma);
    }
    if (status == FactorStatus::Singular)
        throw Error("eigensolve: factorization of the shifted matrix broke down at shift " + std::to_string(sigma));
    if (status == FactorStatus::Indefinite)
        throw Error("eigensolve: shifted matrix is indefinite at shift " + std::to_string(sigma) +
                    " (an eigenvalue lies below the shift)");

    const double normA = max_abs_entry(A);
    const int maxIter = options.maxIter > 0 ? options.maxIter : 500 * nev;

    Rng rng(options.seed);
    Basis basis;
    basis.V.resize(n, m + p);
    basis.BV.resize(n, m + p);
    MatXc W(n, m);
    MatXc H = MatXc::Zero(m, m);
    for (int j = 0; j < p; ++j) basis.append(rng.vector(n), B, rng);

    int jW = 0;
    int iter = 0;
    EigenResult best;
    best.shift = sigma;
    while (true) {
        while (jW < m) {
            const int nb = basis.cols - jW;
            const MatXc Wnew = op.apply(basis.V.middleCols(jW, nb));
            W.middleCols(jW, nb) = Wnew;
            const MatXc Hc = basis.BV.leftCols(jW + nb).adjoint() * Wnew;
            H.block(0, jW, jW + nb, nb) = Hc;
            H.block(jW, 0, nb, jW) = Hc.topRows(jW).adjoint();
            jW += nb;
            for (int j = 0; j < nb; ++j) basis.append(Wnew.col(j), B, rng);
            ++iter;
        }

        const MatXc Hs = 0.5 * (H + H.adjoint());
        Eigen::SelfAdjointEigenSolver<MatXc> es(Hs);
        if (es.info() != Eigen::Success) throw Error("eigensolve: projected eigenproblem failed");
        // theta ascending; the wanted end is the largest theta.
        const Eigen::VectorXd theta = es.eigenvalues().reverse();
        const MatXc Y = es.eigenvectors().rowwise().reverse();

        Eigen::VectorXd E(nev);
        for (int i = 0; i < nev; ++i) E[i] = sigma + 1.0 / theta[i];
        const MatXc X = basis.V.leftCols(m) * Y.leftCols(nev);
        const RitzCheck rc = check_pairs(A, B, E, X, options.tol, normA);

        best.eigenvalues = E;
        best.eigenvectors = X;
        best.residuals = rc.residual;
        best.iterations = iter;
        if (rc.prefix == nev) break;

        if (iter >= maxIter) {
            std::vector<int> good;
            for (int i = 0; i < nev; ++i)
                if (rc.ok[i]) good.push_back(i);
            std::ostringstream os;
            os << "eigensolve: " << good.size() << " of " << nev << " pairs converged after " << iter
               << " block steps";
            throw SolverError(os.str(), select(best, good));
        }

        // Thick restart: keep kKeep Ritz vectors plus the unprocessed last block.
        const MatXc Yk = Y.leftCols(kKeep);
        const MatXc Vk = basis.V.leftCols(m) * Yk;
        const MatXc BVk = basis.BV.leftCols(m) * Yk;
        const MatXc Wk = W * Yk;
        const MatXc lastV = basis.V.middleCols(m, p);
        const MatXc lastBV = basis.BV.middleCols(m, p);
        basis.V.leftCols(kKeep) = Vk;
        basis.BV.leftCols(kKeep) = BVk;
        basis.V.middleCols(kKeep, p) = lastV;
        basis.BV.middleCols(kKeep, p) = lastBV;
        basis.cols = kKeep + p;
        W.leftCols(kKeep) = Wk;
        H.setZero();
        for (int i = 0; i < kKeep; ++i) H(i, i) = theta[i];
        jW = kKeep;
    }

    // Ritz values from the projection are ascending already; sort defensively.
    std::vector<int> order(nev);
    for (int i = 0; i < nev; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return best.eigenvalues[a] < best.eigenvalues[b]; });
    return select(best, order);
}

EigenResult solve_dense(const MatXc& A, const MatXc& B, int cap)
{
    const Eigen::Index n = A.rows();
    if (A.cols() != n || B.rows() != n || B.cols() != n) throw Error("dense eigensolve: dimensions disagree");
    if (n > cap) {
        std::ostringstream os;
        os << "dense eigensolve: dimension " << n << " exceeds the cap " << cap;
        throw Error(os.str());
    }
    const MatXc Bh = 0.5 * (B + B.adjoint());
    Eigen::LLT<MatXc> llt(Bh);
    if (llt.info() != Eigen::Success) throw Error("dense eigensolve: B is not positive definite");
    const MatXc L = llt.matrixL();
    MatXc C = L.triangularView<Eigen::Lower>().solve(A);
    C = L.triangularView<Eigen::Lower>().solve(MatXc(C.adjoint()));
    C = 0.5 * (C + C.adjoint());
    Eigen::SelfAdjointEigenSolver<MatXc> es(C);
    if (es.info() != Eigen::Success) throw Error("dense eigensolve: Hermitian eigensolve failed");

    EigenResult out;
    out.eigenvalues = es.eigenvalues();
    out.eigenvectors = L.adjoint().triangularView<Eigen::Upper>().solve(es.eigenvectors());
    out.residuals.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const VecXc x = out.eigenvectors.col(i);
        const VecXc Bx = B * x;
        const double xb = std::sqrt(std::max(x.dot(Bx).real(), 0.0));
        out.residuals[i] = (A * x - out.eigenvalues[i] * Bx).norm() / xb;
    }
    out.shift = 0.0;
    return out;
}

EigenResult solve_dense(const SpMat& A, const SpMat& B, int cap)
{
    if (A.rows() > cap) {
        std::ostringstream os;
        os << "dense eigensolve: dimension " << A.rows() << " exceeds the cap " << cap;
        throw Error(os.str());
    }
    return solve_dense(MatXc(A), MatXc(B), cap);
}

double b_orthonormality_defect(const MatXc& X, const SpMat& B)
{
    const MatXc G = X.adjoint() * (B * X);
    return (G - MatXc::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff();
}

}  // namespace bloch_nitsche
