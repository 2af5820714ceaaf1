#include "mapcma/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "mapcma/errors.hpp"

namespace mapcma
{
    SymMatrix::SymMatrix(Matrix entries) : entries_(std::move(entries))
    {
        if (entries_.rows() != entries_.cols())
            throw DimensionMismatch("SymMatrix requires a square matrix");
        if (entries_.rows() < 1)
            throw DimensionMismatch("SymMatrix requires dim >= 1");
        const Eigen::Index n = entries_.rows();
        for (Eigen::Index j = 0; j < n; ++j)
            for (Eigen::Index i = j + 1; i < n; ++i)
            {
                const double v = 0.5 * (entries_(i, j) + entries_(j, i));
                entries_(i, j) = v;
                entries_(j, i) = v;
            }
    }

    SymMatrix SymMatrix::identity(std::size_t dim)
    {
        const auto n = static_cast<Eigen::Index>(dim);
        return SymMatrix(Matrix::Identity(n, n));
    }

    SymMatrix SymMatrix::diagonal(const Vector& diag)
    {
        return SymMatrix(Matrix(diag.asDiagonal()));
    }

    SymMatrix operator+(const SymMatrix& a, const SymMatrix& b)
    {
        if (a.dim() != b.dim())
            throw DimensionMismatch("SymMatrix addition with different dims");
        return SymMatrix(Matrix(a.entries_ + b.entries_));
    }

    SymMatrix operator-(const SymMatrix& a, const SymMatrix& b)
    {
        if (a.dim() != b.dim())
            throw DimensionMismatch("SymMatrix subtraction with different dims");
        return SymMatrix(Matrix(a.entries_ - b.entries_));
    }

    Matrix cholesky(const SymMatrix& a)
    {
        Eigen::LLT<Matrix> llt(a.matrix());
        if (llt.info() != Eigen::Success)
            throw NotPositiveDefinite("cholesky: non-positive pivot in " + std::to_string(a.dim()) + "x" +
                                      std::to_string(a.dim()) + " matrix");
        return llt.matrixL();
    }

    EigenDecomposition eigh(const SymMatrix& a)
    {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix());
        return {solver.eigenvalues(), solver.eigenvectors()};
    }

    double default_eig_floor(const SymMatrix& a)
    {
        return std::max(1e-30 * std::abs(a.trace()) / static_cast<double>(a.dim()),
                        std::numeric_limits<double>::min());
    }

    InvSqrtResult inv_sqrt_sym(const EigenDecomposition& eig, double eig_floor)
    {
        bool clamped = false;
        Vector scale(eig.values.size());
        for (Eigen::Index i = 0; i < eig.values.size(); ++i)
        {
            double lambda = eig.values(i);
            if (!(lambda >= eig_floor))
            {
                lambda = eig_floor;
                clamped = true;
            }
            scale(i) = 1.0 / std::sqrt(lambda);
        }
        Matrix b = eig.vectors * scale.asDiagonal() * eig.vectors.transpose();
        return {SymMatrix(std::move(b)), clamped};
    }

    InvSqrtResult inv_sqrt_sym(const SymMatrix& a, std::optional<double> eig_floor)
    {
        const double floor = eig_floor.value_or(default_eig_floor(a));
        return inv_sqrt_sym(eigh(a), floor);
    }

    double min_eigenvalue(const SymMatrix& a)
    {
        Eigen::SelfAdjointEigenSolver<Matrix> solver(a.matrix(), Eigen::EigenvaluesOnly);
        return solver.eigenvalues()(0);
    }
}
