#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

namespace mapcma
{
    using Vector = Eigen::VectorXd;
    using Matrix = Eigen::MatrixXd;

    /// Dense symmetric matrix. Symmetry is enforced on construction by
    /// averaging with the transpose, so entries (i, j) and (j, i) are always
    /// bit-identical.
    class SymMatrix
    {
    public:
        SymMatrix() = default;
        explicit SymMatrix(Matrix entries);

        static SymMatrix identity(std::size_t dim);
        static SymMatrix diagonal(const Vector& diag);

        [[nodiscard]] std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
        [[nodiscard]] const Matrix& matrix() const { return entries_; }
        [[nodiscard]] double operator()(std::size_t i, std::size_t j) const
        {
            return entries_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
        [[nodiscard]] double trace() const { return entries_.trace(); }

        friend SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(Matrix(s * a.entries_)); }
        friend SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
        friend SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);

    private:
        Matrix entries_;
    };

    /// Lower-triangular L with L * L^T == a. Throws NotPositiveDefinite when
    /// a pivot is not strictly positive.
    Matrix cholesky(const SymMatrix& a);

    struct EigenDecomposition
    {
        Vector values;  // ascending
        Matrix vectors; // columns are eigenvectors
    };

    EigenDecomposition eigh(const SymMatrix& a);

    struct InvSqrtResult
    {
        SymMatrix value;
        bool clamped = false;
    };

    /// Default floor: 1e-30 * trace(a) / dim, never below the smallest normal double.
    double default_eig_floor(const SymMatrix& a);

    /// Symmetric inverse square root B with B * A * B == I. Eigenvalues below
    /// eig_floor are raised to eig_floor before inversion and the event is
    /// reported through InvSqrtResult::clamped.
    InvSqrtResult inv_sqrt_sym(const SymMatrix& a, std::optional<double> eig_floor = std::nullopt);
    InvSqrtResult inv_sqrt_sym(const EigenDecomposition& eig, double eig_floor);

    /// Smallest eigenvalue, unclamped.
    double min_eigenvalue(const SymMatrix& a);
}
