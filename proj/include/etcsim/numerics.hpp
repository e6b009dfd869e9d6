#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace etcsim {

struct DimensionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NotPsdError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense real column vector.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t dim, double fill = 0.0);
    Vector(std::initializer_list<double> values);
    explicit Vector(std::vector<double> values);

    static Vector constant(std::size_t dim, double value) { return Vector(dim, value); }

    [[nodiscard]] std::size_t dim() const { return data_.size(); }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }

    [[nodiscard]] const std::vector<double>& values() const { return data_; }
    [[nodiscard]] auto begin() const { return data_.begin(); }
    [[nodiscard]] auto end() const { return data_.end(); }

    [[nodiscard]] double dot(const Vector& other) const;
    [[nodiscard]] double norm() const;
    [[nodiscard]] double sum() const;
    [[nodiscard]] double sum_abs() const;

    Vector& operator+=(const Vector& rhs);
    Vector& operator-=(const Vector& rhs);
    Vector& operator*=(double s);

    friend Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
    friend Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
    friend Vector operator*(Vector v, double s) { return v *= s; }
    friend Vector operator*(double s, Vector v) { return v *= s; }
    friend Vector operator-(Vector v) { return v *= -1.0; }
    friend bool operator==(const Vector&, const Vector&) = default;

private:
    std::vector<double> data_;
};

/// Dense row-major real matrix, sized at runtime. Everything in this
/// project is at most a few dozen rows, so no effort goes into blocking.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Row-wise literal: Matrix{{1, 2}, {3, 4}}.
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix zeros(std::size_t rows, std::size_t cols) { return Matrix(rows, cols); }
    static Matrix identity(std::size_t n);
    static Matrix diagonal(const Vector& d);
    static Matrix column(const Vector& v);
    /// Assemble from a grid of blocks; blocks in a block-row share a height,
    /// blocks in a block-column share a width.
    static Matrix from_blocks(const std::vector<std::vector<Matrix>>& grid);

    [[nodiscard]] std::size_t rows() const { return rows_; }
    [[nodiscard]] std::size_t cols() const { return cols_; }
    [[nodiscard]] bool is_square() const { return rows_ == cols_; }
    [[nodiscard]] bool empty() const { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    [[nodiscard]] Matrix block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
    void set_block(std::size_t r0, std::size_t c0, const Matrix& b);

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Matrix symmetric_part() const;
    [[nodiscard]] double norm_1() const;
    [[nodiscard]] double norm_inf() const;
    [[nodiscard]] double norm_fro() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] Vector diag() const;
    [[nodiscard]] Vector col(std::size_t c) const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    friend Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
    friend Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
    friend Matrix operator*(Matrix m, double s) { return m *= s; }
    friend Matrix operator*(double s, Matrix m) { return m *= s; }
    friend Matrix operator-(Matrix m) { return m *= -1.0; }
    friend Matrix operator*(const Matrix& a, const Matrix& b);
    friend Vector operator*(const Matrix& a, const Vector& x);
    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

std::ostream& operator<<(std::ostream& os, const Matrix& m);
std::ostream& operator<<(std::ostream& os, const Vector& v);

/// Default pivot tolerance for definiteness tests.
inline constexpr double kDefiniteTol = 1e-9;

/// e^{M t} by scaling and squaring around a truncated Taylor core.
/// The argument is scaled until ||M t||_1 <= 0.5.
Matrix expm(const Matrix& m, double t = 1.0);

/// Cholesky-based test on the symmetric part (M + M^T)/2: true iff every
/// pivot exceeds tol.
bool is_positive_definite(const Matrix& m, double tol = kDefiniteTol);

/// S with S S^T = M for symmetric positive semidefinite M. Eigenvalues in
/// [-tol (1 + ||M||), 0) are clipped to zero; anything more negative throws
/// NotPsdError.
Matrix psd_factor(const Matrix& m, double tol = kDefiniteTol);

/// X with M X = B via LU with partial pivoting. Throws SingularMatrixError
/// when a pivot falls below a relative tolerance.
Matrix solve(const Matrix& m, const Matrix& b);
Matrix inverse(const Matrix& m);

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // columns are eigenvectors
};

/// Cyclic Jacobi eigendecomposition of the symmetric part of M.
SymmetricEigen symmetric_eigen(const Matrix& m);

/// Characteristic polynomial coefficients c[0..n] of det(sI - M), c[0] = 1,
/// by Faddeev-LeVerrier.
std::vector<double> characteristic_polynomial(const Matrix& m);

/// All eigenvalues strictly in the open left half-plane (Routh-Hurwitz on
/// the characteristic polynomial).
bool is_hurwitz(const Matrix& m);

/// Parse "a b c; d e f" into a matrix. Commas also separate entries.
Matrix parse_matrix(const std::string& text);
Vector parse_vector(const std::string& text);
std::string format_matrix(const Matrix& m);
std::string format_vector(const Vector& v);

}  // namespace etcsim
