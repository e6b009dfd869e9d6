#include "etcsim/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace etcsim {

// ---------------------------------------------------------------- Vector

Vector::Vector(std::size_t dim, double fill) : data_(dim, fill) {}
Vector::Vector(std::initializer_list<double> values) : data_(values) {}
Vector::Vector(std::vector<double> values) : data_(std::move(values)) {}

double Vector::dot(const Vector& other) const {
    if (dim() != other.dim()) throw DimensionError("Vector::dot: dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) s += data_[i] * other.data_[i];
    return s;
}

double Vector::norm() const { return std::sqrt(dot(*this)); }

double Vector::sum() const {
    double s = 0.0;
    for (double x : data_) s += x;
    return s;
}

double Vector::sum_abs() const {
    double s = 0.0;
    for (double x : data_) s += std::abs(x);
    return s;
}

Vector& Vector::operator+=(const Vector& rhs) {
    if (dim() != rhs.dim()) throw DimensionError("Vector +: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Vector& Vector::operator-=(const Vector& rhs) {
    if (dim() != rhs.dim()) throw DimensionError("Vector -: dimension mismatch");
    for (std::size_t i = 0; i < dim(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Vector& Vector::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

// ---------------------------------------------------------------- Matrix

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_) throw DimensionError("Matrix literal: ragged rows");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(const Vector& d) {
    Matrix m(d.dim(), d.dim());
    for (std::size_t i = 0; i < d.dim(); ++i) m(i, i) = d[i];
    return m;
}

Matrix Matrix::column(const Vector& v) {
    Matrix m(v.dim(), 1);
    for (std::size_t i = 0; i < v.dim(); ++i) m(i, 0) = v[i];
    return m;
}

Matrix Matrix::from_blocks(const std::vector<std::vector<Matrix>>& grid) {
    if (grid.empty() || grid.front().empty()) throw DimensionError("from_blocks: empty grid");
    const std::size_t bcols = grid.front().size();
    std::vector<std::size_t> heights, widths(bcols, 0);
    for (const auto& brow : grid) {
        if (brow.size() != bcols) throw DimensionError("from_blocks: ragged block rows");
        heights.push_back(brow.front().rows());
    }
    for (std::size_t j = 0; j < bcols; ++j) widths[j] = grid.front()[j].cols();

    std::size_t total_r = 0, total_c = 0;
    for (auto h : heights) total_r += h;
    for (auto w : widths) total_c += w;
    Matrix out(total_r, total_c);

    std::size_t r0 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::size_t c0 = 0;
        for (std::size_t j = 0; j < bcols; ++j) {
            const Matrix& b = grid[i][j];
            if (b.rows() != heights[i] || b.cols() != widths[j])
                throw DimensionError("from_blocks: block size mismatch");
            out.set_block(r0, c0, b);
            c0 += widths[j];
        }
        r0 += heights[i];
    }
    return out;
}

Matrix Matrix::block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
    if (r0 + rows > rows_ || c0 + cols > cols_) throw DimensionError("Matrix::block out of range");
    Matrix b(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) b(r, c) = (*this)(r0 + r, c0 + c);
    return b;
}

void Matrix::set_block(std::size_t r0, std::size_t c0, const Matrix& b) {
    if (r0 + b.rows() > rows_ || c0 + b.cols() > cols_) throw DimensionError("Matrix::set_block out of range");
    for (std::size_t r = 0; r < b.rows(); ++r)
        for (std::size_t c = 0; c < b.cols(); ++c) (*this)(r0 + r, c0 + c) = b(r, c);
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::symmetric_part() const {
    if (!is_square()) throw DimensionError("symmetric_part: matrix not square");
    Matrix s(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) s(r, c) = 0.5 * ((*this)(r, c) + (*this)(c, r));
    return s;
}

double Matrix::norm_1() const {
    double best = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) {
        double s = 0.0;
        for (std::size_t r = 0; r < rows_; ++r) s += std::abs((*this)(r, c));
        best = std::max(best, s);
    }
    return best;
}

double Matrix::norm_inf() const { return transpose().norm_1(); }

double Matrix::norm_fro() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
}

Vector Matrix::diag() const {
    Vector d(std::min(rows_, cols_));
    for (std::size_t i = 0; i < d.dim(); ++i) d[i] = (*this)(i, i);
    return d;
}

Vector Matrix::col(std::size_t c) const {
    Vector v(rows_);
    for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
    return v;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("Matrix +: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    if (rows_ != rhs.rows_ || cols_ != rhs.cols_) throw DimensionError("Matrix -: dimension mismatch");
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& x : data_) x *= s;
    return *this;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionError("Matrix *: inner dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
        for (std::size_t k = 0; k < a.cols_; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols_ != x.dim()) throw DimensionError("Matrix * Vector: dimension mismatch");
    Vector y(a.rows_);
    for (std::size_t i = 0; i < a.rows_; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < a.cols_; ++k) s += a(i, k) * x[k];
        y[i] = s;
    }
    return y;
}

std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    for (std::size_t r = 0; r < m.rows(); ++r) {
        os << (r == 0 ? "[" : " ");
        for (std::size_t c = 0; c < m.cols(); ++c) os << std::setw(13) << m(r, c);
        os << (r + 1 == m.rows() ? "]" : "\n");
    }
    return os;
}

std::ostream& operator<<(std::ostream& os, const Vector& v) {
    os << "(";
    for (std::size_t i = 0; i < v.dim(); ++i) os << (i ? ", " : "") << v[i];
    return os << ")";
}

// -------------------------------------------------------------- kernels

Matrix expm(const Matrix& m, double t) {
    if (!m.is_square()) throw DimensionError("expm: matrix not square");
    const std::size_t n = m.rows();
    Matrix x = m * t;

    int squarings = 0;
    const double norm = x.norm_1();
    if (norm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
        x *= std::ldexp(1.0, -squarings);
    }

    // ||x|| <= 0.5: 30 Taylor terms bound the remainder far below eps.
    Matrix result = Matrix::identity(n);
    Matrix term = Matrix::identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = term * x;
        term *= 1.0 / k;
        const double tn = term.max_abs();
        if (tn == 0.0) break;
        result += term;
        if (tn <= std::numeric_limits<double>::epsilon() * 1e-3 * result.max_abs()) break;
    }
    for (int s = 0; s < squarings; ++s) result = result * result;
    return result;
}

bool is_positive_definite(const Matrix& m, double tol) {
    if (!m.is_square()) throw DimensionError("is_positive_definite: matrix not square");
    const std::size_t n = m.rows();
    Matrix l = m.symmetric_part();
    for (std::size_t j = 0; j < n; ++j) {
        double d = l(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > tol)) return false;
        const double ljj = std::sqrt(d);
        l(j, j) = ljj;
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = l(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / ljj;
        }
    }
    return true;
}

SymmetricEigen symmetric_eigen(const Matrix& m) {
    if (!m.is_square()) throw DimensionError("symmetric_eigen: matrix not square");
    const std::size_t n = m.rows();
    Matrix a = m.symmetric_part();
    Matrix v = Matrix::identity(n);
    const double scale = std::max(a.norm_fro(), std::numeric_limits<double>::min());

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(off) <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (a(p, q) == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    SymmetricEigen out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v(r, order[k]);
    }
    return out;
}

Matrix psd_factor(const Matrix& m, double tol) {
    if (!m.is_square()) throw DimensionError("psd_factor: matrix not square");
    const std::size_t n = m.rows();
    const SymmetricEigen eig = symmetric_eigen(m);
    const double floor = -tol * (1.0 + m.norm_fro());
    if (eig.values[0] < floor) {
        std::ostringstream msg;
        msg << "psd_factor: eigenvalue " << eig.values[0] << " below " << floor;
        throw NotPsdError(msg.str());
    }
    Matrix s(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        const double root = std::sqrt(std::max(eig.values[k], 0.0));
        for (std::size_t r = 0; r < n; ++r) s(r, k) = eig.vectors(r, k) * root;
    }
    return s;
}

Matrix solve(const Matrix& m, const Matrix& b) {
    if (!m.is_square()) throw DimensionError("solve: matrix not square");
    if (b.rows() != m.rows()) throw DimensionError("solve: right-hand side has wrong row count");
    const std::size_t n = m.rows();
    Matrix lu = m;
    Matrix x = b;
    const double pivot_floor = 1e-13 * std::max(m.max_abs(), std::numeric_limits<double>::min());

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::abs(lu(i, k)) > std::abs(lu(piv, k))) piv = i;
        if (std::abs(lu(piv, k)) <= pivot_floor) throw SingularMatrixError("solve: matrix is singular to working tolerance");
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(piv, c));
            for (std::size_t c = 0; c < x.cols(); ++c) std::swap(x(k, c), x(piv, c));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            if (f == 0.0) continue;
            lu(i, k) = f;
            for (std::size_t c = k + 1; c < n; ++c) lu(i, c) -= f * lu(k, c);
            for (std::size_t c = 0; c < x.cols(); ++c) x(i, c) -= f * x(k, c);
        }
    }
    for (std::size_t kk = n; kk-- > 0;) {
        for (std::size_t c = 0; c < x.cols(); ++c) {
            double s = x(kk, c);
            for (std::size_t j = kk + 1; j < n; ++j) s -= lu(kk, j) * x(j, c);
            x(kk, c) = s / lu(kk, kk);
        }
    }
    return x;
}

Matrix inverse(const Matrix& m) { return solve(m, Matrix::identity(m.rows())); }

std::vector<double> characteristic_polynomial(const Matrix& m) {
    if (!m.is_square()) throw DimensionError("characteristic_polynomial: matrix not square");
    const std::size_t n = m.rows();
    std::vector<double> p(n + 1, 0.0);
    p[0] = 1.0;
    Matrix mk = Matrix::zeros(n, n);
    const Matrix id = Matrix::identity(n);
    for (std::size_t k = 1; k <= n; ++k) {
        mk = m * mk + id * p[k - 1];
        const Matrix amk = m * mk;
        double tr = 0.0;
        for (std::size_t i = 0; i < n; ++i) tr += amk(i, i);
        p[k] = -tr / static_cast<double>(k);
    }
    return p;
}

bool is_hurwitz(const Matrix& m) {
    const std::vector<double> p = characteristic_polynomial(m);
    const std::size_t n = p.size() - 1;
    // Routh array: rows alternate even/odd coefficients.
    std::vector<double> prev, cur;
    for (std::size_t i = 0; i <= n; i += 2) prev.push_back(p[i]);
    for (std::size_t i = 1; i <= n; i += 2) cur.push_back(p[i]);
    const double scale = std::max(1.0, *std::max_element(p.begin(), p.end(),
                                                         [](double a, double b) { return std::abs(a) < std::abs(b); }));
    if (!(prev.front() > 0)) return false;
    for (std::size_t row = 1; row <= n; ++row) {
        if (cur.empty() || !(cur.front() > 1e-14 * scale)) return false;
        std::vector<double> next;
        for (std::size_t k = 0; k + 1 < prev.size(); ++k) {
            const double a = prev[k + 1];
            const double b = k + 1 < cur.size() ? cur[k + 1] : 0.0;
            next.push_back((cur.front() * a - prev.front() * b) / cur.front());
        }
        prev = std::move(cur);
        cur = std::move(next);
    }
    return true;
}

// ------------------------------------------------------------------- I/O

namespace {

std::vector<double> parse_numbers(const std::string& text) {
    std::string cleaned = text;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::vector<double> out;
    std::string tok;
    while (in >> tok) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("cannot parse number '" + tok + "'");
        }
        if (used != tok.size()) throw std::invalid_argument("cannot parse number '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

}  // namespace

Matrix parse_matrix(const std::string& text) {
    std::vector<std::vector<double>> rows;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(';', start), text.size());
        auto row = parse_numbers(text.substr(start, end - start));
        if (!row.empty()) rows.push_back(std::move(row));
        start = end + 1;
    }
    if (rows.empty()) throw DimensionError("parse_matrix: no entries");
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) throw DimensionError("parse_matrix: ragged rows");
        for (std::size_t c = 0; c < m.cols(); ++c) m(r, c) = rows[r][c];
    }
    return m;
}

Vector parse_vector(const std::string& text) {
    auto values = parse_numbers(text);
    if (values.empty()) throw DimensionError("parse_vector: no entries");
    return Vector(std::move(values));
}

std::string format_matrix(const Matrix& m) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        if (r) os << "; ";
        for (std::size_t c = 0; c < m.cols(); ++c) os << (c ? " " : "") << m(r, c);
    }
    return os.str();
}

std::string format_vector(const Vector& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (std::size_t i = 0; i < v.dim(); ++i) os << (i ? " " : "") << v[i];
    return os.str();
}

}  // namespace etcsim
