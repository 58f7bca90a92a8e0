#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwellcert {

using Vec = std::vector<double>;

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw std::invalid_argument(message);
    }
}

/// Dense real matrix, row-major storage.
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        require(rows > 0 && cols > 0, "Matrix: dimensions must be positive");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = 1.0;
        }
        return m;
    }

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
        require(rows.size() > 0, "Matrix: empty row list");
        const std::size_t r = rows.size();
        const std::size_t c = rows.begin()->size();
        Matrix m(r, c);
        std::size_t i = 0;
        for (const auto& row : rows) {
            require(row.size() == c, "Matrix: ragged row list");
            std::size_t j = 0;
            for (double v : row) {
                m(i, j++) = v;
            }
            ++i;
        }
        require(m.all_finite(), "Matrix: non-finite entry");
        return m;
    }

    /// Builds from row-major data; rejects non-finite entries.
    static Matrix from_data(std::size_t rows, std::size_t cols, Vec data) {
        require(data.size() == rows * cols, "Matrix: data length mismatch");
        Matrix m(rows, cols);
        m.data_ = std::move(data);
        require(m.all_finite(), "Matrix: non-finite entry");
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const Vec& data() const { return data_; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    Matrix& operator+=(const Matrix& other) {
        require(rows_ == other.rows_ && cols_ == other.cols_, "Matrix: shape mismatch in +=");
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += other.data_[k];
        }
        return *this;
    }

    Matrix& operator-=(const Matrix& other) {
        require(rows_ == other.rows_ && cols_ == other.cols_, "Matrix: shape mismatch in -=");
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= other.data_[k];
        }
        return *this;
    }

    Matrix& operator*=(double s) {
        for (double& v : data_) {
            v *= s;
        }
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        require(a.cols_ == b.rows_, "Matrix: shape mismatch in product");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    double norm_one() const {  // max column sum
        double best = 0.0;
        for (std::size_t j = 0; j < cols_; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < rows_; ++i) {
                s += std::abs((*this)(i, j));
            }
            best = std::max(best, s);
        }
        return best;
    }

    double norm_inf() const {  // max row sum
        double best = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) {
                s += std::abs((*this)(i, j));
            }
            best = std::max(best, s);
        }
        return best;
    }

    double norm_fro() const {
        double s = 0.0;
        for (double v : data_) {
            s += v * v;
        }
        return std::sqrt(s);
    }

    double trace() const {
        require(square(), "Matrix: trace of non-square matrix");
        double s = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            s += (*this)(i, i);
        }
        return s;
    }

    bool all_finite() const {
        for (double v : data_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vec data_;
};

/// Symmetric matrix; only the upper triangle is stored, so symmetry is exact
/// by construction.
class SymMatrix {
public:
    SymMatrix() = default;

    explicit SymMatrix(std::size_t n, double fill = 0.0)
        : n_(n), tri_(n * (n + 1) / 2, fill) {
        require(n > 0, "SymMatrix: dimension must be positive");
    }

    static SymMatrix identity(std::size_t n) {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.at(i, i) = 1.0;
        }
        return s;
    }

    static SymMatrix scaled_identity(std::size_t n, double value) {
        SymMatrix s(n);
        for (std::size_t i = 0; i < n; ++i) {
            s.at(i, i) = value;
        }
        return s;
    }

    /// Symmetric part (A + A^T)/2 of a square matrix.
    static SymMatrix from_full(const Matrix& a) {
        require(a.square(), "SymMatrix: source must be square");
        SymMatrix s(a.rows());
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = i; j < a.cols(); ++j) {
                s.at(i, j) = 0.5 * (a(i, j) + a(j, i));
            }
        }
        return s;
    }

    std::size_t dim() const { return n_; }

    double& at(std::size_t i, std::size_t j) { return tri_[index(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return tri_[index(i, j)]; }

    Matrix full() const {
        Matrix m(n_, n_);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                m(i, j) = (*this)(i, j);
                m(j, i) = (*this)(i, j);
            }
        }
        return m;
    }

    double trace() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            s += (*this)(i, i);
        }
        return s;
    }

    double norm_fro() const {
        double s = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = i; j < n_; ++j) {
                const double v = (*this)(i, j);
                s += (i == j) ? v * v : 2.0 * v * v;
            }
        }
        return std::sqrt(s);
    }

    bool all_finite() const {
        for (double v : tri_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    SymMatrix& operator+=(const SymMatrix& other) {
        require(n_ == other.n_, "SymMatrix: shape mismatch in +=");
        for (std::size_t k = 0; k < tri_.size(); ++k) {
            tri_[k] += other.tri_[k];
        }
        return *this;
    }

    SymMatrix& operator-=(const SymMatrix& other) {
        require(n_ == other.n_, "SymMatrix: shape mismatch in -=");
        for (std::size_t k = 0; k < tri_.size(); ++k) {
            tri_[k] -= other.tri_[k];
        }
        return *this;
    }

    SymMatrix& operator*=(double s) {
        for (double& v : tri_) {
            v *= s;
        }
        return *this;
    }

    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(SymMatrix a, double s) { return a *= s; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

private:
    std::size_t index(std::size_t i, std::size_t j) const {
        if (i > j) std::swap(i, j);
        // row-major upper triangle: row i starts after i rows of lengths n, n-1, ...
        return i * n_ - i * (i - 1) / 2 + (j - i);
    }

    std::size_t n_ = 0;
    std::vector<double> tri_;
};

inline Vec matvec(const Matrix& a, const Vec& x) {
    require(a.cols() == x.size(), "matvec: shape mismatch");
    Vec y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) {
            s += a(i, j) * x[j];
        }
        y[i] = s;
    }
    return y;
}

inline double dot(const Vec& a, const Vec& b) {
    require(a.size() == b.size(), "dot: length mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        s += a[k] * b[k];
    }
    return s;
}

inline double norm2(const Vec& x) { return std::sqrt(dot(x, x)); }

/// x^T S x
inline double quad_form(const SymMatrix& s, const Vec& x) {
    require(s.dim() == x.size(), "quad_form: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.dim(); ++i) {
        acc += s(i, i) * x[i] * x[i];
        for (std::size_t j = i + 1; j < s.dim(); ++j) {
            acc += 2.0 * s(i, j) * x[i] * x[j];
        }
    }
    return acc;
}

/// L^T S L as a symmetric matrix.
inline SymMatrix congruence(const Matrix& l, const SymMatrix& s) {
    require(l.rows() == s.dim(), "congruence: shape mismatch");
    const Matrix full = l.transposed() * s.full() * l;
    return SymMatrix::from_full(full);
}

/// Solves A X = B by LU with partial pivoting. Throws on singular A.
inline Matrix solve_lu(Matrix a, Matrix b) {
    require(a.square(), "solve_lu: A must be square");
    require(a.rows() == b.rows(), "solve_lu: shape mismatch");
    const std::size_t n = a.rows();
    const std::size_t m = b.cols();
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        if (best == 0.0) {
            throw std::runtime_error("solve_lu: singular matrix");
        }
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            for (std::size_t j = 0; j < m; ++j) std::swap(b(k, j), b(piv, j));
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            if (f == 0.0) continue;
            a(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) -= f * a(k, j);
            }
            for (std::size_t j = 0; j < m; ++j) {
                b(i, j) -= f * b(k, j);
            }
        }
    }
    for (std::size_t col = 0; col < m; ++col) {
        for (std::size_t i = n; i-- > 0;) {
            double s = b(i, col);
            for (std::size_t j = i + 1; j < n; ++j) {
                s -= a(i, j) * b(j, col);
            }
            b(i, col) = s / a(i, i);
        }
    }
    return b;
}

/// Determinant via LU with partial pivoting (sign-tracked). Returns 0 for
/// numerically singular input.
inline double determinant(Matrix a) {
    require(a.square(), "determinant: non-square matrix");
    const std::size_t n = a.rows();
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::abs(a(k, k));
        for (std::size_t i = k + 1; i < n; ++i) {
            if (std::abs(a(i, k)) > best) {
                best = std::abs(a(i, k));
                piv = i;
            }
        }
        if (best == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = a(i, k) / a(k, k);
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) -= f * a(k, j);
            }
        }
    }
    return det;
}

}  // namespace dwellcert
