#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "dwellcert/matrix.hpp"

namespace dwellcert {

struct SymEig {
    Vec values;      // ascending
    Matrix vectors;  // column k is the eigenvector for values[k]
};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Sweeps run until the off-diagonal Frobenius mass drops below tol times the
/// matrix norm (or max_sweeps is hit, which for Jacobi on the sizes used here
/// does not happen in practice). Eigenvalues are returned ascending with the
/// accumulated rotations as eigenvectors.
inline SymEig sym_eig(const SymMatrix& s, double tol = 1e-12, int max_sweeps = 100) {
    require(s.all_finite(), "sym_eig: non-finite entry");
    const std::size_t n = s.dim();
    Matrix a = s.full();
    Matrix v = Matrix::identity(n);

    const double scale = std::max(a.norm_fro(), std::numeric_limits<double>::min());
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                off += 2.0 * a(p, q) * a(p, q);
            }
        }
        if (std::sqrt(off) <= tol * scale) break;

        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;  // avoids theta*theta overflow
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - sn * akq;
                    a(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - sn * aqk;
                    a(q, k) = sn * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
        }
    }

    SymEig out;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = a(i, i);
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return out.values[i] < out.values[j]; });
    Vec sorted(n);
    Matrix vectors(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = out.values[order[k]];
        for (std::size_t i = 0; i < n; ++i) {
            vectors(i, k) = v(i, order[k]);
        }
    }
    out.values = std::move(sorted);
    out.vectors = std::move(vectors);
    return out;
}

inline double min_eig(const SymMatrix& s) { return sym_eig(s).values.front(); }
inline double max_eig(const SymMatrix& s) { return sym_eig(s).values.back(); }

namespace detail {

/// Householder reduction to upper Hessenberg form (orthogonal similarity).
inline Matrix hessenberg(Matrix a) {
    const std::size_t n = a.rows();
    if (n < 3) return a;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double colnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            colnorm += a(i, k) * a(i, k);
        }
        colnorm = std::sqrt(colnorm);
        if (colnorm == 0.0) continue;

        const double pivot = a(k + 1, k);
        const double alpha = (pivot >= 0.0) ? -colnorm : colnorm;
        Vec w(n, 0.0);
        w[k + 1] = pivot - alpha;
        for (std::size_t i = k + 2; i < n; ++i) {
            w[i] = a(i, k);
        }
        double wn = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            wn += w[i] * w[i];
        }
        if (wn == 0.0) continue;
        const double beta = 2.0 / wn;

        // A <- (I - beta w w^T) A
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) {
                s += w[i] * a(i, j);
            }
            s *= beta;
            for (std::size_t i = k + 1; i < n; ++i) {
                a(i, j) -= s * w[i];
            }
        }
        // A <- A (I - beta w w^T)
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t j = k + 1; j < n; ++j) {
                s += a(i, j) * w[j];
            }
            s *= beta;
            for (std::size_t j = k + 1; j < n; ++j) {
                a(i, j) -= s * w[j];
            }
        }
        for (std::size_t i = k + 2; i < n; ++i) {
            a(i, k) = 0.0;
        }
    }
    return a;
}

/// Francis double-shift QR on an upper Hessenberg matrix. Destroys h.
/// Classic EISPACK-style hqr loop; eigenvalue accuracy is on the order of
/// 1e-9 relative for well-behaved inputs, callers should not lean on finer
/// margins than that.
inline std::vector<std::complex<double>> hessenberg_eigenvalues(Matrix h) {
    const int n = static_cast<int>(h.rows());
    const double eps = std::numeric_limits<double>::epsilon();
    std::vector<std::complex<double>> out;
    out.reserve(n);

    double anorm = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(i - 1, 0); j < n; ++j) {
            anorm += std::abs(h(i, j));
        }
    }
    if (anorm == 0.0) {
        out.assign(n, {0.0, 0.0});
        return out;
    }

    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l;
        do {
            for (l = nn; l >= 1; --l) {
                double s = std::abs(h(l - 1, l - 1)) + std::abs(h(l, l));
                if (s == 0.0) s = anorm;
                if (std::abs(h(l, l - 1)) <= eps * s) {
                    h(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = h(nn, nn);
            if (l == nn) {
                out.emplace_back(x + t, 0.0);
                --nn;
            } else {
                double y = h(nn - 1, nn - 1);
                double w = h(nn, nn - 1) * h(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::abs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + (p >= 0.0 ? z : -z);
                        out.emplace_back(x + z, 0.0);
                        out.emplace_back(z != 0.0 ? x - w / z : x + z, 0.0);
                    } else {
                        out.emplace_back(x + p, z);
                        out.emplace_back(x + p, -z);
                    }
                    nn -= 2;
                } else {
                    if (its == 30) {
                        throw std::runtime_error("eigenvalues: QR iteration did not converge");
                    }
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0, s = 0.0;
                    if (its == 10 || its == 20) {
                        t += x;
                        for (int i = 0; i <= nn; ++i) h(i, i) -= x;
                        s = std::abs(h(nn, nn - 1)) + std::abs(h(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m;
                    for (m = nn - 2; m >= l; --m) {
                        z = h(m, m);
                        r = x - z;
                        s = y - z;
                        p = (r * s - w) / h(m + 1, m) + h(m, m + 1);
                        q = h(m + 1, m + 1) - z - r - s;
                        r = h(m + 2, m + 1);
                        s = std::abs(p) + std::abs(q) + std::abs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::abs(h(m, m - 1)) * (std::abs(q) + std::abs(r));
                        const double vv = std::abs(p) * (std::abs(h(m - 1, m - 1)) + std::abs(z) +
                                                         std::abs(h(m + 1, m + 1)));
                        if (u <= eps * vv) break;
                    }
                    for (int i = m + 2; i <= nn; ++i) {
                        h(i, i - 2) = 0.0;
                        if (i != m + 2) h(i, i - 3) = 0.0;
                    }
                    for (int k = m; k <= nn - 1; ++k) {
                        if (k != m) {
                            p = h(k, k - 1);
                            q = h(k + 1, k - 1);
                            r = (k != nn - 1) ? h(k + 2, k - 1) : 0.0;
                            x = std::abs(p) + std::abs(q) + std::abs(r);
                            if (x != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        s = std::sqrt(p * p + q * q + r * r);
                        if (p < 0.0) s = -s;
                        if (s != 0.0) {
                            if (k == m) {
                                if (l != m) h(k, k - 1) = -h(k, k - 1);
                            } else {
                                h(k, k - 1) = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for (int j = k; j <= nn; ++j) {
                                double pp = h(k, j) + q * h(k + 1, j);
                                if (k != nn - 1) {
                                    pp += r * h(k + 2, j);
                                    h(k + 2, j) -= pp * z;
                                }
                                h(k + 1, j) -= pp * y;
                                h(k, j) -= pp * x;
                            }
                            const int mmin = (nn < k + 3) ? nn : k + 3;
                            for (int i = l; i <= mmin; ++i) {
                                double pp = x * h(i, k) + y * h(i, k + 1);
                                if (k != nn - 1) {
                                    pp += z * h(i, k + 2);
                                    h(i, k + 2) -= pp * r;
                                }
                                h(i, k + 1) -= pp * q;
                                h(i, k) -= pp;
                            }
                        }
                    }
                }
            }
        } while (l < nn - 1 && nn >= 0);
    }
    return out;
}

}  // namespace detail

/// Eigenvalues of a general square matrix. n <= 2 is handled in closed form
/// from trace and determinant; larger matrices go through Householder
/// Hessenberg reduction followed by double-shift QR.
inline std::vector<std::complex<double>> eigenvalues(const Matrix& a) {
    require(a.square(), "eigenvalues: matrix must be square");
    require(a.all_finite(), "eigenvalues: non-finite entry");
    const std::size_t n = a.rows();

    std::vector<std::complex<double>> out;
    if (n == 1) {
        out.emplace_back(a(0, 0), 0.0);
    } else if (n == 2) {
        const double half_tr = 0.5 * (a(0, 0) + a(1, 1));
        const double det = a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
        const double disc = half_tr * half_tr - det;
        if (disc >= 0.0) {
            const double rt = std::sqrt(disc);
            out.emplace_back(half_tr + rt, 0.0);
            out.emplace_back(half_tr - rt, 0.0);
        } else {
            const double im = std::sqrt(-disc);
            out.emplace_back(half_tr, im);
            out.emplace_back(half_tr, -im);
        }
    } else {
        out = detail::hessenberg_eigenvalues(detail::hessenberg(a));
    }
    std::sort(out.begin(), out.end(), [](const auto& u, const auto& v) {
        if (u.real() != v.real()) return u.real() < v.real();
        return u.imag() < v.imag();
    });
    return out;
}

inline bool is_hurwitz(const Matrix& a) {
    for (const auto& ev : eigenvalues(a)) {
        if (ev.real() >= 0.0) return false;
    }
    return true;
}

inline double spectral_radius(const Matrix& m) {
    double r = 0.0;
    for (const auto& ev : eigenvalues(m)) {
        r = std::max(r, std::abs(ev));
    }
    return r;
}

inline bool is_schur(const Matrix& m) { return spectral_radius(m) < 1.0; }

}  // namespace dwellcert
