#pragma once

#include <cmath>

#include "dwellcert/matrix.hpp"

namespace dwellcert {

/// e^{A t} by scaling-and-squaring around a degree-13 Pade approximant.
///
/// The argument is scaled by 2^{-s} with s = max(0, ceil(log2(|At|_1))) so the
/// core approximant always sees a matrix of 1-norm at most 1, where its
/// truncation error is far below double rounding. The result is then squared
/// s times. Relative accuracy is ~1e-12 or better for |At|_1 up to ~1e2.
inline Matrix mat_exp(const Matrix& a, double t = 1.0) {
    require(a.square(), "mat_exp: matrix must be square");
    require(std::isfinite(t), "mat_exp: t must be finite");
    require(a.all_finite(), "mat_exp: non-finite entry");

    const std::size_t n = a.rows();
    Matrix b = a * t;

    const double nrm = b.norm_one();
    int s = 0;
    if (nrm > 1.0) {
        s = static_cast<int>(std::ceil(std::log2(nrm)));
        b *= std::ldexp(1.0, -s);
    }

    static const double c[14] = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0,  129060195264000.0,   10559470521600.0,
        670442572800.0,      33522128640.0,       1323241920.0,
        40840800.0,          960960.0,            16380.0,
        182.0,               1.0};

    const Matrix id = Matrix::identity(n);
    const Matrix b2 = b * b;
    const Matrix b4 = b2 * b2;
    const Matrix b6 = b4 * b2;

    // u = B * (B6*(c13 B6 + c11 B4 + c9 B2) + c7 B6 + c5 B4 + c3 B2 + c1 I)
    Matrix u = b6 * (c[13] * b6 + c[11] * b4 + c[9] * b2);
    u += c[7] * b6 + c[5] * b4 + c[3] * b2 + c[1] * id;
    u = b * u;

    // v = B6*(c12 B6 + c10 B4 + c8 B2) + c6 B6 + c4 B4 + c2 B2 + c0 I
    Matrix v = b6 * (c[12] * b6 + c[10] * b4 + c[8] * b2);
    v += c[6] * b6 + c[4] * b4 + c[2] * b2 + c[0] * id;

    // Pade: (v - u)^{-1} (v + u)
    Matrix r = solve_lu(v - u, v + u);
    for (int k = 0; k < s; ++k) {
        r = r * r;
    }
    return r;
}

}  // namespace dwellcert
