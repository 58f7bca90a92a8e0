#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

#include "dwellcert/eig.hpp"
#include "dwellcert/expm.hpp"
#include "dwellcert/matrix.hpp"
#include "dwellcert/rng.hpp"
#include "dwellcert/system.hpp"

using namespace dwellcert;

namespace {

Matrix random_matrix(Rng& rng, std::size_t n, double scale) {
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = scale * rng.uniform(-1.0, 1.0);
    return a;
}

// Truncated Taylor series; independent of the Pade path under test.
Matrix taylor_exp(const Matrix& a, int terms) {
    Matrix sum = Matrix::identity(a.rows());
    Matrix power = Matrix::identity(a.rows());
    double fact = 1.0;
    for (int k = 1; k <= terms; ++k) {
        power = power * a;
        fact *= static_cast<double>(k);
        sum = sum + power * (1.0 / fact);
    }
    return sum;
}

// Characteristic polynomial coefficients via the Faddeev-LeVerrier recursion,
// an arithmetic-only oracle for the QR eigenvalue path.
std::vector<double> char_poly(const Matrix& a) {
    const std::size_t n = a.rows();
    std::vector<double> c(n + 1, 0.0);
    c[0] = 1.0;
    Matrix m(n, n);
    for (std::size_t k = 1; k <= n; ++k) {
        Matrix shift = m;
        for (std::size_t i = 0; i < n; ++i) shift(i, i) += c[k - 1];
        m = a * shift;
        c[k] = -m.trace() / static_cast<double>(k);
    }
    return c;
}

std::complex<double> poly_eval(const std::vector<double>& c, std::complex<double> z) {
    std::complex<double> acc(0.0, 0.0);
    for (double ck : c) acc = acc * z + ck;
    return acc;
}

}  // namespace

TEST_CASE("dense matrix arithmetic") {
    Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    Matrix b = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});

    SECTION("shape and element access") {
        CHECK(a.rows() == 2);
        CHECK(a.cols() == 2);
        CHECK(a(1, 0) == 3.0);
        CHECK_THROWS_AS(Matrix::from_rows({{1.0}, {2.0, 3.0}}), std::invalid_argument);
        CHECK_THROWS_AS(Matrix::from_rows({{std::nan("")}}), std::invalid_argument);
    }

    SECTION("products against hand results") {
        Matrix ab = a * b;
        CHECK(ab(0, 0) == 2.0);
        CHECK(ab(0, 1) == 1.0);
        CHECK(ab(1, 0) == 4.0);
        CHECK(ab(1, 1) == 3.0);
        Matrix at = a.transposed();
        CHECK(at(0, 1) == 3.0);
        Vec x{1.0, -1.0};
        Vec y = matvec(a, x);
        CHECK(y[0] == -1.0);
        CHECK(y[1] == -1.0);
    }

    SECTION("norms and trace") {
        CHECK(a.trace() == 5.0);
        CHECK(a.norm_one() == 6.0);
        CHECK(a.norm_inf() == 7.0);
        CHECK(a.norm_fro() == Catch::Approx(std::sqrt(30.0)));
    }

    SECTION("linear solve and determinant") {
        Matrix m = Matrix::from_rows({{2.0, 1.0, 0.0}, {1.0, 3.0, 1.0}, {0.0, 1.0, 2.0}});
        Vec rhs{1.0, 2.0, 3.0};
        Matrix rhs_col(3, 1);
        for (int i = 0; i < 3; ++i) rhs_col(i, 0) = rhs[i];
        Matrix sol = solve_lu(m, rhs_col);
        Vec check = matvec(m, {sol(0, 0), sol(1, 0), sol(2, 0)});
        for (int i = 0; i < 3; ++i) CHECK(check[i] == Catch::Approx(rhs[i]).margin(1e-12));
        CHECK(determinant(m) == Catch::Approx(8.0));
        Matrix singular = Matrix::from_rows({{1.0, 2.0}, {2.0, 4.0}});
        CHECK_THROWS_AS(solve_lu(singular, Matrix::identity(2)), std::runtime_error);
    }
}

TEST_CASE("symmetric storage round trips") {
    Rng rng(7);
    for (std::size_t n : {1u, 2u, 3u, 5u}) {
        Matrix full = random_matrix(rng, n, 2.0);
        SymMatrix s = SymMatrix::from_full(full);
        Matrix sym = (full + full.transposed()) * 0.5;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                CHECK(s(i, j) == Catch::Approx(sym(i, j)).margin(1e-15));
                CHECK(s(i, j) == s(j, i));
            }
        Matrix back = s.full();
        CHECK((back - sym).norm_fro() <= 1e-15);
    }
}

TEST_CASE("quadratic and congruence forms") {
    SymMatrix p = SymMatrix::from_full(Matrix::from_rows({{2.0, 1.0}, {1.0, 3.0}}));
    Vec x{1.0, 2.0};
    CHECK(quad_form(p, x) == Catch::Approx(2.0 + 4.0 * 1.0 + 4.0 * 3.0));
    Matrix l = Matrix::from_rows({{1.0, 0.0}, {1.0, 1.0}});
    SymMatrix c = congruence(l, p);
    Matrix expect = l.transposed() * p.full() * l;
    CHECK((c.full() - expect).norm_fro() <= 1e-14);
}

TEST_CASE("matrix exponential matches a long Taylor expansion") {
    Rng rng(42);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix a = random_matrix(rng, 4, 1.0);
        double nrm = a.norm_one();
        if (nrm > 2.0) a = a * (2.0 / nrm);
        Matrix got = mat_exp(a);
        Matrix want = taylor_exp(a, 60);
        double rel = (got - want).norm_fro() / std::max(1.0, want.norm_fro());
        CHECK(rel <= 1e-12);
    }
}

TEST_CASE("matrix exponential closed forms") {
    SECTION("zero and identity") {
        Matrix z(3, 3);
        CHECK((mat_exp(z) - Matrix::identity(3)).norm_fro() <= 1e-15);
        Matrix i3 = Matrix::identity(3);
        CHECK((mat_exp(i3) - i3 * std::exp(1.0)).norm_fro() <= 1e-13);
    }
    SECTION("diagonal") {
        Matrix d = Matrix::from_rows({{-1.0, 0.0}, {0.0, 2.5}});
        Matrix e = mat_exp(d, 2.0);
        CHECK(e(0, 0) == Catch::Approx(std::exp(-2.0)));
        CHECK(e(1, 1) == Catch::Approx(std::exp(5.0)));
        CHECK(std::abs(e(0, 1)) + std::abs(e(1, 0)) <= 1e-14);
    }
    SECTION("nilpotent") {
        Matrix nil = Matrix::from_rows({{0.0, 1.0}, {0.0, 0.0}});
        Matrix e = mat_exp(nil, 3.0);
        CHECK(e(0, 0) == 1.0);
        CHECK(e(0, 1) == Catch::Approx(3.0));
        CHECK(e(1, 1) == 1.0);
    }
    SECTION("quarter turn of the skewed rotation block") {
        const double pi = std::acos(-1.0);
        Matrix b = Matrix::from_rows({{0.0, -1.0}, {4.0, 0.0}});
        Matrix e = mat_exp(b, pi / 2.0);
        CHECK((e + Matrix::identity(2)).norm_fro() <= 1e-12);
    }
    SECTION("semigroup property under large norms") {
        Rng rng(5);
        Matrix a = random_matrix(rng, 3, 4.0);
        Matrix whole = mat_exp(a, 1.7);
        Matrix split = mat_exp(a, 1.0) * mat_exp(a, 0.7);
        CHECK((whole - split).norm_fro() / whole.norm_fro() <= 1e-12);
    }
}

TEST_CASE("symmetric eigensolver") {
    SECTION("known 2x2 spectrum") {
        SymMatrix s = SymMatrix::from_full(Matrix::from_rows({{2.0, 1.0}, {1.0, 2.0}}));
        SymEig eig = sym_eig(s);
        CHECK(eig.values[0] == Catch::Approx(1.0));
        CHECK(eig.values[1] == Catch::Approx(3.0));
    }
    SECTION("reconstruction and orthonormality on random input") {
        Rng rng(11);
        for (std::size_t n : {2u, 3u, 6u}) {
            SymMatrix s = SymMatrix::from_full(random_matrix(rng, n, 3.0));
            SymEig eig = sym_eig(s);
            CHECK(std::is_sorted(eig.values.begin(), eig.values.end()));
            Matrix v = eig.vectors;
            Matrix vtv = v.transposed() * v;
            CHECK((vtv - Matrix::identity(n)).norm_fro() <= 1e-11);
            Matrix lam(n, n);
            for (std::size_t i = 0; i < n; ++i) lam(i, i) = eig.values[i];
            Matrix rebuilt = v * lam * v.transposed();
            CHECK((rebuilt - s.full()).norm_fro() <= 1e-10 * std::max(1.0, s.norm_fro()));
            CHECK(min_eig(s) == Catch::Approx(eig.values.front()).margin(1e-12));
            CHECK(max_eig(s) == Catch::Approx(eig.values.back()).margin(1e-12));
        }
    }
    SECTION("eigenvalue perturbation stays bounded by the perturbation norm") {
        Rng rng(13);
        SymMatrix s = SymMatrix::from_full(random_matrix(rng, 4, 2.0));
        Matrix noise = random_matrix(rng, 4, 1.0);
        SymMatrix e = SymMatrix::from_full(noise);
        double enorm = max_eig(e) > -min_eig(e) ? max_eig(e) : -min_eig(e);
        SymMatrix sum = s + e;
        SymEig es = sym_eig(s);
        SymEig esum = sym_eig(sum);
        for (std::size_t i = 0; i < 4; ++i)
            CHECK(std::abs(esum.values[i] - es.values[i]) <= enorm + 1e-10);
    }
}

TEST_CASE("general eigenvalues against the characteristic polynomial") {
    SECTION("2x2 complex pair") {
        Matrix b = Matrix::from_rows({{0.0, -1.0}, {4.0, 0.0}});
        auto ev = eigenvalues(b);
        CHECK(ev[0].real() == Catch::Approx(0.0).margin(1e-14));
        CHECK(ev[0].imag() == Catch::Approx(-2.0));
        CHECK(ev[1].imag() == Catch::Approx(2.0));
        Matrix a = Matrix::from_rows({{-0.1, -1.0}, {4.0, -0.1}});
        auto ev2 = eigenvalues(a);
        CHECK(ev2[0].real() == Catch::Approx(-0.1));
        CHECK(std::abs(ev2[0].imag()) == Catch::Approx(2.0));
    }
    SECTION("random matrices satisfy their own characteristic polynomial") {
        Rng rng(17);
        for (int trial = 0; trial < 25; ++trial) {
            std::size_t n = 3 + static_cast<std::size_t>(rng.below(3));
            Matrix a = random_matrix(rng, n, 1.5);
            auto ev = eigenvalues(a);
            REQUIRE(ev.size() == n);
            auto poly = char_poly(a);
            double scale = std::pow(1.0 + a.norm_one(), static_cast<double>(n));
            std::complex<double> sum(0.0, 0.0);
            for (auto z : ev) {
                CHECK(std::abs(poly_eval(poly, z)) <= 1e-6 * scale);
                sum += z;
            }
            CHECK(sum.real() == Catch::Approx(a.trace()).margin(1e-8 * scale));
            CHECK(std::abs(sum.imag()) <= 1e-8 * scale);
        }
    }
    SECTION("stability predicates") {
        Matrix hurwitz = Matrix::from_rows({{-0.1, -1.0}, {4.0, -0.1}});
        CHECK(is_hurwitz(hurwitz));
        Matrix saddle = Matrix::from_rows({{-1.9, 0.6}, {0.6, -0.1}});
        CHECK_FALSE(is_hurwitz(saddle));
        Matrix contraction = Matrix::from_rows({{0.5, 0.0}, {0.0, -0.25}});
        CHECK(is_schur(contraction));
        CHECK(spectral_radius(contraction) == Catch::Approx(0.5));
        Matrix expansion = Matrix::from_rows({{0.0, 2.0}, {-2.0, 0.0}});
        CHECK_FALSE(is_schur(expansion));
        CHECK(spectral_radius(expansion) == Catch::Approx(2.0));
    }
}

TEST_CASE("zero crossing of a matrix exponential entry") {
    const double pi = std::acos(-1.0);
    Matrix a1 = Matrix::from_rows({{-0.1, -1.0}, {4.0, -0.1}});
    SECTION("first alignment of the off-diagonal entry") {
        double t = zero_crossing_time(a1, 1, 0, 1e-6, 2.0);
        CHECK(t == Catch::Approx(pi / 2).margin(1e-8));
    }
    SECTION("next diagonal zero past the quarter turn") {
        double t = zero_crossing_time(a1, 0, 0, pi / 2, 3.0);
        CHECK(t == Catch::Approx(0.75 * pi).margin(1e-8));
    }
    SECTION("no crossing reports failure") {
        Matrix stable = Matrix::from_rows({{-1.0, 0.0}, {0.0, -2.0}});
        CHECK_THROWS_AS(zero_crossing_time(stable, 0, 0, 1e-6, 5.0), ZeroCrossingError);
    }
}

TEST_CASE("random number streams are deterministic and bounded") {
    Rng a(99), b(99), c(100);
    bool all_equal = true;
    bool any_differs = false;
    for (int i = 0; i < 1000; ++i) {
        double x = a.uniform();
        double y = b.uniform();
        double z = c.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        all_equal = all_equal && (x == y);
        any_differs = any_differs || (x != z);
    }
    CHECK(all_equal);
    CHECK(any_differs);

    Rng r(3);
    for (int i = 0; i < 200; ++i) {
        int k = static_cast<int>(r.below(7));
        CHECK(k >= 0);
        CHECK(k < 7);
    }
    Vec u = r.unit_vector(5);
    CHECK(norm2(u) == Catch::Approx(1.0).margin(1e-12));
    CHECK(derive_seed(1, 2) != derive_seed(1, 3));
    CHECK(derive_seed(1, 2) == derive_seed(1, 2));
}
