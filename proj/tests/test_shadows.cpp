#include <doctest.h>

#include "rmgeom/errors.hpp"
#include "rmgeom/shadows.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

using namespace rmgeom;

namespace {

const double kPi = 3.14159265358979323846;

// q prod (1-q^n)^2 (1-q^11n)^2 by multiplying the factors one at a time
std::vector<long> naive_form11(int N) {
    std::vector<long> s(N, 0);  // s[i] = coefficient of q^i in the product
    s[0] = 1;
    auto times_one_minus = [&](int step) {
        for (int i = N - 1; i >= step; --i) s[i] -= s[i - step];
    };
    for (int n = 1; n < N; ++n) {
        times_one_minus(n);
        times_one_minus(n);
        if (11 * n < N) {
            times_one_minus(11 * n);
            times_one_minus(11 * n);
        }
    }
    std::vector<long> a(N + 1, 0);
    for (int i = 1; i <= N; ++i) a[i] = s[i - 1];
    return a;
}

cplx eval_q(const CuspFormSeries& f, cplx z) {
    cplx sum = 0;
    for (long n = f.n_terms; n >= 1; --n) sum += f.coeffs[n].get_d() * std::exp(cplx(0, 2 * kPi * n) * z);
    return sum;
}

Cusp random_cusp(std::mt19937_64& rng, long maxden) {
    std::uniform_int_distribution<long> den(0, maxden), num(-3 * maxden, 3 * maxden);
    long d = den(rng);
    if (d == 0) return Cusp::infinity();
    return Cusp(mpq_class(num(rng), d));
}

Mat2 word(std::mt19937_64& rng, int len) {
    Mat2 g = mat_identity();
    std::uniform_int_distribution<int> pick(0, 1);
    for (int i = 0; i < len; ++i) g = mat_mul(g, pick(rng) ? gen_sigma() : gen_tau());
    return g;
}

double diff(const WVector& a, const WVector& b) {
    double m = 0;
    for (std::size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

}  // namespace

TEST_CASE("level 11 eta product against direct expansion") {
    const auto f = eta_product_form11(300);
    const std::vector<long> ref = naive_form11(300);
    for (int n = 1; n <= 300; ++n) CHECK(f.coeffs[n] == ref[n]);
    CHECK(f.coeffs[1] == 1);
    CHECK(f.coeffs[2] == -2);
    CHECK(f.coeffs[3] == -1);
    CHECK(f.coeffs[6] == f.coeffs[2] * f.coeffs[3]);
    // Hecke recursion at good primes, multiplicativity on coprime pairs
    for (long p : {2, 3, 5, 7, 13}) CHECK(f.coeffs[p * p] == f.coeffs[p] * f.coeffs[p] - p);
    for (long m = 2; m <= 17; ++m)
        for (long n = 2; n <= 17; ++n)
            if (std::gcd(m, n) == 1) CHECK(f.coeffs[m * n] == f.coeffs[m] * f.coeffs[n]);
    // Hasse bound |a_p| <= 2 sqrt p
    for (long p : {2, 3, 5, 7, 13, 17, 19, 23, 29, 31})
        CHECK(mpz_class(abs(f.coeffs[p])).get_d() <= 2 * std::sqrt(static_cast<double>(p)));
    // the cached expansion slices consistently
    const auto g = eta_product_form11(40);
    for (int n = 1; n <= 40; ++n) CHECK(g.coeffs[n] == f.coeffs[n]);
}

TEST_CASE("Hecke eigenvalues") {
    const auto f = eta_product_form11(50);
    CHECK(hecke_eigenvalue(f, 1) == 1);
    CHECK(hecke_eigenvalue(f, 2) == -2);
    CHECK_THROWS_AS(hecke_eigenvalue(f, 11), DomainError);
    CHECK_THROWS_AS(hecke_eigenvalue(f, 51), InsufficientTerms);
    const auto D = delta_form(30);
    CHECK(D.coeffs[2] == -24);
    CHECK(D.coeffs[3] == 252);
    CHECK(D.coeffs[6] == D.coeffs[2] * D.coeffs[3]);
    CHECK(D.coeffs[4] == D.coeffs[2] * D.coeffs[2] - mpz_class(2048));  // tau(p^2) = tau(p)^2 - p^11
}

TEST_CASE("Fricke relation used for the coset expansions") {
    // f(-1/(11 z)) = -11 z^2 f(z), checked with the plain q-expansion at two points
    const auto f = eta_product_form11(400);
    for (const cplx z : {cplx(0.1, 0.35), cplx(-0.2, 0.3), cplx(0.05, 0.3015)}) {
        const cplx w = -1.0 / (11.0 * z);
        CHECK(std::abs(eval_q(f, w) + 11.0 * z * z * eval_q(f, z)) < 1e-12);
    }
}

TEST_CASE("modular symbols of the level 11 form") {
    const auto f = eta_product_form11(4000);
    const Cusp zero(mpq_class(0)), inf = Cusp::infinity();
    // int_0^{i oo} f dz = i L(f,1)/(2 pi); with root number +1,
    // L(f,1) = 2 sum a_n/n exp(-2 pi n/sqrt 11)
    double L1 = 0;
    for (long n = 1; n <= 200; ++n) L1 += 2 * f.coeffs[n].get_d() / n * std::exp(-2 * kPi * n / std::sqrt(11.0));
    const auto r = modular_symbol_integral(f, zero, inf, {1.0});
    CHECK(std::abs(r.value - cplx(0, L1 / (2 * kPi))) < 1e-13);

    CHECK(modular_symbol_integral(f, zero, zero, {1.0}).value == cplx(0));
    const Cusp a(mpq_class(2, 7)), b(mpq_class(-3, 5)), c(mpq_class(1, 2));
    const auto ab = modular_symbol_integral(f, a, b, {1.0}).value;
    CHECK(std::abs(ab + modular_symbol_integral(f, b, a, {1.0}).value) < 1e-14);
    const auto s = modular_symbol_integral(f, zero, c, {1.0}).value + modular_symbol_integral(f, c, inf, {1.0}).value +
                   modular_symbol_integral(f, inf, zero, {1.0}).value;
    CHECK(std::abs(s) < 1e-8);

    // route independence: move the junction heights
    for (const auto& [x, y] : {std::pair{a, b}, std::pair{zero, c}, std::pair{Cusp(mpq_class(5, 33)), inf}}) {
        const auto v1 = modular_symbol_integral(f, x, y, {1.0}, 1e-10, 1.0).value;
        for (double h : {0.3, 0.6, 2.5}) CHECK(std::abs(v1 - modular_symbol_integral(f, x, y, {1.0}, 1e-10, h).value) < 1e-8);
    }
    // {0, 1} is closed: periodicity
    CHECK(std::abs(modular_symbol_integral(f, zero, Cusp(mpq_class(1)), {1.0}).value) < 1e-13);
    // too few coefficients for a deep cusp
    CHECK_THROWS_AS(modular_symbol_integral(eta_product_form11(20), zero, Cusp(mpq_class(3, 17)), {1.0}), InsufficientTerms);
    CHECK_THROWS_AS(modular_symbol_integral(f, zero, c, {1.0, 2.0}), DomainError);
}

TEST_CASE("Manin's Hecke identity at level 11") {
    for (long m : {2L, 3L}) {
        const auto r = manin_hecke_check(11, m, 200);
        CHECK(r.factor == 5);
        CHECK(r.gap < 1e-6);
        CHECK(r.gap <= r.error + 1e-12);
    }
    // gap and its bound both shrink as the coefficient count doubles
    for (long m : {2L, 3L}) {
        const auto g8 = manin_hecke_check(11, m, 8), g16 = manin_hecke_check(11, m, 16), g32 = manin_hecke_check(11, m, 32);
        CHECK(g16.gap < g8.gap);
        CHECK(g32.gap < g16.gap);
        CHECK(g32.error < g16.error);
    }
    const auto one = manin_hecke_check(11, 1, 64);
    CHECK(one.factor == 0);
    CHECK(std::abs(one.lhs) < 1e-12);
    // composite m: sigma(4) - c_4 = 7 - 2, sigma(6) - c_6 = 12 - 2
    CHECK(manin_hecke_check(11, 4, 300).gap < 1e-6);
    CHECK(manin_hecke_check(11, 6, 400).gap < 1e-6);
    CHECK(manin_hecke_check(11, 6, 400).factor == 10);
    CHECK_THROWS_AS(manin_hecke_check(13, 2, 100), DomainError);
    CHECK_THROWS_AS(manin_hecke_check(11, 22, 100), DomainError);
}

TEST_CASE("level 11 shadow pseudomeasure") {
    const Pseudomeasure mu(eta_product_form11(4000), 0);
    REQUIRE(mu.dim() == 12);
    std::mt19937_64 rng(2024);
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        const Cusp x = random_cusp(rng, 12), y = random_cusp(rng, 12), z = random_cusp(rng, 12);
        CHECK(max_abs(mu(x, x)) == 0);
        const auto xy = mu(x, y), yx = mu(y, x), yz = mu(y, z), zx = mu(z, x);
        worst = std::max(worst, max_abs(add(xy, yx)));
        worst = std::max(worst, max_abs(add(add(xy, yz), zx)));
        // modularity mu(gx, gy) = g mu(x, y)
        const Mat2 g = word(rng, 1 + i % 5);
        worst = std::max(worst, diff(mu(mobius(g, x), mobius(g, y)), mu.act(g, xy)));
    }
    CHECK(worst < 1e-8);

    // coset 0 is the form itself
    const auto v = mu(Cusp(mpq_class(0)), Cusp::infinity());
    const auto s = modular_symbol_integral(mu.form(), Cusp(mpq_class(0)), Cusp::infinity(), {1.0});
    CHECK(std::abs(v.v[0] - s.value) < 1e-14);
    // T = (1 1; 0 1) sample from the design notes
    const Mat2 T{{{mpz_class(1), mpz_class(1)}, {mpz_class(0), mpz_class(1)}}};
    const auto lhs = mu(mobius(T, Cusp(mpq_class(0))), mobius(T, Cusp::infinity()));
    CHECK(diff(lhs, mu.act(T, v)) < 1e-8);
}

TEST_CASE("cocycles from the shadow pseudomeasure") {
    const Pseudomeasure mu(eta_product_form11(4000), 0);
    std::mt19937_64 rng(99);
    for (const Cusp base : {Cusp::infinity(), Cusp(mpq_class(0)), Cusp(mpq_class(3, 7))}) {
        const auto phi = cocycle_from_pseudomeasure(mu, base);
        CHECK(max_abs(phi(mat_identity())) == 0);
        const auto [rs, rt] = cocycle_relations(phi);
        CHECK(max_abs(rs) < 1e-8);
        CHECK(max_abs(rt) < 1e-8);
        for (int i = 0; i < 20; ++i) {
            const Mat2 g1 = word(rng, 1 + i % 4), g2 = word(rng, 1 + (i * 7) % 4);
            CHECK(diff(phi(mat_mul(g1, g2)), add(phi(g1), mu.act(g1, phi(g2)))) < 1e-8);
        }
    }
    // the action is a left action
    const auto v = mu(Cusp(mpq_class(1, 3)), Cusp(mpq_class(-2, 5)));
    const Mat2 a = gen_tau(), b = mat_mul(gen_sigma(), gen_tau());
    CHECK(diff(mu.act(a, mu.act(b, v)), mu.act(mat_mul(a, b), v)) < 1e-14);
}

TEST_CASE("weight 12 shadow of the discriminant form") {
    // weight 12 values near cusps reach 10^6; bounds and checks are relative
    const Pseudomeasure mu(delta_form(600), 10, 1e-7);
    REQUIRE(mu.dim() == 11);
    std::mt19937_64 rng(17);
    double worst = 0;
    // small cusps: the z^10 factors make the truncation bound grow like |x|^10
    std::uniform_int_distribution<long> den(1, 4);
    auto small = [&] {
        const long d = den(rng);
        std::uniform_int_distribution<long> num(-d, d);
        return Cusp(mpq_class(num(rng), d));
    };
    for (int i = 0; i < 20; ++i) {
        const Cusp x = small(), y = small(), z = i % 3 ? small() : Cusp::infinity();
        const auto xy = mu(x, y), yz = mu(y, z), zx = mu(z, x);
        const double scale = 1 + std::max({max_abs(xy), max_abs(yz), max_abs(zx)});
        worst = std::max(worst, max_abs(add(add(xy, yz), zx)) / scale);
        const Mat2 g = i % 2 ? gen_sigma() : gen_tau();
        worst = std::max(worst, diff(mu(mobius(g, x), mobius(g, y)), mu.act(g, xy)) / scale);
    }
    CHECK(worst < 1e-8);
    const auto [rs, rt] = cocycle_relations(cocycle_from_pseudomeasure(mu, Cusp::infinity()));
    CHECK(max_abs(rs) < 1e-10);
    CHECK(max_abs(rt) < 1e-10);
    // P(z,1) = z^j components match the scalar integral
    std::vector<cplx> P(11, 0.0);
    P[4] = 1.0;
    const auto v = mu(Cusp(mpq_class(1, 2)), Cusp::infinity());
    CHECK(std::abs(v.v[4] - modular_symbol_integral(mu.form(), Cusp(mpq_class(1, 2)), Cusp::infinity(), P, 1e-6).value) <
          1e-14 * (1 + std::abs(v.v[4])));
}

TEST_CASE("Levy-Mellin transform") {
    QuadratureConfig cfg;
    cfg.nodes = 20000;
    cfg.farey_order = 16;
    CHECK(levy_mellin(zero_function(), cfg).value == cplx(0));
    const auto f = q_power_param();
    const auto a = levy_mellin(f, cfg, 3.0);
    QuadratureConfig deep = cfg;
    deep.farey_order = 32;
    const auto b = levy_mellin(f, deep, 3.0);
    CHECK(std::abs(a.value - b.value) < 1e-3);

    // l(f)(x) = l(f)(1 - x) + f(1,1) on (1/2, 1), so int_0^1 = 2 LM + f(1,1)/2
    const auto g = q_power(3.0);
    const auto lm = levy_mellin(g, deep);
    const auto full = levy_integral(g, mpq_class(0), mpq_class(1), deep);
    CHECK(std::abs(full.value - (2.0 * lm.value + 0.5 * g(1, 1))) < full.error_estimate + 2 * lm.error_estimate + 1e-9);

    BoundaryFunction bad = q_power(0.0);
    bad.decay_exponent = 0;
    CHECK_THROWS_AS(levy_mellin(bad, cfg), DomainError);
}

TEST_CASE("psi_2k") {
    // x = 1: the starred weights give n for n = p + q, so psi_{2k}(1) = zeta(2k-1)
    const double zeta3 = 1.2020569031595942854;
    const auto p = psi_2k(1.0, 2, PsiMode::Convergent, 300);
    CHECK(p.value < zeta3);
    CHECK(zeta3 - p.value <= p.tail_bound);

    // recount: full sum over the truncation region minus half the boundary terms
    double full = 0, boundary = 0;
    for (long a = 0; a <= 300; ++a)
        for (long b = 0; a + b <= 300; ++b) {
            if (a == 0 && b == 0) continue;
            const double t = std::pow(static_cast<double>(a + b), -4);
            full += t;
            if (a == 0 || b == 0) boundary += t;
        }
    CHECK(std::fabs((full - boundary / 2) - p.value) < 1e-10);

    for (double x : {0.37, 1.0, 2.6}) {
        const auto v = psi_2k(x, 3);
        CHECK(psi_2k(-x, 3).value == -v.value);
        const auto w = psi_2k(x, 3, PsiMode::Convergent, 400);
        CHECK(std::fabs(w.value - v.value) <= v.tail_bound);
    }

    // weight 4 relations (1 + sigma) psi = 0 and (1 + tau + tau^2) psi = 0, up to the tails
    for (double x : {0.3, 0.7, 1.9, -0.45}) {
        const double T = 400;
        const auto a0 = psi_2k(x, 2, PsiMode::Convergent, T);
        const auto as = psi_2k(-1 / x, 2, PsiMode::Convergent, T);
        const auto t1 = psi_2k(-1 / (x + 1), 2, PsiMode::Convergent, T);
        const auto t2 = psi_2k(-(x + 1) / x, 2, PsiMode::Convergent, T);
        const double js = std::pow(x, -4), j1 = std::pow(x + 1, -4);
        CHECK(std::fabs(a0.value + as.value * js) <= a0.tail_bound + as.tail_bound * js);
        CHECK(std::fabs(a0.value + t1.value * j1 + t2.value * js) <=
              a0.tail_bound + t1.tail_bound * j1 + t2.tail_bound * js);
    }

    CHECK_THROWS_AS(psi_2k(1.0, 2, PsiMode::Printed), DomainError);
    CHECK_THROWS_AS(psi_2k(0.0, 2), DomainError);
    CHECK_THROWS_AS(psi_2k(1.0, 1), DomainError);
    const auto reg = psi_2k(0.5, 2, PsiMode::Printed, 50, [](double v) { return std::exp(-v); });
    CHECK(std::isfinite(reg.value));
    CHECK(std::isinf(reg.tail_bound));
}

TEST_CASE("quantum modular defect") {
    const auto grid = farey_grid(20, mpq_class(-2), mpq_class(2));
    CHECK(grid.front() == -2);
    CHECK(grid.back() == 2);
    for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i - 1] < grid[i]);

    // f(p/q) = q^k is modular of weight k for SL2(Z)
    for (int k : {2, 4}) {
        const BoundaryEval f = [k](const Cusp& x) {
            return x.is_infinity() ? cplx(0) : cplx(std::pow(x.den.get_d(), k));
        };
        std::mt19937_64 rng(k);
        for (const Mat2& g : {gen_sigma(), gen_tau(), word(rng, 5), word(rng, 8)}) {
            const auto d = quantum_defect(f, g, k, grid);
            for (const auto& s : d.samples) CHECK(std::abs(s.h) <= 1e-10 * std::pow(s.x.get_den().get_d(), k));
            CHECK(d.samples.size() + d.excluded == grid.size());
        }
        const auto id = quantum_defect(f, mat_identity(), k, grid);
        for (const auto& s : id.samples) CHECK(s.h == cplx(0));
    }
    // psi_4 under sigma on (0, 1]: h = 2 psi_4 by the sigma relation; jump finite
    const BoundaryEval psi = [](const Cusp& x) {
        return cplx(psi_2k(mpq_class(x.num, x.den).get_d(), 2, PsiMode::Convergent, 300).value);
    };
    const auto pos = farey_grid(20, mpq_class(1, 20), mpq_class(1));
    const auto d = quantum_defect(psi, gen_sigma(), 4, pos);
    CHECK(d.excluded == 0);
    CHECK(std::isfinite(d.max_jump));
    for (const auto& s : d.samples) {
        const double x = mpq_class(s.x).get_d();
        CHECK(std::fabs(s.h.real() - 2 * psi_2k(x, 2, PsiMode::Convergent, 300).value) < 1e-3 * std::pow(x, -4));
    }
    // the pole x = -d/c is dropped
    const auto withzero = quantum_defect(psi, gen_sigma(), 4, std::vector<mpq_class>{mpq_class(0), mpq_class(1)});
    CHECK(withzero.excluded == 1);
    std::ostringstream os;
    write_defect_csv(os, d);
    CHECK(os.str().rfind("x_num,x_den,h_re,h_im\n", 0) == 0);
}
