#pragma once

#include "rmgeom/cfrac.hpp"
#include "rmgeom/lattice.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <vector>

namespace rmgeom {

using cplx = std::complex<double>;

struct CuspFormSeries {
    int weight = 2;
    long level = 1;
    std::vector<mpz_class> coeffs;  // coeffs[n] = a_n, coeffs[0] = 0
    long n_terms = 0;
};

// q prod (1-q^n)^2 (1-q^11n)^2, the weight 2 newform of level 11.
CuspFormSeries eta_product_form11(long N);
// q prod (1-q^n)^24, weight 12 and level 1.
CuspFormSeries delta_form(long N);

// c_m = a_m for a normalized eigenform; m coprime to the level.
mpz_class hecke_eigenvalue(const CuspFormSeries& f, long m);

// Point of P^1(Q), reduced with den >= 0; infinity is 1/0.
struct Cusp {
    mpz_class num = 1, den = 0;
    Cusp() = default;
    Cusp(const mpq_class& x);  // NOLINT: rationals convert implicitly
    static Cusp infinity() { return {}; }
    bool is_infinity() const { return den == 0; }
    friend bool operator==(const Cusp&, const Cusp&) = default;
};

Cusp mobius(const Mat2& g, const Cusp& x);

// The SL2(Z) generators of order 2 and 3 used throughout.
Mat2 gen_sigma();  // (0 -1; 1 0)
Mat2 gen_tau();    // sigma (1 1; 0 1) = (0 -1; 1 1)

struct IntegralResult {
    cplx value;
    double error = 0;             // truncation bound plus rounding
    double min_height = 0;        // smallest effective q-height used
    std::size_t terms = 0;        // largest coefficient index used
};

// int_x^y f(z) P(z,1) dz.  P is given by its coefficients p[j] of z^j, j <= w,
// where f has weight w + 2.  The route climbs vertically from each cusp to a
// balanced height and joins the two climbs through the expansion at infinity;
// height_scale moves both junction points.  Throws InsufficientTerms if the
// error bound exceeds tol.
IntegralResult modular_symbol_integral(const CuspFormSeries& f, const Cusp& x, const Cusp& y,
                                       const std::vector<cplx>& P, double tol = 1e-10,
                                       double height_scale = 1.0);

struct IdentityCheck {
    cplx lhs, rhs;
    double gap = 0;
    double error = 0;  // combined truncation bound of both sides
    long factor = 0;   // sigma(m) - c_m
};

// sum_{d|m} sum_{b=1}^{d} int_{0}^{b/d} omega vs (sigma(m) - c_m) int_0^{i oo} omega,
// omega = 2 pi i f(z) dz, using the first N coefficients of the level p form.
IdentityCheck manin_hecke_check(long p, long m, long N);

// Values in W = C^(cosets x (w+1)): component (c, j) is the functional
// f (x) z^j of the form transported to coset c, i.e. int_x^y (f|g_c)(z) z^j dz.
// For level 11 the 12 cosets of Gamma0(11) in SL2(Z) are indexed by P^1(F_11);
// level 1 has one.
struct WVector {
    std::vector<cplx> v;
    double error = 0;
};

// Evaluation throws InsufficientTerms when the error bound exceeds
// tol * (1 + max |component|); high weight values near cusps are large.
class Pseudomeasure {
public:
    Pseudomeasure(CuspFormSeries f, int w, double tol = 1e-10);

    WVector operator()(const Cusp& x, const Cusp& y) const;
    // weight-w action of g on W, with mu(gx, gy) = g . mu(x, y)
    WVector act(const Mat2& g, const WVector& v) const;

    std::size_t dim() const { return cosets_ * static_cast<std::size_t>(w_ + 1); }
    std::size_t cosets() const { return cosets_; }
    int degree() const { return w_; }
    const CuspFormSeries& form() const { return f_; }
    double height_scale = 1.0;

private:
    CuspFormSeries f_;
    int w_;
    std::size_t cosets_;
    double tol_;
};

Pseudomeasure pseudomeasure_from_form(const CuspFormSeries& f, int w, double tol = 1e-10);

// phi_x(g) = mu(g x, x).
class ShadowCocycle {
public:
    ShadowCocycle(const Pseudomeasure& mu, Cusp base) : mu_(mu), x_(std::move(base)) {}
    WVector operator()(const Mat2& g) const { return mu_(mobius(g, x_), x_); }
    const Pseudomeasure& measure() const { return mu_; }

private:
    const Pseudomeasure& mu_;
    Cusp x_;
};

ShadowCocycle cocycle_from_pseudomeasure(const Pseudomeasure& mu, const Cusp& base);

WVector add(const WVector& a, const WVector& b);
double max_abs(const WVector& a);

// Relations (1 + sigma) phi(sigma) and (1 + tau + tau^2) phi(tau); both vanish
// for a modular pseudomeasure.  Returns the two residual vectors.
std::pair<WVector, WVector> cocycle_relations(const ShadowCocycle& phi);

struct LevyMellinResult {
    cplx value;
    double error_estimate = 0;
    std::size_t strata = 0;
};

// int_0^{1/2} l(f)(x, s) dx.
LevyMellinResult levy_mellin(const BoundaryFunction& f, const QuadratureConfig& cfg, cplx s = {});

enum class PsiMode {
    Convergent,  // sign(x) sum* (p|x| + q)^(-2k), k >= 2
    Printed      // sign(x) sum* (p|x| + q)^k, needs a regularizer
};

struct PsiValue {
    double value = 0;
    double tail_bound = 0;
    std::size_t terms = 0;
};

// The starred sum omits (0,0) and halves terms with p = 0 or q = 0; it runs over
// p|x| + q <= truncation.  In Printed mode each term is multiplied by
// regularizer(p|x| + q) and no tail bound is claimed.
PsiValue psi_2k(double x, int k, PsiMode mode = PsiMode::Convergent, double truncation = 200,
                const std::function<double(double)>& regularizer = {});

using BoundaryEval = std::function<cplx(const Cusp&)>;

struct DefectSample {
    mpq_class x;
    cplx h;
};

struct DefectGrid {
    std::vector<DefectSample> samples;
    double max_jump = 0;        // largest |h| difference between neighbours
    std::size_t excluded = 0;   // grid points at the pole x = -d/c
};

// Farey fractions of the given order in [lo, hi], increasing.
std::vector<mpq_class> farey_grid(long order, const mpq_class& lo, const mpq_class& hi);

// h(x) = f(x) - f(gx) (cx + d)^-k on the grid.
DefectGrid quantum_defect(const BoundaryEval& f, const Mat2& g, int k, const std::vector<mpq_class>& grid);

void write_defect_csv(std::ostream& os, const DefectGrid& g);

}  // namespace rmgeom
