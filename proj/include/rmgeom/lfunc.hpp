#pragma once

#include "rmgeom/forms.hpp"
#include "rmgeom/lattice.hpp"

#include <complex>
#include <optional>
#include <vector>

namespace rmgeom {

using cplx = std::complex<double>;

enum class SeriesMethod { Direct, Continued };

struct SeriesValue {
    cplx value;
    double truncation = 0;  // X for direct sums, 0 for continued values
    double tail_bound = 0;
    SeriesMethod method = SeriesMethod::Direct;
    std::size_t terms = 0;
};

// Which sign multiplies |N(l)|^-s in an orbit sum.
enum class SignTwist {
    Second,  // sign(l')
    Norm     // sign(N(l))
};

// One simplicial cone {t1 g1 + t2 g2 : t1 > 0, t2 >= 0} inside the quadrant
// sign(l) = sign1, sign(l') = sign2, with the points of l0 + L in its
// half-open fundamental parallelogram.
struct ShintaniCone {
    FieldElement g1, g2;
    int sign1 = 1, sign2 = 1;
    std::vector<FieldElement> shifts;
    std::vector<std::pair<mpq_class, mpq_class>> shift_coords;  // (t1, t2) in (0,1] x [0,1)
};

// Cones covering one fundamental domain of the totally positive part of the
// unit group on (l0 + L) minus 0.  `index` = [U : U+] converts sums over the
// cones into sums over U-orbits.
struct ConeDecomposition {
    std::vector<ShintaniCone> cones;
    FieldElement unit;      // generator of the acting group U
    FieldElement positive;  // generator of U+, the totally positive part
    int index = 1;
};

enum class ConeStyle {
    Unimodular,  // greedy unimodular fan between v and eta*v
    Coarsened    // every other ray of the unimodular fan
};

// `start` picks which small lattice vector of each quadrant seeds the fan.
ConeDecomposition cone_decomposition(const RealLattice& L, const FieldElement& l0, const FieldElement& unit,
                                     ConeStyle style = ConeStyle::Unimodular, int start = 0);

// sum over U-orbits of l0 + L (0 excluded) of twist(l) |N(l)|^-s.
SeriesValue orbit_sum_direct(const RealLattice& L, const FieldElement& l0, const FieldElement& unit,
                             SignTwist twist, cplx s, double X);
SeriesValue orbit_sum_continued(const ConeDecomposition& dec, SignTwist twist, cplx s);

// sum_{m,n >= 0} A^-s B^-s with A = a1 (m+t1) + a2 (n+t2), B = b1 (m+t1) + b2 (n+t2),
// all a, b > 0; continued to s != 1, 1/2.
SeriesValue cone_zeta(double a1, double a2, double b1, double b2, double t1, double t2, cplx s);

// Hurwitz zeta sum_{n>=0} (n+q)^-w for q > 0, and the same minus 1/(w-1).
cplx hurwitz_zeta(cplx w, double q);
cplx hurwitz_zeta_regular(cplx w, double q);

// sign(l0') N(b)^s sum_{l in (l0+L)/U_L} sign(l') |N(l)|^-s.  N(b) defaults to
// module_norm(L, l0).
SeriesValue partial_zeta_direct(const RealLattice& L, const FieldElement& l0, cplx s, double X,
                                std::optional<mpq_class> norm_b = std::nullopt);
SeriesValue partial_zeta_continued(const RealLattice& L, const FieldElement& l0, cplx s,
                                   std::optional<mpq_class> norm_b = std::nullopt,
                                   const ConeDecomposition* dec = nullptr);

struct StarkResult {
    double derivative = 0;  // zeta'(L, l0, 0)
    double value = 0;       // exp(derivative)
    double error = 0;       // |R(h) - R(h/2)| after Richardson
    double step = 0;
};

StarkResult stark_number(const RealLattice& L, const FieldElement& l0, double h = 0.02,
                         std::optional<mpq_class> norm_b = std::nullopt);

// sum over (L - 0)/V of sign(N mu) |N mu|^-s, V = totally positive units preserving L.
SeriesValue shimizu_L(const RealLattice& L, cplx s, double X);

// (l, |N(l)|) for one representative per V-orbit, |N| <= X, in enumeration order.
std::vector<std::pair<FieldElement, mpq_class>> shimizu_terms(const RealLattice& L, double X);

// Kronecker symbol (D/n).
int kronecker(const mpz_class& D, long n);

// a(n) = sum_{m | n} chi_D(m), n = 0..N (a(0) = 0), D = disc of F.
std::vector<long> dedekind_coefficients(const QuadraticField& F, long N);

// L(1, chi_D) = 2 h log(eps) / sqrt(D) with h the wide class number.
double dedekind_residue(const QuadraticField& F);

// sum over ideals of norm <= X, plus the tail estimate from the ideal count.
SeriesValue dedekind_zeta(const QuadraticField& F, double s, double X);

// sum over ideals of the narrow class attached to Q of N^-k, norm <= X.
SeriesValue ideal_class_zeta(const QuadraticFormZ& Q, int k, double X);

}  // namespace rmgeom
