#pragma once

#include "rmgeom/lattice.hpp"

#include <complex>
#include <iosfwd>
#include <optional>
#include <vector>

namespace rmgeom {

// A phase e(t) = exp(2 pi i t) is stored through its exponent t in K.  Two
// phases agree iff the exponents differ by a rational integer, which is
// decidable exactly.
using PhaseExponent = FieldElement;

bool same_phase(const PhaseExponent& s, const PhaseExponent& t);
std::complex<double> phase_value(const PhaseExponent& t);

using Vec2 = std::array<mpz_class, 2>;  // row vector (n, m)

Vec2 row_times(const Vec2& v, const Mat2& g);  // v g

struct CocycleParams {
    FieldElement theta;
    PhaseExponent xi1, xi2;  // theta = xi2 - xi1
    bool symmetric = false;  // xi2 = -xi1 = theta/2
};

CocycleParams symmetric_params(const FieldElement& theta);
CocycleParams make_params(const FieldElement& theta, const PhaseExponent& xi1);

// sigma((n,m),(n',m')) = e(t) with t = -(xi1 n m' + xi2 m n').
PhaseExponent cocycle_sigma(const CocycleParams& p, const Vec2& a, const Vec2& b);

struct InvarianceResult {
    bool holds = true;
    std::optional<std::pair<Vec2, Vec2>> witness;  // (v, w) with sigma(v g, w g) != sigma(v, w)
};

// Exhaustive comparison over v, w with entries in [-bound, bound].
InvarianceResult sl2_invariance_check(const CocycleParams& p, const Mat2& g, long bound = 5);

// Element (v, k) of Z^2 x Z with the law (v,k)(w,j) = (v + w phi^k, k + j).
struct SolvElement {
    Vec2 v;
    long k = 0;
};

SolvElement solv_mul(const SolvElement& a, const SolvElement& b, const Mat2& phi);
// Same with phi^-k in place of phi^k, kept to show which law the twisted cocycle needs.
SolvElement solv_mul_inverse_law(const SolvElement& a, const SolvElement& b, const Mat2& phi);

// sigma~((v,k),(w,j)) = sigma(v, w phi^k).
PhaseExponent twisted_cocycle(const CocycleParams& p, const Mat2& phi, const SolvElement& a, const SolvElement& b);

// Row-vector matrix of multiplication by the generator of V on the basis of L:
// coords(eps * z) = coords(z) phi.
Mat2 phi_epsilon(const RealLattice& L);

// Shift-with-phase operator restricted to the window max(|n|,|m|) <= R.  The
// image of every basis vector is kept symbolically, including images that
// leave the window.
struct ShiftImage {
    Vec2 target;
    PhaseExponent phase;
    bool inside = true;
};

struct WindowOperator {
    long R = 0;
    std::vector<Vec2> basis;         // window points, row-major in (n, m)
    std::vector<ShiftImage> column;  // image of basis[i]
    std::size_t index(const Vec2& p) const;  // position of p in basis
};

enum class ShiftConvention {
    SigmaRegular,  // (U f)(n,m) = e(-xi2 n) f(n,m-1), (V f)(n,m) = e(-xi1 m) f(n-1,m)
    Printed        // f(n,m+1) and f(n+1,m) as printed: gives VU = e(-theta) UV
};

struct UVPair {
    WindowOperator U, V;
    ShiftConvention convention = ShiftConvention::SigmaRegular;
};

UVPair generators_UV(const CocycleParams& p, long R, ShiftConvention c = ShiftConvention::SigmaRegular);

// Image of the basis vector at p under U or V, valid anywhere in Z^2.
ShiftImage apply_U(const CocycleParams& p, const Vec2& at, ShiftConvention c);
ShiftImage apply_V(const CocycleParams& p, const Vec2& at, ShiftConvention c);

struct RelationReport {
    std::size_t interior = 0;  // basis vectors where both VU and UV stay in the window
    std::size_t satisfied = 0;
    PhaseExponent expected;    // the phase factor tested
};

// Check VU = e(factor) UV on interior basis vectors.
RelationReport check_uv_relation(const CocycleParams& p, const UVPair& ops, const PhaseExponent& factor);

// Dense complex matrix of a window operator (rows/cols in basis order). For small R.
std::vector<std::vector<std::complex<double>>> dense(const WindowOperator& op);

struct SpectrumRecord {
    long n = 0, m = 0;
    double lambda_plus = 0;  // sqrt((n+m theta)^2 + (n+m theta')^2)
    mpq_class norm;          // N(n + m theta)
    int sign = 0;
};

struct SpectrumWindow {
    FieldElement theta;
    long R = 0;
    std::vector<SpectrumRecord> records;  // row-major in (n, m)
};

SpectrumWindow dirac_spectrum(const FieldElement& theta, long R);
void write_spectrum_csv(std::ostream& os, const SpectrumWindow& w);

// The 2x2 block of D on psi_{n,m}: [[0, x' - i x], [x' + i x, 0]].
std::array<std::array<std::complex<double>, 2>, 2> dirac_block(const FieldElement& theta, long n, long m);

// Raw partial sum over the window of sign(N) |N|^-s, N = 0 skipped.
std::complex<double> spectral_eta_partial(const SpectrumWindow& w, std::complex<double> s);

struct ShimizuMode {
    int sign = 0;
    double magnitude = 0;  // |N(mu)|^(1/2)
    mpq_class norm;        // |N(mu)|
    FieldElement mu;
};

// One V-fundamental domain of L minus 0 with |N| <= X, read off the spectrum of
// theta = beta2/beta1 and rescaled by N(beta1).
std::vector<ShimizuMode> shimizu_from_spectrum(const RealLattice& L, double X);

// Basis rows (x e^t, y e^-t) of iota_t(L) for the basis beta1, beta2.
std::array<std::array<double, 2>, 2> solv_fibration_sample(const RealLattice& L, double t);

struct LorentzMode {
    long n = 0, m = 0;
    mpq_class box;        // N(lambda), the Lorentzian mode
    mpq_class euclidean;  // (n+m theta)^2 + (n+m theta')^2 = Tr^2 - 2N, exact
    int causal = 0;       // +1 timelike (N > 0), -1 spacelike, 0 null
};

std::vector<LorentzMode> lorentz_modes(const FieldElement& theta, long R);

}  // namespace rmgeom
