#include "rmgeom/lattice.hpp"

#include "rmgeom/errors.hpp"

#include <algorithm>
#include <cmath>

namespace rmgeom {

Mat2 mat_mul(const Mat2& A, const Mat2& B) {
    Mat2 C;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) C[i][j] = A[i][0] * B[0][j] + A[i][1] * B[1][j];
    return C;
}

mpz_class mat_det(const Mat2& A) { return A[0][0] * A[1][1] - A[0][1] * A[1][0]; }

Mat2 mat_identity() {
    Mat2 I;
    I[0][0] = 1;
    I[0][1] = 0;
    I[1][0] = 0;
    I[1][1] = 1;
    return I;
}

Mat2 mat_inverse_sl2(const Mat2& A) {
    if (mat_det(A) != 1) throw DomainError("matrix is not in SL2(Z)");
    Mat2 B;
    B[0][0] = A[1][1];
    B[0][1] = -A[0][1];
    B[1][0] = -A[1][0];
    B[1][1] = A[0][0];
    return B;
}

Mat2 mat_pow(const Mat2& A, long k) {
    if (k < 0) return mat_pow(mat_inverse_sl2(A), -k);
    Mat2 R = mat_identity(), B = A;
    while (k > 0) {
        if (k & 1) R = mat_mul(R, B);
        B = mat_mul(B, B);
        k >>= 1;
    }
    return R;
}

RealLattice::RealLattice(const FieldElement& beta1, const FieldElement& beta2)
    : F_(beta1.field()), b1_(beta1), b2_(beta2) {
    if (!(beta2.field() == F_)) throw DomainError("RealLattice: basis elements from different fields");
    mpq_class x1 = b1_.sqrt_x(), y1 = b1_.sqrt_y(), x2 = b2_.sqrt_x(), y2 = b2_.sqrt_y();
    mpq_class det = x1 * y2 - x2 * y1;
    if (sgn(det) == 0) throw DomainError("RealLattice: basis is linearly dependent over Q");
    inv_[0][0] = y2 / det;
    inv_[0][1] = -x2 / det;
    inv_[1][0] = -y1 / det;
    inv_[1][1] = x1 / det;
}

RealLattice RealLattice::maximal_order(const QuadraticField& F) {
    return RealLattice(FieldElement::from_integer(F, 1), FieldElement::omega(F));
}

std::pair<mpq_class, mpq_class> RealLattice::coords(const FieldElement& z) const {
    if (!(z.field() == F_)) throw DomainError("RealLattice::coords: field mismatch");
    mpq_class x = z.sqrt_x(), y = z.sqrt_y();
    return {inv_[0][0] * x + inv_[0][1] * y, inv_[1][0] * x + inv_[1][1] * y};
}

bool RealLattice::contains(const FieldElement& z) const {
    auto [c1, c2] = coords(z);
    return c1.get_den() == 1 && c2.get_den() == 1;
}

FieldElement RealLattice::element(const mpz_class& i, const mpz_class& j) const {
    return b1_ * mpq_class(i) + b2_ * mpq_class(j);
}

double RealLattice::covolume() const {
    mpq_class m = b1_.sqrt_x() * b2_.sqrt_y() - b2_.sqrt_x() * b1_.sqrt_y();
    return 2.0 * std::sqrt(static_cast<double>(F_.d)) * std::fabs(m.get_d());
}

bool RealLattice::stable_under(const FieldElement& u) const {
    return contains(u * b1_) && contains(u * b2_);
}

bool RealLattice::same_module(const RealLattice& other) const {
    return contains(other.b1_) && contains(other.b2_) && other.contains(b1_) && other.contains(b2_);
}

namespace {

constexpr long kUnitSearchLimit = 1000000;

}  // namespace

FieldElement totally_positive_unit(const RealLattice& L) {
    FieldElement eps0 = fundamental_unit(L.field());
    FieldElement u = eps0;
    for (long k = 1; k <= kUnitSearchLimit; ++k, u *= eps0) {
        if (u.sign_second() > 0 && L.stable_under(u)) return u;
    }
    throw InvariantViolation("totally_positive_unit: no stabilizing power found");
}

Mat2 unit_action_matrix(const RealLattice& L) {
    FieldElement eps = totally_positive_unit(L);
    Mat2 phi;
    const FieldElement* basis[2] = {&L.beta1(), &L.beta2()};
    for (int j = 0; j < 2; ++j) {
        auto [c1, c2] = L.coords(eps * *basis[j]);
        if (c1.get_den() != 1 || c2.get_den() != 1)
            throw InvariantViolation("unit_action_matrix: eps*beta not in L");
        phi[0][j] = c1.get_num();
        phi[1][j] = c2.get_num();
    }
    if (mat_det(phi) != 1) throw InvariantViolation("unit_action_matrix: determinant != 1");
    return phi;
}

FieldElement coset_unit(const RealLattice& L, const FieldElement& l0) {
    FieldElement eps0 = fundamental_unit(L.field());
    FieldElement u = eps0;
    for (long k = 1; k <= kUnitSearchLimit; ++k, u *= eps0) {
        for (const FieldElement& c : {u, -u}) {
            if (c.sign_second() > 0 && L.stable_under(c) && L.contains(c * l0 - l0)) return c;
        }
    }
    throw InvariantViolation("coset_unit: no stabilizing power found");
}

bool in_canonical_domain(const FieldElement& l, const FieldElement& gen) {
    mpq_class n = abs(l.norm());
    if (sgn(n) == 0) return false;
    FieldElement l2 = l * l;
    FieldElement nn = FieldElement(l.field(), n, 0);
    if ((l2 - nn).sign_first() < 0) return false;
    return (gen * gen * nn - l2).sign_first() > 0;
}

FieldElement fold_to_canonical(const FieldElement& l, const FieldElement& gen) {
    mpq_class n = abs(l.norm());
    if (sgn(n) == 0) throw DomainError("fold_to_canonical: zero norm");
    long double r = std::log(std::fabs(l.first_ld())) - 0.5L * std::log(static_cast<long double>(n.get_d()));
    long double lg = std::log(std::fabs(gen.first_ld()));
    long k = static_cast<long>(std::floor(r / lg));
    FieldElement z = l * gen.pow(-k);
    FieldElement nn(l.field(), n, 0);
    for (int guard = 0; guard < 64; ++guard) {
        FieldElement z2 = z * z;
        if ((z2 - nn).sign_first() < 0) {
            z *= gen;
        } else if ((gen * gen * nn - z2).sign_first() <= 0) {
            z /= gen;
        } else {
            return z;
        }
    }
    throw InvariantViolation("fold_to_canonical: did not converge");
}

std::vector<FieldElement> coset_representatives(const RealLattice& L, const FieldElement& l0,
                                                double X, const FieldElement& gen) {
    if (!(X > 0)) throw DomainError("coset_representatives: X must be > 0");
    if (std::fabs(gen.first_ld()) <= 1.0L) throw DomainError("coset_representatives: |gen| must exceed 1");
    const double E = std::fabs(gen.first());
    const double xa = E * std::sqrt(X) * (1 + 1e-9) + 1e-9;
    const double ya = std::sqrt(X) * (1 + 1e-9) + 1e-9;
    const double p1 = L.beta1().first(), p2 = L.beta2().first();
    const double q1 = L.beta1().second(), q2 = L.beta2().second();
    const double x0 = l0.first(), y0 = l0.second();
    const double det = p1 * q2 - p2 * q1;

    // i-range from the corners of the box mapped back to lattice coordinates
    double imin = 1e300, imax = -1e300;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0}) {
            double X1 = sx * xa - x0, Y1 = sy * ya - y0;
            double i = (q2 * X1 - p2 * Y1) / det;
            imin = std::min(imin, i);
            imax = std::max(imax, i);
        }
    const mpq_class Xq(X);
    std::vector<FieldElement> out;
    const long ilo = static_cast<long>(std::floor(imin)) - 1, ihi = static_cast<long>(std::ceil(imax)) + 1;
    for (long i = ilo; i <= ihi; ++i) {
        double lo = -1e300, hi = 1e300;
        auto clamp = [&](double c, double coef, double bound) {
            // |c + coef*j| <= bound
            double a = (-bound - c) / coef, b = (bound - c) / coef;
            if (a > b) std::swap(a, b);
            lo = std::max(lo, a);
            hi = std::min(hi, b);
        };
        clamp(x0 + i * p1, p2, xa);
        clamp(y0 + i * q1, q2, ya);
        if (lo > hi + 2) continue;
        const long jlo = static_cast<long>(std::floor(lo)) - 1, jhi = static_cast<long>(std::ceil(hi)) + 1;
        FieldElement base = l0 + L.beta1() * mpq_class(i);
        for (long j = jlo; j <= jhi; ++j) {
            FieldElement z = base + L.beta2() * mpq_class(j);
            mpq_class n = abs(z.norm());
            if (sgn(n) == 0 || n > Xq) continue;
            if (in_canonical_domain(z, gen)) out.push_back(std::move(z));
        }
    }
    return out;
}

std::vector<FieldElement> coset_representatives(const RealLattice& L, const FieldElement& l0,
                                                double X) {
    return coset_representatives(L, l0, X, coset_unit(L, l0));
}

mpq_class module_norm(const RealLattice& L, const FieldElement& l0) {
    const QuadraticField& F = L.field();
    FieldElement w = FieldElement::omega(F);
    std::vector<FieldElement> gens = {L.beta1(), L.beta1() * w, L.beta2(), L.beta2() * w};
    if (!l0.is_zero()) {
        gens.push_back(l0);
        gens.push_back(l0 * w);
    }
    mpz_class den = 1;
    for (auto& g : gens) {
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), g.a().get_den_mpz_t());
        mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), g.b().get_den_mpz_t());
    }
    std::vector<std::pair<mpz_class, mpz_class>> v;
    for (auto& g : gens) {
        mpq_class a = g.a() * den, b = g.b() * den;
        v.emplace_back(a.get_num(), b.get_num());
    }
    // index of a full-rank sublattice of Z^2 = gcd of its 2x2 minors
    mpz_class g = 0;
    for (size_t i = 0; i < v.size(); ++i)
        for (size_t j = i + 1; j < v.size(); ++j) {
            mpz_class m = v[i].first * v[j].second - v[i].second * v[j].first;
            mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), m.get_mpz_t());
        }
    return mpq_class(g, den * den);
}

}  // namespace rmgeom
