#include "rmgeom/errors.hpp"
#include "rmgeom/lfunc.hpp"

#include <algorithm>
#include <cmath>

namespace rmgeom {

namespace {

struct TailEstimate {
    double correction = 0;
    double bound = 0;
};

// Given counts c[n] of ideals of norm n (n <= N) with count function
// A(x) ~ kappa x, estimate sum_{n > N} c[n] n^-s by partial summation:
// -A(N) N^-s + s kappa N^{1-s}/(s-1), leaving s * int E(x) x^{-s-1} with
// E = A - kappa x bounded empirically by C sqrt(x) on [N/2, N].
TailEstimate count_tail(const std::vector<long>& c, double kappa, double s) {
    const long N = static_cast<long>(c.size()) - 1;
    double A = 0, C = 0;
    for (long n = 1; n <= N; ++n) {
        A += static_cast<double>(c[n]);
        if (2 * n >= N) C = std::max(C, std::fabs(A - kappa * n) / std::sqrt(static_cast<double>(n)));
    }
    const double X = static_cast<double>(N);
    TailEstimate t;
    t.correction = -A * std::pow(X, -s) + s * kappa * std::pow(X, 1 - s) / (s - 1);
    t.bound = s * C * std::pow(X, 0.5 - s) / (s - 0.5);
    return t;
}

}  // namespace

int kronecker(const mpz_class& D, long n) { return mpz_kronecker_si(D.get_mpz_t(), n); }

std::vector<long> dedekind_coefficients(const QuadraticField& F, long N) {
    if (N < 0) throw DomainError("dedekind_coefficients: N must be >= 0");
    std::vector<long> a(static_cast<std::size_t>(N) + 1, 0);
    const mpz_class D(static_cast<long>(F.disc));
    for (long m = 1; m <= N; ++m) {
        const int chi = kronecker(D, m);
        if (chi == 0) continue;
        for (long n = m; n <= N; n += m) a[n] += chi;
    }
    return a;
}

double dedekind_residue(const QuadraticField& F) {
    const mpz_class D(static_cast<long>(F.disc));
    const FieldElement eps = fundamental_unit(F);
    long h = narrow_class_number(D);
    if (eps.norm() == 1) h /= 2;  // narrow classes split the wide ones in two
    const double log_eps = std::log(std::fabs(eps.first()));
    return 2.0 * static_cast<double>(h) * log_eps / std::sqrt(static_cast<double>(F.disc));
}

SeriesValue dedekind_zeta(const QuadraticField& F, double s, double X) {
    if (!(s > 1)) throw DomainError("dedekind_zeta: s must exceed 1");
    if (!(X >= 2) || X > 1e9) throw DomainError("dedekind_zeta: X must lie in [2, 1e9]");
    const long N = static_cast<long>(std::floor(X));
    const auto a = dedekind_coefficients(F, N);
    SeriesValue out;
    out.method = SeriesMethod::Direct;
    out.truncation = static_cast<double>(N);
    out.terms = static_cast<std::size_t>(N);
    double sum = 0;
    for (long n = N; n >= 1; --n)  // small terms first
        if (a[n]) sum += static_cast<double>(a[n]) * std::pow(static_cast<double>(n), -s);
    const TailEstimate t = count_tail(a, dedekind_residue(F), s);
    out.value = sum + t.correction;
    out.tail_bound = t.bound;
    return out;
}

SeriesValue ideal_class_zeta(const QuadraticFormZ& Q, int k, double X) {
    validate_form(Q);
    if (!Q.primitive()) throw DomainError("ideal_class_zeta: form must be primitive");
    if (k < 2) throw DomainError("ideal_class_zeta: k must be >= 2");
    if (!(X >= 2) || X > 1e8) throw DomainError("ideal_class_zeta: X must lie in [2, 1e8]");
    const mpz_class D = Q.disc();
    if (!D.fits_slong_p()) throw DomainError("ideal_class_zeta: discriminant too large");
    const long Dl = D.get_si();
    const std::int64_t f = square_part(Dl);
    std::int64_t d = Dl / (f * f);
    auto F = make_field(d);
    // module M = Z a + Z (-b + sqrt D)/2 with N(x a + y (-b+sqrt D)/2) = a Q(x, -y)
    const FieldElement sqrtD = FieldElement::from_sqrt_coords(F, 0, mpq_class(f));
    const FieldElement e1(F, mpq_class(Q.a), 0);
    const FieldElement e2 = (FieldElement(F, mpq_class(-Q.b), 0) + sqrtD) * mpq_class(1, 2);
    RealLattice M(e1, e2);
    const long N = static_cast<long>(std::floor(X));
    const mpz_class absa = abs(Q.a);
    const double bound = static_cast<double>(N) * absa.get_d();
    auto reps = coset_representatives(M, FieldElement(F), bound, totally_positive_unit(M));
    std::vector<long> count(static_cast<std::size_t>(N) + 1, 0);
    for (const auto& l : reps) {
        const mpq_class n = l.norm();
        if (sgn(n) != sgn(Q.a)) continue;
        const mpq_class m = abs(n) / absa;
        if (m.get_den() != 1 || m > N) continue;
        ++count[m.get_num().get_si()];
    }
    // l and -l name the same ideal
    for (auto& c : count) {
        if (c % 2) throw InvariantViolation("ideal_class_zeta: unpaired representation");
        c /= 2;
    }
    SeriesValue out;
    out.method = SeriesMethod::Direct;
    out.truncation = static_cast<double>(N);
    double sum = 0;
    for (long n = N; n >= 1; --n) {
        if (!count[n]) continue;
        sum += static_cast<double>(count[n]) * std::pow(static_cast<double>(n), -k);
        out.terms += static_cast<std::size_t>(count[n]);
    }
    // each narrow class carries 1/h+ of the ideal density when D is fundamental;
    // otherwise the density is read off the counts
    double kappa;
    if (D == F.disc) {
        kappa = dedekind_residue(F) / static_cast<double>(narrow_class_number(D));
    } else {
        long total = 0;
        for (long c : count) total += c;
        kappa = static_cast<double>(total) / static_cast<double>(N);
    }
    const TailEstimate t = count_tail(count, kappa, k);
    out.value = sum + t.correction;
    out.tail_bound = t.bound;
    return out;
}

}  // namespace rmgeom
