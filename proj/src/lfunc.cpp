#include "rmgeom/lfunc.hpp"

#include "rmgeom/errors.hpp"

#include <cmath>

namespace rmgeom {

namespace {

cplx norm_factor(const RealLattice& L, const FieldElement& l0, const std::optional<mpq_class>& norm_b, cplx s) {
    mpq_class nb = norm_b ? *norm_b : module_norm(L, l0);
    if (sgn(nb) <= 0) throw DomainError("partial zeta: N(b) must be positive");
    return std::exp(s * std::log(nb.get_d()));
}

void check_l0(const FieldElement& l0) {
    if (l0.is_zero()) throw DomainError("partial zeta: l0 = 0 has sign(l0') = 0; use shimizu_L");
}

}  // namespace

SeriesValue orbit_sum_direct(const RealLattice& L, const FieldElement& l0, const FieldElement& unit,
                             SignTwist twist, cplx s, double X) {
    if (s.real() <= 1) throw DomainError("direct sum needs Re(s) > 1");
    if (!(X >= 1)) throw DomainError("direct sum needs X >= 1");
    auto reps = coset_representatives(L, l0, X, unit);
    SeriesValue out;
    out.method = SeriesMethod::Direct;
    out.truncation = X;
    out.terms = reps.size();
    for (const auto& l : reps) {
        const int sg = twist == SignTwist::Second ? l.sign_second() : l.sign_first() * l.sign_second();
        const double n = mpq_class(abs(l.norm())).get_d();
        out.value += static_cast<double>(sg) * std::exp(-s * std::log(n));
    }
    // orbits with |N| <= X grow linearly in X; compare the tail with that density
    const double sigma = s.real();
    const double density = static_cast<double>(reps.size()) / X;
    out.tail_bound = density * std::pow(X, 1 - sigma) / (sigma - 1);
    return out;
}

SeriesValue partial_zeta_direct(const RealLattice& L, const FieldElement& l0, cplx s, double X,
                                std::optional<mpq_class> norm_b) {
    check_l0(l0);
    SeriesValue v = orbit_sum_direct(L, l0, coset_unit(L, l0), SignTwist::Second, s, X);
    const cplx f = static_cast<double>(l0.sign_second()) * norm_factor(L, l0, norm_b, s);
    v.value *= f;
    v.tail_bound *= std::abs(f);
    return v;
}

SeriesValue partial_zeta_continued(const RealLattice& L, const FieldElement& l0, cplx s,
                                   std::optional<mpq_class> norm_b, const ConeDecomposition* dec) {
    check_l0(l0);
    SeriesValue v;
    if (dec) {
        v = orbit_sum_continued(*dec, SignTwist::Second, s);
    } else {
        ConeDecomposition own = cone_decomposition(L, l0, coset_unit(L, l0));
        v = orbit_sum_continued(own, SignTwist::Second, s);
    }
    const cplx f = static_cast<double>(l0.sign_second()) * norm_factor(L, l0, norm_b, s);
    v.value *= f;
    v.tail_bound *= std::abs(f);
    return v;
}

StarkResult stark_number(const RealLattice& L, const FieldElement& l0, double h, std::optional<mpq_class> norm_b) {
    check_l0(l0);
    if (!(h > 0 && h < 0.25)) throw DomainError("stark_number: step must lie in (0, 1/4)");
    ConeDecomposition dec = cone_decomposition(L, l0, coset_unit(L, l0));
    auto f = [&](double s) { return partial_zeta_continued(L, l0, cplx(s, 0), norm_b, &dec).value.real(); };
    auto central = [&](double step) { return (f(step) - f(-step)) / (2 * step); };
    const double d1 = central(h), d2 = central(h / 2), d4 = central(h / 4);
    const double r1 = (4 * d2 - d1) / 3, r2 = (4 * d4 - d2) / 3;
    StarkResult out;
    out.derivative = r2;
    out.value = std::exp(r2);
    out.error = std::fabs(r1 - r2);
    out.step = h;
    return out;
}

SeriesValue shimizu_L(const RealLattice& L, cplx s, double X) {
    return orbit_sum_direct(L, FieldElement(L.field()), totally_positive_unit(L), SignTwist::Norm, s, X);
}

std::vector<std::pair<FieldElement, mpq_class>> shimizu_terms(const RealLattice& L, double X) {
    std::vector<std::pair<FieldElement, mpq_class>> out;
    for (auto& l : coset_representatives(L, FieldElement(L.field()), X, totally_positive_unit(L)))
        out.emplace_back(l, abs(l.norm()));
    return out;
}

}  // namespace rmgeom
