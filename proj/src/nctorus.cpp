#include "rmgeom/nctorus.hpp"

#include "rmgeom/errors.hpp"
#include "rmgeom/parallel.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace rmgeom {

bool same_phase(const PhaseExponent& s, const PhaseExponent& t) {
    const FieldElement diff = s - t;
    return diff.is_rational() && diff.a().get_den() == 1;
}

std::complex<double> phase_value(const PhaseExponent& t) {
    // reduce mod 1 exactly before leaving exact arithmetic
    const FieldElement r = t - FieldElement(t.field(), mpq_class(t.floor_first()), 0);
    return std::polar(1.0, 2 * std::numbers::pi * r.first());
}

Vec2 row_times(const Vec2& v, const Mat2& g) {
    return {v[0] * g[0][0] + v[1] * g[1][0], v[0] * g[0][1] + v[1] * g[1][1]};
}

CocycleParams symmetric_params(const FieldElement& theta) {
    CocycleParams p;
    p.theta = theta;
    p.xi2 = theta * mpq_class(1, 2);
    p.xi1 = -p.xi2;
    p.symmetric = true;
    return p;
}

CocycleParams make_params(const FieldElement& theta, const PhaseExponent& xi1) {
    CocycleParams p;
    p.theta = theta;
    p.xi1 = xi1;
    p.xi2 = xi1 + theta;
    p.symmetric = p.xi2 == -p.xi1;
    return p;
}

PhaseExponent cocycle_sigma(const CocycleParams& p, const Vec2& a, const Vec2& b) {
    const mpq_class c1(a[0] * b[1]), c2(a[1] * b[0]);
    return -(p.xi1 * c1 + p.xi2 * c2);
}

InvarianceResult sl2_invariance_check(const CocycleParams& p, const Mat2& g, long bound) {
    if (mat_det(g) != 1) throw DomainError("sl2_invariance_check: det must be 1");
    if (bound < 1) throw DomainError("sl2_invariance_check: bound must be >= 1");
    InvarianceResult out;
    for (long a = -bound; a <= bound; ++a)
        for (long b = -bound; b <= bound; ++b) {
            const Vec2 v{a, b};
            const Vec2 vg = row_times(v, g);
            for (long c = -bound; c <= bound; ++c)
                for (long d = -bound; d <= bound; ++d) {
                    const Vec2 w{c, d};
                    if (!same_phase(cocycle_sigma(p, vg, row_times(w, g)), cocycle_sigma(p, v, w))) {
                        out.holds = false;
                        out.witness = std::make_pair(v, w);
                        return out;
                    }
                }
        }
    return out;
}

SolvElement solv_mul(const SolvElement& a, const SolvElement& b, const Mat2& phi) {
    const Vec2 t = row_times(b.v, mat_pow(phi, a.k));
    return {{a.v[0] + t[0], a.v[1] + t[1]}, a.k + b.k};
}

SolvElement solv_mul_inverse_law(const SolvElement& a, const SolvElement& b, const Mat2& phi) {
    const Vec2 t = row_times(b.v, mat_pow(phi, -a.k));
    return {{a.v[0] + t[0], a.v[1] + t[1]}, a.k + b.k};
}

PhaseExponent twisted_cocycle(const CocycleParams& p, const Mat2& phi, const SolvElement& a, const SolvElement& b) {
    return cocycle_sigma(p, a.v, row_times(b.v, mat_pow(phi, a.k)));
}

Mat2 phi_epsilon(const RealLattice& L) {
    const Mat2 c = unit_action_matrix(L);
    return {{{c[0][0], c[1][0]}, {c[0][1], c[1][1]}}};
}

std::size_t WindowOperator::index(const Vec2& p) const {
    if (abs(p[0]) > R || abs(p[1]) > R) throw DomainError("window index outside the window");
    const long n = p[0].get_si(), m = p[1].get_si();
    return static_cast<std::size_t>((n + R) * (2 * R + 1) + (m + R));
}

namespace {

bool in_window(const Vec2& p, long R) { return abs(p[0]) <= R && abs(p[1]) <= R; }

}  // namespace

ShiftImage apply_U(const CocycleParams& p, const Vec2& at, ShiftConvention c) {
    ShiftImage im;
    const long step = c == ShiftConvention::SigmaRegular ? 1 : -1;
    im.target = {at[0], at[1] + step};
    im.phase = -(p.xi2 * mpq_class(at[0]));
    return im;
}

ShiftImage apply_V(const CocycleParams& p, const Vec2& at, ShiftConvention c) {
    ShiftImage im;
    const long step = c == ShiftConvention::SigmaRegular ? 1 : -1;
    im.target = {at[0] + step, at[1]};
    im.phase = -(p.xi1 * mpq_class(at[1]));
    return im;
}

UVPair generators_UV(const CocycleParams& p, long R, ShiftConvention c) {
    if (R < 1) throw DomainError("generators_UV: R must be >= 1");
    UVPair out;
    out.convention = c;
    for (WindowOperator* op : {&out.U, &out.V}) {
        op->R = R;
        for (long n = -R; n <= R; ++n)
            for (long m = -R; m <= R; ++m) op->basis.push_back({n, m});
    }
    for (const auto& b : out.U.basis) {
        ShiftImage u = apply_U(p, b, c), v = apply_V(p, b, c);
        u.inside = in_window(u.target, R);
        v.inside = in_window(v.target, R);
        out.U.column.push_back(std::move(u));
        out.V.column.push_back(std::move(v));
    }
    return out;
}

RelationReport check_uv_relation(const CocycleParams& p, const UVPair& ops, const PhaseExponent& factor) {
    RelationReport rep;
    rep.expected = factor;
    const auto c = ops.convention;
    for (std::size_t i = 0; i < ops.U.basis.size(); ++i) {
        // U then V, read from the stored columns where they exist
        const ShiftImage& u1 = ops.U.column[i];
        const ShiftImage& v1 = ops.V.column[i];
        if (!u1.inside || !v1.inside) continue;
        const ShiftImage& vu = ops.V.column[ops.V.index(u1.target)];
        const ShiftImage& uv = ops.U.column[ops.U.index(v1.target)];
        if (!vu.inside || !uv.inside) continue;
        ++rep.interior;
        // stored columns must agree with the formula everywhere
        const ShiftImage chk = apply_V(p, u1.target, c);
        if (chk.target != vu.target || !(chk.phase == vu.phase))
            throw InvariantViolation("generators_UV: stored column disagrees with the shift formula");
        if (vu.target == uv.target && same_phase(u1.phase + vu.phase, factor + v1.phase + uv.phase))
            ++rep.satisfied;
    }
    return rep;
}

std::vector<std::vector<std::complex<double>>> dense(const WindowOperator& op) {
    const std::size_t n = op.basis.size();
    if (n > 10000) throw DomainError("dense: window too large");
    std::vector<std::vector<std::complex<double>>> M(n, std::vector<std::complex<double>>(n));
    for (std::size_t j = 0; j < n; ++j)
        if (op.column[j].inside) M[op.index(op.column[j].target)][j] = phase_value(op.column[j].phase);
    return M;
}

SpectrumWindow dirac_spectrum(const FieldElement& theta, long R) {
    if (R < 1) throw DomainError("dirac_spectrum: R must be >= 1");
    if (theta.is_rational()) throw DomainError("dirac_spectrum: theta must be irrational");
    SpectrumWindow w;
    w.theta = theta;
    w.R = R;
    const std::size_t side = static_cast<std::size_t>(2 * R + 1);
    w.records.resize(side * side);
    parallel_for(side, [&](std::size_t row) {
        const long n = static_cast<long>(row) - R;
        for (long m = -R; m <= R; ++m) {
            const FieldElement x = FieldElement::from_integer(theta.field(), n) + theta * mpq_class(m);
            SpectrumRecord& r = w.records[row * side + static_cast<std::size_t>(m + R)];
            r.n = n;
            r.m = m;
            r.norm = x.norm();
            r.sign = sgn(r.norm);
            const long double a = x.first_ld(), b = x.second_ld();
            r.lambda_plus = static_cast<double>(std::sqrt(a * a + b * b));
        }
    });
    return w;
}

void write_spectrum_csv(std::ostream& os, const SpectrumWindow& w) {
    os << "n,m,lambda_plus,norm_num,norm_den,sign\n";
    char buf[64];
    for (const auto& r : w.records) {
        std::snprintf(buf, sizeof buf, "%.17g", r.lambda_plus);
        os << r.n << ',' << r.m << ',' << buf << ',' << r.norm.get_num() << ',' << r.norm.get_den() << ','
           << r.sign << '\n';
    }
}

std::array<std::array<std::complex<double>, 2>, 2> dirac_block(const FieldElement& theta, long n, long m) {
    const FieldElement x = FieldElement::from_integer(theta.field(), n) + theta * mpq_class(m);
    const double a = x.first(), b = x.second();
    const std::complex<double> I(0, 1);
    return {{{0.0, b - I * a}, {b + I * a, 0.0}}};
}

std::complex<double> spectral_eta_partial(const SpectrumWindow& w, std::complex<double> s) {
    std::complex<double> sum = 0;
    for (const auto& r : w.records) {
        if (r.sign == 0) continue;
        sum += static_cast<double>(r.sign) * std::exp(-s * std::log(mpq_class(abs(r.norm)).get_d()));
    }
    return sum;
}

std::vector<ShimizuMode> shimizu_from_spectrum(const RealLattice& L, double X) {
    if (!(X >= 1)) throw DomainError("shimizu_from_spectrum: X must be >= 1");
    const FieldElement eps = totally_positive_unit(L);
    const FieldElement& b1 = L.beta1();
    const FieldElement& b2 = L.beta2();
    // canonical mu has |mu| < eps sqrt X and |mu'| <= sqrt X; bound its coordinates
    const double A = eps.first() * std::sqrt(X), B = std::sqrt(X);
    const double det = std::fabs(b1.first() * b2.second() - b1.second() * b2.first());
    const double rn = (std::fabs(b2.second()) * A + std::fabs(b2.first()) * B) / det;
    const double rm = (std::fabs(b1.second()) * A + std::fabs(b1.first()) * B) / det;
    const long R = static_cast<long>(std::ceil(std::max(rn, rm))) + 1;

    const FieldElement theta = b2 / b1;
    const mpq_class nb1 = b1.norm();
    const SpectrumWindow w = dirac_spectrum(theta, R);
    const mpq_class Xq(X);
    std::vector<ShimizuMode> out;
    for (const auto& r : w.records) {
        if (r.sign == 0) continue;  // only (0,0): theta is irrational
        const mpq_class an = abs(nb1 * r.norm);
        if (an > Xq) continue;
        const FieldElement mu = L.element(r.n, r.m);
        if (!in_canonical_domain(mu, eps)) continue;
        ShimizuMode md;
        md.sign = sgn(nb1) * r.sign;
        md.norm = an;
        md.magnitude = std::sqrt(an.get_d());
        md.mu = mu;
        out.push_back(std::move(md));
    }
    return out;
}

std::array<std::array<double, 2>, 2> solv_fibration_sample(const RealLattice& L, double t) {
    const double et = std::exp(t), emt = std::exp(-t);
    return {{{L.beta1().first() * et, L.beta1().second() * emt}, {L.beta2().first() * et, L.beta2().second() * emt}}};
}

std::vector<LorentzMode> lorentz_modes(const FieldElement& theta, long R) {
    if (R < 1) throw DomainError("lorentz_modes: R must be >= 1");
    std::vector<LorentzMode> out;
    out.reserve(static_cast<std::size_t>((2 * R + 1) * (2 * R + 1)));
    for (long n = -R; n <= R; ++n)
        for (long m = -R; m <= R; ++m) {
            const FieldElement x = FieldElement::from_integer(theta.field(), n) + theta * mpq_class(m);
            LorentzMode md;
            md.n = n;
            md.m = m;
            md.box = x.norm();
            const mpq_class tr = x.trace();
            md.euclidean = tr * tr - 2 * md.box;
            md.causal = sgn(md.box);
            out.push_back(std::move(md));
        }
    return out;
}

}  // namespace rmgeom
