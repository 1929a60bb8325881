#include "rmgeom/cfrac.hpp"

#include "rmgeom/errors.hpp"
#include "rmgeom/parallel.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace rmgeom {

namespace {

const double kPhi = (1.0 + std::sqrt(5.0)) / 2.0;

std::uint64_t to_u64(const mpz_class& z) {
    if (sgn(z) < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 63)
        throw DomainError("levy: denominator outside the 64-bit range");
    return static_cast<std::uint64_t>(mpz_get_ui(z.get_mpz_t()));
}

double fib_tail_factor(double eps) { return 1.0 / (1.0 - std::pow(kPhi, -eps)); }

// Farey fractions of order n in [0, 1], increasing.
std::vector<std::pair<long, long>> farey(int n) {
    std::vector<std::pair<long, long>> out;
    long a = 0, b = 1, c = 1, d = n;
    out.emplace_back(a, b);
    while (c <= n) {
        long k = (n + b) / d;
        long e = k * c - a, f = k * d - b;
        a = c;
        b = d;
        c = e;
        d = f;
        out.emplace_back(a, b);
    }
    return out;
}

}  // namespace

double BoundaryFunction::bound_ratio(std::uint64_t qmax, std::complex<double> s) const {
    double worst = 0;
    for (std::uint64_t q = 1; q <= qmax; ++q)
        for (std::uint64_t qp = 1; qp <= q; ++qp) {
            if (std::gcd(q, qp) != 1) continue;
            double r = std::abs(f(q, qp, s)) / (constant * std::pow(static_cast<double>(q), -decay_exponent));
            worst = std::max(worst, r);
        }
    return worst;
}

BoundaryFunction zero_function() {
    return {[](std::uint64_t, std::uint64_t, std::complex<double>) { return std::complex<double>(0); }, 1.0, 0.0};
}

BoundaryFunction q_power(double e) {
    return {[e](std::uint64_t q, std::uint64_t, std::complex<double>) {
                return std::complex<double>(std::pow(static_cast<double>(q), -e));
            },
            e, 1.0};
}

BoundaryFunction q2_qp1() {
    return {[](std::uint64_t q, std::uint64_t qp, std::complex<double>) {
                double dq = static_cast<double>(q);
                return std::complex<double>(1.0 / (dq * dq * static_cast<double>(qp)));
            },
            2.0, 1.0};
}

BoundaryFunction q_power_param() {
    return {[](std::uint64_t q, std::uint64_t, std::complex<double> s) {
                return std::exp(-s * std::log(static_cast<double>(q)));
            },
            1.0, 1.0};
}

LevySum levy_transform(const BoundaryFunction& f, const CFExpansion& cf, std::size_t N,
                       std::complex<double> s) {
    if (N > cf.q.size() && !cf.terminated)
        throw PrecisionExhausted("levy_transform: expansion has only " + std::to_string(cf.q.size()) +
                                 " certified terms");
    LevySum out;
    std::uint64_t qprev = 1;
    std::size_t n = std::min(N, cf.q.size());
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t q = to_u64(cf.q[i]);
        out.value += f(q, qprev, s);
        qprev = q;
    }
    out.terms = n;
    if (cf.terminated && n == cf.q.size()) {
        out.tail_bound = 0;
    } else {
        out.tail_bound = f.constant * std::pow(static_cast<double>(qprev), -f.decay_exponent) *
                         fib_tail_factor(f.decay_exponent);
    }
    return out;
}

LevySum levy_transform(const BoundaryFunction& f, const Real& x, std::size_t N, std::complex<double> s) {
    return levy_transform(f, cf_expand(x, N), N, s);
}

LevyIntegral levy_integral(const BoundaryFunction& f, const mpq_class& lo, const mpq_class& hi,
                           const QuadratureConfig& cfg, std::complex<double> s) {
    if (!(lo < hi) || sgn(lo) < 0 || hi > 1) throw DomainError("levy_integral: need 0 <= lo < hi <= 1");
    if (cfg.nodes < 2 || cfg.farey_order < 1) throw DomainError("levy_integral: bad quadrature config");
    auto fs = farey(cfg.farey_order);
    std::vector<std::pair<mpq_class, mpq_class>> strata;
    bool lo_found = false, hi_found = false;
    for (std::size_t i = 0; i + 1 < fs.size(); ++i) {
        mpq_class a(fs[i].first, fs[i].second), b(fs[i + 1].first, fs[i + 1].second);
        a.canonicalize();
        b.canonicalize();
        if (a == lo) lo_found = true;
        if (b == hi) hi_found = true;
        if (a >= lo && b <= hi) strata.emplace_back(a, b);
    }
    if (!lo_found || !hi_found)
        throw DomainError("levy_integral: interval ends must be Farey fractions of the chosen order");

    const double total = mpq_class(hi - lo).get_d();
    const long prec = cfg.precision_bits;
    struct Part {
        std::complex<double> fine, coarse;
        double tail = 0;
        std::size_t nodes = 0;
    };
    std::vector<Part> parts(strata.size());
    parallel_for(strata.size(), [&](std::size_t k) {
        const mpq_class width = strata[k].second - strata[k].first;
        const double wd = width.get_d();
        std::size_t n = static_cast<std::size_t>(std::llround(static_cast<double>(cfg.nodes) * wd / total));
        n = std::max<std::size_t>(n, 2);
        // offset (sqrt 5 - 1)/2 keeps every node irrational
        Real alpha(prec + 16);
        mpfr_sqrt_ui(alpha.raw(), 5, MPFR_RNDN);
        mpfr_sub_ui(alpha.raw(), alpha.raw(), 1, MPFR_RNDN);
        mpfr_div_ui(alpha.raw(), alpha.raw(), 2, MPFR_RNDN);
        Real left = Real::from_rational(strata[k].first, prec);
        Real step = Real::from_rational(width / static_cast<unsigned long>(n), prec);
        Part part;
        part.nodes = n;
        std::complex<double> even;
        for (std::size_t j = 0; j < n; ++j) {
            Real x(prec);
            mpfr_add_ui(x.raw(), alpha.raw(), static_cast<unsigned long>(j), MPFR_RNDN);
            mpfr_mul(x.raw(), x.raw(), step.raw(), MPFR_RNDN);
            mpfr_add(x.raw(), x.raw(), left.raw(), MPFR_RNDN);
            CFExpansion cf = cf_expand_certified(x);
            LevySum ls = levy_transform(f, cf, cf.q.size(), s);
            part.fine += ls.value;
            if (j % 2 == 0) even += ls.value;
            part.tail = std::max(part.tail, ls.tail_bound);
        }
        const std::size_t n_even = (n + 1) / 2;
        part.fine *= wd / static_cast<double>(n);
        part.coarse = even * (wd / static_cast<double>(n_even));
        parts[k] = part;
    });

    LevyIntegral out;
    std::complex<double> coarse;
    double tail = 0;
    for (const auto& p : parts) {
        out.value += p.fine;
        coarse += p.coarse;
        tail = std::max(tail, p.tail);
        out.nodes += p.nodes;
    }
    out.strata = strata.size();
    out.error_estimate = std::abs(out.value - coarse) + tail * total;
    if (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))
        throw InsufficientTerms("levy_integral: non-finite quadrature value");
    return out;
}

LevyRhs levy_rhs(const BoundaryFunction& f, std::uint64_t qmax, std::complex<double> s) {
    if (qmax < 1) throw DomainError("levy_rhs: qmax must be >= 1");
    constexpr std::uint64_t kBlock = 256;
    const std::size_t nblocks = static_cast<std::size_t>((qmax + kBlock - 1) / kBlock);
    std::vector<std::complex<double>> partial(nblocks);
    parallel_for(nblocks, [&](std::size_t b) {
        std::complex<double> acc;  // q > q' only
        const std::uint64_t q0 = b * kBlock + 1, q1 = std::min<std::uint64_t>(qmax, (b + 1) * kBlock);
        for (std::uint64_t q = q0; q <= q1; ++q) {
            const double dq = static_cast<double>(q);
            for (std::uint64_t qp = 1; qp < q; ++qp) {
                if (std::gcd(q, qp) != 1) continue;
                acc += f(q, qp, s) / (dq * (dq + static_cast<double>(qp)));
            }
        }
        partial[b] = acc;
    });
    LevyRhs out;
    for (const auto& p : partial) out.strict += p;
    out.diagonal = f(1, 1, s) / 2.0;
    out.value = out.diagonal + out.strict;
    const double eps = f.decay_exponent;
    out.tail_bound = f.constant * std::pow(static_cast<double>(qmax), -eps) / eps;
    return out;
}

LevyLemmaResult levy_lemma_check(const BoundaryFunction& f, const QuadratureConfig& cfg) {
    LevyIntegral lhs = levy_integral(f, mpq_class(0), mpq_class(1), cfg);
    LevyRhs rhs = levy_rhs(f, cfg.rhs_qmax);
    LevyLemmaResult out;
    out.lhs = lhs.value;
    out.rhs = rhs.value;
    out.gap = std::abs(lhs.value - rhs.value);
    out.lhs_error = lhs.error_estimate;
    out.rhs_tail = rhs.tail_bound;
    out.rhs_cylinder = 2.0 * rhs.strict + rhs.diagonal;
    out.cylinder_gap = std::abs(lhs.value - out.rhs_cylinder);
    return out;
}

}  // namespace rmgeom
