#include "rmgeom/shadows.hpp"

#include "rmgeom/errors.hpp"
#include "rmgeom/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <numeric>
#include <ostream>

namespace rmgeom {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;
constexpr long kLevel = 11;

using Series = std::vector<mpz_class>;

// prod_{n>=1} (1 - q^n) to order N by Euler's pentagonal theorem
Series euler_product(long N) {
    Series e(static_cast<std::size_t>(N) + 1, 0);
    e[0] = 1;
    for (long k = 1;; ++k) {
        const long g1 = k * (3 * k - 1) / 2, g2 = k * (3 * k + 1) / 2;
        if (g1 > N) break;
        const int sg = k % 2 ? -1 : 1;
        e[g1] += sg;
        if (g2 <= N) e[g2] += sg;
    }
    return e;
}

Series mul(const Series& a, const Series& b, long N) {
    Series c(static_cast<std::size_t>(N) + 1, 0);
    for (long i = 0; i <= N; ++i) {
        if (a[i] == 0) continue;
        for (long j = 0; i + j <= N; ++j)
            if (b[j] != 0) c[i + j] += a[i] * b[j];
    }
    return c;
}

// Expansions are cached by form; a request at or below the cached length is a slice.
struct Memo {
    std::mutex lock;
    std::map<int, Series> cache;
};

Memo& memo() {
    static Memo m;
    return m;
}

CuspFormSeries cached(int key, long N, int weight, long level, const std::function<Series(long)>& build) {
    if (N < 1) throw DomainError("cusp form expansion: N must be >= 1");
    Memo& m = memo();
    std::lock_guard<std::mutex> g(m.lock);
    Series& s = m.cache[key];
    if (static_cast<long>(s.size()) <= N) s = build(N);
    CuspFormSeries f;
    f.weight = weight;
    f.level = level;
    f.coeffs.assign(s.begin(), s.begin() + N + 1);
    f.n_terms = N;
    return f;
}

}  // namespace

CuspFormSeries eta_product_form11(long N) {
    return cached(11, N, 2, kLevel, [](long n) {
        const Series e = euler_product(n);
        const Series e2 = mul(e, e, n);
        Series e2_11(static_cast<std::size_t>(n) + 1, 0);
        for (long i = 0; 11 * i <= n; ++i) e2_11[11 * i] = e2[i];
        const Series prod = mul(e2, e2_11, n);
        Series a(static_cast<std::size_t>(n) + 1, 0);
        for (long i = 1; i <= n; ++i) a[i] = prod[i - 1];
        return a;
    });
}

CuspFormSeries delta_form(long N) {
    return cached(1, N, 12, 1, [](long n) {
        const Series e = euler_product(n);
        const Series e2 = mul(e, e, n), e4 = mul(e2, e2, n), e8 = mul(e4, e4, n);
        const Series e24 = mul(mul(e8, e8, n), e8, n);
        Series a(static_cast<std::size_t>(n) + 1, 0);
        for (long i = 1; i <= n; ++i) a[i] = e24[i - 1];
        return a;
    });
}

mpz_class hecke_eigenvalue(const CuspFormSeries& f, long m) {
    if (f.coeffs.size() < 2 || f.coeffs[1] != 1) throw DomainError("hecke_eigenvalue: form is not normalized");
    if (m < 1) throw DomainError("hecke_eigenvalue: m must be >= 1");
    if (std::gcd(m, f.level) != 1) throw DomainError("hecke_eigenvalue: m must be coprime to the level");
    if (m > f.n_terms) throw InsufficientTerms("hecke_eigenvalue: m beyond the computed coefficients");
    return f.coeffs[m];
}

Cusp::Cusp(const mpq_class& x) {
    mpq_class y(x);
    y.canonicalize();
    num = y.get_num();
    den = y.get_den();
}

Cusp mobius(const Mat2& g, const Cusp& x) {
    Cusp y;
    y.num = g[0][0] * x.num + g[0][1] * x.den;
    y.den = g[1][0] * x.num + g[1][1] * x.den;
    if (sgn(y.den) < 0) {
        y.num = -y.num;
        y.den = -y.den;
    }
    if (y.den == 0) {
        y.num = 1;
        return y;
    }
    mpz_class gcd_;
    mpz_gcd(gcd_.get_mpz_t(), y.num.get_mpz_t(), y.den.get_mpz_t());
    y.num /= gcd_;
    y.den /= gcd_;
    return y;
}

Mat2 gen_sigma() { return {{{mpz_class(0), mpz_class(-1)}, {mpz_class(1), mpz_class(0)}}}; }
Mat2 gen_tau() { return {{{mpz_class(0), mpz_class(-1)}, {mpz_class(1), mpz_class(1)}}}; }

namespace {

// f|g for g in SL2(Z) depends only on the coset Gamma0(N) g, i.e. on the
// bottom row (c : d) in P^1(Z/N).  Level 11: coset 0 is (0 : 1) with f|g = f;
// coset 1 + j is (1 : j) = S T^j with f|S T^j (z) = -f((z + j)/11)/11, from
// the Fricke relation f(-1/(11 z)) = -11 z^2 f(z).
struct CosetModel {
    long level = 1;
    int weight = 2;
    std::size_t count = 1;

    std::size_t coset_of(const mpz_class& c, const mpz_class& d) const {
        if (level == 1) return 0;
        const long cm = mpz_class(((c % level) + level) % level).get_si();
        const long dm = mpz_class(((d % level) + level) % level).get_si();
        if (cm == 0) return 0;
        long inv = 1;
        while ((inv * cm) % level != 1) ++inv;
        return 1 + static_cast<std::size_t>((dm * inv) % level);
    }
    // coset of g_c * g
    std::size_t act(std::size_t c, const Mat2& g) const {
        if (level == 1) return 0;
        const mpz_class r0 = c == 0 ? 0 : 1, r1 = c == 0 ? 1 : static_cast<long>(c - 1);
        return coset_of(r0 * g[0][0] + r1 * g[1][0], r0 * g[0][1] + r1 * g[1][1]);
    }
    double prefactor(std::size_t c) const { return c == 0 ? 1.0 : -1.0 / static_cast<double>(level); }
    long width(std::size_t c) const { return c == 0 ? 1 : level; }
    long shift(std::size_t c) const { return c == 0 ? 0 : static_cast<long>(c - 1); }
};

CosetModel model_for(const CuspFormSeries& f) {
    CosetModel m;
    m.weight = f.weight;
    if (f.weight < 2 || f.weight % 2) throw DomainError("shadows: weight must be even and >= 2");
    if (f.level == 1) return m;
    if (f.level == kLevel && f.weight == 2) {
        m.level = kLevel;
        m.count = 12;
        return m;
    }
    throw DomainError("shadows: only level 1 and the weight 2 level 11 form are supported");
}

// log of sum_{n > N} n^a rho^n, bounded by its first term over 1 - ratio
double log_tail(double a, double log_rho, long N) {
    const double n1 = static_cast<double>(N + 1);
    const double log_ratio = a * std::log((n1 + 1) / n1) + log_rho;
    if (log_ratio >= 0) return std::numeric_limits<double>::infinity();
    return a * std::log(n1) + n1 * log_rho - std::log1p(-std::exp(log_ratio));
}

struct Antiderivative {
    std::vector<cplx> A;  // A[j] = int_u^{i oo} h_c(v) v^j dv, j = 0..w
    double error = 0;
    std::size_t terms = 0;
};

// h_c(v) = pref sum a_n e(n (v + shift) / width).  With alpha_n = 2 pi i n / width,
// int_u^{i oo} e^{alpha v} v^j dv = -e^{alpha u} sum_r (-1)^r j!/(j-r)! u^{j-r} alpha^{-r-1}.
// re_u is Re(u) as an exact rational so the phase can be reduced exactly.
Antiderivative antiderivative(const CuspFormSeries& f, const std::vector<double>& a, const CosetModel& M,
                              std::size_t c, const mpq_class& re_u, double im_u, int w) {
    const double width = static_cast<double>(M.width(c));
    const double pref = M.prefactor(c);
    // phase of the first term with the real part reduced mod width
    mpq_class t = (re_u + M.shift(c)) / M.width(c);
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
    t -= fl;
    const double log_rho = -kTwoPi * im_u / width;
    const cplx base = std::polar(std::exp(log_rho), kTwoPi * t.get_d());

    // stop once the tail is negligible; otherwise run to the last coefficient
    const double k = f.weight;
    long nmax = f.n_terms;
    for (long n = 16; n < f.n_terms; n += 16)
        if (log_tail(k / 2, log_rho, n) < std::log(1e-18)) {
            nmax = n;
            break;
        }

    std::vector<cplx> S(static_cast<std::size_t>(w) + 1, 0.0);
    cplx e = 1;
    const cplx inv_i(0, -1);
    for (long n = 1; n <= nmax; ++n) {
        if ((n - 1) % 64 == 0) {
            mpq_class tn = t * n;
            mpz_class q;
            mpz_fdiv_q(q.get_mpz_t(), tn.get_num_mpz_t(), tn.get_den_mpz_t());
            tn -= q;
            e = std::polar(std::exp(log_rho * static_cast<double>(n)), kTwoPi * tn.get_d());
        } else {
            e *= base;
        }
        if (a[n] == 0) continue;
        // alpha^-(r+1) = (width / (2 pi n))^(r+1) (-i)^(r+1)
        const double s0 = width / (kTwoPi * static_cast<double>(n));
        cplx p = a[n] * e * s0 * inv_i;
        for (int r = 0; r <= w; ++r) {
            S[r] += p;
            p *= s0 * inv_i;
        }
    }
    Antiderivative out;
    out.terms = static_cast<std::size_t>(nmax);
    out.A.assign(static_cast<std::size_t>(w) + 1, 0.0);
    const cplx u(re_u.get_d(), im_u);
    const double lt = log_tail(k / 2, log_rho, nmax);
    std::vector<double> tail(static_cast<std::size_t>(w) + 1);
    for (int r = 0; r <= w; ++r) tail[r] = 2 * std::exp(lt) * std::pow(width / kTwoPi, r + 1);
    for (int j = 0; j <= w; ++j) {
        cplx acc = 0;
        double err = 0, fall = 1;  // j!/(j-r)!
        for (int r = 0; r <= j; ++r) {
            const cplx up = std::pow(u, j - r);
            acc += (r % 2 ? -fall : fall) * up * S[r];
            err += fall * std::abs(up) * tail[r];
            fall *= j - r;
        }
        out.A[j] = -pref * acc;
        out.error += std::fabs(pref) * err;
    }
    // rounding: phases drift for at most 64 steps between re-anchors and the
    // terms decay geometrically, so the n-sum loses a few hundred ulps at most
    double mag = 0;
    for (const auto& s : S) mag = std::max(mag, std::abs(s));
    out.error += 256 * std::numeric_limits<double>::epsilon() * std::fabs(pref) * mag * std::pow(1 + std::abs(u), w);
    return out;
}

// coefficients of (a X + b)^j (c X + d)^(w-j) in X^i
std::vector<std::vector<double>> poly_action(const Mat2& g, int w) {
    std::vector<std::vector<double>> M(static_cast<std::size_t>(w) + 1, std::vector<double>(w + 1, 0.0));
    const double a = g[0][0].get_d(), b = g[0][1].get_d(), c = g[1][0].get_d(), d = g[1][1].get_d();
    for (int j = 0; j <= w; ++j) {
        std::vector<double> p{1.0};
        auto times = [&](double hi, double lo) {
            std::vector<double> q(p.size() + 1, 0.0);
            for (std::size_t i = 0; i < p.size(); ++i) {
                q[i] += lo * p[i];
                q[i + 1] += hi * p[i];
            }
            p = std::move(q);
        };
        for (int r = 0; r < j; ++r) times(a, b);
        for (int r = j; r < w; ++r) times(c, d);
        for (int i = 0; i <= w; ++i) M[j][i] = p[i];
    }
    return M;
}

struct CuspValue {
    std::vector<cplx> v;  // j = 0..w
    double error = 0;
    double min_height = std::numeric_limits<double>::infinity();
    std::size_t terms = 0;
};

// int_x^{i oo} h_c(z) z^j dz.  With delta = (a b; c' d) sending oo to x, climb to
// z1 = x + iT and transport the lower leg by delta: it becomes an integral of
// h_{c delta} from i oo to u1 = delta^-1 z1 = -d/c' + i/(c'^2 T).  T balances the
// two q-heights T/width(c) and Im(u1)/width(c delta).
CuspValue to_infinity(const CuspFormSeries& f, const std::vector<double>& a, const CosetModel& M, std::size_t c,
                      const Cusp& x, int w, double scale) {
    CuspValue out;
    out.v.assign(static_cast<std::size_t>(w) + 1, 0.0);
    if (x.is_infinity()) return out;
    mpz_class g, s, t;
    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.num.get_mpz_t(), x.den.get_mpz_t());
    const Mat2 delta{{{x.num, -t}, {x.den, s}}};  // num*s - (-t)*den = 1
    const std::size_t cd = M.act(c, delta);
    const double k1 = static_cast<double>(M.width(c)), k2 = static_cast<double>(M.width(cd));
    const double cp = x.den.get_d();
    const double T = scale * std::sqrt(k1 / k2) / cp;
    const double im_u1 = 1.0 / (cp * cp * T);

    const Antiderivative top = antiderivative(f, a, M, c, mpq_class(x.num, x.den), T, w);
    const Antiderivative low = antiderivative(f, a, M, cd, mpq_class(-s, x.den), im_u1, w);
    const auto P = poly_action(delta, w);
    for (int j = 0; j <= w; ++j) {
        cplx acc = 0;
        double row = 0;
        for (int i = 0; i <= w; ++i) {
            acc += P[j][i] * low.A[i];
            row += std::fabs(P[j][i]);
        }
        out.v[j] = top.A[j] - acc;
        out.error += top.error + row * low.error;
    }
    out.min_height = std::min(T / k1, im_u1 / k2);
    out.terms = std::max(top.terms, low.terms);
    return out;
}

std::vector<double> coeffs_double(const CuspFormSeries& f) {
    std::vector<double> a(f.coeffs.size());
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.coeffs[i].get_d();
    return a;
}

}  // namespace

IntegralResult modular_symbol_integral(const CuspFormSeries& f, const Cusp& x, const Cusp& y,
                                       const std::vector<cplx>& P, double tol, double height_scale) {
    const CosetModel M = model_for(f);
    const int w = f.weight - 2;
    if (static_cast<int>(P.size()) != w + 1) throw DomainError("modular_symbol_integral: P must have degree w");
    if (!(height_scale > 0)) throw DomainError("modular_symbol_integral: height scale must be positive");
    IntegralResult out;
    if (x == y) return out;
    const auto a = coeffs_double(f);
    const CuspValue vx = to_infinity(f, a, M, 0, x, w, height_scale);
    const CuspValue vy = to_infinity(f, a, M, 0, y, w, height_scale);
    double pn = 0;
    for (int j = 0; j <= w; ++j) {
        out.value += P[j] * (vx.v[j] - vy.v[j]);
        pn = std::max(pn, std::abs(P[j]));
    }
    out.error = pn * (vx.error + vy.error);
    out.min_height = std::min(vx.min_height, vy.min_height);
    out.terms = std::max(vx.terms, vy.terms);
    if (!(out.error <= tol))
        throw InsufficientTerms("modular_symbol_integral: error bound " + std::to_string(out.error) +
                                " exceeds tolerance with " + std::to_string(f.n_terms) + " coefficients");
    return out;
}

IdentityCheck manin_hecke_check(long p, long m, long N) {
    if (p != kLevel) throw DomainError("manin_hecke_check: only level 11 is supported");
    if (m < 1 || std::gcd(m, p) != 1) throw DomainError("manin_hecke_check: m must be >= 1 and prime to p");
    if (N < m) throw InsufficientTerms("manin_hecke_check: N must cover c_m");
    const CuspFormSeries fN = eta_product_form11(N);
    const double inf = std::numeric_limits<double>::infinity();
    const cplx two_pi_i(0, kTwoPi);
    IdentityCheck out;
    long sigma = 0;
    for (long d = 1; d <= m; ++d) {
        if (m % d) continue;
        sigma += d;
        for (long b = 1; b <= d; ++b) {
            const auto r = modular_symbol_integral(fN, Cusp(mpq_class(0)), Cusp(mpq_class(b, d)), {1.0}, inf);
            out.lhs += two_pi_i * r.value;
            out.error += kTwoPi * r.error;
        }
    }
    out.factor = sigma - hecke_eigenvalue(fN, m).get_si();
    const auto r0 = modular_symbol_integral(fN, Cusp(mpq_class(0)), Cusp::infinity(), {1.0}, inf);
    out.rhs = static_cast<double>(out.factor) * two_pi_i * r0.value;
    out.error += std::fabs(static_cast<double>(out.factor)) * kTwoPi * r0.error;
    out.gap = std::abs(out.lhs - out.rhs);
    return out;
}

Pseudomeasure::Pseudomeasure(CuspFormSeries f, int w, double tol) : f_(std::move(f)), w_(w), tol_(tol) {
    const CosetModel M = model_for(f_);
    if (w != f_.weight - 2) throw DomainError("pseudomeasure: polynomial degree must be weight - 2");
    cosets_ = M.count;
}

WVector Pseudomeasure::operator()(const Cusp& x, const Cusp& y) const {
    WVector out;
    out.v.assign(dim(), 0.0);
    if (x == y) return out;
    const CosetModel M = model_for(f_);
    const auto a = coeffs_double(f_);
    const std::size_t n = w_ + 1;
    std::vector<double> err(cosets_, 0.0);
    parallel_for(cosets_, [&](std::size_t c) {
        const CuspValue vx = to_infinity(f_, a, M, c, x, w_, height_scale);
        const CuspValue vy = to_infinity(f_, a, M, c, y, w_, height_scale);
        for (std::size_t j = 0; j < n; ++j) out.v[c * n + j] = vx.v[j] - vy.v[j];
        err[c] = vx.error + vy.error;
    });
    for (double e : err) out.error = std::max(out.error, e);
    if (!(out.error <= tol_ * (1 + max_abs(out))))
        throw InsufficientTerms("pseudomeasure: error bound " + std::to_string(out.error) + " exceeds tolerance");
    return out;
}

WVector Pseudomeasure::act(const Mat2& g, const WVector& v) const {
    if (mat_det(g) != 1) throw DomainError("pseudomeasure action: det must be 1");
    const CosetModel M = model_for(f_);
    const auto P = poly_action(g, w_);
    const std::size_t n = w_ + 1;
    WVector out;
    out.v.assign(dim(), 0.0);
    double norm = 0;
    for (std::size_t c = 0; c < cosets_; ++c) {
        const std::size_t cg = M.act(c, g);
        for (std::size_t j = 0; j < n; ++j) {
            cplx acc = 0;
            double row = 0;
            for (std::size_t i = 0; i < n; ++i) {
                acc += P[j][i] * v.v[cg * n + i];
                row += std::fabs(P[j][i]);
            }
            out.v[c * n + j] = acc;
            norm = std::max(norm, row);
        }
    }
    out.error = norm * v.error;
    return out;
}

Pseudomeasure pseudomeasure_from_form(const CuspFormSeries& f, int w, double tol) { return Pseudomeasure(f, w, tol); }

ShadowCocycle cocycle_from_pseudomeasure(const Pseudomeasure& mu, const Cusp& base) { return ShadowCocycle(mu, base); }

WVector add(const WVector& a, const WVector& b) {
    if (a.v.size() != b.v.size()) throw DomainError("WVector add: size mismatch");
    WVector out{a.v, a.error + b.error};
    for (std::size_t i = 0; i < a.v.size(); ++i) out.v[i] += b.v[i];
    return out;
}

double max_abs(const WVector& a) {
    double m = 0;
    for (const auto& z : a.v) m = std::max(m, std::abs(z));
    return m;
}

std::pair<WVector, WVector> cocycle_relations(const ShadowCocycle& phi) {
    const Pseudomeasure& mu = phi.measure();
    const Mat2 s = gen_sigma(), t = gen_tau();
    const WVector ps = phi(s);
    const WVector rs = add(ps, mu.act(s, ps));
    const WVector pt = phi(t);
    const WVector tpt = mu.act(t, pt);
    const WVector rt = add(add(pt, tpt), mu.act(t, tpt));
    return {rs, rt};
}

LevyMellinResult levy_mellin(const BoundaryFunction& f, const QuadratureConfig& cfg, cplx s) {
    if (!(f.decay_exponent > 0))
        throw DomainError("levy_mellin: l(f) diverges without decay q^-eps, eps > 0");
    const double worst = f.bound_ratio(64, s);
    if (!(worst <= 1 + 1e-9))
        throw DomainError("levy_mellin: f exceeds its declared bound C q^-eps (ratio " + std::to_string(worst) + ")");
    const LevyIntegral r = levy_integral(f, mpq_class(0), mpq_class(1, 2), cfg, s);
    return {r.value, r.error_estimate, r.strata};
}

PsiValue psi_2k(double x, int k, PsiMode mode, double truncation, const std::function<double(double)>& regularizer) {
    if (!std::isfinite(x) || x == 0) throw DomainError("psi_2k: x must be finite and nonzero");
    if (!(truncation >= 1)) throw DomainError("psi_2k: truncation must be >= 1");
    double expo;
    if (mode == PsiMode::Convergent) {
        if (k < 2) throw DomainError("psi_2k: the convergent reading (p|x|+q)^(-2k) needs k >= 2");
        expo = -2.0 * k;
    } else {
        if (!regularizer)
            throw DomainError(
                "psi_2k: the exponent +k in (p|x|+q)^k diverges and its regularization is an open question; "
                "pass an explicit regularizer or use the convergent mode");
        expo = k;
    }
    const double ax = std::fabs(x), T = truncation;
    const long P0 = static_cast<long>(std::floor(T / ax));
    if (P0 > 50'000'000) throw DomainError("psi_2k: |x| too small for this truncation");
    std::vector<double> row(static_cast<std::size_t>(P0) + 1, 0.0);
    std::vector<std::size_t> count(row.size(), 0);
    parallel_for(row.size(), [&](std::size_t pi) {
        const double px = static_cast<double>(pi) * ax;
        const long qmax = static_cast<long>(std::floor(T - px));
        double acc = 0;
        std::size_t c = 0;
        for (long q = qmax; q >= 0; --q) {  // small terms first
            if (pi == 0 && q == 0) continue;
            const double v = px + static_cast<double>(q);
            double term = std::pow(v, expo);
            if (mode == PsiMode::Printed) term *= regularizer(v);
            if (pi == 0 || q == 0) term *= 0.5;
            acc += term;
            ++c;
        }
        row[pi] = acc;
        count[pi] = c;
    });
    PsiValue out;
    double sum = 0;
    for (std::size_t i = row.size(); i-- > 0;) {
        sum += row[i];
        out.terms += count[i];
    }
    out.value = (x > 0 ? 1 : -1) * sum;
    if (mode == PsiMode::Printed) {
        out.tail_bound = std::numeric_limits<double>::infinity();
        return out;
    }
    const double a = 2.0 * k;
    const double P1 = static_cast<double>(P0 + 1);
    out.tail_bound = (P1) * (std::pow(T, -a) + std::pow(T, 1 - a) / (a - 1)) +
                     std::pow(ax, -a) * (std::pow(P1, -a) + std::pow(P1, 1 - a) / (a - 1)) +
                     std::pow(ax, 1 - a) / (a - 1) * (std::pow(P1, 1 - a) + std::pow(P1, 2 - a) / (a - 2));
    return out;
}

std::vector<mpq_class> farey_grid(long order, const mpq_class& lo, const mpq_class& hi) {
    if (order < 1) throw DomainError("farey_grid: order must be >= 1");
    if (hi < lo) throw DomainError("farey_grid: empty interval");
    std::vector<mpq_class> out;
    for (long q = 1; q <= order; ++q) {
        mpq_class s = lo * q, e = hi * q;
        mpz_class p0, p1;
        mpz_cdiv_q(p0.get_mpz_t(), s.get_num_mpz_t(), s.get_den_mpz_t());
        mpz_fdiv_q(p1.get_mpz_t(), e.get_num_mpz_t(), e.get_den_mpz_t());
        for (mpz_class p = p0; p <= p1; ++p) {
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), p.get_mpz_t(), mpz_class(q).get_mpz_t());
            if (g == 1) out.emplace_back(p, q);
        }
    }
    for (auto& x : out) x.canonicalize();
    std::sort(out.begin(), out.end());
    return out;
}

DefectGrid quantum_defect(const BoundaryEval& f, const Mat2& g, int k, const std::vector<mpq_class>& grid) {
    if (mat_det(g) != 1) throw DomainError("quantum_defect: det must be 1");
    std::vector<char> keep(grid.size(), 0);
    std::vector<cplx> h(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        const mpq_class& x = grid[i];
        const mpq_class j = g[1][0] * x + g[1][1];
        if (sgn(j) == 0) return;
        keep[i] = 1;
        // (cx + d)^-k exactly, rounded once
        mpq_class jk;
        mpz_pow_ui(jk.get_num_mpz_t(), j.get_num_mpz_t(), static_cast<unsigned long>(std::abs(k)));
        mpz_pow_ui(jk.get_den_mpz_t(), j.get_den_mpz_t(), static_cast<unsigned long>(std::abs(k)));
        jk.canonicalize();
        const double factor = k >= 0 ? mpq_class(1 / jk).get_d() : jk.get_d();
        h[i] = f(Cusp(x)) - f(mobius(g, Cusp(x))) * factor;
    });
    DefectGrid out;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!keep[i]) {
            ++out.excluded;
            continue;
        }
        if (!out.samples.empty()) out.max_jump = std::max(out.max_jump, std::abs(h[i] - out.samples.back().h));
        out.samples.push_back({grid[i], h[i]});
    }
    return out;
}

void write_defect_csv(std::ostream& os, const DefectGrid& g) {
    os << "x_num,x_den,h_re,h_im\n";
    char buf[80];
    for (const auto& s : g.samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g", s.h.real(), s.h.imag());
        os << s.x.get_num() << ',' << s.x.get_den() << ',' << buf << '\n';
    }
}

}  // namespace rmgeom
