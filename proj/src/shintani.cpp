#include "rmgeom/errors.hpp"
#include "rmgeom/lfunc.hpp"
#include "rmgeom/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>

namespace rmgeom {

namespace {

constexpr int kEmTerms = 20;
constexpr double kPi = 3.14159265358979323846;

// B_0 .. B_22
const std::array<double, 23> kBernoulli = {
    1.0, -0.5, 1.0 / 6, 0, -1.0 / 30, 0, 1.0 / 42, 0, -1.0 / 30, 0, 5.0 / 66, 0, -691.0 / 2730, 0, 7.0 / 6, 0,
    -3617.0 / 510, 0, 43867.0 / 798, 0, -174611.0 / 330, 0, 854513.0 / 138};

double binom(int n, int k) {
    double r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double factorial(int n) {
    double r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double bernoulli_poly(int k, double t) {
    double r = 0;
    for (int j = 0; j <= k; ++j) r += binom(k, j) * kBernoulli[j] * std::pow(t, k - j);
    return r;
}

// (e^z - 1)/z
cplx expm1_over(cplx z) {
    if (std::abs(z) < 0.5) {
        cplx term = 1, sum = 1;
        for (int n = 2; n < 30; ++n) {
            term *= z / static_cast<double>(n);
            sum += term;
        }
        return sum;
    }
    return (std::exp(z) - 1.0) / z;
}

// EM for sum_{n >= 0} (n+q)^-w without the q^{1-w}/(w-1) term.
cplx hurwitz_core(cplx w, double q, double* Q_out) {
    if (!(q > 0)) throw DomainError("hurwitz_zeta: q must be positive");
    const double need = std::abs(w) + 16.0;
    const long N = q >= need ? 0 : static_cast<long>(std::ceil(need - q));
    cplx sum = 0;
    for (long n = 0; n < N; ++n) sum += std::exp(-w * std::log(static_cast<double>(n) + q));
    const double Q = q + static_cast<double>(N);
    const double lq = std::log(Q);
    cplx qw = std::exp(-w * lq);
    sum += 0.5 * qw;
    // B_{2j}/(2j)! w(w+1)...(w+2j-2) Q^{-w-2j+1}
    cplx rising = w;
    double qpow = 1.0 / Q;
    for (int j = 1; j <= 10; ++j) {
        sum += kBernoulli[2 * j] / factorial(2 * j) * rising * qw * qpow;
        rising *= (w + static_cast<double>(2 * j - 1)) * (w + static_cast<double>(2 * j));
        qpow /= Q * Q;
    }
    *Q_out = Q;
    return sum;
}

// Gauss-Legendre nodes on [-1, 1].
struct GaussLegendre {
    std::array<double, 20> x{}, w{};
    GaussLegendre() {
        const int n = 20;
        for (int i = 0; i < n; ++i) {
            double z = std::cos(kPi * (i + 0.75) / (n + 0.5)), dp = 0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1, p1 = z;
                for (int k = 2; k <= n; ++k) {
                    double p2 = ((2 * k - 1) * z * p1 - (k - 1) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (z * p1 - p0) / (z * z - 1);
                double dz = p1 / dp;
                z -= dz;
                if (std::fabs(dz) < 1e-16) break;
            }
            x[i] = z;
            w[i] = 2 / ((1 - z * z) * dp * dp);
        }
    }
};

const GaussLegendre& gauss_legendre() {
    static const GaussLegendre gl;
    return gl;
}

// Integral over [lo, hi] of f, subdividing until every piece is no longer
// than its distance to the nearest singularity.
cplx integrate(const std::function<cplx(double)>& f, double lo, double hi, const std::vector<double>& sing,
               int depth = 0) {
    double dist = 1e300;
    for (double z : sing) dist = std::min(dist, z < lo ? lo - z : z > hi ? z - hi : 0.0);
    if (hi - lo > dist && depth < 60) {
        double mid = 0.5 * (lo + hi);
        // split toward the nearer singularity so pieces shrink geometrically
        for (double z : sing) {
            if (z < lo && lo - z == dist) mid = lo + 0.5 * std::min(hi - lo, dist);
            if (z > hi && z - hi == dist) mid = hi - 0.5 * std::min(hi - lo, dist);
        }
        return integrate(f, lo, mid, sing, depth + 1) + integrate(f, mid, hi, sing, depth + 1);
    }
    const auto& gl = gauss_legendre();
    const double c = 0.5 * (lo + hi), r = 0.5 * (hi - lo);
    cplx acc = 0;
    for (int i = 0; i < 20; ++i) acc += gl.w[i] * f(c + r * gl.x[i]);
    return acc * r;
}

// Derivatives phi^(0..n) at one end of phi(tau) = A^-s B^-s, A = A0 + alpha tau,
// B = B0 + beta tau.  Also returns psi'(tau) so phi'/s is available at s = 0.
struct EndDerivs {
    std::vector<cplx> phi;
    std::vector<cplx> dphi;  // d/ds of phi
    double dpsi = 0;
};

EndDerivs end_derivatives(double A, double B, double alpha, double beta, cplx s, int n) {
    std::vector<double> psi(n + 1);  // psi^(i), i >= 1
    for (int i = 1; i <= n; ++i) {
        double sgn = i % 2 == 0 ? 1.0 : -1.0;
        psi[i] = sgn * factorial(i - 1) * (std::pow(alpha / A, i) + std::pow(beta / B, i));
    }
    EndDerivs out;
    out.phi.resize(n + 1);
    out.dphi.resize(n + 1);
    const double logs = std::log(A) + std::log(B);
    out.phi[0] = std::exp(-s * logs);
    out.dphi[0] = -logs * out.phi[0];
    for (int j = 0; j < n; ++j) {
        cplx acc = 0, dacc = 0;
        for (int i = 0; i <= j; ++i) {
            acc += binom(j, i) * psi[i + 1] * out.phi[j - i];
            dacc += binom(j, i) * psi[i + 1] * out.dphi[j - i];
        }
        out.phi[j + 1] = s * acc;
        out.dphi[j + 1] = acc + s * dacc;
    }
    out.dpsi = n >= 1 ? psi[1] : 0.0;
    return out;
}

using Coords = std::array<mpz_class, 2>;

mpz_class det2(const Coords& u, const Coords& v) { return u[0] * v[1] - u[1] * v[0]; }

Coords int_coords(const RealLattice& L, const FieldElement& z) {
    auto [c1, c2] = L.coords(z);
    if (c1.get_den() != 1 || c2.get_den() != 1) throw InvariantViolation("cone_decomposition: element not in L");
    return {c1.get_num(), c2.get_num()};
}

// Greedy unimodular fan from v to w (exclusive of nothing: both ends included).
std::vector<Coords> unimodular_fan(const Coords& v, const Coords& w) {
    const int o = sgn(det2(v, w));
    if (o == 0) throw InvariantViolation("cone_decomposition: degenerate generators");
    std::vector<Coords> rays{v};
    Coords cur = v;
    for (int guard = 0; guard < 100000; ++guard) {
        mpz_class D = o * det2(cur, w);
        if (D == 0) break;
        mpz_class g, x, y;
        mpz_gcdext(g.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t(), cur[0].get_mpz_t(), cur[1].get_mpz_t());
        if (g != 1) throw InvariantViolation("cone_decomposition: ray not primitive");
        // h with det(cur, h) = o
        Coords h{mpz_class(-y * o), mpz_class(x * o)};
        mpz_class k = -o * det2(h, w);
        mpz_class t;
        mpz_cdiv_q(t.get_mpz_t(), k.get_mpz_t(), D.get_mpz_t());
        Coords p{mpz_class(h[0] + t * cur[0]), mpz_class(h[1] + t * cur[1])};
        rays.push_back(p);
        cur = p;
    }
    if (rays.back() != w) throw InvariantViolation("cone_decomposition: fan did not close");
    return rays;
}

// Points c + n (n in Z^2) equal to t1 g1 + t2 g2 with (t1, t2) in (0,1] x [0,1).
// The t-values of c + Z^2 are G^-1 c + G^-1 Z^2, so n over [0,|D|)^2 meets every class.
std::vector<std::pair<Coords, std::pair<mpq_class, mpq_class>>> parallelogram_points(const Coords& g1,
                                                                                     const Coords& g2,
                                                                                     const mpq_class& c1,
                                                                                     const mpq_class& c2) {
    const mpz_class D = det2(g1, g2);
    const long absD = mpz_class(abs(D)).get_si();
    auto wrap = [](mpq_class t, bool open_low) {
        mpz_class f;
        mpz_fdiv_q(f.get_mpz_t(), t.get_num_mpz_t(), t.get_den_mpz_t());
        t -= f;
        if (open_low && sgn(t) == 0) t = 1;
        return t;
    };
    std::vector<std::pair<Coords, std::pair<mpq_class, mpq_class>>> out;
    std::set<std::pair<mpq_class, mpq_class>> seen;
    for (long i = 0; i < absD; ++i)
        for (long j = 0; j < absD; ++j) {
            mpq_class p1 = c1 + i, p2 = c2 + j;
            mpq_class t1 = wrap((p1 * g2[1] - p2 * g2[0]) / D, true);
            mpq_class t2 = wrap((g1[0] * p2 - g1[1] * p1) / D, false);
            if (!seen.insert({t1, t2}).second) continue;
            mpq_class n1 = t1 * g1[0] + t2 * g2[0] - c1, n2 = t1 * g1[1] + t2 * g2[1] - c2;
            if (n1.get_den() != 1 || n2.get_den() != 1)
                throw InvariantViolation("cone_decomposition: shift outside the coset");
            out.push_back({{n1.get_num(), n2.get_num()}, {t1, t2}});
        }
    if (static_cast<long>(out.size()) != absD)
        throw InvariantViolation("cone_decomposition: parallelogram count differs from |det|");
    return out;
}

Coords start_vector(const RealLattice& L, int sigma1, int sigma2, int which) {
    int found = 0;
    for (long r = 1; r < 1000; ++r)
        for (long i = -r; i <= r; ++i)
            for (long j = -r; j <= r; ++j) {
                if (std::max(std::labs(i), std::labs(j)) != r || std::gcd(i, j) != 1) continue;
                FieldElement z = L.element(i, j);
                if (z.sign_first() != sigma1 || z.sign_second() != sigma2) continue;
                if (found++ == which) return {mpz_class(i), mpz_class(j)};
            }
    throw InvariantViolation("cone_decomposition: no start vector");
}

}  // namespace

cplx hurwitz_zeta(cplx w, double q) {
    if (std::abs(w - 1.0) < 1e-300) throw DomainError("hurwitz_zeta: pole at w = 1");
    double Q = 0;
    cplx core = hurwitz_core(w, q, &Q);
    return core + std::exp((1.0 - w) * std::log(Q)) / (w - 1.0);
}

cplx hurwitz_zeta_regular(cplx w, double q) {
    double Q = 0;
    cplx core = hurwitz_core(w, q, &Q);
    const double lq = std::log(Q);
    // (Q^{1-w} - 1)/(w - 1)
    return core - lq * expm1_over((1.0 - w) * lq);
}

SeriesValue cone_zeta(double a1, double a2, double b1, double b2, double t1, double t2, cplx s) {
    if (!(a1 > 0 && a2 > 0 && b1 > 0 && b2 > 0)) throw DomainError("cone_zeta: generators must be positive");
    if (!(t1 > 0 && t1 <= 1 && t2 >= 0 && t2 < 1)) throw DomainError("cone_zeta: shift outside (0,1] x [0,1)");
    if (std::abs(s - 1.0) < 1e-12 || std::abs(s - 0.5) < 1e-12) throw DomainError("cone_zeta: pole");

    const double alpha = a1 - a2, beta = b1 - b2;
    const double ratio = std::max(std::fabs(alpha) / std::min(a1, a2), std::fabs(beta) / std::min(b1, b2));
    const long M = std::max<long>(24, static_cast<long>(std::ceil(10 * ratio + 2 * std::abs(s))));

    cplx head = 0;
    double magnitude = 0;  // sum of |terms|, for the rounding estimate
    for (long m = 0; m < M; ++m) {
        for (long j = 0; j <= m; ++j) {
            double r = static_cast<double>(j) + t1, w = static_cast<double>(m - j) + t2;
            double A = a1 * r + a2 * w, B = b1 * r + b2 * w;
            cplx term = std::exp(-s * (std::log(A) + std::log(B)));
            head += term;
            magnitude += std::abs(term);
        }
    }

    // phi(tau) = (a1 tau + a2 (1-tau))^-s (b1 tau + b2 (1-tau))^-s
    auto phi = [&](double tau) {
        double A = a2 + alpha * tau, B = b2 + beta * tau;
        return std::exp(-s * (std::log(A) + std::log(B)));
    };
    std::vector<double> sing;
    if (alpha != 0) sing.push_back(-a2 / alpha);
    if (beta != 0) sing.push_back(-b2 / beta);
    const cplx I = integrate(phi, 0.0, 1.0, sing);

    const double q = static_cast<double>(M) + t1 + t2;
    const EndDerivs d0 = end_derivatives(a2, b2, alpha, beta, s, kEmTerms + 1);
    const EndDerivs d1 = end_derivatives(a1, b1, alpha, beta, s, kEmTerms + 1);

    cplx tail = I * hurwitz_zeta(2.0 * s - 1.0, q);
    magnitude += std::abs(tail);
    double err = 0;
    for (int k = 1; k <= kEmTerms + 1; ++k) {
        const double sk = k % 2 == 0 ? 1.0 : -1.0;
        const double bk0 = bernoulli_poly(k, t1), bk1 = sk * bernoulli_poly(k, t2);
        cplx Ck = (bk1 * d1.phi[k - 1] - bk0 * d0.phi[k - 1]) / factorial(k);
        cplx term;
        if (k == 2) {
            // C_2 carries a factor s that cancels the pole of zeta_H(2s+1)
            cplx C2_over_s = (bk1 * d1.dpsi * d1.phi[0] - bk0 * d0.dpsi * d0.phi[0]) / 2.0;
            term = Ck * hurwitz_zeta_regular(2.0 * s + 1.0, q) + 0.5 * C2_over_s;
        } else if (k > 2 && std::abs(2.0 * s + static_cast<double>(k - 2)) < 1e-9) {
            // s = 1 - k/2: phi is a polynomial of degree k - 2 there, so C_k vanishes
            // and C_k zeta_H(2s+k-1) tends to C_k'(s)/2
            cplx dCk = (bk1 * d1.dphi[k - 1] - bk0 * d0.dphi[k - 1]) / factorial(k);
            term = Ck * hurwitz_zeta_regular(2.0 * s + static_cast<double>(k - 1), q) + 0.5 * dCk;
        } else {
            term = Ck * hurwitz_zeta(2.0 * s + static_cast<double>(k - 1), q);
        }
        if (k <= kEmTerms) {
            tail += term;
            magnitude += std::abs(term);
        } else {
            err = std::abs(term);
        }
    }

    SeriesValue out;
    out.value = head + tail;
    out.method = SeriesMethod::Continued;
    out.tail_bound = err + 8 * std::numeric_limits<double>::epsilon() * magnitude;
    out.terms = static_cast<std::size_t>(M * (M + 1) / 2);
    return out;
}

ConeDecomposition cone_decomposition(const RealLattice& L, const FieldElement& l0, const FieldElement& unit,
                                     ConeStyle style, int start) {
    if (unit.sign_second() <= 0) throw DomainError("cone_decomposition: unit must have positive conjugate");
    if (abs(unit.norm()) != 1 || !unit.is_integral()) throw DomainError("cone_decomposition: not a unit");
    ConeDecomposition dec;
    dec.unit = unit;
    dec.positive = unit.sign_first() > 0 ? unit : unit * unit;
    dec.index = unit.sign_first() > 0 ? 1 : 2;
    if (!L.stable_under(dec.positive)) throw DomainError("cone_decomposition: unit does not preserve L");

    auto [c1, c2] = L.coords(l0);
    const int signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    for (const auto& sg : signs) {
        Coords v = start_vector(L, sg[0], sg[1], start);
        Coords w = int_coords(L, dec.positive * L.element(v[0], v[1]));
        std::vector<Coords> rays = unimodular_fan(v, w);
        if (style == ConeStyle::Coarsened) {
            std::vector<Coords> coarse;
            for (std::size_t i = 0; i < rays.size(); i += 2) coarse.push_back(rays[i]);
            if (coarse.back() != rays.back()) coarse.push_back(rays.back());
            rays = coarse;
        }
        for (std::size_t i = 0; i + 1 < rays.size(); ++i) {
            ShintaniCone cone;
            cone.g1 = L.element(rays[i][0], rays[i][1]);
            cone.g2 = L.element(rays[i + 1][0], rays[i + 1][1]);
            cone.sign1 = sg[0];
            cone.sign2 = sg[1];
            for (auto& [n, t] : parallelogram_points(rays[i], rays[i + 1], c1, c2)) {
                cone.shifts.push_back(l0 + L.element(n[0], n[1]));
                cone.shift_coords.push_back(t);
            }
            dec.cones.push_back(std::move(cone));
        }
    }
    return dec;
}

SeriesValue orbit_sum_continued(const ConeDecomposition& dec, SignTwist twist, cplx s) {
    struct Job {
        const ShintaniCone* cone;
        std::size_t shift;
    };
    std::vector<Job> jobs;
    for (const auto& c : dec.cones)
        for (std::size_t i = 0; i < c.shifts.size(); ++i) jobs.push_back({&c, i});
    std::vector<SeriesValue> parts(jobs.size());
    parallel_for(jobs.size(), [&](std::size_t i) {
        const ShintaniCone& c = *jobs[i].cone;
        const auto& t = c.shift_coords[jobs[i].shift];
        double a1 = c.sign1 * c.g1.first(), a2 = c.sign1 * c.g2.first();
        double b1 = c.sign2 * c.g1.second(), b2 = c.sign2 * c.g2.second();
        parts[i] = cone_zeta(a1, a2, b1, b2, t.first.get_d(), t.second.get_d(), s);
    });
    SeriesValue out;
    out.method = SeriesMethod::Continued;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const ShintaniCone& c = *jobs[i].cone;
        const int sign = twist == SignTwist::Second ? c.sign2 : c.sign1 * c.sign2;
        out.value += static_cast<double>(sign) * parts[i].value;
        out.tail_bound += parts[i].tail_bound;
        out.terms += parts[i].terms;
    }
    out.value /= static_cast<double>(dec.index);
    out.tail_bound /= dec.index;
    return out;
}

}  // namespace rmgeom
