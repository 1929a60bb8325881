#include "rmgeom/field.hpp"

#include "rmgeom/errors.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>

namespace rmgeom {

std::int64_t square_part(std::int64_t n) {
    std::int64_t f = 1;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        while (n % (p * p) == 0) {
            n /= p * p;
            f *= p;
        }
        if (n % p == 0) n /= p;
    }
    return f;
}

QuadraticField make_field(std::int64_t d) {
    if (d <= 1)
        throw DomainError("make_field: d must be > 1, got " + std::to_string(d));
    if (d > (std::int64_t(1) << 40))
        throw DomainError("make_field: d too large for the discriminant type");
    std::int64_t f = square_part(d);
    if (f != 1)
        throw DomainError("make_field: d = " + std::to_string(d) + " is not squarefree (" +
                          std::to_string(f * f) + " divides it)");
    QuadraticField F;
    F.d = d;
    if (d % 4 == 1) {
        F.disc = d;
        F.basis_kind = BasisKind::Integral;
    } else {
        F.disc = 4 * d;
        F.basis_kind = BasisKind::Plain;
    }
    return F;
}

mpz_class isqrt(const mpz_class& n) {
    if (sgn(n) < 0) throw DomainError("isqrt of negative number");
    mpz_class r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

bool is_square(const mpz_class& n) {
    return sgn(n) >= 0 && mpz_perfect_square_p(n.get_mpz_t()) != 0;
}

int sign_of_surd(const mpq_class& x, const mpq_class& y, std::int64_t d) {
    int sx = sgn(x), sy = sgn(y);
    if (sy == 0) return sx;
    if (sx == 0 || sx == sy) return sy;
    // opposite signs: compare x^2 with d y^2 (never equal, d not a square)
    mpq_class lhs = x * x, rhs = y * y * mpq_class(mpz_class(d));
    if (lhs == rhs) return 0;
    return lhs > rhs ? sx : sy;
}

FieldElement::FieldElement(const QuadraticField& F) : F_(F) {}

FieldElement::FieldElement(const QuadraticField& F, mpq_class a, mpq_class b)
    : F_(F), a_(std::move(a)), b_(std::move(b)) {
    a_.canonicalize();
    b_.canonicalize();
}

FieldElement FieldElement::from_integer(const QuadraticField& F, long n) {
    return FieldElement(F, mpq_class(n), mpq_class(0));
}

FieldElement FieldElement::omega(const QuadraticField& F) {
    return FieldElement(F, mpq_class(0), mpq_class(1));
}

FieldElement FieldElement::from_sqrt_coords(const QuadraticField& F, const mpq_class& x,
                                            const mpq_class& y) {
    if (F.basis_kind == BasisKind::Integral) return FieldElement(F, x - y, 2 * y);
    return FieldElement(F, x, y);
}

mpq_class FieldElement::sqrt_x() const {
    if (F_.basis_kind == BasisKind::Integral) return a_ + b_ / 2;
    return a_;
}

mpq_class FieldElement::sqrt_y() const {
    if (F_.basis_kind == BasisKind::Integral) return b_ / 2;
    return b_;
}

void FieldElement::check_same(const FieldElement& o) const {
    if (!(F_ == o.F_)) throw DomainError("field mismatch in FieldElement arithmetic");
}

FieldElement FieldElement::conj() const {
    if (F_.basis_kind == BasisKind::Integral) return FieldElement(F_, a_ + b_, -b_);
    return FieldElement(F_, a_, -b_);
}

mpq_class FieldElement::norm() const {
    if (F_.basis_kind == BasisKind::Integral)
        return a_ * a_ + a_ * b_ - b_ * b_ * mpq_class((F_.d - 1) / 4);
    return a_ * a_ - b_ * b_ * mpq_class(mpz_class(F_.d));
}

mpq_class FieldElement::trace() const {
    if (F_.basis_kind == BasisKind::Integral) return 2 * a_ + b_;
    return 2 * a_;
}

FieldElement FieldElement::inverse() const {
    mpq_class n = norm();
    if (sgn(n) == 0) throw DomainError("inverse of zero field element");
    FieldElement c = conj();
    return FieldElement(F_, c.a_ / n, c.b_ / n);
}

bool FieldElement::is_integral() const {
    return a_.get_den() == 1 && b_.get_den() == 1;
}

int FieldElement::sign_first() const { return sign_of_surd(sqrt_x(), sqrt_y(), F_.d); }
int FieldElement::sign_second() const { return sign_of_surd(sqrt_x(), -sqrt_y(), F_.d); }

mpz_class FieldElement::floor_first() const {
    // (u + v sqrt d)/w with integers, w > 0
    mpq_class x = sqrt_x(), y = sqrt_y();
    mpz_class w;
    mpz_lcm(w.get_mpz_t(), x.get_den_mpz_t(), y.get_den_mpz_t());
    mpz_class u = x.get_num() * (w / x.get_den());
    mpz_class v = y.get_num() * (w / y.get_den());
    mpz_class n0;
    if (sgn(v) == 0) {
        n0 = u;
    } else {
        mpz_class r = isqrt(v * v * F_.d);
        n0 = sgn(v) > 0 ? mpz_class(u + r) : mpz_class(u - r - 1);
    }
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), n0.get_mpz_t(), w.get_mpz_t());
    return q;
}

long double FieldElement::first_ld() const {
    long double s = std::sqrt(static_cast<long double>(F_.d));
    mpq_class x = sqrt_x(), y = sqrt_y();
    // split numerator/denominator to keep big rationals from overflowing double
    return static_cast<long double>(x.get_d()) + static_cast<long double>(y.get_d()) * s;
}

long double FieldElement::second_ld() const {
    long double s = std::sqrt(static_cast<long double>(F_.d));
    mpq_class x = sqrt_x(), y = sqrt_y();
    return static_cast<long double>(x.get_d()) - static_cast<long double>(y.get_d()) * s;
}

double FieldElement::first() const {
    // evaluate the smaller-magnitude embedding through the norm to avoid cancellation
    long double f = first_ld(), g = second_ld();
    if (std::fabs(f) < std::fabs(g) && g != 0.0L) return static_cast<double>(norm().get_d() / g);
    return static_cast<double>(f);
}

double FieldElement::second() const {
    long double f = first_ld(), g = second_ld();
    if (std::fabs(g) < std::fabs(f) && f != 0.0L) return static_cast<double>(norm().get_d() / f);
    return static_cast<double>(g);
}

FieldElement& FieldElement::operator+=(const FieldElement& o) {
    check_same(o);
    a_ += o.a_;
    b_ += o.b_;
    return *this;
}

FieldElement& FieldElement::operator-=(const FieldElement& o) {
    check_same(o);
    a_ -= o.a_;
    b_ -= o.b_;
    return *this;
}

FieldElement& FieldElement::operator*=(const FieldElement& o) {
    check_same(o);
    mpq_class ac = a_ * o.a_, be = b_ * o.b_;
    mpq_class cross = a_ * o.b_ + b_ * o.a_;
    if (F_.basis_kind == BasisKind::Integral) {
        a_ = ac + be * mpq_class((F_.d - 1) / 4);
        b_ = cross + be;
    } else {
        a_ = ac + be * mpq_class(mpz_class(F_.d));
        b_ = cross;
    }
    return *this;
}

FieldElement& FieldElement::operator/=(const FieldElement& o) {
    check_same(o);
    return *this *= o.inverse();
}

FieldElement FieldElement::operator-() const { return FieldElement(F_, -a_, -b_); }

FieldElement operator*(FieldElement x, const mpq_class& r) {
    x.a_ *= r;
    x.b_ *= r;
    return x;
}

bool operator==(const FieldElement& x, const FieldElement& y) {
    return x.F_ == y.F_ && x.a_ == y.a_ && x.b_ == y.b_;
}

FieldElement FieldElement::pow(long k) const {
    if (k < 0) return inverse().pow(-k);
    FieldElement result = from_integer(F_, 1), base = *this;
    while (k > 0) {
        if (k & 1) result *= base;
        base *= base;
        k >>= 1;
    }
    return result;
}

std::string FieldElement::to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
}

std::ostream& operator<<(std::ostream& os, const FieldElement& x) {
    os << x.a().get_str() << " + " << x.b().get_str()
       << (x.field().basis_kind == BasisKind::Integral ? "*(1+sqrt" : "*sqrt") << x.field().d
       << (x.field().basis_kind == BasisKind::Integral ? ")/2" : "");
    return os;
}

namespace {

// Unit from one period of the expansion of omega: the product of the
// complete quotients (P + sqrt D)/Q over a period of reduced states.
FieldElement unit_from_period(const QuadraticField& F) {
    const mpz_class D = F.disc;
    const mpz_class r = isqrt(D);
    const mpq_class root_scale = F.basis_kind == BasisKind::Integral ? 1 : 2;  // sqrt(D) / sqrt(d)
    mpz_class P = F.basis_kind == BasisKind::Integral ? 1 : 0;
    mpz_class Q = 2;

    auto reduced = [&](const mpz_class& p, const mpz_class& q) {
        // xi > 1 and -1 < xi' < 0, with q > 0: 0 < p < sqrt D, sqrt D - p < q < sqrt D + p
        return sgn(q) > 0 && sgn(p) > 0 && p <= r && q > r - p && q <= r + p;
    };
    auto step = [&](mpz_class& p, mpz_class& q) {
        mpz_class num = p + r;
        mpz_class a;
        mpz_fdiv_q(a.get_mpz_t(), num.get_mpz_t(), q.get_mpz_t());
        mpz_class p2 = a * q - p;
        mpz_class q2 = (D - p2 * p2) / q;
        p = p2;
        q = q2;
    };
    auto quotient = [&](const mpz_class& p, const mpz_class& q) {
        return FieldElement::from_sqrt_coords(F, mpq_class(p, q), mpq_class(root_scale / q));
    };

    while (!reduced(P, Q)) step(P, Q);
    const mpz_class P0 = P, Q0 = Q;
    FieldElement eps = FieldElement::from_integer(F, 1);
    do {
        eps *= quotient(P, Q);
        step(P, Q);
    } while (P != P0 || Q != Q0);
    return eps;
}

}  // namespace

FieldElement fundamental_unit(const QuadraticField& F) {
    static std::mutex mu;
    static std::map<std::int64_t, FieldElement> memo;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = memo.find(F.d);
        if (it != memo.end()) return it->second;
    }
    FieldElement eps = unit_from_period(F);
    mpq_class n = eps.norm();
    if (!eps.is_integral() || (n != 1 && n != -1) || eps.sign_first() <= 0)
        throw InvariantViolation("fundamental_unit: period product is not a unit > 1");
    std::lock_guard<std::mutex> lock(mu);
    memo.emplace(F.d, eps);
    return eps;
}

}  // namespace rmgeom
