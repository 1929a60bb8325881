#include "rmgeom/real.hpp"

#include "rmgeom/errors.hpp"

#include <cstdlib>
#include <memory>

namespace rmgeom {

Real::Real(long prec_bits) {
    if (prec_bits < MPFR_PREC_MIN || prec_bits > 1 << 20)
        throw DomainError("Real: precision out of range: " + std::to_string(prec_bits));
    mpfr_init2(v_, prec_bits);
    mpfr_set_zero(v_, 1);
}

Real::Real(const Real& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
    if (this != &o) {
        mpfr_set_prec(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
}

Real& Real::operator=(Real&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::from_rational(const mpq_class& q, long prec) {
    Real r(prec);
    mpfr_set_q(r.v_, q.get_mpq_t(), MPFR_RNDN);
    return r;
}

Real Real::from_double(double x, long prec) {
    Real r(prec);
    mpfr_set_d(r.v_, x, MPFR_RNDN);
    return r;
}

Real Real::from_string(const std::string& s, long prec) {
    Real r(prec);
    if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0)
        throw DomainError("Real: cannot parse '" + s + "'");
    return r;
}

Real Real::from_field(const FieldElement& x, long prec) {
    // x + y sqrt d, evaluated with a few guard bits
    long wp = prec + 32;
    Real s(wp), y(wp), r(wp);
    mpfr_set_si(s.v_, static_cast<long>(x.field().d), MPFR_RNDN);
    mpfr_sqrt(s.v_, s.v_, MPFR_RNDN);
    mpq_class qy = x.sqrt_y(), qx = x.sqrt_x();
    mpfr_set_q(y.v_, qy.get_mpq_t(), MPFR_RNDN);
    mpfr_mul(y.v_, y.v_, s.v_, MPFR_RNDN);
    mpfr_set_q(r.v_, qx.get_mpq_t(), MPFR_RNDN);
    mpfr_add(r.v_, r.v_, y.v_, MPFR_RNDN);
    Real out(prec);
    mpfr_set(out.v_, r.v_, MPFR_RNDN);
    return out;
}

mpz_class Real::floor_int() const {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
}

Real& Real::operator+=(const Real& o) {
    mpfr_add(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator-=(const Real& o) {
    mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator*=(const Real& o) {
    mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::operator/=(const Real& o) {
    mpfr_div(v_, v_, o.v_, MPFR_RNDN);
    return *this;
}
Real& Real::sub_int(const mpz_class& z) {
    mpfr_sub_z(v_, v_, z.get_mpz_t(), MPFR_RNDN);
    return *this;
}

Real Real::reciprocal() const {
    Real r(precision());
    mpfr_ui_div(r.v_, 1, v_, MPFR_RNDN);
    return r;
}

std::string Real::to_string(int digits) const {
    char* s = nullptr;
    if (digits <= 0) digits = static_cast<int>(precision() * 0.30103) + 1;
    mpfr_asprintf(&s, "%.*Re", digits - 1, v_);
    std::unique_ptr<char, void (*)(char*)> guard(s, [](char* p) { mpfr_free_str(p); });
    return std::string(s);
}

long default_precision_bits() {
    if (const char* env = std::getenv("RMGEOM_PRECISION_BITS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 53 && v <= (1 << 20)) return v;
        throw DomainError(std::string("RMGEOM_PRECISION_BITS is not a valid precision: ") + env);
    }
    return 128;
}

}  // namespace rmgeom
