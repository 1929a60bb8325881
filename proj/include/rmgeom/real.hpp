#pragma once

#include "rmgeom/field.hpp"

#include <gmpxx.h>
#include <mpfr.h>

#include <string>

namespace rmgeom {

// Minimal RAII wrapper over mpfr_t.  Every value carries its own precision;
// binary operations round to the precision of the left operand.
class Real {
public:
    explicit Real(long prec_bits = 128);
    Real(const Real& o);
    Real(Real&& o) noexcept;
    Real& operator=(const Real& o);
    Real& operator=(Real&& o) noexcept;
    ~Real();

    static Real from_rational(const mpq_class& q, long prec);
    static Real from_double(double x, long prec);
    static Real from_string(const std::string& s, long prec);
    // first embedding of a field element
    static Real from_field(const FieldElement& x, long prec);

    long precision() const { return static_cast<long>(mpfr_get_prec(v_)); }
    mpfr_t& raw() { return v_; }
    const mpfr_t& raw() const { return v_; }

    double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
    long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
    mpz_class floor_int() const;
    bool is_zero() const { return mpfr_zero_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    Real& operator+=(const Real& o);
    Real& operator-=(const Real& o);
    Real& operator*=(const Real& o);
    Real& operator/=(const Real& o);
    Real& sub_int(const mpz_class& z);

    // 1/x
    Real reciprocal() const;

    // decimal string with `digits` significant digits
    std::string to_string(int digits = 0) const;

private:
    mpfr_t v_;
};

// Precision used when the caller does not supply one: 128 bits unless
// RMGEOM_PRECISION_BITS is set in the environment.
long default_precision_bits();

}  // namespace rmgeom
