#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace rmgeom {

enum class BasisKind { Integral, Plain };

// Q(sqrt d) with its ring-of-integers basis {1, omega}:
//   omega = (1 + sqrt d)/2  if d = 1 mod 4  (disc d)
//   omega = sqrt d          otherwise       (disc 4d)
struct QuadraticField {
    std::int64_t d = 0;
    std::int64_t disc = 0;
    BasisKind basis_kind = BasisKind::Plain;

    friend bool operator==(const QuadraticField&, const QuadraticField&) = default;
};

QuadraticField make_field(std::int64_t d);

// Largest f with f^2 | n (n > 0).
std::int64_t square_part(std::int64_t n);

// a + b*omega with exact rationals.
class FieldElement {
public:
    FieldElement() = default;
    explicit FieldElement(const QuadraticField& F);
    FieldElement(const QuadraticField& F, mpq_class a, mpq_class b);

    static FieldElement from_integer(const QuadraticField& F, long n);
    static FieldElement omega(const QuadraticField& F);
    // x + y*sqrt(d)
    static FieldElement from_sqrt_coords(const QuadraticField& F, const mpq_class& x, const mpq_class& y);

    const QuadraticField& field() const { return F_; }
    const mpq_class& a() const { return a_; }
    const mpq_class& b() const { return b_; }

    // Coordinates over {1, sqrt d}: element = x + y*sqrt(d).
    mpq_class sqrt_x() const;
    mpq_class sqrt_y() const;

    FieldElement conj() const;
    mpq_class norm() const;
    mpq_class trace() const;
    FieldElement inverse() const;

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }
    bool is_rational() const { return sgn(b_) == 0; }
    bool is_integral() const;

    // Exact signs of the two real embeddings.
    int sign_first() const;
    int sign_second() const;

    // floor of the first embedding, exact.
    mpz_class floor_first() const;

    double first() const;
    double second() const;
    long double first_ld() const;
    long double second_ld() const;

    FieldElement& operator+=(const FieldElement& o);
    FieldElement& operator-=(const FieldElement& o);
    FieldElement& operator*=(const FieldElement& o);
    FieldElement& operator/=(const FieldElement& o);
    FieldElement operator-() const;

    friend FieldElement operator+(FieldElement x, const FieldElement& y) { return x += y; }
    friend FieldElement operator-(FieldElement x, const FieldElement& y) { return x -= y; }
    friend FieldElement operator*(FieldElement x, const FieldElement& y) { return x *= y; }
    friend FieldElement operator/(FieldElement x, const FieldElement& y) { return x /= y; }
    friend FieldElement operator*(FieldElement x, const mpq_class& r);
    friend FieldElement operator*(const mpq_class& r, FieldElement x) { return x * r; }

    friend bool operator==(const FieldElement& x, const FieldElement& y);
    friend bool operator!=(const FieldElement& x, const FieldElement& y) { return !(x == y); }

    FieldElement pow(long k) const;

    std::string to_string() const;

private:
    void check_same(const FieldElement& o) const;

    QuadraticField F_{};
    mpq_class a_{0};
    mpq_class b_{0};
};

std::ostream& operator<<(std::ostream& os, const FieldElement& x);

// Exact sign of x + y*sqrt(d).
int sign_of_surd(const mpq_class& x, const mpq_class& y, std::int64_t d);

// floor(sqrt(n)) for n >= 0.
mpz_class isqrt(const mpz_class& n);
bool is_square(const mpz_class& n);

// Fundamental unit > 1, memoized per d behind a mutex.
FieldElement fundamental_unit(const QuadraticField& F);

}  // namespace rmgeom
