#pragma once

#include "rmgeom/lattice.hpp"

#include <gmpxx.h>

#include <vector>

namespace rmgeom {

// a x^2 + b xy + c y^2, positive non-square discriminant.
struct QuadraticFormZ {
    mpz_class a, b, c;

    mpz_class disc() const { return b * b - 4 * a * c; }
    bool primitive() const;
    friend bool operator==(const QuadraticFormZ& x, const QuadraticFormZ& y) {
        return x.a == y.a && x.b == y.b && x.c == y.c;
    }
    friend bool operator<(const QuadraticFormZ& x, const QuadraticFormZ& y);
};

// Throws DomainError for square or non-positive discriminant.
void validate_form(const QuadraticFormZ& Q);

bool is_reduced(const QuadraticFormZ& Q);

// Q o g, i.e. Q(g00 x + g01 y, g10 x + g11 y).
QuadraticFormZ act(const QuadraticFormZ& Q, const Mat2& g);

// One reduction step (c, b', (b'^2 - D)/(4c)); `g` (optional) receives the SL2 matrix.
QuadraticFormZ rho(const QuadraticFormZ& Q, Mat2* g = nullptr);

QuadraticFormZ reduce_form(const QuadraticFormZ& Q);
std::vector<QuadraticFormZ> reduced_cycle(const QuadraticFormZ& Q);

// All reduced forms of discriminant D (primitive or not).
std::vector<QuadraticFormZ> reduced_forms(const mpz_class& D);

// Cycles of primitive reduced forms of discriminant D, one per proper class.
std::vector<std::vector<QuadraticFormZ>> primitive_cycles(const mpz_class& D);

// Number of proper (narrow) classes of primitive forms of discriminant D.
long narrow_class_number(const mpz_class& D);

}  // namespace rmgeom
