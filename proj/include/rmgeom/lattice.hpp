#pragma once

#include "rmgeom/field.hpp"

#include <array>
#include <optional>
#include <utility>
#include <vector>

namespace rmgeom {

using Mat2 = std::array<std::array<mpz_class, 2>, 2>;  // [row][col]

Mat2 mat_mul(const Mat2& A, const Mat2& B);
mpz_class mat_det(const Mat2& A);
Mat2 mat_identity();
Mat2 mat_inverse_sl2(const Mat2& A);
Mat2 mat_pow(const Mat2& A, long k);

// Rank-2 Z-module L = Z*beta1 + Z*beta2 inside K.
class RealLattice {
public:
    RealLattice(const FieldElement& beta1, const FieldElement& beta2);

    static RealLattice maximal_order(const QuadraticField& F);

    const QuadraticField& field() const { return F_; }
    const FieldElement& beta1() const { return b1_; }
    const FieldElement& beta2() const { return b2_; }

    // Rational coordinates (c1, c2) with z = c1*beta1 + c2*beta2.
    std::pair<mpq_class, mpq_class> coords(const FieldElement& z) const;
    bool contains(const FieldElement& z) const;
    FieldElement element(const mpz_class& i, const mpz_class& j) const;

    // |det| of the embedding matrix, i.e. area of a fundamental parallelogram of iota(L).
    double covolume() const;

    // True iff u*L is contained in L.
    bool stable_under(const FieldElement& u) const;

    // Same module, possibly different basis.
    bool same_module(const RealLattice& other) const;

private:
    QuadraticField F_;
    FieldElement b1_, b2_;
    // inverse of the 2x2 rational matrix [[x1, x2], [y1, y2]] over {1, sqrt d} coordinates
    mpq_class inv_[2][2];
};

// Generator of V: totally positive units preserving L, smallest power of the
// fundamental unit with that property.
FieldElement totally_positive_unit(const RealLattice& L);

// phi with eps*beta_j = sum_i phi[i][j] beta_i (column coordinates).
Mat2 unit_action_matrix(const RealLattice& L);

// Generator u of U_L = { u unit : u(l0 + L) = l0 + L, u' > 0 }, with |u| > 1.
// May be negative in the first embedding.
FieldElement coset_unit(const RealLattice& L, const FieldElement& l0);

// One representative per orbit of the unit group generated by `gen` acting on
// { l in l0 + L : 0 < |N(l)| <= X }.  Canonical choice: 1 <= |l|/sqrt|N(l)| < |gen|
// in the first embedding.  `gen` must stabilize l0 + L and satisfy |gen| > 1.
std::vector<FieldElement> coset_representatives(const RealLattice& L, const FieldElement& l0,
                                                double X, const FieldElement& gen);
std::vector<FieldElement> coset_representatives(const RealLattice& L, const FieldElement& l0,
                                                double X);

// Exact test of 1 <= |l|/sqrt|N(l)| < |gen| (first embedding).
bool in_canonical_domain(const FieldElement& l, const FieldElement& gen);

// Move l into the canonical domain by a power of gen.
FieldElement fold_to_canonical(const FieldElement& l, const FieldElement& gen);

// Norm of the O_K-module generated by L and l0, relative to O_K.
mpq_class module_norm(const RealLattice& L, const FieldElement& l0);

}  // namespace rmgeom
