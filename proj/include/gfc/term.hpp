/*
 * Symbolic term algebra for averaged Green-function products.
 *
 * A Term models
 *
 *   c * alpha(t) * N^dN / (q^dQ N^#I) * Sum_I delta_ab^dDelta
 *     E[ h_ab^{p_h} F^(i0)(X) prod_i Dim( prod_l G_{x_l y_l} ) ]
 *
 * with exact rational-monomial coefficients over the symbols
 * u = e^{-t} (tracked in half powers, so e^{-t/2} is representable),
 * s = (1-e^{-t})^{1/2}, and kappa_k. Canonicalization, a permutation-
 * invariant key (auid), an exact equivalence test, and a keyed container
 * of equivalence classes are provided.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include "gfc/linalg.hpp"

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace gfc {

// Unordered index pair, stored as (min, max).
using IndexPair = std::pair<int, int>;

inline IndexPair makePair(int x, int y) {
  return x <= y ? IndexPair{x, y} : IndexPair{y, x};
}

/* ------------------------------------------------------------------ */
/* CoeffPoly                                                           */
/* ------------------------------------------------------------------ */

// One monomial u^{uHalf/2} * s^{sPow} * prod_k kappa_k^{e_k}.
struct Mono {
  int uHalf = 0;            // exponent of e^{-t} in half units
  int sPow = 0;             // exponent of (1-e^{-t})^{1/2}
  std::map<int, int> kappa; // k -> exponent of kappa_k

  bool operator==(const Mono &o) const = default;
  bool operator<(const Mono &o) const {
    if (uHalf != o.uHalf) return uHalf < o.uHalf;
    if (sPow != o.sPow) return sPow < o.sPow;
    return kappa < o.kappa;
  }
  Mono operator*(const Mono &o) const;
  std::string str() const; // e.g. "k4*u*s^2", "1"
};

// Exact polynomial in the abstract symbols; no zero coefficients stored.
class CoeffPoly {
public:
  CoeffPoly() = default;
  explicit CoeffPoly(const Rat &c) { if (c != 0) mono_[Mono{}] = c; }
  CoeffPoly(const Rat &c, const Mono &m) { if (c != 0) mono_[m] = c; }

  static CoeffPoly one() { return CoeffPoly(Rat(1)); }

  bool isZero() const { return mono_.empty(); }
  CoeffPoly &operator+=(const CoeffPoly &o);
  CoeffPoly &operator*=(const CoeffPoly &o);
  CoeffPoly operator*(const CoeffPoly &o) const;
  CoeffPoly operator-() const;
  void mulScalar(const Rat &c);
  void mulMono(const Mono &m);

  bool operator==(const CoeffPoly &o) const { return mono_ == o.mono_; }

  // If the polynomial is exactly c * m for the given monomial, return c.
  std::optional<Rat> asScalarTimes(const Mono &m) const;
  // If the polynomial is a pure scalar (single constant monomial), return it.
  std::optional<Rat> asScalar() const { return asScalarTimes(Mono{}); }

  const std::map<Mono, Rat> &monomials() const { return mono_; }
  std::string str() const;

private:
  std::map<Mono, Rat> mono_;
};

// Common time factors.
Mono monoU(int halfPow);          // e^{-t*halfPow/2}
Mono monoS(int pow);              // (1-e^{-t})^{pow/2}
Mono monoKappa(int k, int e = 1); // kappa_k^e
Mono monoUS2();                   // u * s^2 = e^{-t}(1-e^{-t})

/* ------------------------------------------------------------------ */
/* GreenProduct / Term                                                 */
/* ------------------------------------------------------------------ */

// One Dim-factor: a product of Green entries; empty product = Dim(1).
struct GreenProduct {
  std::map<IndexPair, int> entries; // normalized pair -> power >= 1

  int entryCount() const; // total number of entries (with multiplicity)
  int degree() const;     // off-diagonal entries (with multiplicity)
  void multiplyEntry(IndexPair p, int power = 1);
  bool operator==(const GreenProduct &o) const = default;
  bool operator<(const GreenProduct &o) const { return entries < o.entries; }
};

struct Term {
  CoeffPoly coeff = CoeffPoly::one();
  int dN = 1;
  int dQ = 0;
  int dDelta = 0;
  std::vector<IndexPair> hPre; // h_ab prefactors (multiset, kept sorted)
  bool edgeMarker = false;     // carries an (x + i eta + chi) Dim-prefactor
  bool withF = false;          // true for F^(i0)-carrying terms
  std::vector<GreenProduct> factors = {GreenProduct{}}; // i0 Dim-factors

  int fOrder() const { return withF ? static_cast<int>(factors.size()) : 1; }
  int pH() const { return static_cast<int>(hPre.size()); }
  std::set<int> indexSet() const;
  int indexCount() const { return static_cast<int>(indexSet().size()); }
  int degree() const;

  // Occurrence count of index v over all Green entries (diagonal counts 2).
  std::map<int, int> occurrences() const;
  // Occurrence count restricted to off-diagonal entries.
  std::map<int, int> offDiagOccurrences() const;
  bool matched() const; // every index occurs an even number of times

  bool isType0() const;  // every index occurs exactly twice
  bool isTypeA() const;  // one index four times, the rest twice
  bool isTypeAB() const; // two indices four times, the rest twice

  // Fresh index: smallest nonnegative integer not in the index set.
  int freshIndex() const;

  Term relabeled(const std::map<int, int> &perm) const;

  // Structure key ignoring the coefficient; used for canonical minimization.
  std::string shapeKey() const;

  bool operator==(const Term &o) const;
};

/* ------------------------------------------------------------------ */
/* Canonicalization, auid, equivalence                                 */
/* ------------------------------------------------------------------ */

// Deterministic canonical representative of the term's equivalence class:
// sorts factors and pairs, then minimizes the shape key over all index
// bijections that preserve the per-index occurrence signature, with indices
// of higher total occurrence receiving smaller labels. Idempotent; two
// terms with dDelta = p_h = 0 are equivalent iff their canonical forms
// have equal shape keys (and matching coeff/dN/dQ/fOrder).
Term canonicalize(const Term &t);

// Permutation-invariant nested key (triple-sorted co-occurrence counts):
// outer level per index v', middle per index v, inner per Dim-factor i the
// pair (number of entries in factor i equal to {v, v'}, n_i).
using CanonicalKey = std::vector<std::vector<std::vector<std::pair<int, int>>>>;

// Requires p_h = dDelta = 0 (the key is defined only on this class).
CanonicalKey auid(const Term &t);

// Exact equivalence: an index bijection maps t1's factor structure onto
// t2's and coeff/dN/dQ/fOrder match. Uses the auid fast path, then pruned
// backtracking over signature-compatible bijections. Inputs canonical.
bool equivalent(const Term &t1, const Term &t2);

// Test oracle: tries all bijections between the index sets.
bool equivalentBruteForce(const Term &t1, const Term &t2);

/* ------------------------------------------------------------------ */
/* TermContainer                                                       */
/* ------------------------------------------------------------------ */

class TermContainer {
public:
  // Returns the classId of t's equivalence class, registering it if new.
  // Precondition: t canonical with p_h = dDelta = 0.
  int insert(const Term &t);
  // Lookup without registration.
  std::optional<int> find(const Term &t) const;

  int size() const { return static_cast<int>(reps_.size()); }
  const Term &rep(int classId) const { return reps_.at(classId); }

private:
  struct BucketKey {
    int dN, dQ, fOrder;
    bool withF;
    CanonicalKey key;
    bool operator<(const BucketKey &o) const {
      if (dN != o.dN) return dN < o.dN;
      if (dQ != o.dQ) return dQ < o.dQ;
      if (fOrder != o.fOrder) return fOrder < o.fOrder;
      if (withF != o.withF) return withF < o.withF;
      return key < o.key;
    }
  };
  static BucketKey bucketKey(const Term &t);
  std::map<BucketKey, std::vector<int>> buckets_;
  std::vector<Term> reps_;
};

/* ------------------------------------------------------------------ */
/* Serialization                                                       */
/* ------------------------------------------------------------------ */

// Line format: coeff | dN | dQ | [h-pairs] | F^(i0) | {factor: pairs}...
std::string termToLine(const Term &t);
// JSON export with fields F_derivative, prod_dict, q_deg, N_deg, coeff, h_list.
std::string termToJson(const Term &t);

} // namespace gfc
