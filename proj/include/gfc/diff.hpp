/*
 * Differentiation calculus on terms: entry-wise Green-function derivative
 * rules, the X(t) chain rule for F-terms, the cumulant expansion operator,
 * and the leading / non-leading classifier.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include "gfc/term.hpp"

#include <string>
#include <vector>

namespace gfc {

enum class DiffMode {
  FullH,       // all four groups of dG/dh_ab (delta- and h-carrying included)
  GaussW,      // the two groups of dG/dw_ab
  LeadingOnly, // -(G_ia G_bj + G_ib G_aj) substitutions only
  DOperator,   // D_ab G_ij = -(G_ia G_bj + G_ib G_aj) + delta_ab G_ia G_bj
};

enum class Classification {
  Leading,
  TauG1_case1, // d_q >= 4 and degree >= 2
  TauG1_case2, // p_h >= 1, some v outside the h-pair with >= 2 off-diag occurrences
  TauG1_case3, // p_h >= 1 and d_q >= 1
  TauG1_case4, // d_delta >= 1 and d_q >= 1
  TauG1_case5, // p_h = d_delta = 0, d_q >= 1, unmatched
  TauG2,       // (x + i eta + chi)-prefactor terms, d_q >= 2
  TauF1_case1, // p_h >= 1
  TauF1_case2, // d_delta >= 1
  TauF1_case3, // d_q >= 4
  TauF1_case4, // p_h = d_delta = 0, unmatched
  TauF2,       // F-case (x + i eta + chi)-prefactor terms
  Negligible,  // beyond the cumulant truncation order
};

std::string classificationName(Classification c);

enum class CaseCtx { M, F };

// Derivative of a whole term with respect to the (a, b) entry: product rule
// over every Green entry in every Dim-factor, the h-prefactor rule, and for
// F-terms the chain rule through X(t) (raising the F-derivative order and
// appending a Dim-factor). The derivative commutes past Dim. Fresh summation
// indices introduced by the 1/N sum groups take the smallest unused label;
// the accompanying 1/N is absorbed into the N^dN/N^#I normalization.
std::vector<Term> diffTerm(const Term &t, IndexPair ab, DiffMode mode);

// Cumulant expansion of E[h_ab * f]: removes one h_ab prefactor and emits
// the terms kappa_{k+1}/(N q^{k-1}) E[d^k f / dh_ab^k] for k+1 = 2..l using
// FullH derivatives (kappa_1 = 0, kappa_2 = 1). Each emitted term's dN
// bookkeeping absorbs the 1/N. The remainder is Negligible by the l = 8
// truncation (q^{l-1} >= N^2 in the admissible parameter range).
std::vector<Term> cumulantExpand(const Term &t, IndexPair ab, int l = 8);

// Classifies a term (precedence: Leading, then Negligible, then the lowest
// applicable Tau case). Throws if nothing applies (a rule-implementation bug).
Classification classify(const Term &t, CaseCtx ctx);

} // namespace gfc
