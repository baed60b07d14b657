/*
 * Identity engine: start-term enumeration, expansion rules 1/1'/2/3,
 * identity generation with deduplication, basis collection, and sparse
 * system assembly with the target vectors. Also the end-to-end
 * cancellation verification report.
 *
 * SPDX-License-Identifier: MIT
 */
#pragma once

#include "gfc/diff.hpp"
#include "gfc/linalg.hpp"
#include "gfc/term.hpp"

#include <map>
#include <string>
#include <vector>

namespace gfc {

/* One linear relation 0 = sum_l c_l T_l + O(Tau) over basis class ids.
 * For nonzero start terms the start appears with coefficient -1; start
 * terms with an empty Dim-factor are identically zero and carry no entry. */
struct Identity {
  int startClassId = -1; // -1 when the start term is zero (empty factor)
  std::map<int, Rat> entries;
  std::string rule; // R1, R1', R2, R3-a, R3-b
  std::string site; // expansion site, human-readable
};

struct GenerationResult {
  std::vector<Identity> identities; // deduplicated, generation order
  TermContainer basis;              // classId = basis row index
  std::map<std::string, long long> dropLog; // dropped-term classifications
  long long duplicatesRemoved = 0;
  long long trivialSkipped = 0; // skipped 0 = 0 identities (empty factors)
  long long startCount = 0;
};

/* All canonical type-0 / type-A / type-AB start terms with c = 1,
 * alpha = e^{-t}(1-e^{-t}), #I <= nMax, up to equivalence. The m-case
 * requires degree >= 2; the F-case has no degree constraint, additionally
 * ranges over all partitions of the Green entries into Dim-factors, and
 * admits at most one empty Dim-factor. Terms are returned with coeff = 1;
 * the common time factor is a convention of the serialized system. */
std::vector<Term> enumerateStartTerms(int nMax, CaseCtx ctx);

/* Expansion rules. Each returns the identity as (classId -> coefficient)
 * entries, registering new basis terms in `basis` and recording dropped
 * non-leading classifications in `dropLog`. The inputs must be canonical
 * start-form terms (coeff 1, dQ = 2, dN = 1, p_h = dDelta = 0). */
Identity rule1(const Term &start, int factorIdx, IndexPair entry,
               bool reflected, TermContainer &basis,
               std::map<std::string, long long> &dropLog);
Identity rule2(const Term &start, int factorIdx, TermContainer &basis,
               std::map<std::string, long long> &dropLog);
Identity rule3(const Term &start, int factorIdx, int existing,
               TermContainer &basis, std::map<std::string, long long> &dropLog);

/* Full mechanism: Rules 1 and 1' per off-diagonal entry; Rule 2 when
 * #I <= 3 (per Dim-factor in the F-case); Rule 3 with index 0 (and with
 * index 1) under the occurrence conditions. Start terms with an empty
 * factor are only expanded through the empty factor (anything else would
 * produce the trivial identity 0 = 0). Deduplicates identities by their
 * exact sparse rational vectors. */
GenerationResult generateAll(CaseCtx ctx, int nMax = 4);

struct AssembledSystem {
  SparseRationalMatrix matrix; // L basis rows x M identity columns
  SparseVector rhs;            // supported on the leading target rows
  std::vector<std::string> missingTargets; // targets absent from the basis
};

/* Target vectors: coefficients relative to the common prefactor
 * kappa_4 e^{-t}(1-e^{-t}), mapped to basis rows. The m-case target is
 * the fixed nine-term expansion; the F-case target is recomputed
 * symbolically from the k = 3 cumulant pieces of the time derivative of
 * E[F(X(t))] plus its third-line term. */
SparseVector targetVectorM(const TermContainer &basis);
SparseVector targetVectorF(const TermContainer &basis,
                           std::vector<std::string> *missingOut = nullptr);

/* Independent recomputation of the m-case target from the raw fourth-order
 * cumulant pieces, via repeated full differentiation; used as an oracle. */
SparseVector targetVectorMRecomputed(const TermContainer &basis);

AssembledSystem assemble(const GenerationResult &gen, CaseCtx ctx,
                         bool allowMissingTargets = false);

/* End-to-end cancellation verification. */
struct CancellationReport {
  std::string caseName;
  int rows = 0, cols = 0;
  std::int64_t nnz = 0;
  int rank = 0;
  bool solved = false;
  bool verified = false; // exact residual check
  std::int64_t nonzeroMultipliers = 0;
  bool integersOnly = false;
  double wallTimeSeconds = 0;
  std::string systemHash;   // sha256 of the serialized system
  std::string solutionHash; // sha256 of the serialized solution
  std::vector<std::string> notes;
  std::string toJson() const;
  std::string toText() const;
};

CancellationReport verifyCancellation(CaseCtx ctx, int nMax = 4,
                                      const std::string &outDir = "");

/* Worked-identity spot checks: the sorted coefficient multisets of
 * the Rule-1 expansion of E[G_aa G_ab G_ac G_bb G_bc] through G_ac
 * (expected {-5/2, -1, -1, -1/2, -1/2, -1/2}) and the Rule-3 expansion
 * of Sum E[G_ab^2] through index a (expected {-3, -2, -2, -1, -1}). */
std::vector<Rat> spotcheckRule1Multiset();
std::vector<Rat> spotcheckRule3Multiset();

} // namespace gfc
