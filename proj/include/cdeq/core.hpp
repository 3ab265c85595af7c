// Core of a conjunctive query with comparisons, and equivalence of plain
// queries via isomorphism of cores.
#pragma once

#include "cdeq/morphism.hpp"

namespace cdeq {

/// The core: a minimal retract of q with a closed comparison set.
///
/// Greedily drops atoms in canonical order (restarting after each success)
/// while a homomorphism from the current query into the candidate exists;
/// the reverse injective homomorphism is the inclusion. Variables left
/// without an atom disappear and the comparison set is the closure of the
/// original restricted to the surviving terms. For aggregate queries the
/// aggregate variables are kept identifiable: a drop is only taken when the
/// witness leaves them in place or folds them onto plain variables, which
/// are then renamed back.
///
/// Requires an equality-normalized query; throws UnsatisfiableError when the
/// comparisons are unsatisfiable.
Query compute_core(const Query& q);

/// Equivalence of plain conjunctive queries with comparisons: cores
/// isomorphic under the positional summary-row pin. Queries whose
/// comparisons are unsatisfiable are equivalent to each other only.
/// Throws ArityError on summary arity mismatch.
bool cq_equivalent(const Query& q1, const Query& q2);

} // namespace cdeq
