// Search for homomorphisms and isomorphisms between queries with
// comparisons, with a pinned partial bijection (typically the summary row).
#pragma once

#include "cdeq/order.hpp"
#include "cdeq/query.hpp"

#include <optional>

namespace cdeq {

/// A term-to-term witness map; constants always map to themselves.
using VarMap = std::map<Term, Term>;

/// Extra constraints for the search: per source variable, targets that must
/// not be chosen. Used by the core computation to keep aggregate variables
/// renameable.
struct HomOptions {
    std::map<Term, std::set<Term>> forbidden;
};

/// First homomorphism h from q1 to q2 extending `pin`: every atom of q1
/// maps into an atom of q2 and every comparison of q1 is entailed by q2's
/// comparisons under h. Deterministic: variables are tried in first-occurrence
/// order of q1's canonical form, candidate targets in canonical term order.
/// Returns nullopt when no witness exists (the search is complete) or when
/// `pin` is not a function.
std::optional<VarMap> find_homomorphism(const Query& q1, const Query& q2, const VarMap& pin,
                                        const HomOptions& options = {});

/// First bijective witness extending `pin` that preserves atoms in both
/// directions and comparison-set membership in both directions (literal
/// membership; meaningful on closed sets). Deterministic like
/// find_homomorphism.
std::optional<VarMap> find_isomorphism(const Query& q1, const Query& q2, const VarMap& pin);

/// Builds the pin taking q1's summary row onto q2's positionally, optionally
/// extended with the aggregate variables; nullopt when arities differ or the
/// entries conflict (e.g. a repeated head variable mapped two ways).
std::optional<VarMap> positional_pin(const Query& q1, const Query& q2, bool include_aggregate);

/// The query with its comparison set replaced by the closure over all of the
/// query's terms (the extension).
Query extend(const Query& q);

} // namespace cdeq
