// Reasoning over sets of order comparisons on a dense ordered domain:
// equality elimination, satisfiability, entailment, closure, and an
// independent enumeration oracle used to cross-check all of it.
#pragma once

#include "cdeq/query.hpp"

#include <optional>

namespace cdeq {

/// Precomputed entailment relation for one comparison set over a fixed
/// term universe.
///
/// The constraint digraph has a node per term and an edge from the greater
/// side to the lesser side, weighted 1 for `<` and 0 for `<=`; every pair of
/// distinct constants contributes the implicit strict edge given by their
/// rational order. Over a dense domain, C entails r <= s exactly when a
/// directed chain from s down to r exists, and entails r < s when some such
/// chain carries at least one strict edge; both reduce to the max-weight
/// path matrix computed here. A cycle of positive weight means C is
/// unsatisfiable, in which case every goal is vacuously entailed.
class OrderClosure {
  public:
    OrderClosure(const ComparisonSet& c, const std::vector<Term>& universe);

    bool satisfiable() const { return satisfiable_; }
    bool entails(const Term& r, CompareOp op, const Term& s) const;

  private:
    int index(const Term& t) const;

    std::vector<Term> terms_;
    std::vector<int> weight_; // n*n max path weight; -1 = unreachable
    bool satisfiable_ = true;
};

/// True iff some assignment of rationals to terms satisfies every
/// comparison (constants denote themselves). Requires an equality-free set.
bool is_satisfiable(const ComparisonSet& c);

/// True iff every linearization of `c` satisfies `goal`; vacuously true for
/// unsatisfiable `c`. Requires equality-free `c` and goal op in {<, <=}.
bool entails(const ComparisonSet& c, const Comparison& goal);

/// Independent entailment oracle: enumerates every order type of the terms
/// over a value grid fine enough for a dense domain (constants pinned to
/// themselves, enough fresh values in every constant gap) and tests the goal
/// in each satisfying assignment. Bounded to 8 terms.
bool entails_oracle(const ComparisonSet& c, const Comparison& goal);

/// All comparisons r op s with distinct r, s drawn from `terms` that are
/// entailed by `c`, each pair kept once with its strongest operator;
/// constant-constant pairs are omitted. Requires satisfiable, equality-free c.
ComparisonSet closure(const ComparisonSet& c, const std::vector<Term>& terms);

/// A concrete satisfying assignment; constants map to themselves.
struct Linearization {
    std::map<Term, Rational> assignment;
};

/// Searches the same dense-domain value grid the oracle uses; nullopt iff
/// unsatisfiable. Intended for small sets (the grid grows with the term count).
std::optional<Linearization> find_linearization(const ComparisonSet& c);

struct NormalizeResult {
    ComparisonSet comparisons;         // equality-free, over representatives
    std::map<Term, Term> substitution; // merged term -> representative
};

/// Eliminates `=` by union-find, also merging terms forced equal by a cycle
/// of `<=` comparisons. Representative preference: distinguished variable,
/// then aggregate variable, then constant, then the lexicographically least
/// variable. Throws UnsatisfiableError when two distinct constants merge and
/// CollapseError when two head variables merge or a head/aggregate variable
/// is pinned to a constant.
NormalizeResult normalize_equalities(const ComparisonSet& c, const Query& context);

/// Applies normalize_equalities to the whole query.
Query normalize_query(const Query& q);

} // namespace cdeq
