// Equal sets of variables, the flip of a count-distinct query, and the
// distinct-value counting machinery over comparison DAGs.
#pragma once

#include "cdeq/morphism.hpp"

namespace cdeq {

/// The maximal set of hom-interchangeable variables around an anchor.
struct EqualSet {
    Term anchor;
    std::set<Term> members; // always contains the anchor
};

/// True iff S is a potential equal set: after removing the comparisons
/// between members of S, every ordered pair (x1, x2) of members admits a
/// self-homomorphism pinning the summary row and sending x1 to x2.
bool check_equal_set(const Query& q, const std::set<Term>& s);

/// The unique maximal equal set containing v, found by enumerating subsets
/// of var(q) containing v in decreasing size (maximal-set uniqueness makes
/// the first hit the answer). Throws Error above `max_vars` variables.
EqualSet equal_set(const Query& q, const Term& v, int max_vars = 12);

/// The flip: every comparison with both endpoints inside the count
/// variable's equal set has its operands swapped; everything else is
/// unchanged. Requires an equality-normalized count-distinct query.
Query flip(const Query& q);

// ---------------------------------------------------------------------------
// Counting distinct values of one variable constrained by a comparison DAG.

/// Weighted digraph on variables: an edge runs from the greater side to the
/// lesser side, weight 1 for a strict comparison and 0 otherwise.
struct ComparisonDag {
    std::vector<Term> nodes;
    struct Edge {
        int from;
        int to;
        int weight; // 0 or 1
    };
    std::vector<Edge> edges;

    /// Builds the DAG of the variable-variable comparisons among `vars`.
    static ComparisonDag from_comparisons(const ComparisonSet& c, const std::vector<Term>& vars);
    ComparisonSet to_comparisons() const;
};

/// Number of distinct values assignable to `y` by assignments of an n-value
/// ordered set to the DAG's variables satisfying every comparison:
/// n - (M_h + M_l) where M_h / M_l are the heaviest paths into / out of y,
/// zero when no satisfying assignment exists at all (a chain anywhere in the
/// DAG longer than the value set leaves nothing to count).
/// Throws UnsatisfiableError on a positive-weight cycle.
std::uint64_t distinct_value_count(const ComparisonDag& dag, const Term& y, std::uint64_t n);

/// True iff the distinct-value count of y under C is at most that of y'
/// under C' for every value set, decided by homomorphism: C' maps into C
/// (anchor onto anchor, comparisons entailed), or the direction-flipped C'
/// does.
bool count_dominates(const ComparisonDag& c, const Term& y, const ComparisonDag& c_prime,
                     const Term& y_prime);

} // namespace cdeq
