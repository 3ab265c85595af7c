// Ground-truth evaluation of queries over concrete databases: set, set-bag,
// count-distinct, nested general-aggregate, and semiring-annotated semantics,
// plus exhaustive and seeded database generation for differential testing.
//
// Evaluation is deliberately naive generate-and-test over active-domain
// assignments; this module is the arbiter the reasoning modules are checked
// against.
#pragma once

#include "cdeq/query.hpp"

#include <functional>

namespace cdeq {

using Tuple = std::vector<Rational>;

/// One satisfying assignment of the query variables.
using AssignmentRow = std::map<Term, Rational>;

/// Γ: all assignments var(q) -> adom(D) satisfying atoms and comparisons,
/// in deterministic sorted order.
std::vector<AssignmentRow> satisfying_assignments(const Query& q, const Database& d);

/// Set semantics: the distinct summary-row images of satisfying assignments.
std::set<Tuple> eval_set(const Query& q, const Database& d);

/// Set-bag semantics: summary row -> number of satisfying assignments.
std::map<Tuple, std::uint64_t> eval_bag(const Query& q, const Database& d);

/// Count-distinct: summary row -> number of distinct count-variable values.
std::map<Tuple, std::uint64_t> eval_countd(const Query& q, const Database& d);

/// Nested general-aggregate answer: group key -> inner (value tuple, count).
struct NestedAnswer {
    std::map<Tuple, std::map<Tuple, std::uint64_t>> groups;

    friend bool operator==(const NestedAnswer&, const NestedAnswer&) = default;
};

NestedAnswer eval_ga(const Query& q, const Database& d);

/// The plain query q-hat with the aggregate variables promoted to outputs.
Query promote_aggregate(const Query& q);

// ---------------------------------------------------------------------------
// Semirings

/// A commutative semiring over machine naturals. `from_natural` coerces
/// parsed annotations into the carrier (the Boolean semiring collapses any
/// nonzero value to 1); `samples` feed the law test.
struct Semiring {
    std::string name;
    Annotation zero = 0;
    Annotation one = 1;
    std::function<Annotation(Annotation, Annotation)> add;
    std::function<Annotation(Annotation, Annotation)> mul;
    std::function<Annotation(Annotation)> from_natural;
    std::vector<Annotation> samples;
};

const Semiring& nat_semiring();
const Semiring& bool_semiring();

/// K-relation semantics: tuple -> sum over satisfying assignments of the
/// product of matched fact annotations; tuples valued zero are omitted.
std::map<Tuple, Annotation> eval_semiring(const Query& q, const Database& d, const Semiring& k);

// ---------------------------------------------------------------------------
// Database generation

using Schema = std::map<std::string, int>; // relation name -> arity

/// Streams every database over adom {1..max_adom} with at most max_facts
/// facts per relation, deterministically, each exactly once.
class DatabaseEnumerator {
  public:
    /// Throws Error when the family exceeds 10^7 databases.
    DatabaseEnumerator(Schema schema, int max_adom, int max_facts);

    std::uint64_t count() const { return total_; }
    /// Fills `out` with the next database; false once exhausted.
    bool next(Database& out);
    void reset();

  private:
    struct RelationState {
        std::string name;
        int arity = 0;
        std::vector<std::vector<Rational>> cells; // all possible tuples, lex order
        int size = 0;                             // current subset size
        std::vector<int> combination;             // indices into cells
    };
    bool advance(RelationState& rs);
    void rewind(RelationState& rs);

    std::vector<RelationState> relations_;
    int max_facts_;
    std::uint64_t total_ = 1;
    bool done_ = false;
    bool fresh_ = true;
};

/// Convenience driver; stops early when fn returns false.
void for_each_database(const Schema& schema, int max_adom, int max_facts,
                       const std::function<bool(const Database&)>& fn);

/// Seed-deterministic random database within the same bounds.
Database random_database(const Schema& schema, int max_adom, int max_facts, std::uint64_t seed);

} // namespace cdeq
