// Value model for conjunctive queries with order comparisons and for
// annotated databases: terms, atoms, comparisons, queries, facts.
#pragma once

#include "cdeq/rational.hpp"

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdeq {

/// Base for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Comparison set is unsatisfiable (strict cycle, contradictory constants).
struct UnsatisfiableError : Error {
    using Error::Error;
};

/// Equality normalization would merge terms that must stay distinct
/// (two head variables, or a head/aggregate variable with a constant).
struct CollapseError : Error {
    enum class Kind { distinguished, aggregate };
    CollapseError(Kind k, const std::string& msg) : Error(msg), kind(k) {}
    Kind kind;
};

/// Inconsistent relation arities within or across inputs.
struct ArityError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Terms

enum class TermKind { variable, constant };

struct Term {
    TermKind kind = TermKind::variable;
    std::string name;       // variable name; empty for constants
    Rational value{0};      // constant value; unused for variables

    static Term var(std::string n) { return Term{TermKind::variable, std::move(n), Rational{0}}; }
    static Term constant(Rational v) { return Term{TermKind::constant, {}, v}; }

    bool is_var() const { return kind == TermKind::variable; }
    bool is_const() const { return kind == TermKind::constant; }

    friend bool operator==(const Term& a, const Term& b) {
        if (a.kind != b.kind) return false;
        return a.is_var() ? a.name == b.name : a.value == b.value;
    }
    friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
    // Total order: variables (by name) before constants (by value).
    friend bool operator<(const Term& a, const Term& b) {
        if (a.kind != b.kind) return a.is_var();
        return a.is_var() ? a.name < b.name : a.value < b.value;
    }
};

std::string to_string(const Term& t);

// ---------------------------------------------------------------------------
// Atoms and comparisons

struct Atom {
    std::string relation;
    std::vector<Term> args;

    friend bool operator==(const Atom& a, const Atom& b) {
        return a.relation == b.relation && a.args == b.args;
    }
    friend bool operator<(const Atom& a, const Atom& b) {
        if (a.relation != b.relation) return a.relation < b.relation;
        return a.args < b.args;
    }
};

std::string to_string(const Atom& a);

enum class CompareOp { lt, le, eq };

const char* to_symbol(CompareOp op);

struct Comparison {
    Term lhs;
    CompareOp op = CompareOp::lt;
    Term rhs;

    friend bool operator==(const Comparison& a, const Comparison& b) {
        return a.lhs == b.lhs && a.op == b.op && a.rhs == b.rhs;
    }
    friend bool operator<(const Comparison& a, const Comparison& b) {
        if (!(a.lhs == b.lhs)) return a.lhs < b.lhs;
        if (a.op != b.op) return static_cast<int>(a.op) < static_cast<int>(b.op);
        return a.rhs < b.rhs;
    }
};

std::string to_string(const Comparison& c);

/// A set of order constraints, kept sorted and duplicate-free.
struct ComparisonSet {
    std::vector<Comparison> comparisons;

    void add(Comparison c);
    void canonicalize();
    bool contains(const Comparison& c) const;
    bool empty() const { return comparisons.empty(); }
    std::size_t size() const { return comparisons.size(); }

    /// Every term mentioned by some comparison, sorted.
    std::vector<Term> terms() const;
    /// True if no comparison uses `=`.
    bool equality_free() const;

    friend bool operator==(const ComparisonSet&, const ComparisonSet&) = default;
};

// ---------------------------------------------------------------------------
// Queries

enum class AggregateKind { none, count_distinct, general };

struct Aggregate {
    AggregateKind kind = AggregateKind::none;
    std::string name;             // "countd" or the general aggregate's name
    std::vector<Term> vars;       // one variable for countd, one or more otherwise

    friend bool operator==(const Aggregate&, const Aggregate&) = default;
};

struct Query {
    std::string head = "q";
    std::vector<Term> disting;      // the summary row, in head order
    Aggregate aggregate;
    std::vector<Atom> atoms;        // canonical: sorted, unique
    ComparisonSet comparisons;      // canonical: sorted, unique

    bool is_plain() const { return aggregate.kind == AggregateKind::none; }
    bool is_count_distinct() const { return aggregate.kind == AggregateKind::count_distinct; }
    bool is_general_aggregate() const { return aggregate.kind == AggregateKind::general; }
    /// The count variable of a count-distinct query.
    const Term& count_var() const;

    /// Sorts and deduplicates atoms and comparisons.
    void canonicalize();

    /// All variables occurring in atoms (safety makes this var(q)), sorted.
    std::vector<Term> variables() const;
    /// variables() minus distinguished and aggregate variables.
    std::vector<Term> nondistinguished() const;
    /// Variables and constants occurring anywhere in the body, sorted.
    std::vector<Term> all_terms() const;
    /// Constants occurring in atoms or comparisons, sorted.
    std::vector<Rational> constants() const;
    /// Relation name -> arity, inferred from the atoms.
    std::map<std::string, int> arities() const;

    /// Applies a term substitution to atoms, comparisons, head and aggregate.
    Query substituted(const std::map<Term, Term>& subst) const;

    friend bool operator==(const Query&, const Query&) = default;
};

/// Canonical text rendering; parse(print(parse(s))) == parse(s).
std::string print_query(const Query& q);

/// Checks the structural invariants: safety of distinguished and aggregate
/// variables, comparison variables occurring in atoms, consistent arities,
/// aggregate variables disjoint from the summary row. Throws Error/ArityError.
void validate(const Query& q);

// ---------------------------------------------------------------------------
// Databases

/// Annotations live in a commutative semiring; the built-in evaluators use
/// naturals (the Boolean semiring reads any nonzero value as true).
using Annotation = std::uint64_t;

struct Fact {
    std::string relation;
    std::vector<Rational> args;
    Annotation annotation = 1;
};

struct Database {
    // Keyed by (relation, tuple); zero-annotated facts are absent.
    std::map<std::pair<std::string, std::vector<Rational>>, Annotation> facts;

    /// Inserts with natural-number merge of duplicates; drops zero annotations.
    void add(const Fact& f);
    bool contains(const std::string& relation, const std::vector<Rational>& args) const;
    std::size_t size() const { return facts.size(); }

    /// Active domain: every constant occurring in some fact, sorted.
    std::vector<Rational> adom() const;
    std::map<std::string, int> arities() const;

    friend bool operator==(const Database&, const Database&) = default;
};

std::string print_database(const Database& d);

} // namespace cdeq
