#include "cdeq/eval.hpp"

#include <algorithm>
#include <random>

namespace cdeq {

namespace {

// Queries are compiled against one database: every value (active domain plus
// query constants) gets a dense index, facts become bit-packed tuples, and
// the assignment loop runs over index vectors. Order of indices is faithful
// to the rational order, so comparisons reduce to integer comparisons.
struct CompiledEval {
    struct Arg {
        bool is_var;
        int index; // variable slot or value index
    };
    struct CAtom {
        int relation;
        std::vector<Arg> args;
    };
    struct CComp {
        Arg lhs;
        CompareOp op;
        Arg rhs;
    };

    std::vector<Term> vars;           // slot -> variable
    std::vector<Rational> values;     // value index -> rational
    int adom_size = 0;                // adom values are indices [0, adom_size)
    std::vector<CAtom> atoms;
    std::vector<CComp> comps;
    // Per relation: sorted packed tuples and their annotations.
    std::vector<std::vector<std::uint64_t>> fact_keys;
    std::vector<std::vector<Annotation>> fact_anns;
    int bits = 8;

    std::uint64_t pack(const std::vector<int>& tuple) const {
        std::uint64_t key = 0;
        for (int v : tuple) key = (key << bits) | static_cast<std::uint64_t>(v);
        return key;
    }
};

CompiledEval compile(const Query& q, const Database& d) {
    CompiledEval ce;

    std::set<Rational> vals;
    std::vector<Rational> adom = d.adom();
    for (const auto& v : adom) vals.insert(v);
    // Assignments range over the active domain only; the index table is
    // built from adom first so adom indices form the prefix [0, adom_size).
    ce.values.assign(adom.begin(), adom.end());
    ce.adom_size = static_cast<int>(adom.size());
    std::map<Rational, int> value_index;
    for (int i = 0; i < ce.adom_size; ++i) value_index[ce.values[i]] = i;
    for (const auto& c : q.constants())
        if (!value_index.count(c)) {
            value_index[c] = static_cast<int>(ce.values.size());
            ce.values.push_back(c);
        }

    ce.vars = q.variables();
    std::map<Term, int> var_slot;
    for (std::size_t i = 0; i < ce.vars.size(); ++i) var_slot[ce.vars[i]] = static_cast<int>(i);

    int nbits = 1;
    while ((1u << nbits) < ce.values.size() + 1) ++nbits;
    ce.bits = nbits;

    std::map<std::string, int> rel_index;
    auto arg_of = [&](const Term& t) {
        if (t.is_var()) return CompiledEval::Arg{true, var_slot.at(t)};
        return CompiledEval::Arg{false, value_index.at(t.value)};
    };
    for (const auto& a : q.atoms) {
        if (a.args.size() * static_cast<std::size_t>(ce.bits) > 63)
            throw Error("eval: relation arity too large to evaluate");
        auto [it, fresh] = rel_index.emplace(a.relation, static_cast<int>(rel_index.size()));
        CompiledEval::CAtom ca;
        ca.relation = it->second;
        for (const auto& t : a.args) ca.args.push_back(arg_of(t));
        ce.atoms.push_back(std::move(ca));
    }
    for (const auto& c : q.comparisons.comparisons)
        ce.comps.push_back({arg_of(c.lhs), c.op, arg_of(c.rhs)});

    ce.fact_keys.resize(rel_index.size());
    ce.fact_anns.resize(rel_index.size());
    std::vector<std::vector<std::pair<std::uint64_t, Annotation>>> buckets(rel_index.size());
    for (const auto& [key, ann] : d.facts) {
        auto it = rel_index.find(key.first);
        if (it == rel_index.end()) continue; // relation not used by the query
        std::vector<int> tuple;
        tuple.reserve(key.second.size());
        for (const auto& v : key.second) tuple.push_back(value_index.at(v));
        buckets[it->second].push_back({ce.pack(tuple), ann});
    }
    for (std::size_t r = 0; r < buckets.size(); ++r) {
        std::sort(buckets[r].begin(), buckets[r].end());
        for (auto& [k, a] : buckets[r]) {
            ce.fact_keys[r].push_back(k);
            ce.fact_anns[r].push_back(a);
        }
    }
    return ce;
}

// Runs fn over every satisfying assignment (slot -> adom value index).
// fn receives the assignment and the product hook source (matched fact
// annotation per atom, in atom order).
void enumerate_satisfying(const CompiledEval& ce,
                          const std::function<void(const std::vector<int>&,
                                                   const std::vector<Annotation>&)>& fn) {
    const int nvars = static_cast<int>(ce.vars.size());
    if (ce.adom_size == 0 && nvars > 0) return;

    std::vector<int> asg(nvars, 0);
    std::vector<Annotation> matched(ce.atoms.size(), 1);
    auto value_of = [&](const CompiledEval::Arg& a) { return a.is_var ? asg[a.index] : a.index; };

    while (true) {
        bool ok = true;
        for (std::size_t ai = 0; ai < ce.atoms.size() && ok; ++ai) {
            const auto& atom = ce.atoms[ai];
            std::uint64_t key = 0;
            for (const auto& arg : atom.args)
                key = (key << ce.bits) | static_cast<std::uint64_t>(value_of(arg));
            const auto& keys = ce.fact_keys[atom.relation];
            auto it = std::lower_bound(keys.begin(), keys.end(), key);
            if (it == keys.end() || *it != key) {
                ok = false;
            } else {
                matched[ai] = ce.fact_anns[atom.relation][it - keys.begin()];
            }
        }
        if (ok)
            for (const auto& c : ce.comps) {
                int l = value_of(c.lhs), r = value_of(c.rhs);
                bool h = c.op == CompareOp::lt ? l < r : c.op == CompareOp::le ? l <= r : l == r;
                if (!h) { ok = false; break; }
            }
        if (ok) fn(asg, matched);

        int i = 0;
        for (; i < nvars; ++i) {
            if (++asg[i] < ce.adom_size) break;
            asg[i] = 0;
        }
        if (i == nvars) return;
    }
}

Tuple decode(const CompiledEval& ce, const std::vector<int>& asg,
             const std::vector<int>& slots) {
    Tuple out;
    out.reserve(slots.size());
    for (int s : slots) out.push_back(ce.values[asg[s]]);
    return out;
}

std::vector<int> slots_of(const CompiledEval& ce, const std::vector<Term>& terms) {
    std::map<Term, int> var_slot;
    for (std::size_t i = 0; i < ce.vars.size(); ++i) var_slot[ce.vars[i]] = static_cast<int>(i);
    std::vector<int> out;
    out.reserve(terms.size());
    for (const auto& t : terms) out.push_back(var_slot.at(t));
    return out;
}

} // namespace

std::vector<AssignmentRow> satisfying_assignments(const Query& q, const Database& d) {
    auto ce = compile(q, d);
    std::vector<AssignmentRow> rows;
    enumerate_satisfying(ce, [&](const std::vector<int>& asg, const std::vector<Annotation>&) {
        AssignmentRow row;
        for (std::size_t i = 0; i < ce.vars.size(); ++i) row[ce.vars[i]] = ce.values[asg[i]];
        rows.push_back(std::move(row));
    });
    std::sort(rows.begin(), rows.end());
    return rows;
}

std::set<Tuple> eval_set(const Query& q, const Database& d) {
    auto ce = compile(q, d);
    auto slots = slots_of(ce, q.disting);
    std::set<Tuple> out;
    enumerate_satisfying(ce, [&](const std::vector<int>& asg, const std::vector<Annotation>&) {
        out.insert(decode(ce, asg, slots));
    });
    return out;
}

std::map<Tuple, std::uint64_t> eval_bag(const Query& q, const Database& d) {
    auto ce = compile(q, d);
    auto slots = slots_of(ce, q.disting);
    std::map<Tuple, std::uint64_t> out;
    enumerate_satisfying(ce, [&](const std::vector<int>& asg, const std::vector<Annotation>&) {
        ++out[decode(ce, asg, slots)];
    });
    return out;
}

std::map<Tuple, std::uint64_t> eval_countd(const Query& q, const Database& d) {
    if (!q.is_count_distinct()) throw Error("eval_countd: not a count-distinct query");
    auto ce = compile(q, d);
    auto slots = slots_of(ce, q.disting);
    auto yslot = slots_of(ce, {q.count_var()}).front();
    std::map<Tuple, std::set<int>> seen;
    enumerate_satisfying(ce, [&](const std::vector<int>& asg, const std::vector<Annotation>&) {
        seen[decode(ce, asg, slots)].insert(asg[yslot]);
    });
    std::map<Tuple, std::uint64_t> out;
    for (const auto& [key, values] : seen) out[key] = values.size();
    return out;
}

Query promote_aggregate(const Query& q) {
    if (q.is_plain()) return q;
    Query out = q;
    for (const auto& y : q.aggregate.vars) out.disting.push_back(y);
    out.aggregate = Aggregate{};
    return out;
}

NestedAnswer eval_ga(const Query& q, const Database& d) {
    if (!q.is_general_aggregate()) throw Error("eval_ga: not a general-aggregate query");
    if (q.disting.empty()) throw Error("eval_ga: query has no group-by variables");
    auto ce = compile(q, d);
    auto xslots = slots_of(ce, q.disting);
    auto yslots = slots_of(ce, q.aggregate.vars);
    NestedAnswer out;
    enumerate_satisfying(ce, [&](const std::vector<int>& asg, const std::vector<Annotation>&) {
        ++out.groups[decode(ce, asg, xslots)][decode(ce, asg, yslots)];
    });
    return out;
}

const Semiring& nat_semiring() {
    static const Semiring k{
        "nat", 0, 1,
        [](Annotation a, Annotation b) { return a + b; },
        [](Annotation a, Annotation b) { return a * b; },
        [](Annotation a) { return a; },
        {0, 1, 2, 3, 5, 7}};
    return k;
}

const Semiring& bool_semiring() {
    static const Semiring k{
        "bool", 0, 1,
        [](Annotation a, Annotation b) { return (a || b) ? Annotation{1} : Annotation{0}; },
        [](Annotation a, Annotation b) { return (a && b) ? Annotation{1} : Annotation{0}; },
        [](Annotation a) { return a ? Annotation{1} : Annotation{0}; },
        {0, 1}};
    return k;
}

std::map<Tuple, Annotation> eval_semiring(const Query& q, const Database& d, const Semiring& k) {
    if (!q.is_plain()) throw Error("eval_semiring: aggregate query");
    auto ce = compile(q, d);
    auto slots = slots_of(ce, q.disting);
    std::map<Tuple, Annotation> out;
    enumerate_satisfying(ce, [&](const std::vector<int>& asg, const std::vector<Annotation>& matched) {
        Annotation prod = k.one;
        for (Annotation a : matched) prod = k.mul(prod, k.from_natural(a));
        Tuple key = decode(ce, asg, slots);
        auto [it, fresh] = out.emplace(std::move(key), prod);
        if (!fresh) it->second = k.add(it->second, prod);
    });
    for (auto it = out.begin(); it != out.end();)
        it = it->second == k.zero ? out.erase(it) : std::next(it);
    return out;
}

// ---------------------------------------------------------------------------

DatabaseEnumerator::DatabaseEnumerator(Schema schema, int max_adom, int max_facts)
    : max_facts_(max_facts) {
    for (const auto& [name, arity] : schema) {
        RelationState rs;
        rs.name = name;
        rs.arity = arity;
        std::vector<Rational> tuple(arity, Rational{1});
        std::vector<int> digits(arity, 1);
        while (true) {
            rs.cells.push_back(tuple);
            int i = arity - 1;
            for (; i >= 0; --i) {
                if (++digits[i] <= max_adom) {
                    tuple[i] = Rational{digits[i]};
                    break;
                }
                digits[i] = 1;
                tuple[i] = Rational{1};
            }
            if (i < 0) break;
        }
        // Number of subsets of the cells with size <= max_facts.
        std::uint64_t cnt = 0, binom = 1;
        const std::uint64_t n = rs.cells.size();
        for (std::uint64_t k = 0; k <= std::min<std::uint64_t>(max_facts, n); ++k) {
            if (k > 0) binom = binom * (n - k + 1) / k; // exact: C(n,k) from C(n,k-1)
            cnt += binom;
        }
        total_ *= cnt;
        if (total_ > 10'000'000ULL)
            throw Error("enumerate_databases: more than 10^7 databases in the family");
        rewind(rs);
        relations_.push_back(std::move(rs));
    }
}

void DatabaseEnumerator::rewind(RelationState& rs) {
    rs.size = 0;
    rs.combination.clear();
}

// Next subset: combinations of the current size in lex order, then size + 1.
bool DatabaseEnumerator::advance(RelationState& rs) {
    const int n = static_cast<int>(rs.cells.size());
    int k = rs.size;
    int i = k - 1;
    while (i >= 0 && rs.combination[i] == n - (k - i)) --i;
    if (i >= 0) {
        ++rs.combination[i];
        for (int j = i + 1; j < k; ++j) rs.combination[j] = rs.combination[j - 1] + 1;
        return true;
    }
    if (k >= std::min(n, max_facts_)) return false;
    rs.size = k + 1;
    rs.combination.resize(rs.size);
    for (int j = 0; j < rs.size; ++j) rs.combination[j] = j;
    return true;
}

bool DatabaseEnumerator::next(Database& out) {
    if (done_) return false;
    if (!fresh_) {
        std::size_t r = relations_.size();
        while (r > 0) {
            if (advance(relations_[r - 1])) break;
            rewind(relations_[r - 1]);
            --r;
        }
        if (r == 0) {
            done_ = true;
            return false;
        }
    }
    fresh_ = false;
    out = Database{};
    for (const auto& rs : relations_)
        for (int idx : rs.combination) out.add({rs.name, rs.cells[idx], 1});
    return true;
}

void DatabaseEnumerator::reset() {
    for (auto& rs : relations_) rewind(rs);
    done_ = false;
    fresh_ = true;
}

void for_each_database(const Schema& schema, int max_adom, int max_facts,
                       const std::function<bool(const Database&)>& fn) {
    DatabaseEnumerator en(schema, max_adom, max_facts);
    Database d;
    while (en.next(d))
        if (!fn(d)) return;
}

Database random_database(const Schema& schema, int max_adom, int max_facts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Database d;
    for (const auto& [name, arity] : schema) {
        int k = max_facts > 0 ? static_cast<int>(rng() % (max_facts + 1)) : 0;
        for (int i = 0; i < k; ++i) {
            std::vector<Rational> tuple;
            tuple.reserve(arity);
            for (int j = 0; j < arity; ++j)
                tuple.emplace_back(static_cast<long long>(rng() % max_adom + 1));
            if (!d.contains(name, tuple)) d.add({name, tuple, 1});
        }
    }
    return d;
}

} // namespace cdeq
