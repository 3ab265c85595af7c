#include "cdeq/query.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace cdeq {

std::optional<Rational> parse_rational(std::string_view text) {
    if (text.empty()) return std::nullopt;
    bool negative = false;
    std::size_t pos = 0;
    if (text[0] == '-') {
        negative = true;
        pos = 1;
    }
    auto read_int = [&](long long& out) -> bool {
        std::size_t start = pos;
        while (pos < text.size() && text[pos] >= '0' && text[pos] <= '9') ++pos;
        if (pos == start) return false;
        auto res = std::from_chars(text.data() + start, text.data() + pos, out);
        return res.ec == std::errc{} && res.ptr == text.data() + pos;
    };
    long long whole = 0;
    if (!read_int(whole)) return std::nullopt;
    if (pos == text.size()) return Rational{negative ? -whole : whole};
    if (text[pos] == '/') {
        ++pos;
        long long den = 0;
        if (!read_int(den) || pos != text.size() || den == 0) return std::nullopt;
        Rational r{whole, den};
        return negative ? -r : r;
    }
    if (text[pos] == '.') {
        ++pos;
        std::size_t start = pos;
        long long frac = 0;
        if (!read_int(frac) || pos != text.size()) return std::nullopt;
        long long scale = 1;
        for (std::size_t i = start; i < pos; ++i) {
            if (scale > 1000000000000000LL) return std::nullopt; // too many digits
            scale *= 10;
        }
        Rational r = Rational{whole} + Rational{frac, scale};
        return negative ? -r : r;
    }
    return std::nullopt;
}

std::string to_string(const Rational& r) {
    std::string s = std::to_string(r.numerator());
    if (r.denominator() != 1) {
        s += '/';
        s += std::to_string(r.denominator());
    }
    return s;
}

std::string to_string(const Term& t) {
    return t.is_var() ? t.name : to_string(t.value);
}

std::string to_string(const Atom& a) {
    std::string s = a.relation;
    s += '(';
    for (std::size_t i = 0; i < a.args.size(); ++i) {
        if (i) s += ", ";
        s += to_string(a.args[i]);
    }
    s += ')';
    return s;
}

const char* to_symbol(CompareOp op) {
    switch (op) {
        case CompareOp::lt: return "<";
        case CompareOp::le: return "<=";
        case CompareOp::eq: return "=";
    }
    return "?";
}

std::string to_string(const Comparison& c) {
    return to_string(c.lhs) + " " + to_symbol(c.op) + " " + to_string(c.rhs);
}

void ComparisonSet::add(Comparison c) {
    comparisons.push_back(std::move(c));
    canonicalize();
}

void ComparisonSet::canonicalize() {
    std::sort(comparisons.begin(), comparisons.end());
    comparisons.erase(std::unique(comparisons.begin(), comparisons.end()), comparisons.end());
}

bool ComparisonSet::contains(const Comparison& c) const {
    return std::binary_search(comparisons.begin(), comparisons.end(), c);
}

std::vector<Term> ComparisonSet::terms() const {
    std::set<Term> out;
    for (const auto& c : comparisons) {
        out.insert(c.lhs);
        out.insert(c.rhs);
    }
    return {out.begin(), out.end()};
}

bool ComparisonSet::equality_free() const {
    return std::none_of(comparisons.begin(), comparisons.end(),
                        [](const Comparison& c) { return c.op == CompareOp::eq; });
}

const Term& Query::count_var() const {
    if (!is_count_distinct()) throw Error("count_var: not a count-distinct query");
    return aggregate.vars.front();
}

void Query::canonicalize() {
    std::sort(atoms.begin(), atoms.end());
    atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
    comparisons.canonicalize();
}

std::vector<Term> Query::variables() const {
    std::set<Term> vars;
    for (const auto& a : atoms)
        for (const auto& t : a.args)
            if (t.is_var()) vars.insert(t);
    return {vars.begin(), vars.end()};
}

std::vector<Term> Query::nondistinguished() const {
    std::set<Term> vars;
    for (const auto& v : variables()) vars.insert(v);
    for (const auto& x : disting) vars.erase(x);
    for (const auto& y : aggregate.vars) vars.erase(y);
    return {vars.begin(), vars.end()};
}

std::vector<Term> Query::all_terms() const {
    std::set<Term> out;
    for (const auto& a : atoms)
        for (const auto& t : a.args) out.insert(t);
    for (const auto& c : comparisons.comparisons) {
        out.insert(c.lhs);
        out.insert(c.rhs);
    }
    return {out.begin(), out.end()};
}

std::vector<Rational> Query::constants() const {
    std::set<Rational> out;
    for (const auto& t : all_terms())
        if (t.is_const()) out.insert(t.value);
    return {out.begin(), out.end()};
}

std::map<std::string, int> Query::arities() const {
    std::map<std::string, int> out;
    for (const auto& a : atoms) {
        auto [it, fresh] = out.emplace(a.relation, static_cast<int>(a.args.size()));
        if (!fresh && it->second != static_cast<int>(a.args.size()))
            throw ArityError("relation " + a.relation + " used with arities " +
                             std::to_string(it->second) + " and " + std::to_string(a.args.size()));
    }
    return out;
}

static Term apply_subst(const std::map<Term, Term>& subst, const Term& t) {
    auto it = subst.find(t);
    return it == subst.end() ? t : it->second;
}

Query Query::substituted(const std::map<Term, Term>& subst) const {
    Query out = *this;
    for (auto& a : out.atoms)
        for (auto& t : a.args) t = apply_subst(subst, t);
    for (auto& c : out.comparisons.comparisons) {
        c.lhs = apply_subst(subst, c.lhs);
        c.rhs = apply_subst(subst, c.rhs);
    }
    for (auto& x : out.disting) x = apply_subst(subst, x);
    for (auto& y : out.aggregate.vars) y = apply_subst(subst, y);
    out.canonicalize();
    return out;
}

std::string print_query(const Query& q) {
    std::string s = q.head;
    s += '(';
    bool first = true;
    for (const auto& x : q.disting) {
        if (!first) s += ", ";
        s += to_string(x);
        first = false;
    }
    if (q.aggregate.kind != AggregateKind::none) {
        if (!first) s += ", ";
        s += q.aggregate.name;
        s += '(';
        for (std::size_t i = 0; i < q.aggregate.vars.size(); ++i) {
            if (i) s += ", ";
            s += to_string(q.aggregate.vars[i]);
        }
        s += ')';
        first = false;
    }
    s += ") :- ";
    first = true;
    for (const auto& a : q.atoms) {
        if (!first) s += ", ";
        s += to_string(a);
        first = false;
    }
    for (const auto& c : q.comparisons.comparisons) {
        if (!first) s += ", ";
        s += to_string(c);
        first = false;
    }
    s += '.';
    return s;
}

void validate(const Query& q) {
    if (q.atoms.empty()) throw Error("query has no atoms");
    q.arities();

    std::set<Term> atom_vars;
    for (const auto& a : q.atoms)
        for (const auto& t : a.args)
            if (t.is_var()) atom_vars.insert(t);

    for (const auto& x : q.disting) {
        if (!x.is_var()) throw Error("head argument is not a variable");
        if (!atom_vars.count(x))
            throw Error("distinguished variable " + x.name + " occurs in no atom");
    }
    switch (q.aggregate.kind) {
        case AggregateKind::none:
            if (!q.aggregate.vars.empty()) throw Error("aggregate variables without an aggregate");
            break;
        case AggregateKind::count_distinct:
            if (q.aggregate.vars.size() != 1) throw Error("countd takes exactly one variable");
            break;
        case AggregateKind::general:
            if (q.aggregate.vars.empty()) throw Error("aggregate " + q.aggregate.name + " has no variables");
            break;
    }
    std::set<Term> agg_seen;
    for (const auto& y : q.aggregate.vars) {
        if (!y.is_var()) throw Error("aggregate argument is not a variable");
        if (!atom_vars.count(y))
            throw Error("aggregate variable " + y.name + " occurs in no atom");
        if (std::count(q.disting.begin(), q.disting.end(), y))
            throw Error("aggregate variable " + y.name + " is also a group-by variable");
        if (!agg_seen.insert(y).second)
            throw Error("aggregate variable " + y.name + " repeated");
    }
    for (const auto& c : q.comparisons.comparisons)
        for (const Term* t : {&c.lhs, &c.rhs})
            if (t->is_var() && !atom_vars.count(*t))
                throw Error("comparison variable " + t->name + " occurs in no atom");
}

void Database::add(const Fact& f) {
    if (f.annotation == 0) return;
    auto key = std::make_pair(f.relation, f.args);
    auto [it, fresh] = facts.emplace(std::move(key), f.annotation);
    if (!fresh) it->second += f.annotation;
}

bool Database::contains(const std::string& relation, const std::vector<Rational>& args) const {
    return facts.count({relation, args}) != 0;
}

std::vector<Rational> Database::adom() const {
    std::set<Rational> out;
    for (const auto& [key, ann] : facts)
        for (const auto& v : key.second) out.insert(v);
    return {out.begin(), out.end()};
}

std::map<std::string, int> Database::arities() const {
    std::map<std::string, int> out;
    for (const auto& [key, ann] : facts) {
        auto [it, fresh] = out.emplace(key.first, static_cast<int>(key.second.size()));
        if (!fresh && it->second != static_cast<int>(key.second.size()))
            throw ArityError("relation " + key.first + " used with two arities");
    }
    return out;
}

std::string print_database(const Database& d) {
    std::string s;
    for (const auto& [key, ann] : d.facts) {
        s += key.first;
        s += '(';
        for (std::size_t i = 0; i < key.second.size(); ++i) {
            if (i) s += ", ";
            s += to_string(key.second[i]);
        }
        s += ')';
        if (ann != 1) {
            s += " @ ";
            s += std::to_string(ann);
        }
        s += ".\n";
    }
    return s;
}

} // namespace cdeq
