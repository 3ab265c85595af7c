#include "cdeq/core.hpp"

#include <algorithm>

namespace cdeq {

namespace {

// Comparison set for the subquery on `atoms`: the precomputed full closure
// restricted to terms still present (constants always survive).
ComparisonSet restrict_closure(const ComparisonSet& full, const std::vector<Atom>& atoms) {
    std::set<Term> alive;
    for (const auto& a : atoms)
        for (const auto& t : a.args) alive.insert(t);
    ComparisonSet out;
    for (const auto& c : full.comparisons) {
        bool l_ok = c.lhs.is_const() || alive.count(c.lhs);
        bool r_ok = c.rhs.is_const() || alive.count(c.rhs);
        if (l_ok && r_ok) out.comparisons.push_back(c);
    }
    out.canonicalize();
    return out;
}

bool occurs(const std::vector<Atom>& atoms, const Term& v) {
    for (const auto& a : atoms)
        for (const auto& t : a.args)
            if (t == v) return true;
    return false;
}

} // namespace

Query compute_core(const Query& q) {
    if (!q.comparisons.equality_free())
        throw Error("compute_core: query not equality-normalized");
    if (!is_satisfiable(q.comparisons))
        throw UnsatisfiableError("compute_core: comparisons unsatisfiable");

    const ComparisonSet full = closure(q.comparisons, q.all_terms());

    Query cur = q;
    cur.comparisons = restrict_closure(full, cur.atoms);
    cur.canonicalize();

    std::set<Term> disting(q.disting.begin(), q.disting.end());

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t drop = 0; drop < cur.atoms.size() && !changed; ++drop) {
            if (cur.atoms.size() == 1) break;
            Query cand = cur;
            cand.atoms.erase(cand.atoms.begin() + drop);
            // Head variables must keep an atom.
            bool head_safe = std::all_of(cur.disting.begin(), cur.disting.end(),
                                         [&](const Term& x) { return occurs(cand.atoms, x); });
            if (!head_safe) continue;
            cand.comparisons = restrict_closure(full, cand.atoms);

            // Aggregate variables that lose their atoms may only fold onto
            // plain variables of the candidate, so the fold can be renamed.
            HomOptions options;
            std::vector<Term> folded_aggs;
            std::set<Term> cand_vars_set;
            {
                auto cv = cand.variables();
                cand_vars_set.insert(cv.begin(), cv.end());
            }
            for (const auto& y : cur.aggregate.vars) {
                if (cand_vars_set.count(y)) continue;
                folded_aggs.push_back(y);
                std::set<Term> forbidden;
                for (const auto& t : cand_vars_set)
                    if (disting.count(t) ||
                        std::count(cur.aggregate.vars.begin(), cur.aggregate.vars.end(), t))
                        forbidden.insert(t);
                for (const auto& c : cand.constants()) forbidden.insert(Term::constant(c));
                options.forbidden[y] = std::move(forbidden);
            }

            auto pin = positional_pin(cur, cand, false);
            if (!pin) continue;
            auto h = find_homomorphism(cur, cand, *pin, options);
            if (!h) continue;

            // Distinct folded aggregate variables must land on distinct
            // targets before renaming them back.
            if (!folded_aggs.empty()) {
                std::set<Term> images;
                bool inj = true;
                for (const auto& y : folded_aggs)
                    if (!images.insert(h->at(y)).second) inj = false;
                if (!inj) continue;
                std::map<Term, Term> rename;
                for (const auto& y : folded_aggs) rename[h->at(y)] = y;
                cand = cand.substituted(rename);
            }
            cur = std::move(cand);
            cur.canonicalize();
            changed = true;
        }
    }
    cur.canonicalize();
    return cur;
}

bool cq_equivalent(const Query& q1, const Query& q2) {
    if (!q1.is_plain() || !q2.is_plain())
        throw Error("cq_equivalent: aggregate query (use countd_equivalent)");
    if (q1.disting.size() != q2.disting.size())
        throw ArityError("cq_equivalent: summary rows have different arity");

    Query n1 = normalize_query(q1), n2 = normalize_query(q2);
    bool sat1 = is_satisfiable(n1.comparisons), sat2 = is_satisfiable(n2.comparisons);
    if (!sat1 || !sat2) return sat1 == sat2;

    Query c1 = compute_core(n1), c2 = compute_core(n2);
    auto pin = positional_pin(c1, c2, false);
    if (!pin) return false;
    return find_isomorphism(c1, c2, *pin).has_value();
}

} // namespace cdeq
