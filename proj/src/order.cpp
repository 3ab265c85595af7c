#include "cdeq/order.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

namespace cdeq {

namespace {

constexpr int kUnreachable = -1;

std::vector<Term> merge_universe(const ComparisonSet& c, const std::vector<Term>& extra) {
    std::set<Term> u;
    for (const auto& t : c.terms()) u.insert(t);
    for (const auto& t : extra) u.insert(t);
    return {u.begin(), u.end()};
}

} // namespace

OrderClosure::OrderClosure(const ComparisonSet& c, const std::vector<Term>& universe)
    : terms_(merge_universe(c, universe)) {
    const int n = static_cast<int>(terms_.size());
    const int cap = n + 2; // any simple path carries at most n-1 strict edges
    weight_.assign(static_cast<std::size_t>(n) * n, kUnreachable);
    auto w = [&](int i, int j) -> int& { return weight_[static_cast<std::size_t>(i) * n + j]; };

    auto add_edge = [&](int from, int to, int weight) {
        if (weight > w(from, to)) w(from, to) = weight;
    };
    for (int i = 0; i < n; ++i) w(i, i) = 0;
    for (const auto& cmp : c.comparisons) {
        if (cmp.op == CompareOp::eq) throw Error("OrderClosure: comparison set not equality-free");
        int l = index(cmp.lhs), r = index(cmp.rhs);
        // r op s: edge from the greater side down to the lesser side.
        add_edge(r, l, cmp.op == CompareOp::lt ? 1 : 0);
    }
    for (int i = 0; i < n; ++i) {
        if (!terms_[i].is_const()) continue;
        for (int j = 0; j < n; ++j) {
            if (!terms_[j].is_const() || i == j) continue;
            if (terms_[j].value < terms_[i].value) add_edge(i, j, 1);
        }
    }
    // Max-plus Floyd-Warshall; weights capped, so it terminates even on
    // positive cycles, and a cap-hit on the diagonal still flags them.
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            if (w(i, k) == kUnreachable) continue;
            for (int j = 0; j < n; ++j) {
                if (w(k, j) == kUnreachable) continue;
                int cand = std::min(w(i, k) + w(k, j), cap);
                if (cand > w(i, j)) w(i, j) = cand;
            }
        }
    for (int i = 0; i < n; ++i)
        if (w(i, i) > 0) satisfiable_ = false;
}

int OrderClosure::index(const Term& t) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), t);
    if (it == terms_.end() || !(*it == t)) throw Error("OrderClosure: term outside universe");
    return static_cast<int>(it - terms_.begin());
}

bool OrderClosure::entails(const Term& r, CompareOp op, const Term& s) const {
    if (op == CompareOp::eq) throw Error("entails: goal must be < or <=");
    if (!satisfiable_) return true;
    const int n = static_cast<int>(terms_.size());
    int ri = index(r), si = index(s);
    int best = weight_[static_cast<std::size_t>(si) * n + ri]; // chain s -> r
    if (best == kUnreachable) return false;
    return op == CompareOp::le ? true : best >= 1;
}

bool is_satisfiable(const ComparisonSet& c) {
    return OrderClosure(c, {}).satisfiable();
}

bool entails(const ComparisonSet& c, const Comparison& goal) {
    return OrderClosure(c, {goal.lhs, goal.rhs}).entails(goal.lhs, goal.op, goal.rhs);
}

namespace {

// Candidate values realizing every order type of `nvars` variables against
// the fixed constants: the constants themselves plus nvars fresh rationals
// inside each gap (below all, between adjacent, above all). Density of the
// domain makes this grid complete.
std::vector<Rational> dense_grid(const std::vector<Rational>& consts, int nvars) {
    std::vector<Rational> grid = consts;
    if (nvars == 0) return grid;
    if (consts.empty()) {
        for (int i = 1; i <= nvars; ++i) grid.emplace_back(i);
        return grid;
    }
    for (int i = 1; i <= nvars; ++i) grid.push_back(consts.front() - i);
    for (std::size_t g = 0; g + 1 < consts.size(); ++g) {
        Rational lo = consts[g], hi = consts[g + 1];
        for (int i = 1; i <= nvars; ++i)
            grid.push_back(lo + (hi - lo) * Rational(i, nvars + 1));
    }
    for (int i = 1; i <= nvars; ++i) grid.push_back(consts.back() + i);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

bool holds(const Comparison& c, const std::map<Term, Rational>& asg) {
    const Rational& l = c.lhs.is_const() ? c.lhs.value : asg.at(c.lhs);
    const Rational& r = c.rhs.is_const() ? c.rhs.value : asg.at(c.rhs);
    switch (c.op) {
        case CompareOp::lt: return l < r;
        case CompareOp::le: return l <= r;
        case CompareOp::eq: return l == r;
    }
    return false;
}

// Runs fn on every grid assignment of the variables of `terms`; stops early
// when fn returns false.
bool for_each_assignment(const std::vector<Term>& terms,
                         const std::function<bool(const std::map<Term, Rational>&)>& fn) {
    std::vector<Term> vars;
    std::vector<Rational> consts;
    for (const auto& t : terms)
        (t.is_var() ? (void)vars.push_back(t) : (void)consts.push_back(t.value));
    std::sort(consts.begin(), consts.end());
    consts.erase(std::unique(consts.begin(), consts.end()), consts.end());
    auto grid = dense_grid(consts, static_cast<int>(vars.size()));

    std::map<Term, Rational> asg;
    std::vector<std::size_t> pick(vars.size(), 0);
    while (true) {
        for (std::size_t i = 0; i < vars.size(); ++i) asg[vars[i]] = grid[pick[i]];
        if (!fn(asg)) return false;
        std::size_t i = 0;
        for (; i < vars.size(); ++i) {
            if (++pick[i] < grid.size()) break;
            pick[i] = 0;
        }
        if (i == vars.size()) return true;
        if (vars.empty()) return true;
    }
}

} // namespace

bool entails_oracle(const ComparisonSet& c, const Comparison& goal) {
    if (goal.op == CompareOp::eq) throw Error("entails_oracle: goal must be < or <=");
    auto universe = merge_universe(c, {goal.lhs, goal.rhs});
    if (universe.size() > 8) throw Error("entails_oracle: more than 8 terms");
    return for_each_assignment(universe, [&](const std::map<Term, Rational>& asg) {
        for (const auto& cmp : c.comparisons)
            if (!holds(cmp, asg)) return true; // not a linearization of c
        return holds(goal, asg);
    });
}

ComparisonSet closure(const ComparisonSet& c, const std::vector<Term>& terms) {
    OrderClosure oc(c, terms);
    if (!oc.satisfiable()) throw UnsatisfiableError("closure: comparisons unsatisfiable");
    ComparisonSet out;
    for (const auto& r : terms)
        for (const auto& s : terms) {
            if (r == s) continue;
            if (r.is_const() && s.is_const()) continue;
            if (oc.entails(r, CompareOp::lt, s))
                out.comparisons.push_back({r, CompareOp::lt, s});
            else if (oc.entails(r, CompareOp::le, s))
                out.comparisons.push_back({r, CompareOp::le, s});
        }
    out.canonicalize();
    return out;
}

std::optional<Linearization> find_linearization(const ComparisonSet& c) {
    std::optional<Linearization> found;
    for_each_assignment(c.terms(), [&](const std::map<Term, Rational>& asg) {
        for (const auto& cmp : c.comparisons)
            if (!holds(cmp, asg)) return true;
        Linearization lin;
        lin.assignment = asg;
        for (const auto& t : c.terms())
            if (t.is_const()) lin.assignment[t] = t.value;
        found = std::move(lin);
        return false;
    });
    return found;
}

namespace {

class UnionFind {
  public:
    Term find(const Term& t) {
        auto it = parent_.find(t);
        if (it == parent_.end() || it->second == t) return t;
        Term root = find(it->second);
        parent_[t] = root;
        return root;
    }
    void unite(const Term& a, const Term& b) {
        Term ra = find(a), rb = find(b);
        if (!(ra == rb)) parent_[ra] = rb;
    }

  private:
    std::map<Term, Term> parent_;
};

} // namespace

NormalizeResult normalize_equalities(const ComparisonSet& c, const Query& context) {
    UnionFind uf;
    std::vector<Comparison> order_comps;
    for (const auto& cmp : c.comparisons) {
        if (cmp.op == CompareOp::eq)
            uf.unite(cmp.lhs, cmp.rhs);
        else
            order_comps.push_back(cmp);
    }

    // Antisymmetry: terms on a cycle of (non-strict) <= edges are equal.
    // One DFS-based SCC pass over the <=-only digraph on current classes.
    {
        std::map<Term, std::vector<Term>> succ;
        std::set<Term> nodes;
        for (const auto& cmp : order_comps) {
            if (cmp.op != CompareOp::le) continue;
            Term a = uf.find(cmp.lhs), b = uf.find(cmp.rhs);
            succ[a].push_back(b);
            nodes.insert(a);
            nodes.insert(b);
        }
        // Tarjan, iterative over small graphs via recursion depth bound.
        std::map<Term, int> idx, low;
        std::vector<Term> stack;
        std::set<Term> on_stack;
        int counter = 0;
        std::function<void(const Term&)> strongconnect = [&](const Term& v) {
            idx[v] = low[v] = counter++;
            stack.push_back(v);
            on_stack.insert(v);
            for (const auto& wt : succ[v]) {
                if (!idx.count(wt)) {
                    strongconnect(wt);
                    low[v] = std::min(low[v], low[wt]);
                } else if (on_stack.count(wt)) {
                    low[v] = std::min(low[v], idx[wt]);
                }
            }
            if (low[v] == idx[v]) {
                std::vector<Term> scc;
                while (true) {
                    Term wt = stack.back();
                    stack.pop_back();
                    on_stack.erase(wt);
                    scc.push_back(wt);
                    if (wt == v) break;
                }
                for (std::size_t i = 1; i < scc.size(); ++i) uf.unite(scc[0], scc[i]);
            }
        };
        for (const auto& v : nodes)
            if (!idx.count(v)) strongconnect(v);
    }

    // Group classes and pick representatives.
    std::set<Term> mentioned;
    for (const auto& cmp : c.comparisons) {
        mentioned.insert(cmp.lhs);
        mentioned.insert(cmp.rhs);
    }
    std::map<Term, std::vector<Term>> classes;
    for (const auto& t : mentioned) classes[uf.find(t)].push_back(t);

    std::set<Term> disting(context.disting.begin(), context.disting.end());
    std::set<Term> aggvars(context.aggregate.vars.begin(), context.aggregate.vars.end());

    std::map<Term, Term> subst;
    for (auto& [root, members] : classes) {
        if (members.size() < 2) continue;
        std::vector<Term> ds, as, cs, vs;
        for (const auto& t : members) {
            if (t.is_const()) cs.push_back(t);
            else if (disting.count(t)) ds.push_back(t);
            else if (aggvars.count(t)) as.push_back(t);
            else vs.push_back(t);
        }
        if (cs.size() > 1)
            throw UnsatisfiableError("equalities merge distinct constants " +
                                     to_string(cs[0]) + " and " + to_string(cs[1]));
        if (ds.size() > 1)
            throw CollapseError(CollapseError::Kind::distinguished,
                                "equalities merge distinguished variables " + ds[0].name +
                                    " and " + ds[1].name);
        if (!cs.empty() && (!ds.empty() || !as.empty()))
            throw CollapseError(CollapseError::Kind::aggregate,
                                "equalities pin head or aggregate variable to constant " +
                                    to_string(cs[0]));
        if (as.size() > 1 || (!as.empty() && !ds.empty()))
            throw CollapseError(CollapseError::Kind::aggregate,
                                "equalities merge aggregate variable " + as[0].name +
                                    " with another head variable");
        Term rep = !ds.empty() ? ds[0] : !as.empty() ? as[0] : !cs.empty() ? cs[0] : vs[0];
        for (const auto& t : members)
            if (!(t == rep)) subst[t] = rep;
    }

    NormalizeResult out;
    out.substitution = subst;
    auto rep_of = [&](const Term& t) {
        auto it = subst.find(t);
        return it == subst.end() ? t : it->second;
    };
    for (const auto& cmp : order_comps) {
        Comparison r{rep_of(cmp.lhs), cmp.op, rep_of(cmp.rhs)};
        if (r.lhs == r.rhs && r.op == CompareOp::le) continue; // reflexive, trivially true
        out.comparisons.comparisons.push_back(r);              // keep r < r: marks unsat
    }
    out.comparisons.canonicalize();
    return out;
}

Query normalize_query(const Query& q) {
    auto norm = normalize_equalities(q.comparisons, q);
    Query out = q.substituted(norm.substitution);
    out.comparisons = norm.comparisons;
    out.canonicalize();
    return out;
}

} // namespace cdeq
