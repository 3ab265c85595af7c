#include "cdeq/morphism.hpp"

#include <algorithm>

namespace cdeq {

namespace {

// Variables of q in first-occurrence order over the canonical atom list,
// then any comparison-only terms (valid queries have none).
std::vector<Term> source_variables(const Query& q) {
    std::vector<Term> order;
    std::set<Term> seen;
    auto visit = [&](const Term& t) {
        if (t.is_var() && seen.insert(t).second) order.push_back(t);
    };
    for (const auto& a : q.atoms)
        for (const auto& t : a.args) visit(t);
    for (const auto& c : q.comparisons.comparisons) {
        visit(c.lhs);
        visit(c.rhs);
    }
    return order;
}

std::vector<Term> candidate_terms(const Query& q, const VarMap& pin) {
    std::set<Term> out;
    for (const auto& a : q.atoms)
        for (const auto& t : a.args) out.insert(t);
    for (const auto& c : q.comparisons.comparisons) {
        out.insert(c.lhs);
        out.insert(c.rhs);
    }
    for (const auto& [from, to] : pin) out.insert(to);
    return {out.begin(), out.end()};
}

class Search {
  public:
    Search(const Query& q1, const Query& q2, const VarMap& pin, const HomOptions& options,
           bool isomorphism)
        : q1_(q1), q2_(q2), options_(options), iso_(isomorphism),
          atoms2_(q2.atoms.begin(), q2.atoms.end()),
          candidates_(candidate_terms(q2, pin)),
          closure2_(q2.comparisons, merged_universe(q1, pin)),
          vars_(source_variables(q1)) {
        index_readiness();
    }

    std::optional<VarMap> run(const VarMap& pin) {
        for (const auto& [from, to] : pin) {
            if (from.is_const() && !(from == to)) return std::nullopt; // constants stay fixed
            if (iso_ && from.is_var() && to.is_const()) return std::nullopt;
        }
        if (iso_ && !iso_prechecks(pin)) return std::nullopt;

        for (const auto& [from, to] : pin)
            if (from.is_var()) {
                h_[from] = to;
                if (iso_) used_.insert(to);
            }

        // Fully ground atoms and comparisons are checked up front.
        for (const auto& a : q1_.atoms) {
            bool ground = std::all_of(a.args.begin(), a.args.end(),
                                      [](const Term& t) { return t.is_const(); });
            if (ground && !atoms2_.count(a)) return std::nullopt;
        }
        for (const auto& c : q1_.comparisons.comparisons)
            if (c.lhs.is_const() && c.rhs.is_const() && !comparison_ok(c)) return std::nullopt;

        if (!backtrack(0)) return std::nullopt;
        for (const auto& t : candidate_terms(q1_, {}))
            if (t.is_const()) h_[t] = t;
        return h_;
    }

  private:
    std::vector<Term> merged_universe(const Query& q1, const VarMap& pin) const {
        std::set<Term> u;
        for (const auto& t : candidates_) u.insert(t);
        for (const auto& t : q1.all_terms())
            if (t.is_const()) u.insert(t);
        for (const auto& [from, to] : pin) u.insert(to);
        return {u.begin(), u.end()};
    }

    bool iso_prechecks(const VarMap& pin) const {
        if (q1_.constants() != q2_.constants()) return false;
        if (q1_.variables().size() != q2_.variables().size()) return false;
        if (q1_.atoms.size() != q2_.atoms.size()) return false;
        if (q1_.comparisons.size() != q2_.comparisons.size()) return false;
        std::set<Term> images;
        for (const auto& [from, to] : pin)
            if (from.is_var() && !images.insert(to).second) return false;
        return true;
    }

    void index_readiness() {
        std::map<Term, int> pos;
        for (std::size_t i = 0; i < vars_.size(); ++i) pos[vars_[i]] = static_cast<int>(i);
        atoms_ready_.assign(vars_.size(), {});
        comps_ready_.assign(vars_.size(), {});
        for (const auto& a : q1_.atoms) {
            int p = -1;
            for (const auto& t : a.args)
                if (t.is_var()) p = std::max(p, pos.at(t));
            if (p >= 0) atoms_ready_[p].push_back(&a);
        }
        for (const auto& c : q1_.comparisons.comparisons) {
            int p = -1;
            if (c.lhs.is_var()) p = std::max(p, pos.at(c.lhs));
            if (c.rhs.is_var()) p = std::max(p, pos.at(c.rhs));
            if (p >= 0) comps_ready_[p].push_back(&c);
        }
    }

    Term mapped(const Term& t) const { return t.is_const() ? t : h_.at(t); }

    bool atom_ok(const Atom& a) const {
        Atom img;
        img.relation = a.relation;
        img.args.reserve(a.args.size());
        for (const auto& t : a.args) img.args.push_back(mapped(t));
        return atoms2_.count(img) != 0;
    }

    bool comparison_ok(const Comparison& c) const {
        Term l = mapped(c.lhs), r = mapped(c.rhs);
        if (iso_) return q2_.comparisons.contains({l, c.op, r});
        return closure2_.entails(l, c.op, r);
    }

    bool constraints_ok(std::size_t i) const {
        for (const Atom* a : atoms_ready_[i])
            if (!atom_ok(*a)) return false;
        for (const Comparison* c : comps_ready_[i])
            if (!comparison_ok(*c)) return false;
        return true;
    }

    bool backtrack(std::size_t i) {
        if (i == vars_.size()) return true;
        const Term& v = vars_[i];

        auto pinned = h_.find(v);
        if (pinned != h_.end()) {
            if (!constraints_ok(i)) return false;
            return backtrack(i + 1);
        }
        auto fit = options_.forbidden.find(v);
        for (const auto& target : candidates_) {
            if (iso_) {
                if (target.is_const()) continue; // variables map to variables
                if (used_.count(target)) continue;
            }
            if (fit != options_.forbidden.end() && fit->second.count(target)) continue;
            h_[v] = target;
            if (constraints_ok(i)) {
                if (iso_) used_.insert(target);
                if (backtrack(i + 1)) return true;
                if (iso_) used_.erase(target);
            }
            h_.erase(v);
        }
        return false;
    }

    const Query& q1_;
    const Query& q2_;
    HomOptions options_;
    bool iso_;
    std::set<Atom> atoms2_;
    std::vector<Term> candidates_;
    OrderClosure closure2_;
    std::vector<Term> vars_;
    std::vector<std::vector<const Atom*>> atoms_ready_;
    std::vector<std::vector<const Comparison*>> comps_ready_;
    VarMap h_;
    std::set<Term> used_;
};

} // namespace

std::optional<VarMap> find_homomorphism(const Query& q1, const Query& q2, const VarMap& pin,
                                        const HomOptions& options) {
    return Search(q1, q2, pin, options, false).run(pin);
}

std::optional<VarMap> find_isomorphism(const Query& q1, const Query& q2, const VarMap& pin) {
    return Search(q1, q2, pin, {}, true).run(pin);
}

std::optional<VarMap> positional_pin(const Query& q1, const Query& q2, bool include_aggregate) {
    if (q1.disting.size() != q2.disting.size()) return std::nullopt;
    VarMap pin;
    auto put = [&](const Term& from, const Term& to) {
        auto [it, fresh] = pin.emplace(from, to);
        return fresh || it->second == to;
    };
    for (std::size_t i = 0; i < q1.disting.size(); ++i)
        if (!put(q1.disting[i], q2.disting[i])) return std::nullopt;
    if (include_aggregate) {
        if (q1.aggregate.vars.size() != q2.aggregate.vars.size()) return std::nullopt;
        for (std::size_t i = 0; i < q1.aggregate.vars.size(); ++i)
            if (!put(q1.aggregate.vars[i], q2.aggregate.vars[i])) return std::nullopt;
    }
    return pin;
}

Query extend(const Query& q) {
    Query out = q;
    out.comparisons = closure(q.comparisons, q.all_terms());
    out.canonicalize();
    return out;
}

} // namespace cdeq
