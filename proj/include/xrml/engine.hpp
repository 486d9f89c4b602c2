#pragma once

// The authorization algorithms.
//
// Corrected mode implements Query2/Auth2/Holds2: Auth2 takes the exclusion
// set E and admits a license grant into R' by re-running the full query for
// Perm(p, issue, g); Holds2 carries the set S of Said conditions currently
// under evaluation and cuts cycles by answering false on re-entry.  Exact
// conclusion matching throughout.
//
// Legacy mode implements the original Query/Auth/Holds: the subset assumption
// in Auth's conclusion matching, the R'' check run against L - {(p, g)}, and
// no S set in Holds.  Legacy runs only under a fuel budget, which makes the
// nonterminating inputs report fuel exhaustion deterministically.
//
// Evaluation order is fixed everywhere: statement order from the license
// file, then substitution enumeration order.  Antecedent-only resource
// variables range over a lazily grown grant pool (closed grants mentioned in
// the input first, then principal-wrapped grants level by level); pulls
// beyond the input-derived level consume fuel.

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <unordered_set>

#include "xrml/ast.hpp"
#include "xrml/printer.hpp"
#include "xrml/substitution.hpp"
#include "xrml/trace.hpp"

namespace xrml {

class BadQueryError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

enum class EngineMode { Corrected, Legacy };

struct EngineOptions {
    EngineMode mode = EngineMode::Corrected;
    uint64_t fuel = 10'000'000;  // one unit per algorithm invocation
    int max_depth = 4000;        // recursion guard, reported as fuel exhaustion
    UnionMode union_mode = UnionMode::Free;
    bool capture_trace = true;
    bool harvest = true;  // collect A(e, L, R, E, X)
};

struct EngineStats {
    uint64_t fuel_used = 0;
    int max_holds_height = 0;  // height in edges of the largest Holds call tree
    size_t query_calls = 0;
    size_t auth_calls = 0;
    size_t holds_calls = 0;
};

struct EngineOutcome {
    Verdict verdict = Verdict::False;
    std::shared_ptr<CallTree> trace;
    std::vector<GrantPtr> resources_touched;  // A(e, L, R, E, X), call order
    EngineStats stats;
};

struct AuthResult {
    std::vector<CondPtr> conditions;
    Verdict status = Verdict::True;  // FuelExhausted when enumeration was cut
    std::shared_ptr<CallTree> trace;
    std::vector<GrantPtr> resources_touched;
    EngineStats stats;
};

namespace engine_detail {

struct FuelExhausted {};

struct MemoKey {
    ConcPtr goal;
    std::vector<ConcPtr> excluded;  // sorted by compare()
    size_t hash = 0;

    static MemoKey make(const ConcPtr& g, const std::vector<ConcPtr>& e) {
        MemoKey k;
        k.goal = g;
        k.excluded = e;
        std::sort(k.excluded.begin(), k.excluded.end(),
                  [](const ConcPtr& a, const ConcPtr& b) { return compare(a, b) < 0; });
        k.hash = g->hash_;
        for (const auto& c : k.excluded) k.hash = detail::hash_combine(k.hash, c->hash_);
        return k;
    }
    bool operator==(const MemoKey& o) const {
        if (hash != o.hash || excluded.size() != o.excluded.size()) return false;
        if (!equal(goal, o.goal)) return false;
        for (size_t i = 0; i < excluded.size(); ++i)
            if (!equal(excluded[i], o.excluded[i])) return false;
        return true;
    }
};

struct MemoKeyHash {
    size_t operator()(const MemoKey& k) const { return k.hash; }
};

struct RItem {
    GrantPtr grant;
    int seq;
};

class Engine {
   public:
    Engine(const Declarations& decls, const Query& q, EngineOptions opt)
        : decls_(decls), q_(q), opt_(opt) {
        mctx_.principal_universe = decls.principals;
        mctx_.mode = opt.union_mode;
        prange_ = principal_range(mctx_);
        seed_pool();
    }

    EngineOutcome run() {
        reject_negation();
        EngineOutcome out;
        begin_root();
        try {
            bool v = opt_.mode == EngineMode::Corrected
                         ? query2(q_.goal, q_.excluded)
                         : legacy_query(q_.goal);
            out.verdict = v ? Verdict::True : Verdict::False;
        } catch (const FuelExhausted&) {
            out.verdict = Verdict::FuelExhausted;
        }
        finish(out);
        return out;
    }

    EngineOutcome run_holds(const CondPtr& d, const std::vector<CondPtr>& S) {
        reject_negation_cond(d);
        EngineOutcome out;
        begin_root();
        try {
            bool v;
            if (opt_.mode == EngineMode::Corrected) {
                v = holds2(d, S).verdict;
            } else {
                v = legacy_holds(d, q_.licenses).verdict;
            }
            out.verdict = v ? Verdict::True : Verdict::False;
        } catch (const FuelExhausted&) {
            out.verdict = Verdict::FuelExhausted;
        }
        finish(out);
        return out;
    }

    AuthResult run_auth() {
        reject_negation();
        AuthResult out;
        begin_root();
        try {
            if (opt_.mode == EngineMode::Corrected) {
                auto items = auth2_admit(q_.goal, q_.excluded);
                stream_conditions(items, q_.goal, q_.excluded, MatchMode::Exact,
                                  [&](const CondPtr& d) {
                                      out.conditions.push_back(d);
                                      return false;
                                  });
            } else {
                legacy_auth(q_.goal, q_.licenses, [&](const CondPtr& d) {
                    out.conditions.push_back(d);
                    return false;
                });
            }
            out.status = Verdict::True;
        } catch (const FuelExhausted&) {
            out.status = Verdict::FuelExhausted;
        }
        out.trace = root_;
        out.resources_touched = harvested_;
        out.stats = stats();
        return out;
    }

   private:
    // ---- bookkeeping ----

    struct HoldsResult {
        bool verdict;
        int height;
    };

    void begin_root() {
        if (opt_.capture_trace) {
            root_ = std::make_shared<CallTree>();
            root_->label = "run";
            root_->kind = CallTree::Kind::Call;
            stack_.push_back(root_.get());
        }
    }

    void finish(EngineOutcome& out) {
        if (root_) {
            root_->verdict = out.verdict;
            if (root_->children.size() == 1) {
                // drop the synthetic wrapper when it has a single call below
                out.trace = root_->children.front();
            } else {
                out.trace = root_;
            }
        }
        out.resources_touched = harvested_;
        out.stats = stats();
    }

    EngineStats stats() const {
        EngineStats s;
        s.fuel_used = fuel_used_;
        s.max_holds_height = max_holds_height_;
        s.query_calls = query_calls_;
        s.auth_calls = auth_calls_;
        s.holds_calls = holds_calls_;
        return s;
    }

    void charge() {
        if (fuel_used_ >= opt_.fuel) throw FuelExhausted{};
        ++fuel_used_;
    }

    struct DepthGuard {
        Engine& e;
        explicit DepthGuard(Engine& eng) : e(eng) {
            if (++e.depth_ > e.opt_.max_depth) {
                --e.depth_;
                throw FuelExhausted{};
            }
        }
        ~DepthGuard() { --e.depth_; }
    };

    class TraceScope {
       public:
        TraceScope(Engine& e, std::string label, CallTree::Kind kind)
            : e_(e), exceptions_(std::uncaught_exceptions()) {
            if (!e_.opt_.capture_trace) return;
            node_ = std::make_shared<CallTree>();
            node_->label = std::move(label);
            node_->kind = kind;
            node_->verdict = Verdict::False;
            if (!e_.stack_.empty()) e_.stack_.back()->children.push_back(node_);
            e_.stack_.push_back(node_.get());
        }
        ~TraceScope() {
            if (!node_) return;
            e_.stack_.pop_back();
            if (std::uncaught_exceptions() > exceptions_)
                node_->verdict = Verdict::FuelExhausted;
        }
        CallTree* node() { return node_.get(); }
        void set_verdict(bool v) {
            if (node_) node_->verdict = v ? Verdict::True : Verdict::False;
        }
        void set_kind(CallTree::Kind k) {
            if (node_) node_->kind = k;
        }

       private:
        Engine& e_;
        std::shared_ptr<CallTree> node_;
        int exceptions_;
    };

    void reject_negation() {
        if (mentions_negation(q_))
            throw BadQueryError("the evaluation algorithms do not handle negation; "
                                "use the logic translation instead");
    }
    void reject_negation_cond(const CondPtr& d) {
        if (detail::mentions_negation(d) || mentions_negation(q_))
            throw BadQueryError("the evaluation algorithms do not handle negation; "
                                "use the logic translation instead");
    }

    void harvest(const ConcPtr& e) {
        if (!opt_.harvest) return;
        tmp_resources_.clear();
        collect_closed_resources(e, tmp_resources_);
        for (auto& g : tmp_resources_) add_harvest(g);
    }
    void harvest(const CondPtr& d) {
        if (!opt_.harvest) return;
        tmp_resources_.clear();
        collect_closed_resources(d, tmp_resources_);
        for (auto& g : tmp_resources_) add_harvest(g);
    }
    void add_harvest(const GrantPtr& g) {
        if (harvest_seen_.insert(g).second) harvested_.push_back(g);
    }

    // ---- resource pool (candidates for antecedent-only resource variables) ----

    void seed_pool() {
        std::vector<GrantPtr> base;
        // Statement order, then the goal.
        size_t li = 0, ti = 0;
        auto add_grant = [&](const GrantPtr& g) {
            if (g->closed_ && !contains_grant(base, g)) base.push_back(g);
            std::vector<GrantPtr> nested;
            detail::collect_resources_grant(g, nested);
            for (auto& n : nested)
                if (!contains_grant(base, n)) base.push_back(n);
        };
        while (li < q_.licenses.size() || ti < q_.trusted.size()) {
            bool lic = ti == q_.trusted.size() ||
                       (li < q_.licenses.size() && q_.licenses[li].seq <= q_.trusted[ti].seq);
            if (lic)
                add_grant(q_.licenses[li++].grant);
            else
                add_grant(q_.trusted[ti++].grant);
        }
        if (q_.goal) {
            std::vector<GrantPtr> nested;
            collect_closed_resources(q_.goal, nested);
            for (auto& n : nested)
                if (!contains_grant(base, n)) base.push_back(n);
        }
        pool_ = std::move(base);
        pool_base_size_ = pool_.size();
        pool_level_begin_ = 0;
        pool_level_end_ = pool_.size();
        for (const auto& g : pool_) pool_seen_.insert(g);
    }

    // Returns the idx-th candidate, growing the pool by one wrapping level at
    // a time.  Pulls beyond the input-derived candidates consume fuel.
    GrantPtr pool_get(size_t idx) {
        while (idx >= pool_.size()) {
            if (!grow_pool()) return nullptr;
        }
        if (idx >= pool_base_size_) charge();
        return pool_[idx];
    }

    bool grow_pool() {
        if (decls_.principals.empty() || pool_level_begin_ == pool_level_end_) return false;
        size_t lo = pool_level_begin_, hi = pool_level_end_;
        for (size_t i = lo; i < hi; ++i) {
            for (const auto& p : decls_.principals) {
                GrantPtr wrapped = make_grant(
                    {}, make_true(),
                    make_permission(PrincipalTerm::singleton(p), Resource::make_grant(pool_[i])));
                if (pool_seen_.insert(wrapped).second) pool_.push_back(wrapped);
            }
        }
        pool_level_begin_ = hi;
        pool_level_end_ = pool_.size();
        return pool_level_end_ > pool_level_begin_;
    }

    // ---- candidate conditions (instantiated antecedents) ----

    using Sink = std::function<bool(const CondPtr&)>;  // true = stop

    bool grant_candidates(const GrantPtr& g, const ConcPtr& target, MatchMode mode,
                          const Sink& sink) {
        for (const auto& s0 : match_conclusion(g->consequent, target, mode, mctx_)) {
            std::vector<Variable> rest;
            for (const auto& b : g->binders)
                if (!s0.covers(b)) rest.push_back(b);
            CondPtr ante = subst(g->antecedent, s0);
            if (emit_rest(ante, rest, 0, sink)) return true;
        }
        return false;
    }

    bool emit_rest(const CondPtr& ante, const std::vector<Variable>& rest, size_t i,
                   const Sink& sink) {
        if (i == rest.size()) return sink(ante);
        const Variable& v = rest[i];
        if (v.sort == Sort::Principal) {
            for (const auto& val : prange_) {
                Substitution s;
                s.bind(v, GroundValue::principal(val));
                if (emit_rest(subst(ante, s), rest, i + 1, sink)) return true;
            }
            return false;
        }
        for (size_t idx = 0;; ++idx) {
            GrantPtr cand = pool_get(idx);
            if (!cand) return false;
            Substitution s;
            s.bind(v, GroundValue::resource(cand));
            if (emit_rest(subst(ante, s), rest, i + 1, sink)) return true;
        }
    }

    // Streams the deduplicated D set drawn from the given grants, statement
    // order first, substitution order second.
    bool stream_conditions(const std::vector<RItem>& items, const ConcPtr& target,
                           const std::vector<ConcPtr>& /*E*/, MatchMode mode, const Sink& sink) {
        std::unordered_set<CondPtr, CondPtrHash, CondPtrEq> seen;
        for (const auto& item : items) {
            bool stop = grant_candidates(item.grant, target, mode, [&](const CondPtr& d) {
                if (!seen.insert(d).second) return false;
                return sink(d);
            });
            if (stop) return true;
        }
        return false;
    }

    std::vector<RItem> trusted_items() const {
        std::vector<RItem> items;
        for (const auto& t : q_.trusted) items.push_back({t.grant, t.seq});
        return items;
    }

    static void sort_items(std::vector<RItem>& items) {
        std::stable_sort(items.begin(), items.end(),
                         [](const RItem& a, const RItem& b) { return a.seq < b.seq; });
    }

    // ---- corrected algorithms ----

    bool query2(const ConcPtr& e, const std::vector<ConcPtr>& E) {
        charge();
        DepthGuard depth(*this);
        ++query_calls_;
        harvest(e);

        MemoKey key = MemoKey::make(e, E);
        if (auto it = memo_.find(key); it != memo_.end()) {
            TraceScope scope(*this, "query2(" + print(e) + ") [memo]", CallTree::Kind::Leaf);
            scope.set_verdict(it->second);
            return it->second;
        }

        TraceScope scope(*this, "query2(" + print(e) + ")", CallTree::Kind::Call);
        std::vector<RItem> items = auth2_admit(e, E);
        bool found = false;
        stream_conditions(items, e, E, MatchMode::Exact, [&](const CondPtr& d) {
            if (holds2(d, {}).verdict) {
                found = true;
                return true;
            }
            return false;
        });
        scope.set_verdict(found);
        memo_.emplace(std::move(key), found);
        return found;
    }

    // Runs Auth2's admission phase and returns R' in statement order.  An
    // empty list signals e in E (Auth2 returns the empty set outright).
    std::vector<RItem> auth2_admit(const ConcPtr& e, const std::vector<ConcPtr>& E) {
        charge();
        DepthGuard depth(*this);
        ++auth_calls_;
        harvest(e);
        TraceScope scope(*this, "auth2(" + print(e) + ")", CallTree::Kind::Call);
        if (contains(E, e)) return {};
        std::vector<RItem> items = trusted_items();
        if (!q_.licenses.empty() && !some_license_matchable()) {
            // No grant anywhere concludes any Perm(p, issue, g) for a license
            // (p, g), so every admission query answers false without calling
            // Holds2, and the whole admission forest touches exactly the
            // license permissions.  Short-circuit with identical verdicts and
            // an identical harvested set.
            for (const auto& lic : q_.licenses)
                harvest(make_permission(lic.issuer, Resource::make_grant(lic.grant)));
        } else {
            std::vector<ConcPtr> E2 = E;
            E2.push_back(e);
            for (const auto& lic : q_.licenses) {
                ConcPtr perm = make_permission(lic.issuer, Resource::make_grant(lic.grant));
                if (query2(perm, E2)) items.push_back({lic.grant, lic.seq});
            }
        }
        sort_items(items);
        scope.set_verdict(!items.empty());
        return items;
    }

    bool some_license_matchable() {
        if (license_matchable_ < 0) {
            license_matchable_ = 0;
            for (const auto& lic : q_.licenses) {
                ConcPtr target = make_permission(lic.issuer, Resource::make_grant(lic.grant));
                bool hit = false;
                for (const auto& t : q_.trusted)
                    if (!match_conclusion(t.grant->consequent, target, MatchMode::Exact, mctx_)
                             .empty()) { hit = true; break; }
                if (!hit)
                    for (const auto& other : q_.licenses)
                        if (!match_conclusion(other.grant->consequent, target, MatchMode::Exact,
                                              mctx_)
                                 .empty()) { hit = true; break; }
                if (hit) {
                    license_matchable_ = 1;
                    break;
                }
            }
        }
        return license_matchable_ == 1;
    }

    HoldsResult holds2(const CondPtr& d, const std::vector<CondPtr>& S) {
        charge();
        DepthGuard depth(*this);
        ++holds_calls_;
        harvest(d);

        switch (d->kind) {
            case CondKind::True: {
                TraceScope scope(*this, "holds2(true)", CallTree::Kind::Leaf);
                scope.set_verdict(true);
                return note_height({true, 0});
            }
            case CondKind::Conj: {
                TraceScope scope(*this, "holds2(" + print(d) + ")", CallTree::Kind::And);
                bool all = true;
                int h = 0;
                for (const auto& part : d->conjuncts) {
                    HoldsResult r = holds2(part, S);
                    h = std::max(h, 1 + r.height);
                    if (!r.verdict) {
                        all = false;
                        break;
                    }
                }
                scope.set_verdict(all);
                return note_height({all, h});
            }
            case CondKind::Said:
                break;
            case CondKind::NegSaid:
                throw BadQueryError("negated Said reached the evaluation engine");
        }

        if (contains(S, d)) {
            TraceScope scope(*this, "holds2(" + print(d) + ") [in S]", CallTree::Kind::Leaf);
            scope.set_verdict(false);
            return note_height({false, 0});
        }

        TraceScope scope(*this, "holds2(" + print(d) + ")", CallTree::Kind::Leaf);
        std::vector<CondPtr> S2 = S;
        S2.push_back(d);
        std::vector<RItem> issued = issued_by(d->principal);
        bool found = false;
        int h = 0;
        bool any_child = false;
        std::unordered_set<CondPtr, CondPtrHash, CondPtrEq> seen;
        for (const auto& item : issued) {
            bool stop = grant_candidates(item.grant, d->conclusion, MatchMode::Exact,
                                         [&](const CondPtr& cand) {
                                             if (!seen.insert(cand).second) return false;
                                             if (!any_child) {
                                                 any_child = true;
                                                 scope.set_kind(CallTree::Kind::Or);
                                             }
                                             HoldsResult r = holds2(cand, S2);
                                             h = std::max(h, 1 + r.height);
                                             if (r.verdict) {
                                                 found = true;
                                                 return true;
                                             }
                                             return false;
                                         });
            if (stop) break;
        }
        scope.set_verdict(found);
        return note_height({found, h});
    }

    HoldsResult note_height(HoldsResult r) {
        max_holds_height_ = std::max(max_holds_height_, r.height);
        return r;
    }

    std::vector<RItem> issued_by(const PrincipalTerm& p) const {
        std::vector<RItem> out;
        for (const auto& lic : q_.licenses) {
            // issuer is a ground singleton; membership in the ground set p
            if (lic.issuer.subset_of(p)) out.push_back({lic.grant, lic.seq});
        }
        return out;
    }

    // ---- legacy algorithms ----

    bool legacy_query(const ConcPtr& e) {
        charge();
        DepthGuard depth(*this);
        ++query_calls_;
        TraceScope scope(*this, "query(" + print(e) + ")", CallTree::Kind::Call);
        bool found = false;
        legacy_auth(e, q_.licenses, [&](const CondPtr& d) {
            if (legacy_holds(d, q_.licenses).verdict) {
                found = true;
                return true;
            }
            return false;
        });
        scope.set_verdict(found);
        return found;
    }

    // Streams Auth(e, licenses, R).  The R'' admission check evaluates both
    // its Auth and its Holds against L - {(p, g)}; the original pseudocode
    // reads Holds(d, L) but that contradicts the documented outcome of the
    // lost-license example, so the reduced set wins here.
    bool legacy_auth(const ConcPtr& e, const std::vector<License>& licenses, const Sink& sink) {
        charge();
        DepthGuard depth(*this);
        ++auth_calls_;
        TraceScope scope(*this, "auth(" + print(e) + ")", CallTree::Kind::Call);

        if (licenses.empty())
            return legacy_auth_base(e, trusted_items(), sink);

        std::vector<RItem> items = trusted_items();
        for (size_t i = 0; i < licenses.size(); ++i) {
            std::vector<License> rest;
            rest.reserve(licenses.size() - 1);
            for (size_t j = 0; j < licenses.size(); ++j)
                if (j != i) rest.push_back(licenses[j]);
            ConcPtr perm =
                make_permission(licenses[i].issuer, Resource::make_grant(licenses[i].grant));
            bool admitted = false;
            legacy_auth(perm, rest, [&](const CondPtr& d) {
                if (legacy_holds(d, rest).verdict) {
                    admitted = true;
                    return true;
                }
                return false;
            });
            if (admitted) items.push_back({licenses[i].grant, licenses[i].seq});
        }
        sort_items(items);
        return legacy_auth_base(e, items, sink);
    }

    bool legacy_auth_base(const ConcPtr& e, const std::vector<RItem>& items, const Sink& sink) {
        charge();  // the Auth(e, {}, R') invocation
        ++auth_calls_;
        std::unordered_set<CondPtr, CondPtrHash, CondPtrEq> seen;
        for (const auto& item : items) {
            bool stop = grant_candidates(item.grant, e, MatchMode::Subset, [&](const CondPtr& d) {
                if (!seen.insert(d).second) return false;
                return sink(d);
            });
            if (stop) return true;
        }
        return false;
    }

    HoldsResult legacy_holds(const CondPtr& d, const std::vector<License>& licenses) {
        charge();
        DepthGuard depth(*this);
        ++holds_calls_;

        switch (d->kind) {
            case CondKind::True: {
                TraceScope scope(*this, "holds(true)", CallTree::Kind::Leaf);
                scope.set_verdict(true);
                return note_height({true, 0});
            }
            case CondKind::Conj: {
                TraceScope scope(*this, "holds(" + print(d) + ")", CallTree::Kind::And);
                bool all = true;
                int h = 0;
                for (const auto& part : d->conjuncts) {
                    HoldsResult r = legacy_holds(part, licenses);
                    h = std::max(h, 1 + r.height);
                    if (!r.verdict) {
                        all = false;
                        break;
                    }
                }
                scope.set_verdict(all);
                return note_height({all, h});
            }
            case CondKind::Said:
                break;
            case CondKind::NegSaid:
                throw BadQueryError("negated Said reached the evaluation engine");
        }

        TraceScope scope(*this, "holds(" + print(d) + ")", CallTree::Kind::Leaf);
        std::vector<RItem> issued;
        for (const auto& lic : licenses)
            if (lic.issuer.subset_of(d->principal)) issued.push_back({lic.grant, lic.seq});
        bool found = false;
        int h = 0;
        bool any_child = false;
        std::unordered_set<CondPtr, CondPtrHash, CondPtrEq> seen;
        for (const auto& item : issued) {
            bool stop = grant_candidates(item.grant, d->conclusion, MatchMode::Exact,
                                         [&](const CondPtr& cand) {
                                             if (!seen.insert(cand).second) return false;
                                             if (!any_child) {
                                                 any_child = true;
                                                 scope.set_kind(CallTree::Kind::Or);
                                             }
                                             HoldsResult r = legacy_holds(cand, licenses);
                                             h = std::max(h, 1 + r.height);
                                             if (r.verdict) {
                                                 found = true;
                                                 return true;
                                             }
                                             return false;
                                         });
            if (stop) break;
        }
        scope.set_verdict(found);
        return note_height({found, h});
    }

    friend EngineOutcome run_holds_entry(Engine&, const CondPtr&, const std::vector<CondPtr>&);

    const Declarations& decls_;
    const Query& q_;
    EngineOptions opt_;
    MatchContext mctx_;
    std::vector<PrincipalTerm> prange_;

    uint64_t fuel_used_ = 0;
    int depth_ = 0;
    int max_holds_height_ = 0;
    size_t query_calls_ = 0, auth_calls_ = 0, holds_calls_ = 0;

    std::vector<GrantPtr> pool_;
    size_t pool_base_size_ = 0;
    size_t pool_level_begin_ = 0;
    size_t pool_level_end_ = 0;
    std::unordered_set<GrantPtr, GrantPtrHash, GrantPtrEq> pool_seen_;

    std::unordered_map<MemoKey, bool, MemoKeyHash> memo_;
    int license_matchable_ = -1;  // lazily computed tri-state
    std::vector<GrantPtr> harvested_;
    std::unordered_set<GrantPtr, GrantPtrHash, GrantPtrEq> harvest_seen_;
    std::vector<GrantPtr> tmp_resources_;

    std::shared_ptr<CallTree> root_;
    std::vector<CallTree*> stack_;
};

}  // namespace engine_detail

// ---- public entry points --------------------------------------------------

// Query2(e, L, R, E).
inline EngineOutcome query2(const Declarations& decls, const Query& q,
                            EngineOptions opt = {}) {
    opt.mode = EngineMode::Corrected;
    engine_detail::Engine e(decls, q, opt);
    return e.run();
}

// Auth2(e, L, R, E): the instantiated-antecedent set D, in evaluation order.
inline AuthResult auth2(const Declarations& decls, const Query& q, EngineOptions opt = {}) {
    opt.mode = EngineMode::Corrected;
    engine_detail::Engine e(decls, q, opt);
    return e.run_auth();
}

// Holds2(d, L, S).
inline EngineOutcome holds2(const Declarations& decls, const CondPtr& d,
                            const std::vector<License>& licenses,
                            const std::vector<CondPtr>& S = {}, EngineOptions opt = {}) {
    opt.mode = EngineMode::Corrected;
    Query q;
    q.licenses = licenses;
    engine_detail::Engine e(decls, q, opt);
    return e.run_holds(d, S);
}

// Legacy Query(e, L, R) under a fuel budget.
inline EngineOutcome legacy_query(const Declarations& decls, const Query& q, uint64_t fuel,
                                  EngineOptions opt = {}) {
    opt.mode = EngineMode::Legacy;
    opt.fuel = fuel;
    engine_detail::Engine e(decls, q, opt);
    return e.run();
}

// Legacy Auth(e, L, R) under a fuel budget.
inline AuthResult legacy_auth(const Declarations& decls, const Query& q, uint64_t fuel,
                              EngineOptions opt = {}) {
    opt.mode = EngineMode::Legacy;
    opt.fuel = fuel;
    engine_detail::Engine e(decls, q, opt);
    return e.run_auth();
}

// Legacy Holds(d, L) under a fuel budget.
inline EngineOutcome legacy_holds(const Declarations& decls, const CondPtr& d,
                                  const std::vector<License>& licenses, uint64_t fuel,
                                  EngineOptions opt = {}) {
    opt.mode = EngineMode::Legacy;
    opt.fuel = fuel;
    Query q;
    q.licenses = licenses;
    engine_detail::Engine e(decls, q, opt);
    return e.run_holds(d, {});
}

}  // namespace xrml
