#ifndef MSLIFT_GROUND_ORACLE_HPP
#define MSLIFT_GROUND_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "mslift/dynamics.hpp"
#include "mslift/errors.hpp"
#include "mslift/lifted_state.hpp"
#include "mslift/observation.hpp"

// Exact propositional filter by complete enumeration of ground states. Entity
// copies are labeled individually while compound actions are enumerated, so
// compound probabilities come from direct counting.

namespace mslift {

using GroundDistribution = GroundMixture;

class ImpossibleGroundObservation : public ImpossibleObservationError {
public:
    ImpossibleGroundObservation(const std::string& what, GroundDistribution prior)
        : ImpossibleObservationError(what), prior_(std::move(prior)) {}

    const GroundDistribution& prior() const noexcept { return prior_; }

private:
    GroundDistribution prior_;
};

/// An action bound to individually labeled entity copies of a ground state.
struct LabeledInstance {
    std::size_t action = 0;
    std::vector<std::size_t> copies;
};

/// Maximal applicable sets of labeled instances, each with its weight product.
struct LabeledCompound {
    std::vector<std::size_t> instances; ///< indices into the labeled instance list
    double weight = 1.0;
};

struct LabeledEnumeration {
    std::vector<const GroundEntity*> copies;
    std::vector<LabeledInstance> instances;
    std::vector<LabeledCompound> compounds;
};

inline LabeledEnumeration enumerate_labeled_compounds(const GroundState& s, const std::vector<Action>& actions,
                                                      const EngineOptions& options = {}) {
    LabeledEnumeration en;
    for (const auto& [e, n] : s)
        for (std::size_t c = 0; c < n; ++c) en.copies.push_back(&e);
    const std::size_t m = en.copies.size();

    for (std::size_t ai = 0; ai < actions.size(); ++ai) {
        const Action& a = actions[ai];
        std::vector<std::size_t> tuple;
        std::vector<bool> taken(m, false);
        auto recurse = [&](auto&& self, std::size_t slot) -> void {
            if (slot == a.arity()) {
                en.instances.push_back(LabeledInstance{ai, tuple});
                return;
            }
            for (std::size_t i = 0; i < m; ++i) {
                if (taken[i] || !holds(a.preconditions[slot], *en.copies[i])) continue;
                taken[i] = true;
                tuple.push_back(i);
                self(self, slot + 1);
                tuple.pop_back();
                taken[i] = false;
            }
        };
        recurse(recurse, 0);
    }

    std::vector<bool> used(m, false);
    std::vector<bool> chosen(en.instances.size(), false);
    std::vector<std::size_t> current;
    std::size_t nodes = 0;
    auto fits = [&](std::size_t i) {
        const auto& inst = en.instances[i];
        if (inst.copies.empty()) return !chosen[i];
        return std::none_of(inst.copies.begin(), inst.copies.end(), [&](std::size_t c) { return used[c]; });
    };
    auto mark = [&](std::size_t i, bool on) {
        chosen[i] = on;
        for (std::size_t c : en.instances[i].copies) used[c] = on;
    };
    auto dfs = [&](auto&& self, std::size_t start) -> void {
        if (++nodes > options.amca_budget)
            throw ResourceLimit("ground compound enumeration budget exceeded", en.compounds.size());
        bool extendable = false;
        for (std::size_t i = 0; i < en.instances.size() && !extendable; ++i) extendable = fits(i);
        if (!extendable) {
            LabeledCompound lc{current, 1.0};
            for (std::size_t i : current) lc.weight *= actions[en.instances[i].action].weight;
            en.compounds.push_back(std::move(lc));
            return;
        }
        for (std::size_t i = start; i < en.instances.size(); ++i) {
            if (!fits(i)) continue;
            mark(i, true);
            current.push_back(i);
            self(self, i + 1);
            current.pop_back();
            mark(i, false);
        }
    };
    dfs(dfs, 0);
    return en;
}

/// Successor distribution of applying one labeled compound (Add effects may draw values).
inline GroundMixture apply_labeled_compound(const LabeledEnumeration& en, const LabeledCompound& k,
                                            const std::vector<Action>& actions) {
    std::vector<bool> bound(en.copies.size(), false);
    for (std::size_t i : k.instances)
        for (std::size_t c : en.instances[i].copies) bound[c] = true;

    std::vector<GroundEntity> base;
    for (std::size_t c = 0; c < en.copies.size(); ++c)
        if (!bound[c]) base.push_back(*en.copies[c]);
    std::vector<GroundMixture> additions;

    for (std::size_t i : k.instances) {
        const auto& inst = en.instances[i];
        const Action& a = actions[inst.action];
        std::vector<GroundEntity> entities;
        for (std::size_t c : inst.copies) entities.push_back(*en.copies[c]);
        std::vector<bool> removed(entities.size(), false);
        for (const auto& eff : a.effects) {
            switch (eff.kind) {
            case Effect::Kind::Set:
                entities.at(eff.slot)[eff.property] = eff.value;
                break;
            case Effect::Kind::Remove:
                removed.at(eff.slot) = true;
                break;
            case Effect::Kind::Add: {
                Structure st;
                st.insert(eff.entity.properties);
                additions.push_back(ground_expand(LiftedState{st, eff.entity.context}));
                break;
            }
            case Effect::Kind::Shift: {
                if (eff.added_variance > 0.0)
                    throw UnsupportedOperation("ground oracle cannot represent Gaussian process noise");
                auto& v = entities.at(eff.slot).at(eff.property);
                v = as_real(v) + eff.delta;
                break;
            }
            }
        }
        for (std::size_t j = 0; j < entities.size(); ++j)
            if (!removed[j]) base.push_back(std::move(entities[j]));
    }

    GroundMixture out;
    GroundState partial;
    for (const auto& e : base) partial.insert(e);
    auto product = [&](auto&& self, std::size_t i, const GroundState& acc, double p) -> void {
        if (i == additions.size()) {
            out[acc] += p;
            return;
        }
        for (const auto& [added, q] : additions[i]) self(self, i + 1, multiset_union(acc, added), p * q);
    };
    product(product, 0, partial, 1.0);
    return out;
}

/// One-step successor distribution of a ground state.
inline GroundMixture ground_successors(const GroundState& s, const std::vector<Action>& actions,
                                       const EngineOptions& options = {}) {
    auto en = enumerate_labeled_compounds(s, actions, options);
    double total = 0.0;
    for (const auto& k : en.compounds) total += k.weight;
    GroundMixture out;
    for (const auto& k : en.compounds)
        for (const auto& [next, p] : apply_labeled_compound(en, k, actions)) out[next] += p * k.weight / total;
    return out;
}

inline GroundDistribution predict_ground(const GroundDistribution& d, const std::vector<Action>& actions,
                                         const EngineOptions& options = {}) {
    GroundDistribution out;
    for (const auto& [s, p] : d)
        for (const auto& [next, q] : ground_successors(s, actions, options)) out[next] += p * q;
    return out;
}

inline GroundDistribution update_ground(const GroundDistribution& d, const Observation& y) {
    GroundDistribution out;
    double total = 0.0;
    for (const auto& [s, p] : d) {
        const double w = p * observation_likelihood(s, y);
        if (w > 0.0) {
            out.emplace(s, w);
            total += w;
        }
    }
    if (!(total > 0.0)) throw ImpossibleGroundObservation("observation has zero likelihood under every ground state", d);
    for (auto& [s, p] : out) p /= total;
    return out;
}

struct CompareReport {
    double max_deviation = 0.0;
    std::size_t lifted_support = 0;
    std::size_t ground_support = 0;
    std::size_t only_in_lifted = 0;
    std::size_t only_in_ground = 0;

    bool matches(double tol) const { return max_deviation < tol && only_in_lifted == 0 && only_in_ground == 0; }
};

/// Expands the lifted side and reports the largest absolute probability
/// difference together with any support mismatch.
inline CompareReport compare(const LiftedDistribution& lifted, const GroundDistribution& ground, double tol = 1e-9) {
    const GroundMixture expanded = mixture_ground(lifted);
    CompareReport r;
    r.lifted_support = expanded.size();
    r.ground_support = ground.size();
    for (const auto& [s, p] : expanded) {
        auto it = ground.find(s);
        const double q = it == ground.end() ? 0.0 : it->second;
        if (it == ground.end() && p > tol) ++r.only_in_lifted;
        r.max_deviation = std::max(r.max_deviation, std::abs(p - q));
    }
    for (const auto& [s, q] : ground) {
        if (expanded.count(s) != 0) continue;
        if (q > tol) ++r.only_in_ground;
        r.max_deviation = std::max(r.max_deviation, q);
    }
    return r;
}

} // namespace mslift

#endif
