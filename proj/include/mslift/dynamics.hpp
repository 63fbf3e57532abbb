#ifndef MSLIFT_DYNAMICS_HPP
#define MSLIFT_DYNAMICS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <variant>
#include <vector>

#include "mslift/distributions.hpp"
#include "mslift/errors.hpp"
#include "mslift/lifted_state.hpp"
#include "mslift/multiset.hpp"

namespace mslift {

/// Constraint on a single bound entity.
struct Constraint {
    enum class Kind { Has, Eq, In, And };

    Kind kind = Kind::And;
    Property property;
    std::vector<Value> values; ///< Eq: exactly one value; In: the admissible set
    std::vector<Constraint> children;

    static Constraint has(Property p) { return Constraint{Kind::Has, std::move(p), {}, {}}; }
    static Constraint eq(Property p, Value v) { return Constraint{Kind::Eq, std::move(p), {std::move(v)}, {}}; }
    static Constraint in(Property p, std::vector<Value> vs) { return Constraint{Kind::In, std::move(p), std::move(vs), {}}; }
    static Constraint all(std::vector<Constraint> cs) { return Constraint{Kind::And, {}, {}, std::move(cs)}; }

    friend bool operator==(const Constraint&, const Constraint&) = default;
};

inline void collect_properties(const Constraint& c, std::set<Property>& out) {
    if (c.kind == Constraint::Kind::And) {
        for (const auto& ch : c.children) collect_properties(ch, out);
    } else {
        out.insert(c.property);
    }
}

enum class Truth { Sat, Unsat, Indeterminate };

struct Evaluation {
    Truth truth = Truth::Sat;
    Property property; ///< set when Indeterminate: the property whose urn must be split
    Label label;
};

/**
 * Three-valued evaluation of a constraint against an entity structure.
 * Sat/Unsat when every value of nonzero probability agrees, otherwise
 * Indeterminate carrying the property with the smallest name to split on.
 */
inline Evaluation eval_constraint(const Constraint& c, const EntityStructure& e, const Context& ctx) {
    using K = Constraint::Kind;
    if (c.kind == K::And) {
        std::optional<Evaluation> pending;
        for (const auto& ch : c.children) {
            Evaluation ev = eval_constraint(ch, e, ctx);
            if (ev.truth == Truth::Unsat) return ev;
            if (ev.truth == Truth::Indeterminate && (!pending || ev.property < pending->property)) pending = ev;
        }
        return pending ? *pending : Evaluation{};
    }

    auto it = e.find(c.property);
    if (it == e.end()) return Evaluation{Truth::Unsat, {}, {}};
    if (c.kind == K::Has) return Evaluation{};

    auto rep = ctx.find(it->second);
    if (rep == ctx.end()) throw ModelError("label '" + it->second + "' is referenced but not bound in the context");
    auto admits = [&](const Value& v) { return std::find(c.values.begin(), c.values.end(), v) != c.values.end(); };

    if (const auto* d = std::get_if<Dirac>(&rep->second))
        return Evaluation{admits(d->value) ? Truth::Sat : Truth::Unsat, {}, {}};
    if (const auto* u = std::get_if<Urn>(&rep->second)) {
        std::size_t matching = 0;
        for (const auto& [v, n] : u->values)
            if (admits(v)) matching += n;
        if (matching == u->values.size()) return Evaluation{};
        if (matching == 0) return Evaluation{Truth::Unsat, {}, {}};
        return Evaluation{Truth::Indeterminate, c.property, it->second};
    }
    throw UnsupportedOperation("value constraint on Gaussian-distributed property '" + c.property + "'");
}

/// Constraint evaluation on a fully valued entity.
inline bool holds(const Constraint& c, const GroundEntity& e) {
    using K = Constraint::Kind;
    if (c.kind == K::And)
        return std::all_of(c.children.begin(), c.children.end(), [&](const Constraint& ch) { return holds(ch, e); });
    auto it = e.find(c.property);
    if (it == e.end()) return false;
    if (c.kind == K::Has) return true;
    return std::find(c.values.begin(), c.values.end(), it->second) != c.values.end();
}

/// Entity inserted by an Add effect; its labels are private to the template.
struct EntityTemplate {
    EntityStructure properties;
    Context context;

    friend bool operator==(const EntityTemplate&, const EntityTemplate&) = default;
};

struct Effect {
    enum class Kind { Set, Remove, Add, Shift };

    Kind kind = Kind::Set;
    std::size_t slot = 0;
    Property property;
    Value value;
    EntityTemplate entity;
    double delta = 0.0;
    double added_variance = 0.0;

    static Effect set(std::size_t slot, Property p, Value v) {
        Effect e;
        e.kind = Kind::Set;
        e.slot = slot;
        e.property = std::move(p);
        e.value = std::move(v);
        return e;
    }
    static Effect remove(std::size_t slot) {
        Effect e;
        e.kind = Kind::Remove;
        e.slot = slot;
        return e;
    }
    static Effect add(EntityTemplate t) {
        Effect e;
        e.kind = Kind::Add;
        e.entity = std::move(t);
        return e;
    }
    /// Linear-Gaussian move: x -> x + delta with added_variance process noise.
    static Effect shift(std::size_t slot, Property p, double delta, double added_variance) {
        Effect e;
        e.kind = Kind::Shift;
        e.slot = slot;
        e.property = std::move(p);
        e.delta = delta;
        e.added_variance = added_variance;
        return e;
    }

    friend bool operator==(const Effect&, const Effect&) = default;
};

struct Action {
    std::string name;
    double weight = 1.0;
    std::vector<Constraint> preconditions;
    std::vector<Effect> effects;

    std::size_t arity() const noexcept { return preconditions.size(); }

    friend bool operator==(const Action&, const Action&) = default;
};

/// Throws ModelError for non-positive weights, bad slot indices, effects on
/// removed slots and malformed Add templates.
inline void validate(const Action& a) {
    if (!(a.weight > 0.0) || !std::isfinite(a.weight))
        throw ModelError("action '" + a.name + "': weight must be positive");
    std::vector<bool> removed(a.arity(), false);
    for (const auto& eff : a.effects) {
        if (eff.kind == Effect::Kind::Add) {
            Structure s;
            s.insert(eff.entity.properties);
            validate(LiftedState{s, eff.entity.context});
            continue;
        }
        if (eff.slot >= a.arity())
            throw ModelError("action '" + a.name + "': effect references slot " + std::to_string(eff.slot) +
                             " but the action has " + std::to_string(a.arity()) + " preconditions");
        if (removed[eff.slot])
            throw ModelError("action '" + a.name + "': effect references removed slot " + std::to_string(eff.slot));
        if (eff.kind == Effect::Kind::Remove) removed[eff.slot] = true;
        if (eff.kind == Effect::Kind::Shift && (eff.added_variance < 0.0 || !std::isfinite(eff.delta)))
            throw ModelError("action '" + a.name + "': shift needs a finite delta and non-negative variance");
    }
}

/// An action bound to entity structures of one lifted state, one per precondition slot.
struct ActionInstance {
    std::size_t action = 0;
    std::vector<EntityStructure> binding;

    friend bool operator==(const ActionInstance&, const ActionInstance&) = default;
    friend bool operator<(const ActionInstance& a, const ActionInstance& b) {
        return std::tie(a.action, a.binding) < std::tie(b.action, b.binding);
    }
};

struct CompoundAction {
    Multiset<ActionInstance> instances;

    friend bool operator==(const CompoundAction&, const CompoundAction&) = default;
};

struct WeightedCompound {
    CompoundAction compound;
    double weight = 0.0;      ///< W(k) = N(k,t) * prod weight^multiplicity
    double probability = 0.0; ///< W(k) normalized over all applicable maximal compounds
};

struct EngineOptions {
    std::size_t split_budget = 1'000'000;
    std::size_t amca_budget = 1'000'000;
};

struct EngineCounters {
    std::size_t splits = 0;
    std::size_t amcas = 0;
};

using WeightedStates = std::vector<std::pair<LiftedState, double>>;

/// Result of splitting a single slot off an urn.
struct SlotSplit {
    Context context;
    EntityStructure entity;
    Value value;
    double probability = 0.0;
};

/**
 * Urn split of one detached entity copy on property q: one branch per distinct
 * value v, in which the copy's q points to a fresh label bound to δ_v and the
 * shared urn loses one copy of v.
 */
inline std::vector<SlotSplit> split_slot(const Context& ctx, const EntityStructure& entity, const Property& q,
                                         FreshLabels& fresh) {
    auto pit = entity.find(q);
    if (pit == entity.end()) throw InvalidInput("entity has no property '" + q + "' to split on");
    const Label& d = pit->second;
    auto rep = ctx.find(d);
    if (rep == ctx.end()) throw ModelError("label '" + d + "' is referenced but not bound in the context");
    const auto* u = std::get_if<Urn>(&rep->second);
    if (u == nullptr) throw InvalidInput("property '" + q + "' is not urn-distributed");

    std::vector<SlotSplit> out;
    for (auto& b : urn_split(*u).branches) {
        SlotSplit s;
        s.context = ctx;
        if (b.remaining)
            s.context[d] = *b.remaining;
        else
            s.context.erase(d);
        Label fresh_label = fresh.next(s.context);
        s.context.emplace(fresh_label, b.split_off);
        s.entity = entity;
        s.entity[q] = fresh_label;
        s.value = b.split_off.value;
        s.probability = b.probability;
        out.push_back(std::move(s));
    }
    return out;
}

/// Splits one copy of entity e in l on property q; branches are canonicalized.
inline WeightedStates split_urn(const LiftedState& l, const EntityStructure& e, const Property& q) {
    LiftedState rest = l;
    if (rest.structure.erase(e) != 1) throw InvalidInput("entity to split is not part of the structure");
    FreshLabels fresh;
    WeightedStates out;
    for (auto& s : split_slot(rest.context, e, q, fresh)) {
        LiftedState b{rest.structure, std::move(s.context)};
        b.structure.insert(s.entity);
        out.emplace_back(canonicalize(b), s.probability);
    }
    return out;
}

/**
 * Splits until every constraint is determinate for every entity structure.
 * The entity with the smallest canonical position, then the smallest property
 * name, is split first. Branch probabilities multiply along the split tree.
 */
inline WeightedStates split_to_determinacy(const LiftedState& l, const std::vector<Constraint>& constraints,
                                           const EngineOptions& options = {}, EngineCounters* counters = nullptr) {
    WeightedStates out;
    std::size_t produced = 0;
    auto recurse = [&](auto&& self, const LiftedState& s, double p) -> void {
        for (const auto& [entity, n] : s.structure) {
            std::optional<Evaluation> best;
            for (const auto& c : constraints) {
                Evaluation ev = eval_constraint(c, entity, s.context);
                if (ev.truth == Truth::Indeterminate && (!best || ev.property < best->property)) best = ev;
            }
            if (!best) continue;
            auto branches = split_urn(s, entity, best->property);
            if (counters) ++counters->splits;
            produced += branches.size();
            if (produced > options.split_budget) throw ResourceLimit("split budget exceeded", produced);
            for (const auto& [b, bp] : branches) self(self, b, p * bp);
            return;
        }
        out.emplace_back(s, p);
    };
    recurse(recurse, canonicalize(l), 1.0);
    return out;
}

inline WeightedStates split_to_determinacy(const LiftedState& l, const std::vector<Action>& actions,
                                           const EngineOptions& options = {}, EngineCounters* counters = nullptr) {
    std::vector<Constraint> all;
    for (const auto& a : actions) all.insert(all.end(), a.preconditions.begin(), a.preconditions.end());
    return split_to_determinacy(l, all, options, counters);
}

/// All bindings of entity-structure types to the action's slots such that every
/// slot is satisfied and the joint usage fits the multiplicities. Slots are
/// ordered, so (p, q) and (q, p) are distinct instances.
inline std::vector<ActionInstance> enumerate_instances(const LiftedState& l, const Action& a,
                                                       std::size_t action_index = 0) {
    std::vector<std::pair<const EntityStructure*, std::size_t>> entries;
    for (const auto& [e, n] : l.structure) entries.emplace_back(&e, n);

    const std::size_t r = a.arity();
    std::vector<std::vector<std::size_t>> candidates(r);
    for (std::size_t slot = 0; slot < r; ++slot)
        for (std::size_t i = 0; i < entries.size(); ++i) {
            Evaluation ev = eval_constraint(a.preconditions[slot], *entries[i].first, l.context);
            if (ev.truth == Truth::Indeterminate)
                throw InvalidInput("action '" + a.name + "': precondition is indeterminate on property '" +
                                   ev.property + "'; split first");
            if (ev.truth == Truth::Sat) candidates[slot].push_back(i);
        }

    std::vector<ActionInstance> out;
    std::vector<std::size_t> used(entries.size(), 0);
    std::vector<EntityStructure> binding;
    auto recurse = [&](auto&& self, std::size_t slot) -> void {
        if (slot == r) {
            out.push_back(ActionInstance{action_index, binding});
            return;
        }
        for (std::size_t i : candidates[slot]) {
            if (used[i] == entries[i].second) continue;
            ++used[i];
            binding.push_back(*entries[i].first);
            self(self, slot + 1);
            binding.pop_back();
            --used[i];
        }
    };
    recurse(recurse, 0);
    return out;
}

/**
 * Applicable maximal compound actions with their probabilities.
 *
 * Compounds are built by inserting instances in non-decreasing index order,
 * so each multiset is generated once; a node is recorded only when no
 * instance at all fits the remaining entities. Zero-arity instances occur at
 * most once. W(k) counts the injective assignments of individually labeled
 * entity copies to the slots of k, divided by the factorials of identical
 * instance multiplicities, times the product of action weights.
 * If nothing is applicable the empty compound is returned with probability 1.
 */
inline std::vector<WeightedCompound> enumerate_amca(const LiftedState& l, const std::vector<Action>& actions,
                                                    const EngineOptions& options = {},
                                                    EngineCounters* counters = nullptr) {
    std::map<EntityStructure, std::size_t> index;
    std::vector<std::size_t> available;
    for (const auto& [e, n] : l.structure) {
        index.emplace(e, available.size());
        available.push_back(n);
    }

    struct Candidate {
        ActionInstance instance;
        std::vector<std::pair<std::size_t, std::size_t>> demand; // (entity index, copies)
        bool zero_arity;
        double weight;
    };
    std::vector<Candidate> cands;
    for (std::size_t ai = 0; ai < actions.size(); ++ai)
        for (auto& inst : enumerate_instances(l, actions[ai], ai)) {
            std::map<std::size_t, std::size_t> d;
            for (const auto& e : inst.binding) ++d[index.at(e)];
            Candidate c{std::move(inst), {d.begin(), d.end()}, actions[ai].arity() == 0, actions[ai].weight};
            cands.push_back(std::move(c));
        }

    std::vector<std::size_t> remaining = available;
    std::vector<std::size_t> mult(cands.size(), 0);
    std::vector<WeightedCompound> found;
    std::size_t nodes = 0;

    auto fits = [&](std::size_t i) {
        if (cands[i].zero_arity) return mult[i] == 0;
        for (const auto& [ei, n] : cands[i].demand)
            if (remaining[ei] < n) return false;
        return true;
    };
    auto take = [&](std::size_t i, int dir) {
        for (const auto& [ei, n] : cands[i].demand) remaining[ei] = dir > 0 ? remaining[ei] - n : remaining[ei] + n;
        mult[i] = dir > 0 ? mult[i] + 1 : mult[i] - 1;
    };
    auto record = [&]() {
        WeightedCompound wc;
        double w = 1.0;
        for (std::size_t ei = 0; ei < available.size(); ++ei)
            for (std::size_t k = remaining[ei] + 1; k <= available[ei]; ++k) w *= static_cast<double>(k);
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (mult[i] == 0) continue;
            wc.compound.instances.insert(cands[i].instance, mult[i]);
            for (std::size_t k = 2; k <= mult[i]; ++k) w /= static_cast<double>(k);
            w *= std::pow(cands[i].weight, static_cast<double>(mult[i]));
        }
        wc.weight = w;
        found.push_back(std::move(wc));
    };
    auto dfs = [&](auto&& self, std::size_t start) -> void {
        if (++nodes > options.amca_budget) throw ResourceLimit("compound action enumeration budget exceeded", found.size());
        bool extendable = false;
        for (std::size_t i = 0; i < cands.size() && !extendable; ++i) extendable = fits(i);
        if (!extendable) {
            record();
            return;
        }
        for (std::size_t i = start; i < cands.size(); ++i) {
            if (!fits(i)) continue;
            take(i, +1);
            self(self, i);
            take(i, -1);
        }
    };
    dfs(dfs, 0);

    double total = 0.0;
    for (const auto& wc : found) total += wc.weight;
    for (auto& wc : found) wc.probability = wc.weight / total;
    if (counters) counters->amcas += found.size();
    return found;
}

/**
 * Applies a compound action: removes every bound prerequisite, runs each
 * instance's effects on its bound copies, reinserts surviving copies and
 * added entities, and canonicalizes.
 */
inline LiftedState apply_compound(const CompoundAction& k, const LiftedState& l, const std::vector<Action>& actions) {
    LiftedState out = l;
    FreshLabels fresh;

    std::vector<std::pair<const ActionInstance*, std::size_t>> flat;
    for (const auto& [inst, m] : k.instances)
        for (std::size_t c = 0; c < m; ++c) {
            for (const auto& e : inst.binding)
                if (out.structure.erase(e) != 1) throw InvalidInput("compound action is not applicable to the state");
            flat.emplace_back(&inst, c);
        }

    for (const auto& [inst, copy] : flat) {
        const Action& a = actions.at(inst->action);
        std::vector<EntityStructure> bound = inst->binding;
        std::vector<bool> removed(bound.size(), false);
        for (const auto& eff : a.effects) {
            switch (eff.kind) {
            case Effect::Kind::Set: {
                Label fl = fresh.next(out.context);
                out.context.emplace(fl, Dirac{eff.value});
                bound.at(eff.slot)[eff.property] = fl;
                break;
            }
            case Effect::Kind::Remove:
                removed.at(eff.slot) = true;
                break;
            case Effect::Kind::Add: {
                EntityStructure e;
                std::map<Label, Label> renamed;
                for (const auto& [tl, rep] : eff.entity.context) {
                    Label fl = fresh.next(out.context);
                    out.context.emplace(fl, rep);
                    renamed.emplace(tl, fl);
                }
                for (const auto& [p, tl] : eff.entity.properties) e.emplace(p, renamed.at(tl));
                out.structure.insert(e);
                break;
            }
            case Effect::Kind::Shift: {
                auto& entity = bound.at(eff.slot);
                auto pit = entity.find(eff.property);
                if (pit == entity.end())
                    throw ModelError("action '" + a.name + "': shift of missing property '" + eff.property + "'");
                const DistributionRep& rep = out.context.at(pit->second);
                DistributionRep moved;
                if (const auto* g = std::get_if<Gaussian>(&rep)) {
                    moved = Gaussian{g->mean + eff.delta, g->variance + eff.added_variance};
                } else if (const auto* d = std::get_if<Dirac>(&rep)) {
                    const double x = as_real(d->value) + eff.delta;
                    if (eff.added_variance > 0.0)
                        moved = Gaussian{x, eff.added_variance};
                    else
                        moved = Dirac{x};
                } else {
                    throw UnsupportedOperation("shift of urn-distributed property '" + eff.property + "'");
                }
                Label fl = fresh.next(out.context);
                out.context.emplace(fl, std::move(moved));
                pit->second = fl;
                break;
            }
            }
        }
        for (std::size_t s = 0; s < bound.size(); ++s)
            if (!removed[s]) out.structure.insert(bound[s]);
    }
    return canonicalize(out);
}

/// Lifted predict step: split, enumerate compounds, apply, merge successors.
inline LiftedDistribution predict(const LiftedDistribution& d, const std::vector<Action>& actions,
                                  const EngineOptions& options = {}, EngineCounters* counters = nullptr) {
    LiftedDistribution out;
    for (const auto& entry : d)
        for (const auto& [branch, p] : split_to_determinacy(entry.state, actions, options, counters))
            for (const auto& wc : enumerate_amca(branch, actions, options, counters))
                out.insert(apply_compound(wc.compound, branch, actions), entry.weight * p * wc.probability);
    if (!out.empty()) out.normalize();
    return out;
}

} // namespace mslift

#endif
