#ifndef MSLIFT_LIFTED_STATE_HPP
#define MSLIFT_LIFTED_STATE_HPP

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "mslift/distributions.hpp"
#include "mslift/errors.hpp"
#include "mslift/multiset.hpp"
#include "mslift/value.hpp"

namespace mslift {

using Property = std::string;
using Label = std::string;

/// Partial map from property names to labels.
using EntityStructure = std::map<Property, Label>;
using Structure = Multiset<EntityStructure>;
/// Label -> distribution representation (the value distribution of a structure).
using Context = std::map<Label, DistributionRep>;

using GroundEntity = std::map<Property, Value>;
using GroundState = Multiset<GroundEntity>;
/// Categorical distribution over ground states.
using GroundMixture = std::map<GroundState, double>;

struct LiftedState {
    Structure structure;
    Context context;

    friend bool operator==(const LiftedState&, const LiftedState&) = default;
};

inline std::map<Label, std::size_t> reference_counts(const Structure& s) {
    std::map<Label, std::size_t> refs;
    for (const auto& [entity, n] : s)
        for (const auto& [prop, label] : entity) refs[label] += n;
    return refs;
}

/// Throws ModelError unless every referenced label is bound and each binding
/// supports the number of slots that reference it.
inline void validate(const LiftedState& l) {
    for (const auto& [label, n] : reference_counts(l.structure)) {
        auto it = l.context.find(label);
        if (it == l.context.end()) throw ModelError("label '" + label + "' is referenced but not bound in the context");
        if (!is_exchangeable_joint(it->second, n))
            throw ModelError("label '" + label + "' is referenced by " + std::to_string(n) +
                             " slots but its distribution supports at most " + std::to_string(arity(it->second)));
    }
}

/// Produces labels that are not yet bound in a context.
class FreshLabels {
public:
    Label next(const Context& ctx) {
        Label l;
        do {
            l = "~" + std::to_string(counter_++);
        } while (ctx.count(l) != 0);
        return l;
    }

private:
    std::size_t counter_ = 0;
};

inline std::string to_string(const EntityStructure& e) {
    std::string s = "⟨";
    bool first = true;
    for (const auto& [p, l] : e) {
        if (!first) s += ", ";
        first = false;
        s += p + ":" + l;
    }
    return s + "⟩";
}

inline std::string to_string(const GroundEntity& e) {
    std::string s = "⟨";
    bool first = true;
    for (const auto& [p, v] : e) {
        if (!first) s += ", ";
        first = false;
        s += p + ":" + to_string(v);
    }
    return s + "⟩";
}

inline std::string to_string(const GroundState& s) {
    return to_string(s, [](const GroundEntity& e) { return to_string(e); });
}

inline std::string to_string(const LiftedState& l) {
    std::string s = to_string(l.structure, [](const EntityStructure& e) { return to_string(e); });
    s += " {";
    bool first = true;
    for (const auto& [label, rep] : l.context) {
        if (!first) s += ", ";
        first = false;
        s += label + "↦" + to_string(rep);
    }
    return s + "}";
}

struct CanonicalForm {
    LiftedState state;
    std::string key; ///< equal keys <=> isomorphic lifted states
};

namespace detail {

// Orderings beyond this many tie permutations fall back to a single
// (label-dependent) order; the result is still a valid relabeling.
inline constexpr std::size_t kMaxTiePermutations = 5040;

inline std::size_t factorial_capped(std::size_t n, std::size_t cap) {
    std::size_t f = 1;
    for (std::size_t i = 2; i <= n; ++i) {
        f *= i;
        if (f > cap) return cap + 1;
    }
    return f;
}

} // namespace detail

/**
 * Canonical relabeling of a lifted state.
 *
 * Unreferenced labels are pruned, single-valued urns become point masses and
 * point masses with equal values share one label. Entity structures are then
 * ordered by a label-independent signature (multiplicity, property names,
 * referenced distributions and their reference counts); entities with equal
 * signatures are tried in every order and the lexicographically smallest
 * first-seen labeling wins. Labels are renamed d0, d1, ... in that order.
 */
inline CanonicalForm canonical_form(const LiftedState& in) {
    auto refs = reference_counts(in.structure);
    Context ctx;
    std::map<Label, Label> rename;
    std::map<Value, Label> dirac_label;
    for (const auto& [label, rep] : in.context) {
        if (refs.count(label) == 0) continue;
        DistributionRep r = normalized(rep);
        if (const auto* d = std::get_if<Dirac>(&r)) {
            auto [it, inserted] = dirac_label.emplace(d->value, label);
            rename[label] = it->second;
            if (inserted) ctx.emplace(label, std::move(r));
        } else {
            rename[label] = label;
            ctx.emplace(label, std::move(r));
        }
    }

    Structure merged;
    for (const auto& [entity, n] : in.structure) {
        EntityStructure e;
        for (const auto& [prop, label] : entity) {
            auto it = rename.find(label);
            if (it == rename.end()) throw ModelError("label '" + label + "' is referenced but not bound in the context");
            e.emplace(prop, it->second);
        }
        merged.insert(e, n);
    }

    refs = reference_counts(merged);
    std::map<Label, std::string> key_of;
    for (const auto& [label, rep] : ctx) key_of.emplace(label, distribution_key(rep));

    struct Entry {
        const EntityStructure* entity;
        std::size_t count;
        std::string signature;
    };
    std::vector<Entry> entries;
    for (const auto& [entity, n] : merged) {
        std::string sig = std::to_string(n) + "|";
        for (const auto& [prop, label] : entity) {
            sig += prop;
            sig += '\x1e';
            sig += key_of.at(label);
            sig += '#';
            sig += std::to_string(refs.at(label));
            sig += '\x1d';
        }
        entries.push_back(Entry{&entity, n, std::move(sig)});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.signature < b.signature; });

    std::vector<std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (i == 0 || entries[i].signature != entries[i - 1].signature) groups.emplace_back();
        groups.back().push_back(i);
    }
    std::size_t combos = 1;
    for (const auto& g : groups) {
        combos *= detail::factorial_capped(g.size(), detail::kMaxTiePermutations);
        if (combos > detail::kMaxTiePermutations) break;
    }
    const bool exhaustive = combos <= detail::kMaxTiePermutations;

    auto serialize = [&](const std::vector<std::size_t>& order, std::map<Label, std::size_t>& ids) {
        std::string s;
        std::vector<const Label*> by_id;
        for (std::size_t idx : order) {
            const Entry& en = entries[idx];
            s += std::to_string(en.count);
            s += '{';
            for (const auto& [prop, label] : *en.entity) {
                auto [it, inserted] = ids.emplace(label, ids.size());
                if (inserted) by_id.push_back(&label);
                s += prop;
                s += '=';
                s += std::to_string(it->second);
                s += ';';
            }
            s += '}';
        }
        s += '|';
        for (const Label* l : by_id) {
            s += key_of.at(*l);
            s += ';';
        }
        return s;
    };

    std::string best;
    std::map<Label, std::size_t> best_ids;
    bool have_best = false;
    std::vector<std::size_t> order;

    // Enumerate the cartesian product of per-group permutations.
    std::vector<std::vector<std::size_t>> perms = groups;
    auto visit = [&]() {
        order.clear();
        for (const auto& g : perms) order.insert(order.end(), g.begin(), g.end());
        std::map<Label, std::size_t> ids;
        std::string s = serialize(order, ids);
        if (!have_best || s < best) {
            best = std::move(s);
            best_ids = std::move(ids);
            have_best = true;
        }
    };
    if (!exhaustive) {
        visit();
    } else {
        auto recurse = [&](auto&& self, std::size_t gi) -> void {
            if (gi == perms.size()) {
                visit();
                return;
            }
            std::sort(perms[gi].begin(), perms[gi].end());
            do {
                self(self, gi + 1);
            } while (std::next_permutation(perms[gi].begin(), perms[gi].end()));
        };
        recurse(recurse, 0);
    }

    CanonicalForm out;
    auto canonical_label = [&](const Label& l) { return "d" + std::to_string(best_ids.at(l)); };
    for (const auto& en : entries) {
        EntityStructure e;
        for (const auto& [prop, label] : *en.entity) e.emplace(prop, canonical_label(label));
        out.state.structure.insert(e, en.count);
    }
    for (const auto& [label, rep] : ctx) out.state.context.emplace(canonical_label(label), rep);
    out.key = std::move(best);
    return out;
}

inline LiftedState canonicalize(const LiftedState& l) { return canonical_form(l).state; }

/// Enumerates the ground states described by a lifted state with a finite context.
inline GroundMixture ground_expand(const LiftedState& l) {
    std::map<Label, std::vector<std::pair<std::size_t, const Property*>>> slots;
    std::size_t copies = 0;
    for (const auto& [entity, n] : l.structure)
        for (std::size_t c = 0; c < n; ++c, ++copies)
            for (const auto& [prop, label] : entity) slots[label].emplace_back(copies, &prop);

    struct Assignment {
        std::vector<Value> values;
        double probability;
    };
    struct LabelAssignments {
        const std::vector<std::pair<std::size_t, const Property*>>* slots;
        std::vector<Assignment> options;
    };
    std::vector<LabelAssignments> per_label;

    for (const auto& [label, sl] : slots) {
        auto it = l.context.find(label);
        if (it == l.context.end()) throw ModelError("label '" + label + "' is referenced but not bound in the context");
        LabelAssignments la{&sl, {}};
        if (const auto* d = std::get_if<Dirac>(&it->second)) {
            la.options.push_back(Assignment{std::vector<Value>(sl.size(), d->value), 1.0});
        } else if (const auto* u = std::get_if<Urn>(&it->second)) {
            if (sl.size() > u->values.size())
                throw ModelError("urn '" + label + "' is referenced by more slots than it holds values");
            std::map<Value, std::size_t> pool(u->values.begin(), u->values.end());
            std::vector<Value> seq;
            auto draw = [&](auto&& self, std::size_t left, double p) -> void {
                if (seq.size() == sl.size()) {
                    la.options.push_back(Assignment{seq, p});
                    return;
                }
                for (auto& [v, n] : pool) {
                    if (n == 0) continue;
                    const double q = p * static_cast<double>(n) / static_cast<double>(left);
                    --n;
                    seq.push_back(v);
                    self(self, left - 1, q);
                    seq.pop_back();
                    ++n;
                }
            };
            draw(draw, u->values.size(), 1.0);
        } else {
            throw UnsupportedOperation("cannot enumerate ground states of a Gaussian context (label '" + label + "')");
        }
        per_label.push_back(std::move(la));
    }

    std::vector<GroundEntity> entities(copies);
    GroundMixture out;
    auto product = [&](auto&& self, std::size_t i, double p) -> void {
        if (i == per_label.size()) {
            GroundState s;
            for (const auto& e : entities) s.insert(e);
            out[s] += p;
            return;
        }
        const auto& la = per_label[i];
        for (const auto& opt : la.options) {
            for (std::size_t k = 0; k < la.slots->size(); ++k) {
                const auto& [copy, prop] = (*la.slots)[k];
                entities[copy][*prop] = opt.values[k];
            }
            self(self, i + 1, p * opt.probability);
        }
    };
    product(product, 0, 1.0);
    return out;
}

/// Structure plus a value list, with one fresh point-mass label per property value.
struct Decomposition {
    Structure structure;
    std::vector<Value> values;
    Context context;

    LiftedState lifted() const { return LiftedState{structure, context}; }
};

/// Splits a ground state into structure and values. Labels v0, v1, ... follow
/// the canonical entity order and, within an entity, property-name order.
inline Decomposition decompose(const GroundState& s) {
    Decomposition d;
    for (const auto& [entity, n] : s)
        for (std::size_t c = 0; c < n; ++c) {
            EntityStructure e;
            for (const auto& [prop, value] : entity) {
                Label l = "v" + std::to_string(d.values.size());
                e.emplace(prop, l);
                d.context.emplace(l, Dirac{value});
                d.values.push_back(value);
            }
            d.structure.insert(e);
        }
    return d;
}

/// Categorical distribution over lifted states. Inserts canonicalize and merge
/// states whose canonical forms coincide.
class LiftedDistribution {
public:
    struct Entry {
        LiftedState state;
        double weight;
    };

    void insert(const LiftedState& l, double weight) {
        if (!(weight > 0.0)) return;
        CanonicalForm c = canonical_form(l);
        auto [it, inserted] = index_.emplace(std::move(c.key), entries_.size());
        if (inserted)
            entries_.push_back(Entry{std::move(c.state), weight});
        else
            entries_[it->second].weight += weight;
    }

    double total_weight() const {
        double t = 0.0;
        for (const auto& e : entries_) t += e.weight;
        return t;
    }

    void normalize() {
        const double t = total_weight();
        if (!(t > 0.0)) throw InvalidInput("cannot normalize a lifted distribution with zero total weight");
        for (auto& e : entries_) e.weight /= t;
    }

    /// Drops states whose normalized weight is below floor, then renormalizes.
    void prune(double floor) {
        if (floor <= 0.0 || entries_.empty()) return;
        normalize();
        std::vector<Entry> kept;
        for (auto& e : entries_)
            if (e.weight >= floor) kept.push_back(std::move(e));
        entries_.clear();
        index_.clear();
        for (auto& e : kept) insert(e.state, e.weight);
        if (!entries_.empty()) normalize();
    }

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    auto begin() const { return entries_.begin(); }
    auto end() const { return entries_.end(); }
    const std::vector<Entry>& entries() const noexcept { return entries_; }

private:
    std::vector<Entry> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Ground distribution described by a lifted distribution; weights are used as given.
inline GroundMixture mixture_ground(const LiftedDistribution& d) {
    GroundMixture out;
    for (const auto& e : d)
        for (const auto& [s, p] : ground_expand(e.state)) out[s] += e.weight * p;
    return out;
}

} // namespace mslift

#endif
