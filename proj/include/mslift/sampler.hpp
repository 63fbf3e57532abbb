#ifndef MSLIFT_SAMPLER_HPP
#define MSLIFT_SAMPLER_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "mslift/dynamics.hpp"
#include "mslift/lifted_state.hpp"

namespace mslift {

/// Seeded generator with a fixed, platform-independent output sequence:
/// raw mt19937_64 words, 53-bit uniforms, Box-Muller normals.
class Rng {
public:
    static constexpr const char* kAlgorithm = "mt19937_64/u53/box-muller/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double normal() {
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Index drawn proportionally to the given non-negative weights.
    std::size_t pick(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (u < weights[i]) return i;
            u -= weights[i];
        }
        for (std::size_t i = weights.size(); i-- > 0;)
            if (weights[i] > 0.0) return i;
        return 0;
    }

private:
    std::mt19937_64 engine_;
};

struct GroundInstance {
    std::string action;
    std::vector<GroundEntity> binding;

    friend bool operator==(const GroundInstance&, const GroundInstance&) = default;
    friend bool operator<(const GroundInstance& a, const GroundInstance& b) {
        return std::tie(a.action, a.binding) < std::tie(b.action, b.binding);
    }
};

using GroundCompound = Multiset<GroundInstance>;

struct Trajectory {
    std::vector<GroundState> states;
    std::vector<GroundCompound> compounds;
    std::uint64_t seed = 0;
};

/// Draws one ground state from a lifted state (urns without replacement,
/// Gaussians by Box-Muller).
inline GroundState sample_ground(const LiftedState& l, Rng& rng) {
    std::vector<GroundEntity> entities;
    std::map<Label, std::vector<std::pair<std::size_t, const Property*>>> slots;
    for (const auto& [entity, n] : l.structure)
        for (std::size_t c = 0; c < n; ++c) {
            for (const auto& [prop, label] : entity) slots[label].emplace_back(entities.size(), &prop);
            entities.emplace_back();
        }
    for (const auto& [label, sl] : slots) {
        const DistributionRep& rep = l.context.at(label);
        if (const auto* d = std::get_if<Dirac>(&rep)) {
            for (const auto& [c, p] : sl) entities[c][*p] = d->value;
        } else if (const auto* u = std::get_if<Urn>(&rep)) {
            std::vector<Value> pool;
            std::vector<double> counts;
            for (const auto& [v, n] : u->values) {
                pool.push_back(v);
                counts.push_back(static_cast<double>(n));
            }
            for (const auto& [c, p] : sl) {
                const std::size_t i = rng.pick(counts);
                entities[c][*p] = pool[i];
                counts[i] -= 1.0;
            }
        } else {
            const auto& g = std::get<Gaussian>(rep);
            for (const auto& [c, p] : sl) entities[c][*p] = g.mean + std::sqrt(g.variance) * rng.normal();
        }
    }
    GroundState s;
    for (auto& e : entities) s.insert(e);
    return s;
}

inline GroundState sample_initial(const LiftedDistribution& d, Rng& rng) {
    std::vector<double> w;
    for (const auto& e : d) w.push_back(e.weight);
    return sample_ground(d.entries().at(rng.pick(w)).state, rng);
}

/// Samples one applicable maximal compound action and applies it.
inline std::pair<GroundState, GroundCompound> sample_step(const GroundState& s, const std::vector<Action>& actions,
                                                          Rng& rng, const EngineOptions& options = {}) {
    const LiftedState l = canonicalize(decompose(s).lifted());
    const auto amcas = enumerate_amca(l, actions, options);
    std::vector<double> probs;
    for (const auto& wc : amcas) probs.push_back(wc.probability);
    const auto& chosen = amcas.at(rng.pick(probs));

    GroundCompound gc;
    for (const auto& [inst, m] : chosen.compound.instances) {
        GroundInstance gi{actions.at(inst.action).name, {}};
        for (const auto& e : inst.binding) {
            GroundEntity g;
            for (const auto& [prop, label] : e) g.emplace(prop, std::get<Dirac>(l.context.at(label)).value);
            gi.binding.push_back(std::move(g));
        }
        gc.insert(gi, m);
    }
    return {sample_ground(apply_compound(chosen.compound, l, actions), rng), std::move(gc)};
}

inline Trajectory sample_trajectory(const GroundState& s0, const std::vector<Action>& actions, std::size_t steps,
                                    std::uint64_t seed, const EngineOptions& options = {}) {
    Rng rng(seed);
    Trajectory t;
    t.seed = seed;
    t.states.push_back(s0);
    for (std::size_t i = 0; i < steps; ++i) {
        auto [next, compound] = sample_step(t.states.back(), actions, rng, options);
        t.states.push_back(std::move(next));
        t.compounds.push_back(std::move(compound));
    }
    return t;
}

} // namespace mslift

#endif
