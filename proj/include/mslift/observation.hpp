#ifndef MSLIFT_OBSERVATION_HPP
#define MSLIFT_OBSERVATION_HPP

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mslift/distributions.hpp"
#include "mslift/dynamics.hpp"
#include "mslift/errors.hpp"
#include "mslift/lifted_state.hpp"

namespace mslift {

/// Noisy reading of a real-valued property of one (unknown) entity. The
/// source is uniformly one of the entities that have the property and satisfy
/// `where`.
struct LocationReading {
    Property property;
    double value = 0.0;
    double noise_variance = 1.0;
    std::optional<Constraint> where;

    friend bool operator==(const LocationReading&, const LocationReading&) = default;
};

/// Reading of a discrete property (e.g. a name) of one entity satisfying
/// `where`. Likelihood is `reliability` for a match and
/// (1 - reliability) / (|domain| - 1) otherwise (1 - reliability when the
/// domain has fewer than two values). An optional location fix (`at`, whose
/// own `where` is ignored) is attributed to the same entity.
struct IdentityReading {
    Property property;
    Value value;
    std::optional<Constraint> where;
    double reliability = 1.0;
    std::vector<Value> domain;
    std::optional<LocationReading> at;

    double likelihood(const Value& true_value) const {
        if (true_value == value) return reliability;
        return domain.size() >= 2 ? (1.0 - reliability) / static_cast<double>(domain.size() - 1) : 1.0 - reliability;
    }

    friend bool operator==(const IdentityReading&, const IdentityReading&) = default;
};

/// Anonymous count of entities satisfying `region`. `confusion` maps the true
/// count to the likelihood of the observed `count`; counts not listed use
/// `default_likelihood`. An empty confusion map is the exact (identity) sensor.
struct CountReading {
    Constraint region;
    std::size_t count = 0;
    std::map<std::size_t, double> confusion;
    double default_likelihood = 0.0;

    double likelihood(std::size_t true_count) const {
        if (confusion.empty()) return true_count == count ? 1.0 : 0.0;
        auto it = confusion.find(true_count);
        return it == confusion.end() ? default_likelihood : it->second;
    }

    friend bool operator==(const CountReading&, const CountReading&) = default;
};

using Observation = std::variant<LocationReading, IdentityReading, CountReading>;

inline void validate(const Observation& y) {
    auto check_location = [](const LocationReading& r) {
        if (!(r.noise_variance > 0.0) || !std::isfinite(r.value))
            throw InvalidInput("location reading on '" + r.property + "' needs a finite value and positive noise variance");
    };
    if (const auto* loc = std::get_if<LocationReading>(&y)) {
        check_location(*loc);
    } else if (const auto* id = std::get_if<IdentityReading>(&y)) {
        if (!(id->reliability > 0.0 && id->reliability <= 1.0))
            throw InvalidInput("identity reading reliability must be in (0, 1]");
        if (id->at) check_location(*id->at);
    } else {
        const auto& c = std::get<CountReading>(y);
        for (const auto& [n, p] : c.confusion)
            if (!(p >= 0.0)) throw InvalidInput("count confusion likelihoods must be non-negative");
        if (!(c.default_likelihood >= 0.0)) throw InvalidInput("count default likelihood must be non-negative");
    }
}

/// Zero total likelihood in a lifted update; carries the pre-update distribution.
class ImpossibleObservation : public ImpossibleObservationError {
public:
    ImpossibleObservation(const std::string& what, LiftedDistribution prior)
        : ImpossibleObservationError(what), prior_(std::move(prior)) {}

    const LiftedDistribution& prior() const noexcept { return prior_; }

private:
    LiftedDistribution prior_;
};

namespace detail {

inline Constraint source_constraint(const std::optional<Constraint>& where, const std::vector<Property>& needed) {
    std::vector<Constraint> parts;
    if (where) parts.push_back(*where);
    for (const auto& p : needed) parts.push_back(Constraint::has(p));
    return Constraint::all(std::move(parts));
}

struct SourceWorld {
    Context context;
    EntityStructure source;
    double weight;
};

// Reweights (and splits, for urns) each world by a per-value likelihood of the
// source's property q. Gaussians go to on_gaussian.
template <typename ValueLikelihood, typename GaussianStep>
std::vector<SourceWorld> condition_property(std::vector<SourceWorld> worlds, const Property& q,
                                            ValueLikelihood&& likelihood, GaussianStep&& on_gaussian,
                                            FreshLabels& fresh, EngineCounters* counters) {
    std::vector<SourceWorld> out;
    for (auto& w : worlds) {
        const Label& label = w.source.at(q);
        const DistributionRep& rep = w.context.at(label);
        if (const auto* d = std::get_if<Dirac>(&rep)) {
            w.weight *= likelihood(d->value);
            if (w.weight > 0.0) out.push_back(std::move(w));
        } else if (std::holds_alternative<Urn>(rep)) {
            if (counters) ++counters->splits;
            for (auto& s : split_slot(w.context, w.source, q, fresh)) {
                const double weight = w.weight * s.probability * likelihood(s.value);
                if (weight > 0.0) out.push_back(SourceWorld{std::move(s.context), std::move(s.entity), weight});
            }
        } else {
            if (on_gaussian(w, label, std::get<Gaussian>(rep))) out.push_back(std::move(w));
        }
    }
    return out;
}

// Posterior branches for readings attributed to one uniformly chosen source.
inline WeightedStates condition_source(const LiftedState& l, const std::optional<Constraint>& where,
                                       const IdentityReading* identity, const LocationReading* location,
                                       const EngineOptions& options, EngineCounters* counters) {
    std::vector<Property> needed;
    if (identity) needed.push_back(identity->property);
    if (location) needed.push_back(location->property);
    const Constraint selector = source_constraint(where, needed);

    WeightedStates out;
    for (const auto& [branch, pb] : split_to_determinacy(l, {selector}, options, counters)) {
        std::vector<std::pair<const EntityStructure*, std::size_t>> sources;
        std::size_t m = 0;
        for (const auto& [e, n] : branch.structure)
            if (eval_constraint(selector, e, branch.context).truth == Truth::Sat) {
                sources.emplace_back(&e, n);
                m += n;
            }
        if (m == 0) continue;

        for (const auto& [entity, n] : sources) {
            LiftedState rest = branch;
            rest.structure.erase(*entity);
            FreshLabels fresh;
            std::vector<SourceWorld> worlds{
                SourceWorld{rest.context, *entity, pb * static_cast<double>(n) / static_cast<double>(m)}};

            if (identity) {
                worlds = condition_property(
                    std::move(worlds), identity->property,
                    [&](const Value& v) { return identity->likelihood(v); },
                    [&](SourceWorld&, const Label&, const Gaussian&) -> bool {
                        throw UnsupportedOperation("identity reading on Gaussian-distributed property '" +
                                                   identity->property + "'");
                    },
                    fresh, counters);
            }
            if (location) {
                worlds = condition_property(
                    std::move(worlds), location->property,
                    [&](const Value& v) { return normal_pdf(location->value, as_real(v), location->noise_variance); },
                    [&](SourceWorld& w, const Label&, const Gaussian& g) {
                        w.weight *= gaussian_likelihood(g, location->value, location->noise_variance);
                        Label fl = fresh.next(w.context);
                        w.context.emplace(fl, gaussian_posterior(g, location->value, location->noise_variance));
                        w.source[location->property] = fl;
                        return w.weight > 0.0;
                    },
                    fresh, counters);
            }
            for (auto& w : worlds) {
                LiftedState s{rest.structure, std::move(w.context)};
                s.structure.insert(w.source);
                out.emplace_back(canonicalize(s), w.weight);
            }
        }
    }
    return out;
}

} // namespace detail

/**
 * Conditions one lifted state on an observation. Returns posterior branches
 * whose weights are p(branch, y | l); their sum is the structure likelihood.
 * Splits happen where the posterior would otherwise leave the representable
 * (exchangeable, parametric) family.
 */
inline WeightedStates condition(const LiftedState& l, const Observation& y, const EngineOptions& options = {},
                                EngineCounters* counters = nullptr) {
    validate(y);
    if (const auto* loc = std::get_if<LocationReading>(&y))
        return detail::condition_source(l, loc->where, nullptr, loc, options, counters);
    if (const auto* id = std::get_if<IdentityReading>(&y))
        return detail::condition_source(l, id->where, id, id->at ? &*id->at : nullptr, options, counters);

    const auto& c = std::get<CountReading>(y);
    WeightedStates out;
    for (auto& [branch, pb] : split_to_determinacy(l, {c.region}, options, counters)) {
        std::size_t n = 0;
        for (const auto& [e, k] : branch.structure)
            if (eval_constraint(c.region, e, branch.context).truth == Truth::Sat) n += k;
        const double w = pb * c.likelihood(n);
        if (w > 0.0) out.emplace_back(std::move(branch), w);
    }
    return out;
}

/// p(y | l): the observation's marginal likelihood under one lifted state.
inline double structure_likelihood(const LiftedState& l, const Observation& y) {
    double total = 0.0;
    for (const auto& [s, w] : condition(l, y)) total += w;
    return total;
}

/// Bayes update of a lifted distribution; the result is normalized.
inline LiftedDistribution update(const LiftedDistribution& d, const Observation& y, const EngineOptions& options = {},
                                 EngineCounters* counters = nullptr) {
    LiftedDistribution out;
    for (const auto& entry : d)
        for (const auto& [s, w] : condition(entry.state, y, options, counters)) out.insert(s, entry.weight * w);
    if (out.empty() || !(out.total_weight() > 0.0))
        throw ImpossibleObservation("observation has zero likelihood under every state", d);
    out.normalize();
    return out;
}

/// Observation likelihood of a single ground state (the same sensor models).
inline double observation_likelihood(const GroundState& s, const Observation& y) {
    validate(y);
    if (const auto* c = std::get_if<CountReading>(&y)) {
        std::size_t n = 0;
        for (const auto& [e, k] : s)
            if (holds(c->region, e)) n += k;
        return c->likelihood(n);
    }

    const auto* loc = std::get_if<LocationReading>(&y);
    const auto* id = std::get_if<IdentityReading>(&y);
    if (id && id->at) loc = &*id->at;
    std::vector<Property> needed;
    if (id) needed.push_back(id->property);
    if (loc) needed.push_back(loc->property);
    const Constraint selector = detail::source_constraint(id ? id->where : loc->where, needed);

    double sum = 0.0;
    std::size_t m = 0;
    for (const auto& [e, k] : s) {
        if (!holds(selector, e)) continue;
        m += k;
        double lik = 1.0;
        if (id) lik *= id->likelihood(e.at(id->property));
        if (loc) lik *= normal_pdf(loc->value, as_real(e.at(loc->property)), loc->noise_variance);
        sum += static_cast<double>(k) * lik;
    }
    return m == 0 ? 0.0 : sum / static_cast<double>(m);
}

} // namespace mslift

#endif
