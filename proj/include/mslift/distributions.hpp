#ifndef MSLIFT_DISTRIBUTIONS_HPP
#define MSLIFT_DISTRIBUTIONS_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mslift/errors.hpp"
#include "mslift/multiset.hpp"
#include "mslift/value.hpp"

namespace mslift {

/// Urn without replacement over a finite multiset of values. Slots that
/// reference the same urn receive sequential draws, so their joint is
/// exchangeable.
struct Urn {
    Multiset<Value> values;

    friend bool operator==(const Urn&, const Urn&) = default;
};

/// Point mass. Any number of slots may reference it; all take the same value.
struct Dirac {
    Value value;

    friend bool operator==(const Dirac&, const Dirac&) = default;
};

/// Univariate normal; referenced by exactly one slot.
struct Gaussian {
    double mean = 0.0;
    double variance = 1.0;

    friend bool operator==(const Gaussian&, const Gaussian&) = default;
};

using DistributionRep = std::variant<Urn, Dirac, Gaussian>;

inline Urn make_urn(const std::vector<Value>& values) {
    if (values.empty()) throw InvalidInput("urn must contain at least one value");
    Urn u;
    for (const auto& v : values) u.values.insert(v);
    return u;
}

inline Gaussian make_gaussian(double mean, double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw InvalidInput("Gaussian variance must be strictly positive, got " + format_real(variance));
    return Gaussian{mean, variance};
}

/// Maximum number of slots that may reference the representation.
inline std::size_t arity(const DistributionRep& rep) {
    if (const auto* u = std::get_if<Urn>(&rep)) return u->values.size();
    if (std::holds_alternative<Dirac>(rep)) return std::numeric_limits<std::size_t>::max();
    return 1;
}

inline bool is_exchangeable_joint(const DistributionRep& rep, std::size_t slots) {
    return slots >= 1 && slots <= arity(rep);
}

/// Probability that a single slot drawing from rep takes value v (discrete reps only).
inline double marginal_probability(const DistributionRep& rep, const Value& v) {
    if (const auto* u = std::get_if<Urn>(&rep))
        return static_cast<double>(u->values.count(v)) / static_cast<double>(u->values.size());
    if (const auto* d = std::get_if<Dirac>(&rep)) return d->value == v ? 1.0 : 0.0;
    throw UnsupportedOperation("point probability of a Gaussian is undefined");
}

struct SplitBranch {
    std::optional<Urn> remaining; ///< empty when the split consumed the last value
    Dirac split_off;
    double probability = 0.0;
};

struct SplitOutcome {
    std::vector<SplitBranch> branches;
};

/// One branch per distinct value: the split-off slot takes that value with
/// probability multiplicity/size, the rest of the urn keeps the other values.
inline SplitOutcome urn_split(const Urn& u) {
    if (u.values.empty()) throw InvalidInput("cannot split an empty urn");
    SplitOutcome out;
    const double total = static_cast<double>(u.values.size());
    for (const auto& [value, n] : u.values) {
        SplitBranch b;
        Urn rest = u;
        rest.values.erase(value);
        if (!rest.values.empty()) b.remaining = std::move(rest);
        b.split_off = Dirac{value};
        b.probability = static_cast<double>(n) / total;
        out.branches.push_back(std::move(b));
    }
    return out;
}

struct ConditionedUrn {
    std::optional<Urn> remaining;
    double probability = 0.0;
};

/// The single branch of urn_split selected by "slot = v". Probability 0 and the
/// urn unchanged when v is not in the urn.
inline ConditionedUrn urn_condition_eq(const Urn& u, const Value& v) {
    if (u.values.empty()) throw InvalidInput("cannot condition an empty urn");
    const std::size_t n = u.values.count(v);
    if (n == 0) return ConditionedUrn{u, 0.0};
    Urn rest = u;
    rest.values.erase(v);
    ConditionedUrn out;
    if (!rest.values.empty()) out.remaining = std::move(rest);
    out.probability = static_cast<double>(n) / static_cast<double>(u.values.size());
    return out;
}

inline double normal_pdf(double x, double mean, double variance) {
    const double d = x - mean;
    return std::exp(-0.5 * d * d / variance) / std::sqrt(2.0 * std::numbers::pi * variance);
}

/// Scalar Kalman measurement update with identity observation matrix.
inline Gaussian gaussian_posterior(const Gaussian& prior, double observation, double noise_variance) {
    if (!(noise_variance > 0.0)) throw InvalidInput("observation noise variance must be positive");
    const double s = prior.variance + noise_variance;
    return Gaussian{(prior.mean * noise_variance + observation * prior.variance) / s,
                    prior.variance * noise_variance / s};
}

/// Marginal density of the observation: N(y; mean, variance + noise).
inline double gaussian_likelihood(const Gaussian& prior, double observation, double noise_variance) {
    if (!(noise_variance > 0.0)) throw InvalidInput("observation noise variance must be positive");
    return normal_pdf(observation, prior.mean, prior.variance + noise_variance);
}

/// Urns with a single distinct value are point masses.
inline DistributionRep normalized(const DistributionRep& rep) {
    if (const auto* u = std::get_if<Urn>(&rep); u && u->values.distinct() == 1)
        return Dirac{u->values.begin()->first};
    return rep;
}

/// Serialized form used for ordering and merging: exact for discrete values,
/// 12 significant digits for Gaussian parameters.
inline std::string distribution_key(const DistributionRep& rep) {
    if (const auto* u = std::get_if<Urn>(&rep)) {
        std::string s = "U(";
        for (const auto& [v, n] : u->values) {
            s += std::to_string(n);
            s += is_real(v) ? "r:" : "s:";
            s += to_string(v);
            s += '\x1f';
        }
        return s + ")";
    }
    if (const auto* d = std::get_if<Dirac>(&rep))
        return std::string("D(") + (is_real(d->value) ? "r:" : "s:") + to_string(d->value) + ")";
    const auto& g = std::get<Gaussian>(rep);
    return "N(" + format_real_tolerant(g.mean) + "," + format_real_tolerant(g.variance) + ")";
}

/// Exact for discrete parameters, 1e-12 relative for Gaussian parameters.
inline bool approx_equal(const DistributionRep& a, const DistributionRep& b, double rel = 1e-12) {
    if (a.index() != b.index()) return false;
    if (const auto* ga = std::get_if<Gaussian>(&a)) {
        const auto& gb = std::get<Gaussian>(b);
        auto close = [rel](double x, double y) {
            return std::abs(x - y) <= rel * std::max({1.0, std::abs(x), std::abs(y)});
        };
        return close(ga->mean, gb.mean) && close(ga->variance, gb.variance);
    }
    return a == b;
}

inline std::string to_string(const DistributionRep& rep) {
    if (const auto* u = std::get_if<Urn>(&rep)) {
        std::string s = "U(";
        bool first = true;
        for (const auto& [v, n] : u->values)
            for (std::size_t i = 0; i < n; ++i) {
                if (!first) s += ",";
                first = false;
                s += to_string(v);
            }
        return s + ")";
    }
    if (const auto* d = std::get_if<Dirac>(&rep)) return "δ(" + to_string(d->value) + ")";
    const auto& g = std::get<Gaussian>(rep);
    return "N(" + format_real(g.mean) + "," + format_real(g.variance) + ")";
}

} // namespace mslift

#endif
