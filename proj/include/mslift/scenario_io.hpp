#ifndef MSLIFT_SCENARIO_IO_HPP
#define MSLIFT_SCENARIO_IO_HPP

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "mslift/distributions.hpp"
#include "mslift/dynamics.hpp"
#include "mslift/errors.hpp"
#include "mslift/ground_oracle.hpp"
#include "mslift/lifted_state.hpp"
#include "mslift/observation.hpp"
#include "mslift/sampler.hpp"

namespace mslift {

using json = nlohmann::json;

inline constexpr int kScenarioSchema = 1;

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    bool oracle = false;
    double prune = 0.0;
    std::size_t split_budget = 1'000'000;
    std::size_t amca_budget = 1'000'000;
    std::uint64_t seed = 0;

    EngineOptions engine() const { return EngineOptions{split_budget, amca_budget}; }

    friend bool operator==(const RunOptions&, const RunOptions&) = default;
};

struct WeightedLiftedState {
    LiftedState state;
    double weight = 1.0;

    friend bool operator==(const WeightedLiftedState&, const WeightedLiftedState&) = default;
};

/// One entry per time step; an empty step is predict-only.
using ObservationSequence = std::vector<std::vector<Observation>>;

struct Scenario {
    std::string name;
    std::string description;
    std::vector<Property> properties;
    std::vector<WeightedLiftedState> initial; ///< kept as written; canonicalized when the filter starts
    std::vector<Action> actions;
    ObservationSequence observations;
    RunOptions options;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

// ---------------------------------------------------------------------------
// JSON encoding

inline json value_to_json(const Value& v) {
    if (const auto* x = std::get_if<double>(&v)) return *x;
    return std::get<std::string>(v);
}

inline Value value_from_json(const json& j) {
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    throw ModelError("value must be a number or a string, got " + j.dump());
}

inline json distribution_to_json(const DistributionRep& rep) {
    if (const auto* u = std::get_if<Urn>(&rep)) {
        json values = json::array();
        for (const auto& [v, n] : u->values)
            for (std::size_t i = 0; i < n; ++i) values.push_back(value_to_json(v));
        return json{{"urn", values}};
    }
    if (const auto* d = std::get_if<Dirac>(&rep)) return json{{"dirac", value_to_json(d->value)}};
    const auto& g = std::get<Gaussian>(rep);
    return json{{"gaussian", {{"mean", g.mean}, {"var", g.variance}}}};
}

inline DistributionRep distribution_from_json(const json& j) {
    if (j.contains("urn")) {
        std::vector<Value> values;
        for (const auto& v : j.at("urn")) values.push_back(value_from_json(v));
        if (values.empty()) throw ModelError("urn must contain at least one value");
        return make_urn(values);
    }
    if (j.contains("dirac")) return Dirac{value_from_json(j.at("dirac"))};
    if (j.contains("gaussian")) {
        const auto& g = j.at("gaussian");
        const double var = g.at("var").get<double>();
        if (!(var > 0.0)) throw ModelError("Gaussian variance must be strictly positive");
        return Gaussian{g.at("mean").get<double>(), var};
    }
    throw ModelError("unknown distribution encoding " + j.dump());
}

inline json context_to_json(const Context& ctx) {
    json j = json::object();
    for (const auto& [label, rep] : ctx) j[label] = distribution_to_json(rep);
    return j;
}

inline Context context_from_json(const json& j) {
    Context ctx;
    for (const auto& [label, rep] : j.items()) ctx.emplace(label, distribution_from_json(rep));
    return ctx;
}

inline json entity_to_json(const EntityStructure& e) {
    json j = json::object();
    for (const auto& [p, l] : e) j[p] = l;
    return j;
}

inline EntityStructure entity_from_json(const json& j) {
    EntityStructure e;
    for (const auto& [p, l] : j.items()) e.emplace(p, l.get<std::string>());
    return e;
}

inline json lifted_state_to_json(const LiftedState& l) {
    json structure = json::array();
    for (const auto& [e, n] : l.structure) structure.push_back(json{{"count", n}, {"props", entity_to_json(e)}});
    return json{{"structure", structure}, {"context", context_to_json(l.context)}};
}

inline LiftedState lifted_state_from_json(const json& j) {
    LiftedState l;
    for (const auto& item : j.at("structure")) {
        const auto n = item.value("count", std::size_t{1});
        if (n == 0) throw ModelError("entity count must be at least 1");
        l.structure.insert(entity_from_json(item.at("props")), n);
    }
    l.context = context_from_json(j.at("context"));
    return l;
}

inline json lifted_distribution_to_json(const LiftedDistribution& d) {
    json states = json::array();
    for (const auto& e : d) {
        json s = lifted_state_to_json(e.state);
        s["weight"] = e.weight;
        states.push_back(std::move(s));
    }
    return json{{"states", states}};
}

inline json constraint_to_json(const Constraint& c) {
    using K = Constraint::Kind;
    switch (c.kind) {
    case K::Has:
        return json{{"has", c.property}};
    case K::Eq:
        return json{{"eq", json::array({c.property, value_to_json(c.values.at(0))})}};
    case K::In: {
        json vs = json::array();
        for (const auto& v : c.values) vs.push_back(value_to_json(v));
        return json{{"in", json::array({c.property, vs})}};
    }
    case K::And: {
        json cs = json::array();
        for (const auto& ch : c.children) cs.push_back(constraint_to_json(ch));
        return json{{"and", cs}};
    }
    }
    return {};
}

inline Constraint constraint_from_json(const json& j) {
    if (j.contains("has")) return Constraint::has(j.at("has").get<std::string>());
    if (j.contains("eq")) {
        const auto& a = j.at("eq");
        return Constraint::eq(a.at(0).get<std::string>(), value_from_json(a.at(1)));
    }
    if (j.contains("in")) {
        const auto& a = j.at("in");
        std::vector<Value> vs;
        for (const auto& v : a.at(1)) vs.push_back(value_from_json(v));
        return Constraint::in(a.at(0).get<std::string>(), std::move(vs));
    }
    if (j.contains("and")) {
        std::vector<Constraint> cs;
        for (const auto& ch : j.at("and")) cs.push_back(constraint_from_json(ch));
        return Constraint::all(std::move(cs));
    }
    throw ModelError("unknown constraint encoding " + j.dump());
}

inline json effect_to_json(const Effect& e) {
    switch (e.kind) {
    case Effect::Kind::Set:
        return json{{"op", "set"}, {"slot", e.slot}, {"prop", e.property}, {"value", value_to_json(e.value)}};
    case Effect::Kind::Remove:
        return json{{"op", "remove"}, {"slot", e.slot}};
    case Effect::Kind::Add:
        return json{{"op", "add"},
                    {"entity", {{"props", entity_to_json(e.entity.properties)}, {"context", context_to_json(e.entity.context)}}}};
    case Effect::Kind::Shift:
        return json{{"op", "shift"}, {"slot", e.slot}, {"prop", e.property}, {"delta", e.delta}, {"var", e.added_variance}};
    }
    return {};
}

inline Effect effect_from_json(const json& j) {
    const auto op = j.at("op").get<std::string>();
    if (op == "set") return Effect::set(j.at("slot").get<std::size_t>(), j.at("prop").get<std::string>(), value_from_json(j.at("value")));
    if (op == "remove") return Effect::remove(j.at("slot").get<std::size_t>());
    if (op == "add") {
        const auto& ent = j.at("entity");
        return Effect::add(EntityTemplate{entity_from_json(ent.at("props")), context_from_json(ent.at("context"))});
    }
    if (op == "shift")
        return Effect::shift(j.at("slot").get<std::size_t>(), j.at("prop").get<std::string>(), j.at("delta").get<double>(),
                             j.value("var", 0.0));
    throw ModelError("unknown effect op '" + op + "'");
}

inline json action_to_json(const Action& a) {
    json pre = json::array();
    for (const auto& c : a.preconditions) pre.push_back(constraint_to_json(c));
    json eff = json::array();
    for (const auto& e : a.effects) eff.push_back(effect_to_json(e));
    return json{{"name", a.name}, {"weight", a.weight}, {"pre", pre}, {"eff", eff}};
}

inline Action action_from_json(const json& j) {
    Action a;
    a.name = j.at("name").get<std::string>();
    a.weight = j.value("weight", 1.0);
    for (const auto& c : j.value("pre", json::array())) a.preconditions.push_back(constraint_from_json(c));
    for (const auto& e : j.value("eff", json::array())) a.effects.push_back(effect_from_json(e));
    return a;
}

inline json location_fields(const LocationReading& r) {
    return json{{"prop", r.property}, {"value", r.value}, {"noise_var", r.noise_variance}};
}

inline LocationReading location_from_json(const json& j) {
    LocationReading r;
    r.property = j.at("prop").get<std::string>();
    r.value = j.at("value").get<double>();
    r.noise_variance = j.at("noise_var").get<double>();
    if (j.contains("where")) r.where = constraint_from_json(j.at("where"));
    return r;
}

inline json observation_to_json(const Observation& y) {
    if (const auto* loc = std::get_if<LocationReading>(&y)) {
        json j = location_fields(*loc);
        j["type"] = "location";
        if (loc->where) j["where"] = constraint_to_json(*loc->where);
        return j;
    }
    if (const auto* id = std::get_if<IdentityReading>(&y)) {
        json j{{"type", "identity"}, {"prop", id->property}, {"value", value_to_json(id->value)}, {"reliability", id->reliability}};
        if (id->where) j["where"] = constraint_to_json(*id->where);
        if (!id->domain.empty()) {
            json dom = json::array();
            for (const auto& v : id->domain) dom.push_back(value_to_json(v));
            j["domain"] = dom;
        }
        if (id->at) j["at"] = location_fields(*id->at);
        return j;
    }
    const auto& c = std::get<CountReading>(y);
    json j{{"type", "count"}, {"where", constraint_to_json(c.region)}, {"count", c.count}};
    if (!c.confusion.empty()) {
        json conf = json::object();
        for (const auto& [n, p] : c.confusion) conf[std::to_string(n)] = p;
        j["confusion"] = conf;
        j["default"] = c.default_likelihood;
    }
    return j;
}

inline Observation observation_from_json(const json& j) {
    const auto type = j.at("type").get<std::string>();
    Observation y;
    if (type == "location") {
        y = location_from_json(j);
    } else if (type == "identity") {
        IdentityReading r;
        r.property = j.at("prop").get<std::string>();
        r.value = value_from_json(j.at("value"));
        r.reliability = j.value("reliability", 1.0);
        if (j.contains("where")) r.where = constraint_from_json(j.at("where"));
        for (const auto& v : j.value("domain", json::array())) r.domain.push_back(value_from_json(v));
        if (j.contains("at")) r.at = location_from_json(j.at("at"));
        y = r;
    } else if (type == "count") {
        CountReading r;
        r.region = constraint_from_json(j.at("where"));
        r.count = j.at("count").get<std::size_t>();
        const json confusion = j.value("confusion", json::object());
        for (const auto& [n, p] : confusion.items()) r.confusion.emplace(std::stoul(n), p.get<double>());
        r.default_likelihood = j.value("default", 0.0);
        y = r;
    } else {
        throw ModelError("unknown observation type '" + type + "'");
    }
    try {
        validate(y);
    } catch (const InvalidInput& e) {
        throw ModelError(e.what());
    }
    return y;
}

inline json observation_sequence_to_json(const ObservationSequence& seq) {
    json out = json::array();
    for (const auto& step : seq) {
        if (step.empty()) {
            out.push_back(nullptr);
        } else if (step.size() == 1) {
            out.push_back(observation_to_json(step.front()));
        } else {
            json arr = json::array();
            for (const auto& y : step) arr.push_back(observation_to_json(y));
            out.push_back(arr);
        }
    }
    return out;
}

/// Steps are null (predict only), one observation record, or a list of records.
inline ObservationSequence observation_sequence_from_json(const json& j) {
    ObservationSequence seq;
    for (const auto& step : j) {
        std::vector<Observation> ys;
        if (step.is_array()) {
            for (const auto& y : step) ys.push_back(observation_from_json(y));
        } else if (!step.is_null()) {
            ys.push_back(observation_from_json(step));
        }
        seq.push_back(std::move(ys));
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Validation

namespace detail {

inline void collect_observation_properties(const Observation& y, std::set<Property>& props) {
    if (const auto* loc = std::get_if<LocationReading>(&y)) {
        props.insert(loc->property);
        if (loc->where) collect_properties(*loc->where, props);
    } else if (const auto* id = std::get_if<IdentityReading>(&y)) {
        props.insert(id->property);
        if (id->where) collect_properties(*id->where, props);
        if (id->at) props.insert(id->at->property);
    } else {
        collect_properties(std::get<CountReading>(y).region, props);
    }
}

} // namespace detail

/// Throws ModelError when labels do not resolve, effects are malformed,
/// weights are not positive or a property is outside the vocabulary.
inline void validate(const Scenario& sc) {
    std::set<Property> used;
    if (sc.initial.empty()) throw ModelError("scenario has no initial lifted state");
    for (const auto& ws : sc.initial) {
        if (!(ws.weight > 0.0)) throw ModelError("initial lifted state weights must be positive");
        validate(ws.state);
        for (const auto& [e, n] : ws.state.structure)
            for (const auto& [p, l] : e) used.insert(p);
    }
    for (const auto& a : sc.actions) {
        validate(a);
        for (const auto& c : a.preconditions) collect_properties(c, used);
        for (const auto& eff : a.effects) {
            if (eff.kind == Effect::Kind::Add)
                for (const auto& [p, l] : eff.entity.properties) used.insert(p);
            else if (eff.kind != Effect::Kind::Remove)
                used.insert(eff.property);
        }
    }
    for (const auto& step : sc.observations)
        for (const auto& y : step) detail::collect_observation_properties(y, used);
    if (!sc.properties.empty()) {
        std::set<Property> vocab(sc.properties.begin(), sc.properties.end());
        for (const auto& p : used)
            if (vocab.count(p) == 0) throw ModelError("property '" + p + "' is not declared in the scenario vocabulary");
    }
}

inline json scenario_to_json(const Scenario& sc) {
    json initial = json::array();
    for (const auto& ws : sc.initial) {
        json s = lifted_state_to_json(ws.state);
        s["weight"] = ws.weight;
        initial.push_back(std::move(s));
    }
    json actions = json::array();
    for (const auto& a : sc.actions) actions.push_back(action_to_json(a));
    return json{{"schema", kScenarioSchema},
                {"name", sc.name},
                {"description", sc.description},
                {"properties", sc.properties},
                {"initial", initial},
                {"actions", actions},
                {"observations", observation_sequence_to_json(sc.observations)},
                {"options",
                 {{"oracle", sc.options.oracle},
                  {"prune", sc.options.prune},
                  {"split_budget", sc.options.split_budget},
                  {"amca_budget", sc.options.amca_budget},
                  {"seed", sc.options.seed}}}};
}

inline Scenario scenario_from_json(const json& j) {
    try {
        const int schema = j.at("schema").get<int>();
        if (schema != kScenarioSchema)
            throw ModelError("unsupported scenario schema " + std::to_string(schema));
        Scenario sc;
        sc.name = j.value("name", std::string{});
        sc.description = j.value("description", std::string{});
        sc.properties = j.value("properties", std::vector<std::string>{});
        for (const auto& s : j.at("initial"))
            sc.initial.push_back(WeightedLiftedState{lifted_state_from_json(s), s.value("weight", 1.0)});
        for (const auto& a : j.value("actions", json::array())) sc.actions.push_back(action_from_json(a));
        sc.observations = observation_sequence_from_json(j.value("observations", json::array()));
        const json opts = j.value("options", json::object());
        sc.options.oracle = opts.value("oracle", false);
        sc.options.prune = opts.value("prune", 0.0);
        sc.options.split_budget = opts.value("split_budget", sc.options.split_budget);
        sc.options.amca_budget = opts.value("amca_budget", sc.options.amca_budget);
        sc.options.seed = opts.value("seed", std::uint64_t{0});
        validate(sc);
        return sc;
    } catch (const json::exception& e) {
        throw ModelError(std::string("malformed scenario: ") + e.what());
    } catch (const InvalidInput& e) {
        throw ModelError(std::string("invalid scenario: ") + e.what());
    }
}

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ModelError("'" + path + "' is not valid JSON: " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw IoError("write to '" + path + "' failed");
}

inline Scenario load_scenario(const std::string& path) { return scenario_from_json(read_json_file(path)); }

inline void save_scenario(const Scenario& sc, const std::string& path) {
    write_text_file(path, scenario_to_json(sc).dump(2) + "\n");
}

// ---------------------------------------------------------------------------
// Filtering driver and metrics

struct StepMetrics {
    std::size_t step = 0;
    std::optional<std::size_t> n_lifted;
    std::optional<std::size_t> n_ground;
    std::size_t n_splits = 0;
    std::size_t n_amca = 0;
    double ms = 0.0;

    friend bool operator==(const StepMetrics&, const StepMetrics&) = default;
};

enum class FilterMode { Lifted, Ground, Both };

struct FilterResult {
    std::vector<LiftedDistribution> lifted;  ///< posterior after each step (Lifted/Both)
    std::vector<GroundDistribution> ground;  ///< posterior after each step (Ground/Both)
    std::vector<CompareReport> reports;      ///< per-step comparison (Both)
    std::vector<StepMetrics> metrics;
};

inline LiftedDistribution initial_distribution(const Scenario& sc) {
    LiftedDistribution d;
    for (const auto& ws : sc.initial) d.insert(ws.state, ws.weight);
    d.normalize();
    return d;
}

/**
 * Alternates predict and update over the observation sequence. Wall time is
 * only measured when `timing` is set, so that metrics files are reproducible.
 * Impossible observations are rethrown with the step index.
 */
inline FilterResult run_filter(const Scenario& sc, FilterMode mode, bool timing = false, double tolerance = 1e-9) {
    const bool lifted_on = mode != FilterMode::Ground;
    const bool ground_on = mode != FilterMode::Lifted;
    const EngineOptions engine = sc.options.engine();

    FilterResult r;
    LiftedDistribution lifted = initial_distribution(sc);
    GroundDistribution ground;
    if (ground_on) ground = mixture_ground(lifted);

    for (std::size_t t = 0; t < sc.observations.size(); ++t) {
        const auto start = std::chrono::steady_clock::now();
        StepMetrics m;
        m.step = t + 1;
        EngineCounters counters;
        if (lifted_on) {
            lifted = predict(lifted, sc.actions, engine, &counters);
            for (const auto& y : sc.observations[t]) {
                try {
                    lifted = update(lifted, y, engine, &counters);
                } catch (const ImpossibleObservation& e) {
                    throw ImpossibleObservation("step " + std::to_string(t + 1) + ": " + e.what(), e.prior());
                }
            }
            lifted.prune(sc.options.prune);
            m.n_lifted = lifted.size();
            m.n_splits = counters.splits;
            m.n_amca = counters.amcas;
        }
        if (ground_on) {
            ground = predict_ground(ground, sc.actions, engine);
            for (const auto& y : sc.observations[t]) {
                try {
                    ground = update_ground(ground, y);
                } catch (const ImpossibleGroundObservation& e) {
                    throw ImpossibleGroundObservation("step " + std::to_string(t + 1) + ": " + e.what(), e.prior());
                }
            }
            m.n_ground = ground.size();
        }
        if (timing)
            m.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (lifted_on) r.lifted.push_back(lifted);
        if (ground_on) r.ground.push_back(ground);
        if (lifted_on && ground_on) r.reports.push_back(compare(lifted, ground, tolerance));
        r.metrics.push_back(m);
    }
    return r;
}

enum class MetricsFormat { Csv, Json };

inline std::string metrics_to_csv(const std::vector<StepMetrics>& metrics) {
    std::ostringstream out;
    out << "step,n_lifted,n_ground,n_splits,n_amca,ms\n";
    auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string{}; };
    for (const auto& m : metrics)
        out << m.step << ',' << opt(m.n_lifted) << ',' << opt(m.n_ground) << ',' << m.n_splits << ',' << m.n_amca << ','
            << format_real(m.ms) << '\n';
    return out.str();
}

inline json metrics_to_json(const std::vector<StepMetrics>& metrics) {
    json arr = json::array();
    for (const auto& m : metrics) {
        json j{{"step", m.step}, {"n_splits", m.n_splits}, {"n_amca", m.n_amca}, {"ms", m.ms}};
        j["n_lifted"] = m.n_lifted ? json(*m.n_lifted) : json(nullptr);
        j["n_ground"] = m.n_ground ? json(*m.n_ground) : json(nullptr);
        arr.push_back(std::move(j));
    }
    return json{{"columns", {"step", "n_lifted", "n_ground", "n_splits", "n_amca", "ms"}}, {"metrics", arr}};
}

inline std::string format_metrics(const std::vector<StepMetrics>& metrics, MetricsFormat format) {
    return format == MetricsFormat::Csv ? metrics_to_csv(metrics) : metrics_to_json(metrics).dump(2) + "\n";
}

inline void emit_metrics(const std::vector<StepMetrics>& metrics, MetricsFormat format, const std::string& path) {
    write_text_file(path, format_metrics(metrics, format));
}

// ---------------------------------------------------------------------------
// Bundled synthetic scenarios

struct OfficeOptions {
    std::size_t agents = 3;
    std::size_t steps = 20;
    std::optional<std::size_t> identify_at; ///< 1-based step of the identifying reading
    double walk_weight = 1.0;
    double stay_weight = 1.0;
};

inline const std::vector<std::string>& office_names() {
    static const std::vector<std::string> names{"Alice", "Bob", "Carol", "Dave", "Eve", "Frank", "Grace"};
    return names;
}

inline const std::vector<std::string>& office_rooms() {
    static const std::vector<std::string> rooms{"printer", "office", "kitchen", "lab", "lobby", "library", "lounge"};
    return rooms;
}

/**
 * Synthetic office: n anonymous agents on a ring of n rooms, one agent per room
 * initially. Each step every agent either stays or walks to the next room;
 * exact per-room counters then report one person per room. Names come from a
 * single urn. With identify_at, the first name is reported in the
 * printer/office area at that step.
 */
inline Scenario make_office_scenario(const OfficeOptions& o) {
    if (o.agents == 0 || o.agents > office_names().size())
        throw InvalidInput("office scenario supports 1.." + std::to_string(office_names().size()) + " agents");
    const auto& names = office_names();
    const auto& rooms = office_rooms();
    const std::size_t n = o.agents;

    Scenario sc;
    sc.name = o.identify_at ? "office" + std::to_string(n) + "-identify" : "office-" + std::to_string(n);
    sc.description = "Synthetic office analog: " + std::to_string(n) +
                     " agents on a ring of rooms, exact room counters" +
                     (o.identify_at ? ", identifying reading at step " + std::to_string(*o.identify_at) : "");
    sc.properties = {"Name", "Room"};

    LiftedState init;
    std::vector<Value> urn_values(names.begin(), names.begin() + static_cast<std::ptrdiff_t>(n));
    init.context.emplace("name", make_urn(urn_values));
    for (std::size_t i = 0; i < n; ++i) {
        const Label room = "room" + std::to_string(i);
        init.context.emplace(room, Dirac{rooms[i]});
        init.structure.insert(EntityStructure{{"Name", "name"}, {"Room", room}});
    }
    sc.initial.push_back(WeightedLiftedState{init, 1.0});

    sc.actions.push_back(Action{"stay", o.stay_weight, {Constraint::has("Room")}, {}});
    for (std::size_t i = 0; i < n; ++i) {
        const std::string& from = rooms[i];
        const std::string& to = rooms[(i + 1) % n];
        sc.actions.push_back(
            Action{"walk_" + from + "_" + to, o.walk_weight, {Constraint::eq("Room", from)}, {Effect::set(0, "Room", to)}});
    }

    for (std::size_t t = 1; t <= o.steps; ++t) {
        std::vector<Observation> step;
        for (std::size_t i = 0; i < n; ++i) step.push_back(CountReading{Constraint::eq("Room", rooms[i]), 1, {}, 0.0});
        if (o.identify_at && *o.identify_at == t) {
            IdentityReading id;
            id.property = "Name";
            id.value = names[0];
            std::vector<Value> area{rooms[0]};
            if (n > 1) area.push_back(rooms[1]);
            id.where = Constraint::in("Room", area);
            id.reliability = 1.0;
            step.push_back(id);
        }
        sc.observations.push_back(std::move(step));
    }
    sc.options.oracle = true;
    validate(sc);
    return sc;
}

/// Two entities with a shared name urn and independent Gaussian locations,
/// drifting with process noise and observed by anonymous location readings.
inline Scenario make_alicebob_gauss_scenario() {
    Scenario sc;
    sc.name = "alicebob-gauss";
    sc.description = "Two entities, name urn U(Alice,Bob), Gaussian locations; Kalman-path demo (no oracle)";
    sc.properties = {"Name", "Loc"};
    LiftedState init;
    init.context.emplace("N", make_urn({std::string("Alice"), std::string("Bob")}));
    init.context.emplace("L1", Gaussian{1.3, 2.0});
    init.context.emplace("L2", Gaussian{2.1, 1.0});
    init.structure.insert(EntityStructure{{"Name", "N"}, {"Loc", "L1"}});
    init.structure.insert(EntityStructure{{"Name", "N"}, {"Loc", "L2"}});
    sc.initial.push_back(WeightedLiftedState{init, 1.0});
    sc.actions.push_back(Action{"drift", 1.0, {Constraint::has("Loc")}, {Effect::shift(0, "Loc", 0.5, 0.1)}});

    sc.observations.push_back({LocationReading{"Loc", 2.0, 1.0, std::nullopt}});
    sc.observations.push_back({});
    sc.observations.push_back({LocationReading{"Loc", 3.1, 0.5, std::nullopt}});
    IdentityReading id;
    id.property = "Name";
    id.value = std::string("Alice");
    id.reliability = 1.0;
    id.at = LocationReading{"Loc", 3.0, 0.5, std::nullopt};
    sc.observations.push_back({id});
    sc.options.oracle = false;
    validate(sc);
    return sc;
}

} // namespace mslift

#endif
