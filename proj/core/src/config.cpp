#include "tvmdp/config.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace tvmdp {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

/// Strict object view: every key must be consumed, leftovers are reported by
/// their dotted path.
class StrictObject {
  public:
    StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError("config: " + path_ + " must be an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError("config: missing required key \"" + dotted(key) + "\"");
        return j_.at(key);
    }

    template <typename T>
    T get(const std::string& key) {
        try {
            return at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError("config: key \"" + dotted(key) + "\" has the wrong type");
        }
    }

    template <typename T>
    T get_or(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!j_.contains(key)) return fallback;
        return get<T>(key);
    }

    Eigen::Vector2d get_vec2(const std::string& key) {
        const auto& v = at(key);
        if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number())
            throw ConfigError("config: key \"" + dotted(key) + "\" must be a [x, y] number pair");
        return {v[0].get<double>(), v[1].get<double>()};
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.contains(item.key()))
                throw ConfigError("config: unknown key \"" + dotted(item.key()) + "\"");
    }

    std::string dotted(const std::string& key) const {
        return path_.empty() ? key : path_ + "." + key;
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

FieldSpec::Type field_type_of(const std::string& s, const std::string& path) {
    if (s == "zero") return FieldSpec::Type::zero;
    if (s == "uniform") return FieldSpec::Type::uniform;
    if (s == "spinning") return FieldSpec::Type::spinning;
    if (s == "vortex") return FieldSpec::Type::vortex;
    if (s == "gridded") return FieldSpec::Type::gridded;
    throw ConfigError("config: " + path + ".type \"" + s +
                      "\" is not one of zero|uniform|spinning|vortex|gridded");
}

SolverSpec::Kind solver_kind_of(const std::string& s, const std::string& path) {
    if (s == "mdp") return SolverSpec::Kind::mdp;
    if (s == "tvmdp") return SolverSpec::Kind::tvmdp;
    if (s == "dtmdp") return SolverSpec::Kind::dtmdp;
    if (s == "atmdp") return SolverSpec::Kind::atmdp;
    throw ConfigError("config: " + path + ".name \"" + s + "\" is not one of mdp|tvmdp|dtmdp|atmdp");
}

GridSpec parse_grid(const json& j) {
    StrictObject o(j, "grid");
    GridSpec grid;
    grid.width = o.get<int>("width");
    grid.height = o.get<int>("height");
    grid.cell_size = o.get_or<double>("cell_size", 1.0);
    if (o.has("origin")) grid.origin = o.get_vec2("origin");
    grid.goal = o.get<State>("goal");
    grid.speed = o.get_or<double>("speed", 1.0);
    grid.obstacles = o.get_or<std::vector<State>>("obstacles", {});
    o.finish();
    return grid;
}

FieldSpec parse_field(const json& j, const std::filesystem::path& base_dir) {
    StrictObject o(j, "field");
    FieldSpec field;
    field.type = field_type_of(o.get<std::string>("type"), "field");
    switch (field.type) {
        case FieldSpec::Type::zero:
            break;
        case FieldSpec::Type::uniform:
            field.vector = o.get_vec2("vector");
            break;
        case FieldSpec::Type::spinning:
            field.magnitude = o.get<double>("magnitude");
            field.angular_rate = o.get<double>("angular_rate");
            break;
        case FieldSpec::Type::vortex:
            field.center = o.get_vec2("center");
            field.strength = o.get<double>("strength");
            field.angular_rate = o.get_or<double>("angular_rate", 0.0);
            field.orbit_radius = o.get_or<double>("orbit_radius", 0.0);
            break;
        case FieldSpec::Type::gridded: {
            const auto rel = std::filesystem::path(o.get<std::string>("path"));
            field.path = rel.is_absolute() ? rel : base_dir / rel;
            break;
        }
    }
    o.finish();
    return field;
}

SolverSpec parse_solver(const json& j, const std::string& path) {
    StrictObject o(j, path);
    SolverSpec spec;
    spec.kind = solver_kind_of(o.get<std::string>("name"), path);
    spec.name = o.get_or<std::string>("label", to_string(spec.kind));
    spec.tol = o.get_or<double>("tol", spec.tol);
    spec.max_iter = o.get_or<int>("max_iter", spec.max_iter);
    spec.tie_tol = o.get_or<double>("tie_tol", spec.tie_tol);
    spec.replan_interval = o.get_or<int>("replan_interval", spec.replan_interval);
    spec.time_rel_tol = o.get_or<double>("time_rel_tol", spec.time_rel_tol);
    spec.kolmogorov_synergistic =
        o.get_or<std::string>("kolmogorov_pmf", "synergistic") != "action_only";
    spec.layers = o.get_or<int>("layers", spec.layers);
    spec.horizon = o.get_or<double>("horizon", spec.horizon);
    o.finish();
    return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }

    StrictObject root(j, "");
    ExperimentConfig config;
    config.grid = parse_grid(root.at("grid"));
    config.start = root.get<State>("start");
    config.field = parse_field(root.at("field"), base_dir);

    if (root.has("noise")) {
        StrictObject o(root.at("noise"), "noise");
        config.noise.sigma_action = o.get_or<double>("sigma_action", -1.0);
        config.noise.sigma_disturbance = o.get_or<double>("sigma_disturbance", -1.0);
        config.noise.duration = o.get_or<double>("duration", -1.0);
        o.finish();
    } else {
        config.noise.sigma_action = -1.0;
        config.noise.sigma_disturbance = -1.0;
        config.noise.duration = -1.0;
    }
    // Resolve grid-relative noise defaults.
    if (config.noise.sigma_action < 0.0) config.noise.sigma_action = 0.1 * config.grid.cell_size;
    if (config.noise.sigma_disturbance < 0.0)
        config.noise.sigma_disturbance = 0.2 * config.grid.cell_size;
    if (config.noise.duration <= 0.0)
        config.noise.duration = config.grid.cell_size / config.grid.speed;

    if (root.has("reward")) {
        StrictObject o(root.at("reward"), "reward");
        config.reward.goal_reward = o.get_or<double>("goal_reward", config.reward.goal_reward);
        config.reward.step_cost = o.get_or<double>("step_cost", config.reward.step_cost);
        config.reward.discount = o.get_or<double>("discount", config.reward.discount);
        o.finish();
    }

    if (root.has("timing")) {
        StrictObject o(root.at("timing"), "timing");
        config.timing.epsilon_velocity =
            o.get_or<double>("epsilon_velocity", config.timing.epsilon_velocity);
        config.timing.linear_tol = o.get_or<double>("linear_tol", config.timing.linear_tol);
        config.timing.iteration_cap_factor =
            o.get_or<int>("iteration_cap_factor", config.timing.iteration_cap_factor);
        if (o.has("idle_dwell")) config.timing.idle_dwell = o.get<double>("idle_dwell");
        o.finish();
    }

    {
        const auto& js = root.at("solvers");
        if (!js.is_array() || js.empty())
            throw ConfigError("config: \"solvers\" must be a non-empty array");
        std::set<std::string> labels;
        for (std::size_t i = 0; i < js.size(); ++i) {
            auto spec = parse_solver(js[i], "solvers[" + std::to_string(i) + "]");
            if (!labels.insert(spec.name).second)
                throw ConfigError("config: duplicate solver label \"" + spec.name +
                                  "\" (set a distinct \"label\")");
            config.solvers.push_back(std::move(spec));
        }
    }

    config.seeds = root.get<std::vector<std::uint64_t>>("seeds");
    if (config.seeds.empty()) throw ConfigError("config: \"seeds\" must be non-empty");
    config.timeout_steps = root.get_or<int>("timeout_steps", 0);
    config.output_dir = root.get_or<std::string>("output_dir", config.output_dir);
    root.finish();

    // Construction-level validation (dimensions, goal, start).
    const GridWorld grid = make_grid(config);
    if (!grid.valid_id(config.start) || grid.blocked(config.start))
        throw ConfigError("config: \"start\" must be a valid, non-blocked state");
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.has_parent_path() ? path.parent_path() : ".");
}

std::string serialize_config(const ExperimentConfig& config) {
    ordered_json j;
    j["grid"] = {{"width", config.grid.width},
                 {"height", config.grid.height},
                 {"cell_size", config.grid.cell_size},
                 {"goal", config.grid.goal},
                 {"speed", config.grid.speed}};
    if (config.grid.origin)
        j["grid"]["origin"] = {config.grid.origin->x(), config.grid.origin->y()};
    if (!config.grid.obstacles.empty()) j["grid"]["obstacles"] = config.grid.obstacles;
    j["start"] = config.start;

    ordered_json field;
    field["type"] = to_string(config.field.type);
    switch (config.field.type) {
        case FieldSpec::Type::zero:
            break;
        case FieldSpec::Type::uniform:
            field["vector"] = {config.field.vector.x(), config.field.vector.y()};
            break;
        case FieldSpec::Type::spinning:
            field["magnitude"] = config.field.magnitude;
            field["angular_rate"] = config.field.angular_rate;
            break;
        case FieldSpec::Type::vortex:
            field["center"] = {config.field.center.x(), config.field.center.y()};
            field["strength"] = config.field.strength;
            field["angular_rate"] = config.field.angular_rate;
            field["orbit_radius"] = config.field.orbit_radius;
            break;
        case FieldSpec::Type::gridded:
            field["path"] = config.field.path.string();
            break;
    }
    j["field"] = std::move(field);

    j["noise"] = {{"sigma_action", config.noise.sigma_action},
                  {"sigma_disturbance", config.noise.sigma_disturbance},
                  {"duration", config.noise.duration}};
    j["reward"] = {{"goal_reward", config.reward.goal_reward},
                   {"step_cost", config.reward.step_cost},
                   {"discount", config.reward.discount}};
    j["timing"] = {{"epsilon_velocity", config.timing.epsilon_velocity},
                   {"linear_tol", config.timing.linear_tol},
                   {"iteration_cap_factor", config.timing.iteration_cap_factor}};
    if (config.timing.idle_dwell) j["timing"]["idle_dwell"] = *config.timing.idle_dwell;

    j["solvers"] = ordered_json::array();
    for (const auto& s : config.solvers) {
        ordered_json js;
        js["name"] = to_string(s.kind);
        js["label"] = s.name;
        js["tol"] = s.tol;
        js["max_iter"] = s.max_iter;
        js["tie_tol"] = s.tie_tol;
        switch (s.kind) {
            case SolverSpec::Kind::mdp:
                break;
            case SolverSpec::Kind::tvmdp:
                js["replan_interval"] = s.replan_interval;
                js["time_rel_tol"] = s.time_rel_tol;
                js["kolmogorov_pmf"] = s.kolmogorov_synergistic ? "synergistic" : "action_only";
                break;
            case SolverSpec::Kind::dtmdp:
                js["layers"] = s.layers;
                js["horizon"] = s.horizon;
                break;
            case SolverSpec::Kind::atmdp:
                js["replan_interval"] = s.replan_interval;
                break;
        }
        j["solvers"].push_back(std::move(js));
    }
    j["seeds"] = config.seeds;
    j["timeout_steps"] = config.timeout_steps;
    j["output_dir"] = config.output_dir;
    return j.dump(2) + "\n";
}

GridWorld make_grid(const ExperimentConfig& config) { return GridWorld(config.grid); }

std::unique_ptr<TimeVaryingField> make_field(const FieldSpec& spec) {
    switch (spec.type) {
        case FieldSpec::Type::zero:
            return std::make_unique<ZeroField>();
        case FieldSpec::Type::uniform:
            return std::make_unique<UniformField>(spec.vector);
        case FieldSpec::Type::spinning:
            return std::make_unique<SpinningField>(spec.magnitude, spec.angular_rate);
        case FieldSpec::Type::vortex:
            return std::make_unique<VortexField>(spec.center, spec.strength, spec.angular_rate,
                                                 spec.orbit_radius);
        case FieldSpec::Type::gridded:
            return std::make_unique<GriddedField>(load_field_series(spec.path));
    }
    throw ConfigError("config: unhandled field type");
}

const char* to_string(SolverSpec::Kind kind) {
    switch (kind) {
        case SolverSpec::Kind::mdp:
            return "mdp";
        case SolverSpec::Kind::tvmdp:
            return "tvmdp";
        case SolverSpec::Kind::dtmdp:
            return "dtmdp";
        case SolverSpec::Kind::atmdp:
            return "atmdp";
    }
    return "?";
}

const char* to_string(FieldSpec::Type type) {
    switch (type) {
        case FieldSpec::Type::zero:
            return "zero";
        case FieldSpec::Type::uniform:
            return "uniform";
        case FieldSpec::Type::spinning:
            return "spinning";
        case FieldSpec::Type::vortex:
            return "vortex";
        case FieldSpec::Type::gridded:
            return "gridded";
    }
    return "?";
}

}  // namespace tvmdp
