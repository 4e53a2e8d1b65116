#pragma once

#include "tvmdp/disturbance.hpp"
#include "tvmdp/field_series.hpp"
#include "tvmdp/grid_world.hpp"
#include "tvmdp/solvers.hpp"
#include "tvmdp/transition.hpp"

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tvmdp {

/// Schema violations (unknown keys, wrong types, missing fields) carry the
/// dotted path of the offending key.
class ConfigError : public FormatError {
  public:
    using FormatError::FormatError;
};

struct FieldSpec {
    enum class Type { zero, uniform, spinning, vortex, gridded };
    Type type = Type::zero;

    Eigen::Vector2d vector = Eigen::Vector2d::Zero();  // uniform
    double magnitude = 0.0;                            // spinning
    double angular_rate = 0.0;                         // spinning + vortex
    Eigen::Vector2d center = Eigen::Vector2d::Zero();  // vortex
    double strength = 0.0;                             // vortex
    double orbit_radius = 0.0;                         // vortex
    std::filesystem::path path;                        // gridded (resolved against the config dir)
};

struct SolverSpec {
    enum class Kind { mdp, tvmdp, dtmdp, atmdp };
    Kind kind = Kind::mdp;
    std::string name;  // output label; defaults to the kind

    double tol = 1e-6;
    int max_iter = 2000;
    double tie_tol = 1e-9;
    int replan_interval = 1;     // tvmdp/atmdp
    double time_rel_tol = 0.01;  // tvmdp
    bool kolmogorov_synergistic = true;
    int layers = 10;       // dtmdp
    double horizon = 0.0;  // dtmdp; <= 0 -> layers * nominal hop
};

struct ExperimentConfig {
    GridSpec grid;
    State start = 0;
    FieldSpec field;
    NoiseConfig noise;  // sigmas < 0 mean "use grid defaults" until resolved
    RewardModel reward;
    TimingConfig timing;
    std::vector<SolverSpec> solvers;
    std::vector<std::uint64_t> seeds;
    int timeout_steps = 0;  // 0 -> 50 * |S|
    std::string output_dir = "tvmdp_out";
};

/// Parse and validate a config document. Unknown keys are rejected with a
/// diagnostic naming the key; defaults are resolved (noise sigmas, origin,
/// solver labels). base_dir anchors relative field-file paths.
ExperimentConfig parse_config(const std::string& json_text,
                              const std::filesystem::path& base_dir = ".");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Canonical serialization; parse(serialize(c)) is equivalent to c.
std::string serialize_config(const ExperimentConfig& config);

GridWorld make_grid(const ExperimentConfig& config);
std::unique_ptr<TimeVaryingField> make_field(const FieldSpec& spec);

const char* to_string(SolverSpec::Kind kind);
const char* to_string(FieldSpec::Type type);

}  // namespace tvmdp
