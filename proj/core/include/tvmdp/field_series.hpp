#pragma once

#include "tvmdp/disturbance.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace tvmdp {

/// Raised for malformed field files (and experiment configs; see config.hpp).
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Ordered velocity snapshots on a uniform grid. Cell (col, row) holds its
/// velocity at the center ((col + 0.5) * cell_size, (row + 0.5) * cell_size);
/// u and v are row-major flat arrays of the x/y components in m/s.
///
/// File format (JSON):
///   {"width":W,"height":H,"cell_size":C,
///    "snapshots":[{"t":seconds,"u":[W*H floats],"v":[W*H floats]}, ...]}
struct GriddedFieldSeries {
    struct Snapshot {
        double t = 0.0;
        std::vector<double> u;
        std::vector<double> v;
    };

    int width = 0;
    int height = 0;
    double cell_size = 1.0;
    std::vector<Snapshot> snapshots;

    /// Enforces: positive dims, at least 2 snapshots, strictly increasing
    /// timestamps, and per-snapshot array sizes of width*height (violations
    /// name the offending snapshot index). Throws FormatError.
    void validate() const;
};

GriddedFieldSeries parse_field_series(const std::string& json_text);
GriddedFieldSeries load_field_series(const std::filesystem::path& path);
void write_field_series(const std::filesystem::path& path, const GriddedFieldSeries& series);

/// Bilinear in space over cell centers, linear in time between the bracketing
/// snapshots; exact at cell centers and snapshot timestamps. Clamps to the
/// boundary cell row/column outside the center lattice and holds the first/
/// last snapshot outside the time range.
Eigen::Vector2d interpolate(const GriddedFieldSeries& series, const Eigen::Vector2d& x, double t);

/// TimeVaryingField view over a validated series.
class GriddedField final : public TimeVaryingField {
  public:
    explicit GriddedField(GriddedFieldSeries series) : series_(std::move(series)) {
        series_.validate();
    }

    Eigen::Vector2d query(const Eigen::Vector2d& x, double t) const override {
        return interpolate(series_, x, t);
    }
    FieldKind kind() const override { return FieldKind::gridded; }
    double horizon() const override { return series_.snapshots.back().t; }

    const GriddedFieldSeries& series() const { return series_; }

  private:
    GriddedFieldSeries series_;
};

}  // namespace tvmdp
