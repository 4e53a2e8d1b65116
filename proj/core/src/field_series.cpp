#include "tvmdp/field_series.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tvmdp {

void GriddedFieldSeries::validate() const {
    if (width <= 0 || height <= 0)
        throw FormatError("field series: width and height must be positive");
    if (!(cell_size > 0.0)) throw FormatError("field series: cell_size must be positive");
    if (snapshots.size() < 2)
        throw FormatError("field series: at least 2 snapshots required for interpolation, got " +
                          std::to_string(snapshots.size()));
    const auto cells = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    for (std::size_t i = 0; i < snapshots.size(); ++i) {
        const auto& snap = snapshots[i];
        if (snap.u.size() != cells || snap.v.size() != cells)
            throw FormatError("field series: snapshot " + std::to_string(i) + " has " +
                              std::to_string(snap.u.size()) + "/" + std::to_string(snap.v.size()) +
                              " u/v values, expected " + std::to_string(cells));
        if (i > 0 && !(snap.t > snapshots[i - 1].t))
            throw FormatError("field series: snapshot " + std::to_string(i) +
                              " timestamp not strictly increasing");
        if (!std::isfinite(snap.t))
            throw FormatError("field series: snapshot " + std::to_string(i) +
                              " has non-finite timestamp");
    }
}

GriddedFieldSeries parse_field_series(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field series: invalid JSON: ") + e.what());
    }
    GriddedFieldSeries series;
    try {
        series.width = j.at("width").get<int>();
        series.height = j.at("height").get<int>();
        series.cell_size = j.at("cell_size").get<double>();
        for (const auto& js : j.at("snapshots")) {
            GriddedFieldSeries::Snapshot snap;
            snap.t = js.at("t").get<double>();
            snap.u = js.at("u").get<std::vector<double>>();
            snap.v = js.at("v").get<std::vector<double>>();
            series.snapshots.push_back(std::move(snap));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("field series: ") + e.what());
    }
    series.validate();
    return series;
}

GriddedFieldSeries load_field_series(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("field series: cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_field_series(buf.str());
}

void write_field_series(const std::filesystem::path& path, const GriddedFieldSeries& series) {
    series.validate();
    nlohmann::ordered_json j;
    j["width"] = series.width;
    j["height"] = series.height;
    j["cell_size"] = series.cell_size;
    j["snapshots"] = nlohmann::ordered_json::array();
    for (const auto& snap : series.snapshots) {
        nlohmann::ordered_json js;
        js["t"] = snap.t;
        js["u"] = snap.u;
        js["v"] = snap.v;
        j["snapshots"].push_back(std::move(js));
    }
    std::ofstream out(path);
    if (!out) throw FormatError("field series: cannot write " + path.string());
    out << j.dump(2) << '\n';
}

Eigen::Vector2d interpolate(const GriddedFieldSeries& series, const Eigen::Vector2d& x, double t) {
    if (series.snapshots.size() < 2)
        throw FormatError("interpolate: at least 2 snapshots required");

    // Bracketing snapshots; hold first/last outside the covered range.
    const auto& snaps = series.snapshots;
    std::size_t hi = 0;
    while (hi < snaps.size() && snaps[hi].t < t) ++hi;
    double alpha = 0.0;
    std::size_t lo = 0;
    if (hi == 0) {
        lo = hi = 0;
    } else if (hi == snaps.size()) {
        lo = hi = snaps.size() - 1;
    } else {
        lo = hi - 1;
        alpha = (t - snaps[lo].t) / (snaps[hi].t - snaps[lo].t);
    }

    // Bilinear weights over the cell-center lattice, clamped at the boundary.
    const double c = series.cell_size;
    const auto axis = [c](double v, int n, int& i0, int& i1, double& f) {
        const double u = v / c - 0.5;
        double fl = std::floor(u);
        i0 = static_cast<int>(fl);
        f = u - fl;
        if (i0 < 0) {
            i0 = 0;
            f = 0.0;
        }
        if (i0 >= n - 1) {
            i0 = n - 1;
            f = 0.0;
        }
        i1 = std::min(i0 + 1, n - 1);
    };
    int c0, c1, r0, r1;
    double fx, fy;
    axis(x.x(), series.width, c0, c1, fx);
    axis(x.y(), series.height, r0, r1, fy);

    const auto sample = [&](const GriddedFieldSeries::Snapshot& s) {
        const auto at = [&](int col, int row) {
            const std::size_t idx =
                static_cast<std::size_t>(row) * static_cast<std::size_t>(series.width) + col;
            return Eigen::Vector2d(s.u[idx], s.v[idx]);
        };
        const Eigen::Vector2d bottom = (1.0 - fx) * at(c0, r0) + fx * at(c1, r0);
        const Eigen::Vector2d top = (1.0 - fx) * at(c0, r1) + fx * at(c1, r1);
        return Eigen::Vector2d((1.0 - fy) * bottom + fy * top);
    };

    if (lo == hi) return sample(snaps[lo]);
    return (1.0 - alpha) * sample(snaps[lo]) + alpha * sample(snaps[hi]);
}

}  // namespace tvmdp
