#pragma once

#include <Eigen/Core>

#include <cmath>
#include <limits>

namespace tvmdp {

enum class FieldKind { analytic, gridded };

/// Time-varying disturbance velocity field d(x, t) in m/s.
///
/// query() is pure and thread-safe; identical (x, t) always yields the
/// identical vector. Fields with a finite forecast horizon hold their last
/// snapshot for t beyond it.
class TimeVaryingField {
  public:
    virtual ~TimeVaryingField() = default;

    virtual Eigen::Vector2d query(const Eigen::Vector2d& x, double t) const = 0;
    virtual FieldKind kind() const { return FieldKind::analytic; }
    /// Seconds of valid forecast; +inf for analytic generators.
    virtual double horizon() const { return std::numeric_limits<double>::infinity(); }
};

class ZeroField final : public TimeVaryingField {
  public:
    Eigen::Vector2d query(const Eigen::Vector2d&, double) const override {
        return Eigen::Vector2d::Zero();
    }
};

class UniformField final : public TimeVaryingField {
  public:
    explicit UniformField(Eigen::Vector2d v) : v_(std::move(v)) {}
    Eigen::Vector2d query(const Eigen::Vector2d&, double) const override { return v_; }

  private:
    Eigen::Vector2d v_;
};

/// Spatially uniform vector of fixed magnitude whose direction angle
/// advances as angular_rate * t (zero phase at t = 0).
class SpinningField final : public TimeVaryingField {
  public:
    SpinningField(double magnitude, double angular_rate)
        : magnitude_(magnitude), angular_rate_(angular_rate) {}

    Eigen::Vector2d query(const Eigen::Vector2d&, double t) const override {
        const double a = angular_rate_ * t;
        return {magnitude_ * std::cos(a), magnitude_ * std::sin(a)};
    }

  private:
    double magnitude_;
    double angular_rate_;
};

/// Divergence-free vortex around a (possibly moving) center:
///   d(x, t) = strength * rotate90(x - c(t)),
/// where rotate90(v) = (-v.y, v.x) and the center orbits the anchor point at
/// orbit_radius with angular_rate. orbit_radius = 0 gives a static vortex.
class VortexField final : public TimeVaryingField {
  public:
    VortexField(Eigen::Vector2d center, double strength, double angular_rate,
                double orbit_radius = 0.0)
        : anchor_(std::move(center)),
          strength_(strength),
          angular_rate_(angular_rate),
          orbit_radius_(orbit_radius) {}

    Eigen::Vector2d center_at(double t) const {
        const double a = angular_rate_ * t;
        return anchor_ + orbit_radius_ * Eigen::Vector2d(std::cos(a), std::sin(a));
    }

    Eigen::Vector2d query(const Eigen::Vector2d& x, double t) const override {
        const Eigen::Vector2d r = x - center_at(t);
        return strength_ * Eigen::Vector2d(-r.y(), r.x());
    }

  private:
    Eigen::Vector2d anchor_;
    double strength_;
    double angular_rate_;
    double orbit_radius_;
};

}  // namespace tvmdp
