#pragma once

// Rotating-body parameters and the flyby Doppler formulas.
//
// All angles are radians and all frequencies are angular (rad/s). Unit
// conversion from degrees or revolutions per minute happens only at the
// configuration boundary through the helpers at the bottom of this file.

#include <cmath>
#include <numbers>
#include <string>

#include "flyby/error.hpp"

namespace flyby {

struct PhysicalConstants {
    /// Exact SI value, m/s.
    static constexpr double speed_of_light = 299792458.0;
};

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// A heavy object spinning about an axis parallel to the beam path.
class RotatingBody {
public:
    RotatingBody(double angular_velocity_rad_s, double mean_radius_m)
        : angular_velocity_(angular_velocity_rad_s), mean_radius_(mean_radius_m) {
        if (!std::isfinite(angular_velocity_) || angular_velocity_ < 0.0)
            throw InvalidArgument("angular velocity must be finite and >= 0, got " +
                                  std::to_string(angular_velocity_));
        if (!std::isfinite(mean_radius_) || mean_radius_ <= 0.0)
            throw InvalidArgument("mean radius must be finite and > 0, got " +
                                  std::to_string(mean_radius_));
        if (2.0 * angular_velocity_ * mean_radius_ >= PhysicalConstants::speed_of_light)
            throw InvalidArgument("surface speed 2*omega*R must stay below the speed of light");
    }

    double angular_velocity() const noexcept { return angular_velocity_; }
    double mean_radius() const noexcept { return mean_radius_; }

    friend bool operator==(const RotatingBody&, const RotatingBody&) = default;

private:
    double angular_velocity_;
    double mean_radius_;
};

/// Declinations of the incoming and outgoing asymptotic velocity vectors.
class FlybyGeometry {
public:
    FlybyGeometry(double declination_in_rad, double declination_out_rad)
        : declination_in_(declination_in_rad), declination_out_(declination_out_rad) {
        if (!std::isfinite(declination_in_) || !std::isfinite(declination_out_))
            throw InvalidArgument("declinations must be finite");
    }

    double declination_in() const noexcept { return declination_in_; }
    double declination_out() const noexcept { return declination_out_; }

    /// The beam runs along the rotation axis: in at 0, out at pi.
    static FlybyGeometry parallel() { return {0.0, std::numbers::pi}; }

private:
    double declination_in_;
    double declination_out_;
};

/// Light or matter wave with angular frequency omega.
class BeamSource {
public:
    explicit BeamSource(double angular_frequency_rad_s) : angular_frequency_(angular_frequency_rad_s) {
        if (!std::isfinite(angular_frequency_) || angular_frequency_ < 0.0)
            throw InvalidArgument("beam angular frequency must be finite and >= 0, got " +
                                  std::to_string(angular_frequency_));
    }

    double angular_frequency() const noexcept { return angular_frequency_; }

    friend bool operator==(const BeamSource&, const BeamSource&) = default;

private:
    double angular_frequency_;
};

/// K = 2 Omega R / c. Lies in [0, 1) for every valid body.
inline double k_factor(const RotatingBody& body) noexcept {
    return 2.0 * body.angular_velocity() * body.mean_radius() / PhysicalConstants::speed_of_light;
}

/// Delta omega = 2 K omega (cos delta_in - cos delta_out). Signed.
inline double doppler_shift(const RotatingBody& body, const FlybyGeometry& geometry,
                            const BeamSource& beam) noexcept {
    const double dcos = std::cos(geometry.declination_in()) - std::cos(geometry.declination_out());
    return 2.0 * k_factor(body) * beam.angular_frequency() * dcos;
}

/// Shift for a path parallel to the rotation axis: 8 Omega R omega / c = 4 K omega.
inline double parallel_flyby_shift(const RotatingBody& body, const BeamSource& beam) noexcept {
    return 4.0 * k_factor(body) * beam.angular_frequency();
}

/// Delta omega / omega for the parallel path (4K).
inline double fractional_shift(const RotatingBody& body) noexcept { return 4.0 * k_factor(body); }

/// Coefficient of omega inside the cos^2 / sin^2 detection probabilities (2K).
inline double phase_coefficient(const RotatingBody& body) noexcept { return 2.0 * k_factor(body); }

/// Reduces a phase into [0, 2 pi).
inline double reduce_phase(double phase) {
    if (!std::isfinite(phase))
        throw InvalidArgument("phase must be finite");
    double r = std::fmod(phase, two_pi);
    if (r < 0.0)
        r += two_pi;
    // fmod of a value just below zero can round up to exactly 2 pi after the shift
    if (r >= two_pi)
        r = 0.0;
    return r;
}

inline constexpr double rpm_to_rad_s(double rpm) noexcept { return rpm * two_pi / 60.0; }
inline constexpr double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }

} // namespace flyby
