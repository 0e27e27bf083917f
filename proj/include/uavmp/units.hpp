#pragma once

#include <cmath>
#include <numbers>

// Wire units (ft, NM, knots, kg/h, hours) are converted at the parse boundary.
// Everything inside the library is meters, seconds, kilograms.
namespace uavmp::units {

inline constexpr double kFootM = 0.3048;
inline constexpr double kNauticalMileM = 1852.0;
inline constexpr double kKnotMps = 1852.0 / 3600.0;
inline constexpr double kHourS = 3600.0;

constexpr double ft_to_m(double ft) { return ft * kFootM; }
constexpr double m_to_ft(double m) { return m / kFootM; }
constexpr double nm_to_m(double nm) { return nm * kNauticalMileM; }
constexpr double m_to_nm(double m) { return m / kNauticalMileM; }
constexpr double kt_to_mps(double kt) { return kt * kKnotMps; }
constexpr double mps_to_kt(double v) { return v / kKnotMps; }
constexpr double kgph_to_kgps(double r) { return r / kHourS; }
constexpr double kgps_to_kgph(double r) { return r * kHourS; }
constexpr double h_to_s(double h) { return h * kHourS; }
constexpr double s_to_h(double s) { return s / kHourS; }
constexpr double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Rounds a converted wire value so that repeated unit round trips are stable.
inline double wire_round(double v) { return std::round(v * 1e6) / 1e6; }

} // namespace uavmp::units
