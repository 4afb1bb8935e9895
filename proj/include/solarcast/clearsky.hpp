#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "solarcast/timeutil.hpp"

namespace solarcast {

inline constexpr double kPi = 3.14159265358979323846;

/// Solar declination in radians for a 1-based day of year (Cooper's formula).
inline double solar_declination(int day_of_year_1based) {
	return 0.40928 * std::sin(2.0 * kPi * (284.0 + day_of_year_1based) / 365.0);
}

/// Sine of the solar elevation angle. Hour-of-day is treated as local solar
/// time; the synthetic site sits on its reference meridian.
inline double sin_solar_elevation(double latitude_deg, int day_of_year_1based,
                                  double hour_of_day) {
	const double lat = latitude_deg * kPi / 180.0;
	const double decl = solar_declination(day_of_year_1based);
	const double hour_angle = (hour_of_day - 12.0) * (15.0 * kPi / 180.0);
	return std::sin(lat) * std::sin(decl) + std::cos(lat) * std::cos(decl) * std::cos(hour_angle);
}

/// Cloudless-sky irradiance in W/m² at the given timestamp and latitude.
/// Haurwitz-style envelope: 1098 * sin(el) * exp(-0.057 / sin(el)) above the
/// horizon and exactly zero at or below it. Monotone in elevation and
/// continuous through sunrise/sunset.
inline double clearsky_irradiance(std::int64_t timestamp, double latitude_deg) {
	if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0)) {
		throw std::invalid_argument("latitude must lie in [-90, 90] degrees");
	}
	const double s = sin_solar_elevation(latitude_deg, day_of_year(timestamp),
	                                     static_cast<double>(hour_of_day(timestamp)));
	if (s <= 0.0) return 0.0;
	return 1098.0 * s * std::exp(-0.057 / s);
}

} // namespace solarcast
