#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace solarcast {

/// Calendar used throughout: every year has exactly 365 days (8760 hours);
/// leap days do not exist. Hour 0 is 2000-01-01T00:00:00Z. This keeps
/// year-based splitting exact and hourly timestamps gap-free.
inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerYear = 365;
inline constexpr int kHoursPerYear = kHoursPerDay * kDaysPerYear;
inline constexpr int kEpochYear = 2000;

struct CivilTime {
	int year;
	int month; // 1..12
	int day;   // 1..month length
	int hour;  // 0..23
};

inline const std::array<int, 12> &month_lengths() {
	static const std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
	return lengths;
}

inline std::int64_t floor_div(std::int64_t a, std::int64_t b) {
	std::int64_t q = a / b;
	if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
	return q;
}

inline std::int64_t positive_mod(std::int64_t a, std::int64_t b) {
	std::int64_t m = a % b;
	return m < 0 ? m + b : m;
}

inline int hour_of_day(std::int64_t t) { return static_cast<int>(positive_mod(t, kHoursPerDay)); }

inline std::int64_t day_index(std::int64_t t) { return floor_div(t, kHoursPerDay); }

/// Day of year, 1-based (1..365).
inline int day_of_year(std::int64_t t) {
	return static_cast<int>(positive_mod(day_index(t), kDaysPerYear)) + 1;
}

inline int year_of(std::int64_t t) {
	return kEpochYear + static_cast<int>(floor_div(t, kHoursPerYear));
}

/// Weekday 0..6 with day 0 (2000-01-01) assigned 0.
inline int weekday(std::int64_t t) {
	return static_cast<int>(positive_mod(day_index(t), 7));
}

/// Week of year, 0..51 (the final partial week folds into week 51).
inline int week_of_year(std::int64_t t) {
	int w = (day_of_year(t) - 1) / 7;
	return w > 51 ? 51 : w;
}

inline CivilTime civil_from_hours(std::int64_t t) {
	CivilTime c{};
	c.year = year_of(t);
	int doy = day_of_year(t) - 1;
	c.month = 1;
	for (int len : month_lengths()) {
		if (doy < len) break;
		doy -= len;
		++c.month;
	}
	c.day = doy + 1;
	c.hour = hour_of_day(t);
	return c;
}

inline std::int64_t hours_from_civil(const CivilTime &c) {
	if (c.month < 1 || c.month > 12) throw std::invalid_argument("month out of range");
	if (c.month == 2 && c.day == 29) {
		throw std::invalid_argument("leap days are not representable in the 365-day calendar");
	}
	if (c.day < 1 || c.day > month_lengths()[static_cast<std::size_t>(c.month - 1)]) {
		throw std::invalid_argument("day out of range for month " + std::to_string(c.month));
	}
	if (c.hour < 0 || c.hour > 23) throw std::invalid_argument("hour out of range");
	std::int64_t doy = 0;
	for (int m = 1; m < c.month; ++m) doy += month_lengths()[static_cast<std::size_t>(m - 1)];
	doy += c.day - 1;
	return (static_cast<std::int64_t>(c.year - kEpochYear) * kDaysPerYear + doy) * kHoursPerDay +
	       c.hour;
}

inline std::string iso_from_hours(std::int64_t t) {
	const CivilTime c = civil_from_hours(t);
	char buf[40];
	std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:00:00Z", c.year, c.month, c.day, c.hour);
	return std::string(buf);
}

/// Parses "YYYY-MM-DDTHH:00:00Z" (minutes/seconds must be zero; hour
/// resolution only). Throws on malformed input and on Feb 29.
inline std::int64_t hours_from_iso(const std::string &iso) {
	CivilTime c{};
	int minute = 0, second = 0;
	if (std::sscanf(iso.c_str(), "%d-%d-%dT%d:%d:%d", &c.year, &c.month, &c.day, &c.hour, &minute,
	                &second) < 4) {
		throw std::invalid_argument("unparseable timestamp: " + iso);
	}
	if (minute != 0 || second != 0) {
		throw std::invalid_argument("timestamps must be hour-aligned: " + iso);
	}
	return hours_from_civil(c);
}

} // namespace solarcast
