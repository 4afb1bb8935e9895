#pragma once

#include <cstdint>
#include <stdexcept>

#include "solarcast/clearsky.hpp"
#include "solarcast/dataset.hpp"
#include "solarcast/rng.hpp"
#include "solarcast/timeutil.hpp"

namespace solarcast {

/// Parameters of the synthetic high-latitude irradiance generator.
struct SyntheticConfig {
	double latitude_deg = 60.0;
	int year_count = 5;
	double cloud_autocorrelation = 0.7; // AR(1) coefficient of the cloud index
	double cloud_floor = 0.25;          // lower clamp of the cloud index
	std::uint64_t seed = 1;
	int start_year = 2001;

	void validate() const {
		if (!(latitude_deg >= -90.0 && latitude_deg <= 90.0)) {
			throw std::invalid_argument("synthetic: latitude must lie in [-90, 90]");
		}
		if (year_count < 1) throw std::invalid_argument("synthetic: year_count must be >= 1");
		if (!(cloud_autocorrelation >= 0.0 && cloud_autocorrelation < 1.0)) {
			throw std::invalid_argument("synthetic: cloud autocorrelation must lie in [0, 1)");
		}
		if (!(cloud_floor > 0.0 && cloud_floor <= 1.0)) {
			throw std::invalid_argument("synthetic: cloud floor must lie in (0, 1]");
		}
	}
};

inline const std::vector<std::string> &synthetic_feature_names() {
	static const std::vector<std::string> names = {
	    "lag_1h",   "lag_2h",   "lag_3h",  "lag_24h", "clear_sky", "cloud_index",
	    "hour_sin", "hour_cos", "dow_sin", "dow_cos", "woy_sin",   "woy_cos"};
	return names;
}

/// Time-embedding block shared by the synthetic generator and the
/// single-channel baseline dataset: hour of day (period 24), day of week
/// (period 7), week of year (period 52).
inline void write_time_features(std::int64_t t, double *out6) {
	const auto hod = embed_time(hour_of_day(t), 24.0);
	const auto dow = embed_time(weekday(t), 7.0);
	const auto woy = embed_time(week_of_year(t), 52.0);
	out6[0] = hod.first;
	out6[1] = hod.second;
	out6[2] = dow.first;
	out6[3] = dow.second;
	out6[4] = woy.first;
	out6[5] = woy.second;
}

/// Generates an hourly dataset: target = clear-sky envelope times a cloud
/// index k. k follows an AR(1) process with innovation sd 0.15, clamped to
/// [cloud_floor, 1], stepped only during daylight hours and held overnight,
/// which carries cloud conditions from one evening into the next morning.
inline Dataset synthesize_dataset(const SyntheticConfig &cfg) {
	cfg.validate();
	Rng rng(cfg.seed);
	const double sigma_k = 0.15;

	const std::int64_t t0 =
	    hours_from_civil(CivilTime{cfg.start_year, 1, 1, 0});
	const std::size_t n = static_cast<std::size_t>(cfg.year_count) * kHoursPerYear;

	Dataset ds;
	ds.feature_names = synthetic_feature_names();
	ds.timestamps.resize(n);
	ds.target.resize(n);
	ds.clear_sky.resize(n);
	ds.features = Matrix(n, ds.feature_names.size());

	double k = 1.0;
	for (std::size_t i = 0; i < n; ++i) {
		const std::int64_t t = t0 + static_cast<std::int64_t>(i);
		const double cs = clearsky_irradiance(t, cfg.latitude_deg);
		if (cs > 0.0) {
			const double rho = cfg.cloud_autocorrelation;
			k = rho * k + (1.0 - rho) + sigma_k * rng.normal();
			if (k < cfg.cloud_floor) k = cfg.cloud_floor;
			if (k > 1.0) k = 1.0;
		}
		ds.timestamps[i] = t;
		ds.clear_sky[i] = cs;
		ds.target[i] = cs * k;
	}

	for (std::size_t i = 0; i < n; ++i) {
		double *f = ds.features.row(i);
		f[0] = i >= 1 ? ds.target[i - 1] : 0.0;
		f[1] = i >= 2 ? ds.target[i - 2] : 0.0;
		f[2] = i >= 3 ? ds.target[i - 3] : 0.0;
		f[3] = i >= 24 ? ds.target[i - 24] : 0.0;
		f[4] = ds.clear_sky[i];
		// Observed clear-sky index; defined as 1 where the envelope vanishes.
		f[5] = ds.clear_sky[i] > 1.0 ? ds.target[i] / ds.clear_sky[i] : 1.0;
		write_time_features(ds.timestamps[i], f + 6);
	}
	ds.validate();
	return ds;
}

/// Reduces a dataset to the target channel plus time embeddings; this is the
/// input of the single-station baseline model.
inline Dataset target_only_dataset(const Dataset &ds) {
	Dataset out;
	out.timestamps = ds.timestamps;
	out.target = ds.target;
	out.clear_sky = ds.clear_sky;
	out.feature_names = {"target",  "hour_sin", "hour_cos", "dow_sin",
	                     "dow_cos", "woy_sin",  "woy_cos"};
	out.features = Matrix(ds.size(), out.feature_names.size());
	for (std::size_t i = 0; i < ds.size(); ++i) {
		double *f = out.features.row(i);
		f[0] = ds.target[i];
		write_time_features(ds.timestamps[i], f + 1);
	}
	return out;
}

} // namespace solarcast
