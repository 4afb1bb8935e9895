#pragma once

#include <array>
#include <stdexcept>
#include <vector>

#include "solarcast/dataset.hpp"
#include "solarcast/matrix.hpp"
#include "solarcast/model.hpp"
#include "solarcast/windows.hpp"

namespace solarcast {

inline constexpr double kClearSkyRatioThreshold = 1.0; // W/m²; below this the ratio is 1
inline constexpr double kRatioClampMax = 1.5;          // bounds dawn/dusk ratio spikes

/// Inputs of one smart-persistence forecast: the last day of observations
/// and the clear-sky values covering both that day and the coming 36 hours.
struct SmartPersistenceState {
	std::array<double, 24> observations;    // x(t0-23) .. x(t0)
	std::array<double, 24> clear_sky_past;  // cs over the same hours
	std::array<double, 36> clear_sky_future; // cs(t0+1) .. cs(t0+36)
};

inline double clear_sky_ratio(double observation, double clear_sky) {
	if (clear_sky <= kClearSkyRatioThreshold) return 1.0;
	double r = observation / clear_sky;
	if (r < 0.0) r = 0.0;
	if (r > kRatioClampMax) r = kRatioClampMax;
	return r;
}

/// Projects yesterday's clear-sky ratios onto the coming clear-sky values:
/// horizon hour h (1..24) reuses the ratio observed 24 h earlier at the same
/// time of day; hours 25..36 reuse the first twelve ratios.
inline std::array<double, 36> smart_persistence_36h(const SmartPersistenceState &state) {
	std::array<double, 24> ratio;
	for (int h = 0; h < 24; ++h) {
		ratio[h] = clear_sky_ratio(state.observations[h], state.clear_sky_past[h]);
	}
	std::array<double, 36> forecast;
	for (int h = 0; h < 36; ++h) {
		forecast[h] = ratio[h < 24 ? h : h - 24] * state.clear_sky_future[h];
	}
	return forecast;
}

/// Builds the persistence state for a window origin; origin must have at
/// least 23 hours of history and 36 hours of future in the dataset.
inline SmartPersistenceState smart_persistence_state(const Dataset &ds, std::size_t origin) {
	if (origin < 23 || origin + 36 >= ds.size()) {
		throw std::invalid_argument("smart_persistence_state: origin needs 24 h of history and "
		                            "36 h of future");
	}
	SmartPersistenceState st;
	for (int i = 0; i < 24; ++i) {
		st.observations[i] = ds.target[origin - 23 + static_cast<std::size_t>(i)];
		st.clear_sky_past[i] = ds.clear_sky[origin - 23 + static_cast<std::size_t>(i)];
	}
	for (int h = 0; h < 36; ++h) {
		st.clear_sky_future[h] = ds.clear_sky[origin + 1 + static_cast<std::size_t>(h)];
	}
	return st;
}

/// Smart-persistence forecasts for a set of window origins, in original
/// units, shaped like the model predictions (batch x 36).
inline Matrix smart_persistence_forecasts(const Dataset &ds,
                                          const std::vector<WindowedSample> &samples) {
	Matrix out(samples.size(), 36);
	for (std::size_t i = 0; i < samples.size(); ++i) {
		if (samples[i].horizon != 36) {
			throw std::invalid_argument("smart persistence is defined for the 36 h horizon");
		}
		const auto f = smart_persistence_36h(smart_persistence_state(ds, samples[i].origin));
		for (int h = 0; h < 36; ++h) out(i, static_cast<std::size_t>(h)) = f[static_cast<std::size_t>(h)];
	}
	return out;
}

/// Spec of the single-station feed-forward baseline: one tanh hidden layer
/// of 64 units over the flattened window of the target channel plus time
/// embeddings.
inline ModelSpec mlp_baseline_spec(int window, int horizon, std::uint64_t seed) {
	ModelSpec spec;
	spec.arch = Arch::mlp;
	spec.head = HeadKind::deterministic;
	spec.layers = 1;
	spec.hidden = 64;
	spec.window = window;
	spec.horizon = horizon;
	spec.input_dim = 7; // target + three sine/cosine time pairs
	spec.seed = seed;
	return spec;
}

} // namespace solarcast
