#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solarcast/dataset.hpp"
#include "solarcast/scaler.hpp"

namespace solarcast {

/// One forecasting sample: the input window covers hours
/// [origin - window + 1, origin], the target and its clear-sky companion
/// cover [origin + 1, origin + horizon].
struct WindowedSample {
	std::size_t origin = 0;
	int window = 0;
	int horizon = 0;

	std::size_t input_begin() const { return origin + 1 - static_cast<std::size_t>(window); }
	std::size_t input_row(int t) const { return input_begin() + static_cast<std::size_t>(t); }
	std::size_t target_row(int h) const { return origin + 1 + static_cast<std::size_t>(h); }
};

/// Enumerates window origins over a series of the given length.
inline std::vector<WindowedSample> make_windows(std::size_t length, int window, int horizon,
                                                int stride = 1) {
	if (window < 1 || horizon < 1 || stride < 1) {
		throw std::invalid_argument("make_windows: window, horizon, and stride must be positive");
	}
	const std::size_t need = static_cast<std::size_t>(window) + static_cast<std::size_t>(horizon);
	if (length < need) {
		throw std::invalid_argument("make_windows: series too short; need at least " +
		                            std::to_string(need) + " hours, got " + std::to_string(length));
	}
	std::vector<WindowedSample> out;
	const std::size_t first = static_cast<std::size_t>(window) - 1;
	const std::size_t last = length - static_cast<std::size_t>(horizon) - 1;
	for (std::size_t o = first; o <= last; o += static_cast<std::size_t>(stride)) {
		out.push_back(WindowedSample{o, window, horizon});
	}
	return out;
}

inline std::vector<WindowedSample> make_windows(const Dataset &ds, int window, int horizon,
                                                int stride = 1) {
	return make_windows(ds.size(), window, horizon, stride);
}

/// Scaled segments plus the flattened sample index used by training and
/// evaluation. Windows never span segment boundaries.
struct WindowSet {
	std::vector<ScaledSeries> segments;
	std::vector<std::pair<std::size_t, WindowedSample>> samples; // (segment, sample)
	int window = 0;
	int horizon = 0;

	std::size_t size() const { return samples.size(); }
};

inline WindowSet build_window_set(std::span<const Dataset> segments, const MinMaxScaler &scaler,
                                  int window, int horizon, int stride = 1) {
	WindowSet ws;
	ws.window = window;
	ws.horizon = horizon;
	for (std::size_t s = 0; s < segments.size(); ++s) {
		ws.segments.push_back(scaler.apply(segments[s]));
		if (segments[s].size() < static_cast<std::size_t>(window + horizon)) continue;
		for (const WindowedSample &w : make_windows(segments[s], window, horizon, stride)) {
			ws.samples.emplace_back(s, w);
		}
	}
	return ws;
}

} // namespace solarcast
