#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "solarcast/dataset.hpp"
#include "solarcast/matrix.hpp"

namespace solarcast {

/// A dataset after per-channel scaling, laid out for model consumption.
struct ScaledSeries {
	Matrix features; // n x D
	std::vector<double> target;
	std::vector<double> clear_sky;

	std::size_t size() const { return target.size(); }
};

/// Per-channel min-max scaler with a small positive output offset: the
/// fitted minimum maps to offset and the maximum to 1 + offset, so scaled
/// values never reach zero (the bounded-support heads require strictly
/// positive targets). Channel 0 is the target, channel 1 the clear-sky
/// series, channels 2.. the features.
class MinMaxScaler {
public:
	double offset = 1e-6;
	std::vector<std::string> channel_names;
	std::vector<double> channel_min;
	std::vector<double> channel_max;

	static MinMaxScaler fit(std::span<const Dataset> segments, double offset = 1e-6) {
		if (segments.empty()) throw std::invalid_argument("scaler: no data to fit");
		MinMaxScaler s;
		s.offset = offset;
		s.channel_names.push_back("target");
		s.channel_names.push_back("clear_sky");
		for (const auto &name : segments[0].feature_names) s.channel_names.push_back(name);

		const std::size_t n_channels = s.channel_names.size();
		s.channel_min.assign(n_channels, std::numeric_limits<double>::infinity());
		s.channel_max.assign(n_channels, -std::numeric_limits<double>::infinity());

		auto update = [](double &lo, double &hi, double v) {
			if (v < lo) lo = v;
			if (v > hi) hi = v;
		};
		for (const Dataset &ds : segments) {
			if (ds.feature_names.size() + 2 != n_channels) {
				throw std::invalid_argument("scaler: segments disagree on feature count");
			}
			for (std::size_t i = 0; i < ds.size(); ++i) {
				update(s.channel_min[0], s.channel_max[0], ds.target[i]);
				update(s.channel_min[1], s.channel_max[1], ds.clear_sky[i]);
				for (std::size_t j = 0; j < ds.num_features(); ++j) {
					update(s.channel_min[j + 2], s.channel_max[j + 2], ds.features(i, j));
				}
			}
		}
		for (std::size_t c = 0; c < n_channels; ++c) {
			if (!(s.channel_max[c] > s.channel_min[c])) {
				throw std::invalid_argument("scaler: channel '" + s.channel_names[c] +
				                            "' is constant; need at least two distinct values");
			}
		}
		return s;
	}

	static MinMaxScaler fit(const Dataset &ds, double offset = 1e-6) {
		return fit(std::span<const Dataset>(&ds, 1), offset);
	}

	std::size_t num_channels() const { return channel_names.size(); }

	double apply_channel(std::size_t channel, double x) const {
		return offset + (x - channel_min[channel]) / (channel_max[channel] - channel_min[channel]);
	}

	double invert_channel(std::size_t channel, double y) const {
		return channel_min[channel] + (y - offset) * (channel_max[channel] - channel_min[channel]);
	}

	double apply_target(double x) const { return apply_channel(0, x); }
	double invert_target(double y) const { return invert_channel(0, y); }
	double apply_clear_sky(double x) const { return apply_channel(1, x); }

	/// Width of the target channel in original units; multiplies scaled-unit
	/// spreads back into W/m².
	double target_range() const { return channel_max[0] - channel_min[0]; }

	ScaledSeries apply(const Dataset &ds) const {
		if (ds.feature_names.size() + 2 != num_channels()) {
			throw std::invalid_argument("scaler: dataset feature count does not match fitted channels");
		}
		ScaledSeries out;
		out.target.resize(ds.size());
		out.clear_sky.resize(ds.size());
		out.features = Matrix(ds.size(), ds.num_features());
		for (std::size_t i = 0; i < ds.size(); ++i) {
			out.target[i] = apply_channel(0, ds.target[i]);
			out.clear_sky[i] = apply_channel(1, ds.clear_sky[i]);
			for (std::size_t j = 0; j < ds.num_features(); ++j) {
				out.features(i, j) = apply_channel(j + 2, ds.features(i, j));
			}
		}
		return out;
	}
};

} // namespace solarcast
