#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solarcast/matrix.hpp"
#include "solarcast/timeutil.hpp"

namespace solarcast {

/// Cyclic time embedding: sine and cosine of 2*pi*t/period.
inline std::pair<double, double> embed_time(double t, double period) {
	if (!(period > 0.0)) {
		throw std::invalid_argument("embed_time: period must be positive");
	}
	const double phase = 2.0 * 3.14159265358979323846 * t / period;
	return {std::sin(phase), std::cos(phase)};
}

/// One hour of data, returned by Dataset::record.
struct IrradianceRecord {
	std::int64_t timestamp = 0;
	std::vector<double> features;
	double target = 0.0;
	double clear_sky = 0.0;
};

/// Hourly multi-feature series with the target irradiance and its aligned
/// clear-sky envelope. Stored column-wise; timestamps advance in fixed
/// one-hour steps. Missing values are held as NaN until fill_missing_zeros.
class Dataset {
public:
	std::vector<std::int64_t> timestamps;
	Matrix features; // size() x num_features
	std::vector<double> target;
	std::vector<double> clear_sky;
	std::vector<std::string> feature_names;

	std::size_t size() const { return timestamps.size(); }
	std::size_t num_features() const { return features.cols(); }

	IrradianceRecord record(std::size_t i) const {
		IrradianceRecord r;
		r.timestamp = timestamps[i];
		r.features.assign(features.row(i), features.row(i) + features.cols());
		r.target = target[i];
		r.clear_sky = clear_sky[i];
		return r;
	}

	bool has_missing() const {
		for (double v : target)
			if (std::isnan(v)) return true;
		for (double v : clear_sky)
			if (std::isnan(v)) return true;
		for (double v : features.storage())
			if (std::isnan(v)) return true;
		return false;
	}

	/// Checks the structural invariants; pass allow_missing=true for raw
	/// series that have not been gap-filled yet.
	void validate(bool allow_missing = false) const {
		const std::size_t n = size();
		if (target.size() != n || clear_sky.size() != n || features.rows() != n) {
			throw std::invalid_argument("dataset: column lengths disagree");
		}
		if (feature_names.size() != features.cols()) {
			throw std::invalid_argument("dataset: feature name count does not match feature count");
		}
		for (std::size_t i = 1; i < n; ++i) {
			if (timestamps[i] != timestamps[i - 1] + 1) {
				throw std::invalid_argument("dataset: timestamps must advance in 1 h steps (gap at row " +
				                            std::to_string(i) + ")");
			}
		}
		for (std::size_t i = 0; i < n; ++i) {
			if (!std::isnan(clear_sky[i]) && clear_sky[i] < 0.0) {
				throw std::invalid_argument("dataset: negative clear-sky value at row " + std::to_string(i));
			}
		}
		if (!allow_missing && has_missing()) {
			throw std::invalid_argument("dataset: contains missing values; run fill_missing_zeros first");
		}
	}

	/// Copy of rows [begin, end).
	Dataset slice(std::size_t begin, std::size_t end) const {
		Dataset out;
		out.feature_names = feature_names;
		out.timestamps.assign(timestamps.begin() + static_cast<std::ptrdiff_t>(begin),
		                      timestamps.begin() + static_cast<std::ptrdiff_t>(end));
		out.target.assign(target.begin() + static_cast<std::ptrdiff_t>(begin),
		                  target.begin() + static_cast<std::ptrdiff_t>(end));
		out.clear_sky.assign(clear_sky.begin() + static_cast<std::ptrdiff_t>(begin),
		                     clear_sky.begin() + static_cast<std::ptrdiff_t>(end));
		out.features = Matrix(end - begin, features.cols());
		for (std::size_t i = begin; i < end; ++i) {
			for (std::size_t j = 0; j < features.cols(); ++j) out.features(i - begin, j) = features(i, j);
		}
		return out;
	}
};

/// Replaces every NaN in the target, clear-sky, and feature columns with 0.
inline Dataset fill_missing_zeros(Dataset ds) {
	for (double &v : ds.target)
		if (std::isnan(v)) v = 0.0;
	for (double &v : ds.clear_sky)
		if (std::isnan(v)) v = 0.0;
	for (double &v : ds.features.storage())
		if (std::isnan(v)) v = 0.0;
	return ds;
}

/// Ordered list of the distinct calendar years a dataset touches.
inline std::vector<int> dataset_years(const Dataset &ds) {
	std::vector<int> years;
	for (std::int64_t t : ds.timestamps) {
		const int y = year_of(t);
		if (years.empty() || years.back() != y) years.push_back(y);
	}
	return years;
}

struct YearSplit {
	std::vector<Dataset> train; // one entry per contiguous run of training years
	std::vector<Dataset> val;
	std::vector<Dataset> test;
};

/// Splits a dataset into train/val/test along calendar-year boundaries.
/// Years are addressed by 1-based position within the dataset (year 1 is the
/// earliest). Contiguous training years are merged into single segments so
/// windows may span them; no segment ever crosses a split boundary.
inline YearSplit split_by_year(const Dataset &ds, int test_year, int val_year) {
	const std::vector<int> years = dataset_years(ds);
	if (years.size() < 3) {
		throw std::invalid_argument("split_by_year: dataset must span at least 3 calendar years");
	}
	if (test_year == val_year) {
		throw std::invalid_argument("split_by_year: test and validation years must differ");
	}
	const int n_years = static_cast<int>(years.size());
	if (test_year < 1 || test_year > n_years || val_year < 1 || val_year > n_years) {
		throw std::invalid_argument("split_by_year: year index out of range 1.." +
		                            std::to_string(n_years));
	}

	// Row ranges per year, in dataset order.
	std::vector<std::pair<std::size_t, std::size_t>> ranges;
	std::size_t begin = 0;
	for (std::size_t i = 1; i <= ds.size(); ++i) {
		if (i == ds.size() || year_of(ds.timestamps[i]) != year_of(ds.timestamps[begin])) {
			ranges.emplace_back(begin, i);
			begin = i;
		}
	}

	YearSplit out;
	int run_start = -1; // first year of the open training run, 1-based
	auto flush_train_run = [&](int next_non_train_year) {
		if (run_start < 0) return;
		out.train.push_back(
		    ds.slice(ranges[static_cast<std::size_t>(run_start - 1)].first,
		             ranges[static_cast<std::size_t>(next_non_train_year - 2)].second));
		run_start = -1;
	};
	for (int y = 1; y <= n_years; ++y) {
		const auto &r = ranges[static_cast<std::size_t>(y - 1)];
		if (y == test_year) {
			flush_train_run(y);
			out.test.push_back(ds.slice(r.first, r.second));
		} else if (y == val_year) {
			flush_train_run(y);
			out.val.push_back(ds.slice(r.first, r.second));
		} else if (run_start < 0) {
			run_start = y;
		}
	}
	flush_train_run(n_years + 1);
	return out;
}

} // namespace solarcast
