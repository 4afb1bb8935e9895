#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>

#include "solarcast/clearsky.hpp"
#include "solarcast/csv_io.hpp"
#include "solarcast/dataset.hpp"
#include "solarcast/scaler.hpp"
#include "solarcast/synthetic.hpp"
#include "solarcast/timeutil.hpp"
#include "solarcast/windows.hpp"

#include "oracles.hpp"

using namespace solarcast;

namespace {
std::filesystem::path temp_file(const char *name) {
	auto dir = std::filesystem::temp_directory_path() / "solarcast_test_data";
	std::filesystem::create_directories(dir);
	return dir / name;
}
} // namespace

TEST_CASE("time embedding hits the cardinal phases") {
	auto [s0, c0] = embed_time(0.0, 24.0);
	CHECK(s0 == Catch::Approx(0.0).margin(1e-12));
	CHECK(c0 == Catch::Approx(1.0).margin(1e-12));
	auto [s6, c6] = embed_time(6.0, 24.0);
	CHECK(s6 == Catch::Approx(1.0).margin(1e-12));
	CHECK(c6 == Catch::Approx(0.0).margin(1e-12));
	auto [s12, c12] = embed_time(12.0, 24.0);
	CHECK(s12 == Catch::Approx(0.0).margin(1e-12));
	CHECK(c12 == Catch::Approx(-1.0).margin(1e-12));
	CHECK_THROWS_AS(embed_time(1.0, 0.0), std::invalid_argument);
	CHECK_THROWS_AS(embed_time(1.0, -24.0), std::invalid_argument);
}

TEST_CASE("time embedding pairs lie on the unit circle") {
	for (int t = 0; t < 200; ++t) {
		for (double period : {24.0, 7.0, 52.0}) {
			auto [s, c] = embed_time(t, period);
			CHECK(std::abs(s * s + c * c - 1.0) < 1e-12);
		}
	}
}

TEST_CASE("calendar conversions roundtrip and reject leap days") {
	CHECK(iso_from_hours(0) == "2000-01-01T00:00:00Z");
	CHECK(hours_from_iso("2000-01-01T00:00:00Z") == 0);
	CHECK(hours_from_iso("2000-01-02T05:00:00Z") == 29);
	for (std::int64_t t : {0L, 12345L, 87659L, 87660L, 500000L}) {
		CHECK(hours_from_iso(iso_from_hours(t)) == t);
	}
	CHECK(year_of(kHoursPerYear) == 2001);
	CHECK(day_of_year(kHoursPerYear - 1) == 365);
	CHECK_THROWS_AS(hours_from_iso("2004-02-29T00:00:00Z"), std::invalid_argument);
	CHECK_THROWS_AS(hours_from_iso("garbage"), std::invalid_argument);
	CHECK_THROWS_AS(hours_from_iso("2004-13-01T00:00:00Z"), std::invalid_argument);
	CHECK_THROWS_AS(hours_from_iso("2004-01-01T00:30:00Z"), std::invalid_argument);
}

TEST_CASE("clear-sky curve vanishes below the horizon and peaks at noon") {
	// Midnight at the winter solstice, 60 N.
	const std::int64_t midwinter_midnight = hours_from_civil({2001, 12, 21, 0});
	CHECK(clearsky_irradiance(midwinter_midnight, 60.0) == 0.0);

	// Noon at the summer solstice, 60 N: in the high hundreds of W/m².
	const std::int64_t midsummer_noon = hours_from_civil({2001, 6, 21, 12});
	const double peak = clearsky_irradiance(midsummer_noon, 60.0);
	CHECK(peak > 700.0);
	CHECK(peak < 1000.0);

	// Derived check: evaluate the closed form at the solar elevation given
	// by the declination/hour-angle geometry.
	const double s = sin_solar_elevation(60.0, day_of_year(midsummer_noon), 12.0);
	CHECK(peak == Catch::Approx(1098.0 * s * std::exp(-0.057 / s)).margin(1e-9));

	CHECK_THROWS_AS(clearsky_irradiance(0, 120.0), std::invalid_argument);
	CHECK_THROWS_AS(clearsky_irradiance(0, -91.0), std::invalid_argument);
}

TEST_CASE("clear-sky curve is increasing in solar elevation") {
	double prev = -1.0;
	for (int deg = 1; deg <= 90; ++deg) {
		const double s = std::sin(deg * kPi / 180.0);
		const double v = 1098.0 * s * std::exp(-0.057 / s);
		CHECK(v > prev);
		prev = v;
	}
}

TEST_CASE("synthetic degenerate case: no clouds means target equals clear sky") {
	SyntheticConfig cfg;
	cfg.year_count = 1;
	cfg.cloud_autocorrelation = 0.0;
	cfg.cloud_floor = 1.0;
	cfg.seed = 3;
	const Dataset ds = synthesize_dataset(cfg);
	REQUIRE(ds.size() == static_cast<std::size_t>(kHoursPerYear));
	for (std::size_t i = 0; i < ds.size(); ++i) {
		CHECK(ds.target[i] == ds.clear_sky[i]);
	}
}

TEST_CASE("synthetic generation is deterministic and bounded by clear sky") {
	SyntheticConfig cfg;
	cfg.year_count = 2;
	cfg.seed = 42;
	const Dataset a = synthesize_dataset(cfg);
	const Dataset b = synthesize_dataset(cfg);
	REQUIRE(a.size() == b.size());
	CHECK(a.target == b.target);
	CHECK(a.features.storage() == b.features.storage());
	for (std::size_t i = 0; i < a.size(); ++i) {
		CHECK(a.target[i] >= 0.0);
		CHECK(a.target[i] <= a.clear_sky[i]);
	}
	SyntheticConfig other = cfg;
	other.seed = 43;
	CHECK(synthesize_dataset(other).target != a.target);
}

TEST_CASE("synthetic config validation") {
	SyntheticConfig cfg;
	cfg.latitude_deg = 120.0;
	CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
	cfg = {};
	cfg.cloud_autocorrelation = 1.0;
	CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
	cfg = {};
	cfg.cloud_floor = 0.0;
	CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
	cfg = {};
	cfg.year_count = 0;
	CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
}

TEST_CASE("fill_missing_zeros replaces every gap") {
	Dataset ds;
	ds.feature_names = {"f0"};
	ds.timestamps = {100, 101, 102};
	ds.target = {1.0, std::nan(""), 3.0};
	ds.clear_sky = {0.0, 5.0, std::nan("")};
	ds.features = Matrix(3, 1);
	ds.features(0, 0) = std::nan("");
	ds.features(1, 0) = std::nan("");
	ds.features(2, 0) = 7.0;

	const Dataset filled = fill_missing_zeros(ds);
	CHECK(filled.target == std::vector<double>{1.0, 0.0, 3.0});
	CHECK(filled.clear_sky == std::vector<double>{0.0, 5.0, 0.0});
	CHECK(filled.features(0, 0) == 0.0);
	CHECK(filled.features(1, 0) == 0.0);
	CHECK(filled.features(2, 0) == 7.0);
	CHECK_FALSE(filled.has_missing());

	// Identity on a gap-free dataset.
	const Dataset again = fill_missing_zeros(filled);
	CHECK(again.target == filled.target);
	CHECK(again.features.storage() == filled.features.storage());
}

TEST_CASE("scaler maps the fitted range onto [offset, 1 + offset]") {
	Dataset ds;
	ds.feature_names = {};
	ds.features = Matrix(3, 0);
	ds.timestamps = {0, 1, 2};
	ds.target = {0.0, 50.0, 100.0};
	ds.clear_sky = {0.0, 75.0, 150.0};

	const MinMaxScaler scaler = MinMaxScaler::fit(ds);
	CHECK(scaler.apply_target(50.0) == Catch::Approx(0.5 + 1e-6));
	CHECK(scaler.apply_target(0.0) == Catch::Approx(1e-6));
	CHECK(scaler.apply_target(0.0) > 0.0); // strictly positive for the bounded supports
	CHECK(scaler.apply_target(100.0) == Catch::Approx(1.0 + 1e-6));
	CHECK(scaler.invert_target(scaler.apply_target(73.2)) == Catch::Approx(73.2).epsilon(1e-9));
}

TEST_CASE("scaler roundtrip is exact to 1e-9 relative over the fitted range") {
	SyntheticConfig cfg;
	cfg.year_count = 1;
	cfg.seed = 5;
	const Dataset ds = synthesize_dataset(cfg);
	const MinMaxScaler scaler = MinMaxScaler::fit(ds);
	Rng rng(99);
	for (std::size_t c = 0; c < scaler.num_channels(); ++c) {
		for (int i = 0; i < 50; ++i) {
			const double x = rng.uniform(scaler.channel_min[c], scaler.channel_max[c]);
			const double back = scaler.invert_channel(c, scaler.apply_channel(c, x));
			CHECK(std::abs(back - x) <= 1e-9 * std::max(1.0, std::abs(x)));
		}
	}
}

TEST_CASE("scaler rejects constant channels by name") {
	Dataset ds;
	ds.feature_names = {"flat"};
	ds.timestamps = {0, 1, 2};
	ds.target = {0.0, 1.0, 2.0};
	ds.clear_sky = {0.0, 1.0, 2.0};
	ds.features = Matrix(3, 1, 4.2);
	try {
		(void)MinMaxScaler::fit(ds);
		FAIL("expected a constant-channel error");
	} catch (const std::invalid_argument &e) {
		CHECK(std::string(e.what()).find("flat") != std::string::npos);
	}
}

TEST_CASE("window counts follow the stride formula") {
	CHECK(make_windows(std::size_t{108}, 72, 36, 1).size() == 1);
	CHECK(make_windows(std::size_t{109}, 72, 36, 1).size() == 2);
	CHECK(make_windows(std::size_t{120}, 72, 36, 5).size() == 3);
	CHECK_THROWS_AS(make_windows(std::size_t{107}, 72, 36, 1), std::invalid_argument);
	try {
		(void)make_windows(std::size_t{10}, 72, 36, 1);
		FAIL("expected a too-short error");
	} catch (const std::invalid_argument &e) {
		CHECK(std::string(e.what()).find("108") != std::string::npos);
	}
}

TEST_CASE("windows never leak target hours into the input") {
	const auto windows = make_windows(std::size_t{500}, 72, 36, 7);
	for (const auto &w : windows) {
		// Input rows all precede the first target row.
		std::size_t max_input = 0;
		for (int t = 0; t < w.window; ++t) max_input = std::max(max_input, w.input_row(t));
		CHECK(max_input == w.origin);
		CHECK(w.target_row(0) == w.origin + 1);
		CHECK(w.target_row(w.horizon - 1) == w.origin + 36);
		CHECK(w.target_row(w.horizon - 1) < 500);
		CHECK(w.input_row(0) + static_cast<std::size_t>(w.window) == w.origin + 1);
	}
}

TEST_CASE("year split partitions the dataset without window leakage") {
	SyntheticConfig cfg;
	cfg.year_count = 5;
	cfg.seed = 9;
	const Dataset ds = synthesize_dataset(cfg);
	const YearSplit split = split_by_year(ds, 1, 2);

	REQUIRE(split.test.size() == 1);
	REQUIRE(split.val.size() == 1);
	REQUIRE(split.train.size() == 1); // years 3..5 merge into one segment
	CHECK(split.test[0].size() == static_cast<std::size_t>(kHoursPerYear));
	CHECK(split.val[0].size() == static_cast<std::size_t>(kHoursPerYear));
	CHECK(split.train[0].size() == static_cast<std::size_t>(3 * kHoursPerYear));

	std::size_t total = 0;
	for (const auto &seg : split.train) total += seg.size();
	for (const auto &seg : split.val) total += seg.size();
	for (const auto &seg : split.test) total += seg.size();
	CHECK(total == ds.size());

	// Segments start/end exactly at year boundaries, so windows built per
	// segment can never straddle a split boundary.
	CHECK(year_of(split.train[0].timestamps.front()) == 2003);
	CHECK(year_of(split.train[0].timestamps.back()) == 2005);
	CHECK(year_of(split.val[0].timestamps.front()) == 2002);
	CHECK(year_of(split.val[0].timestamps.back()) == 2002);

	// Non-contiguous training years stay as separate segments.
	const YearSplit split2 = split_by_year(ds, 3, 1);
	REQUIRE(split2.train.size() == 2);
	CHECK(split2.train[0].size() == static_cast<std::size_t>(kHoursPerYear));
	CHECK(split2.train[1].size() == static_cast<std::size_t>(2 * kHoursPerYear));

	CHECK_THROWS_AS(split_by_year(ds, 2, 2), std::invalid_argument);
	CHECK_THROWS_AS(split_by_year(ds, 0, 2), std::invalid_argument);
	CHECK_THROWS_AS(split_by_year(ds, 6, 2), std::invalid_argument);
	SyntheticConfig small = cfg;
	small.year_count = 2;
	CHECK_THROWS_AS(split_by_year(synthesize_dataset(small), 1, 2), std::invalid_argument);
}

TEST_CASE("csv roundtrip preserves the dataset bit-exactly") {
	SyntheticConfig cfg;
	cfg.year_count = 1;
	cfg.seed = 21;
	Dataset ds = synthesize_dataset(cfg);
	// Punch a few holes to exercise the missing-value cells.
	ds.target[100] = std::nan("");
	ds.features(200, 3) = std::nan("");

	const auto path = temp_file("roundtrip.csv");
	save_dataset_csv(ds, path);
	const Dataset back = load_dataset_csv(path);

	REQUIRE(back.size() == ds.size());
	CHECK(back.feature_names == ds.feature_names);
	CHECK(back.timestamps == ds.timestamps);
	CHECK(std::isnan(back.target[100]));
	CHECK(std::isnan(back.features(200, 3)));
	for (std::size_t i = 0; i < ds.size(); ++i) {
		if (i != 100) CHECK(back.target[i] == ds.target[i]);
		CHECK(back.clear_sky[i] == ds.clear_sky[i]);
		for (std::size_t j = 0; j < ds.num_features(); ++j) {
			if (i == 200 && j == 3) continue;
			CHECK(back.features(i, j) == ds.features(i, j));
		}
	}
	std::filesystem::remove(path);
}

TEST_CASE("csv loader rejects malformed input") {
	const auto path = temp_file("bad.csv");
	write_file_atomic(path, "time,target,clear_sky\n");
	CHECK_THROWS_AS(load_dataset_csv(path), IoError);
	write_file_atomic(path, "timestamp,target,clear_sky\n2001-01-01T00:00:00Z,1.0\n");
	CHECK_THROWS_AS(load_dataset_csv(path), IoError);
	write_file_atomic(path, "timestamp,target,clear_sky\n2001-01-01T00:00:00Z,abc,2\n");
	CHECK_THROWS_AS(load_dataset_csv(path), IoError);
	// Gap in the hourly sequence.
	write_file_atomic(path, "timestamp,target,clear_sky\n2001-01-01T00:00:00Z,1,2\n"
	                        "2001-01-01T02:00:00Z,1,2\n");
	CHECK_THROWS_AS(load_dataset_csv(path), std::invalid_argument);
	std::filesystem::remove(path);
}
