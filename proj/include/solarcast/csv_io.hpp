#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include "solarcast/dataset.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/timeutil.hpp"

namespace solarcast {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
	char buf[32];
	auto res = std::to_chars(buf, buf + sizeof(buf), v);
	return std::string(buf, res.ptr);
}

/// Writes via a temporary file in the same directory, then renames.
inline void write_file_atomic(const std::filesystem::path &path, const std::string &contents) {
	std::filesystem::path tmp = path;
	tmp += ".tmp";
	{
		std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
		if (!out) throw IoError("cannot open for writing: " + tmp.string());
		out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
		if (!out) throw IoError("write failed: " + tmp.string());
	}
	std::error_code ec;
	std::filesystem::rename(tmp, path, ec);
	if (ec) throw IoError("rename failed for " + path.string() + ": " + ec.message());
}

inline std::string read_file(const std::filesystem::path &path) {
	std::ifstream in(path, std::ios::binary);
	if (!in) throw IoError("cannot open: " + path.string());
	std::ostringstream ss;
	ss << in.rdbuf();
	return ss.str();
}

inline std::vector<std::string> split_csv_line(const std::string &line) {
	std::vector<std::string> fields;
	std::string cur;
	for (char ch : line) {
		if (ch == ',') {
			fields.push_back(cur);
			cur.clear();
		} else if (ch != '\r') {
			cur.push_back(ch);
		}
	}
	fields.push_back(cur);
	return fields;
}

inline std::string dataset_to_csv(const Dataset &ds) {
	std::string out = "timestamp,target,clear_sky";
	for (const auto &name : ds.feature_names) {
		out += ',';
		out += name;
	}
	out += '\n';
	auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
	for (std::size_t i = 0; i < ds.size(); ++i) {
		out += iso_from_hours(ds.timestamps[i]);
		out += ',';
		out += cell(ds.target[i]);
		out += ',';
		out += cell(ds.clear_sky[i]);
		for (std::size_t j = 0; j < ds.num_features(); ++j) {
			out += ',';
			out += cell(ds.features(i, j));
		}
		out += '\n';
	}
	return out;
}

inline void save_dataset_csv(const Dataset &ds, const std::filesystem::path &path) {
	write_file_atomic(path, dataset_to_csv(ds));
}

/// Parses the dataset CSV schema. Empty cells become NaN (missing); callers
/// normally run fill_missing_zeros on the result.
inline Dataset load_dataset_csv(const std::filesystem::path &path) {
	std::ifstream in(path);
	if (!in) throw IoError("cannot open: " + path.string());

	std::string line;
	if (!std::getline(in, line)) throw IoError("empty dataset file: " + path.string());
	std::vector<std::string> header = split_csv_line(line);
	if (header.size() < 3 || header[0] != "timestamp" || header[1] != "target" ||
	    header[2] != "clear_sky") {
		throw IoError("bad dataset header in " + path.string() +
		              "; expected timestamp,target,clear_sky,<feature...>");
	}

	Dataset ds;
	ds.feature_names.assign(header.begin() + 3, header.end());
	const std::size_t n_features = ds.feature_names.size();
	std::vector<double> feature_rows;

	auto parse_cell = [&](const std::string &s) -> double {
		if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
		double v = 0.0;
		auto res = std::from_chars(s.data(), s.data() + s.size(), v);
		if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
			throw IoError("bad numeric cell '" + s + "' in " + path.string());
		}
		return v;
	};

	std::size_t line_no = 1;
	while (std::getline(in, line)) {
		++line_no;
		if (line.empty()) continue;
		std::vector<std::string> cells = split_csv_line(line);
		if (cells.size() != header.size()) {
			throw IoError("row " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
			              " cells, expected " + std::to_string(header.size()));
		}
		ds.timestamps.push_back(hours_from_iso(cells[0]));
		ds.target.push_back(parse_cell(cells[1]));
		ds.clear_sky.push_back(parse_cell(cells[2]));
		for (std::size_t j = 0; j < n_features; ++j) {
			feature_rows.push_back(parse_cell(cells[3 + j]));
		}
	}
	ds.features = Matrix(ds.timestamps.size(), n_features);
	ds.features.storage() = std::move(feature_rows);
	ds.validate(/*allow_missing=*/true);
	return ds;
}

} // namespace solarcast
