#pragma once

#include <cstdint>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "solarcast/adam.hpp"
#include "solarcast/csv_io.hpp"
#include "solarcast/errors.hpp"
#include "solarcast/model.hpp"
#include "solarcast/scaler.hpp"

namespace solarcast {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char *kCheckpointFormat = "solarcast-checkpoint";

namespace detail {

inline void append_double_le(std::string &out, double v) {
	std::uint64_t bits;
	std::memcpy(&bits, &v, sizeof(bits));
	for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

inline double read_double_le(const char *p) {
	std::uint64_t bits = 0;
	for (int i = 0; i < 8; ++i) {
		bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
	}
	double v;
	std::memcpy(&v, &bits, sizeof(v));
	return v;
}

} // namespace detail

inline nlohmann::json spec_to_json(const ModelSpec &spec) {
	return nlohmann::json{{"arch", arch_name(spec.arch)},
	                      {"head", head_name(spec.head)},
	                      {"layers", spec.layers},
	                      {"hidden", spec.hidden},
	                      {"window", spec.window},
	                      {"horizon", spec.horizon},
	                      {"input_dim", spec.input_dim},
	                      {"quantiles", spec.quantiles},
	                      {"learning_rate", spec.learning_rate},
	                      {"batch_size", spec.batch_size},
	                      {"seed", spec.seed}};
}

inline ModelSpec spec_from_json(const nlohmann::json &j) {
	ModelSpec spec;
	spec.arch = arch_from_name(j.at("arch").get<std::string>());
	spec.head = head_from_name(j.at("head").get<std::string>());
	spec.layers = j.at("layers").get<int>();
	spec.hidden = j.at("hidden").get<int>();
	spec.window = j.at("window").get<int>();
	spec.horizon = j.at("horizon").get<int>();
	spec.input_dim = j.at("input_dim").get<int>();
	spec.quantiles = j.at("quantiles").get<std::vector<double>>();
	spec.learning_rate = j.at("learning_rate").get<double>();
	spec.batch_size = j.at("batch_size").get<int>();
	spec.seed = j.at("seed").get<std::uint64_t>();
	return spec;
}

inline nlohmann::json scaler_to_json(const MinMaxScaler &s) {
	return nlohmann::json{{"offset", s.offset},
	                      {"channel_names", s.channel_names},
	                      {"channel_min", s.channel_min},
	                      {"channel_max", s.channel_max}};
}

inline MinMaxScaler scaler_from_json(const nlohmann::json &j) {
	MinMaxScaler s;
	s.offset = j.at("offset").get<double>();
	s.channel_names = j.at("channel_names").get<std::vector<std::string>>();
	s.channel_min = j.at("channel_min").get<std::vector<double>>();
	s.channel_max = j.at("channel_max").get<std::vector<double>>();
	if (s.channel_min.size() != s.channel_names.size() ||
	    s.channel_max.size() != s.channel_names.size()) {
		throw IoError("checkpoint scaler: channel arrays disagree in length");
	}
	return s;
}

/// Serialized model container: a single JSON header line holding the spec,
/// scaler, seed, optimizer scalars, and block table, followed by a raw
/// little-endian float64 blob (parameters, then Adam first and second
/// moments).
inline std::string checkpoint_serialize(ForecastModel &model, const MinMaxScaler &scaler,
                                        const AdamState &adam) {
	auto params = model.parameters();
	nlohmann::json blocks = nlohmann::json::array();
	std::size_t total = 0;
	for (const Param *p : params) {
		blocks.push_back(nlohmann::json{
		    {"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
		total += p->size();
	}
	const bool has_moments = adam.matches(params);
	nlohmann::json header{{"format", kCheckpointFormat},
	                      {"version", kCheckpointVersion},
	                      {"seed", model.spec().seed},
	                      {"spec", spec_to_json(model.spec())},
	                      {"scaler", scaler_to_json(scaler)},
	                      {"adam", nlohmann::json{{"beta1", adam.beta1},
	                                              {"beta2", adam.beta2},
	                                              {"eps", adam.eps},
	                                              {"step", adam.step},
	                                              {"moments", has_moments}}},
	                      {"blocks", blocks},
	                      {"param_doubles", total}};

	std::string out = header.dump();
	out += '\n';
	out.reserve(out.size() + total * 8 * (has_moments ? 3 : 1));
	for (const Param *p : params) {
		for (double v : p->value.storage()) detail::append_double_le(out, v);
	}
	if (has_moments) {
		for (const auto &block : adam.m) {
			for (double v : block) detail::append_double_le(out, v);
		}
		for (const auto &block : adam.v) {
			for (double v : block) detail::append_double_le(out, v);
		}
	}
	return out;
}

struct Checkpoint {
	ModelSpec spec;
	MinMaxScaler scaler;
	AdamState adam;
	std::unique_ptr<ForecastModel> model;
};

inline Checkpoint checkpoint_deserialize(const std::string &bytes) {
	const std::size_t nl = bytes.find('\n');
	if (nl == std::string::npos) throw IoError("checkpoint: missing header line");
	nlohmann::json header;
	try {
		header = nlohmann::json::parse(bytes.substr(0, nl));
	} catch (const nlohmann::json::exception &e) {
		throw IoError(std::string("checkpoint: corrupt header: ") + e.what());
	}
	try {
		if (header.at("format").get<std::string>() != kCheckpointFormat) {
			throw IoError("checkpoint: not a model checkpoint file");
		}
		if (header.at("version").get<int>() != kCheckpointVersion) {
			throw IoError("checkpoint: unsupported version " +
			              std::to_string(header.at("version").get<int>()));
		}

		Checkpoint ck;
		ck.spec = spec_from_json(header.at("spec"));
		ck.scaler = scaler_from_json(header.at("scaler"));
		ck.model = make_model(ck.spec);
		ck.adam.beta1 = header.at("adam").at("beta1").get<double>();
		ck.adam.beta2 = header.at("adam").at("beta2").get<double>();
		ck.adam.eps = header.at("adam").at("eps").get<double>();
		ck.adam.step = header.at("adam").at("step").get<std::int64_t>();
		const bool has_moments = header.at("adam").at("moments").get<bool>();

		auto params = ck.model->parameters();
		const auto &blocks = header.at("blocks");
		if (blocks.size() != params.size()) {
			throw IoError("checkpoint: block table does not match the model architecture");
		}
		std::size_t total = 0;
		for (std::size_t i = 0; i < params.size(); ++i) {
			const auto &b = blocks[i];
			if (b.at("name").get<std::string>() != params[i]->name ||
			    b.at("rows").get<std::size_t>() != params[i]->value.rows() ||
			    b.at("cols").get<std::size_t>() != params[i]->value.cols()) {
				throw IoError("checkpoint: block '" + b.at("name").get<std::string>() +
				              "' does not match the model architecture");
			}
			total += params[i]->size();
		}
		if (header.at("param_doubles").get<std::size_t>() != total) {
			throw IoError("checkpoint: parameter count mismatch");
		}

		const std::size_t sections = has_moments ? 3 : 1;
		const std::size_t blob_bytes = total * 8 * sections;
		if (bytes.size() - nl - 1 != blob_bytes) {
			throw IoError("checkpoint: blob is " + std::to_string(bytes.size() - nl - 1) +
			              " bytes, expected " + std::to_string(blob_bytes) + " (truncated file?)");
		}
		const char *p = bytes.data() + nl + 1;
		for (Param *param : params) {
			for (double &v : param->value.storage()) {
				v = detail::read_double_le(p);
				p += 8;
			}
		}
		if (has_moments) {
			ck.adam.m.clear();
			ck.adam.v.clear();
			for (const Param *param : params) ck.adam.m.emplace_back(param->size(), 0.0);
			for (const Param *param : params) ck.adam.v.emplace_back(param->size(), 0.0);
			for (auto &block : ck.adam.m) {
				for (double &v : block) {
					v = detail::read_double_le(p);
					p += 8;
				}
			}
			for (auto &block : ck.adam.v) {
				for (double &v : block) {
					v = detail::read_double_le(p);
					p += 8;
				}
			}
		}
		return ck;
	} catch (const nlohmann::json::exception &e) {
		throw IoError(std::string("checkpoint: corrupt header field: ") + e.what());
	}
}

inline void checkpoint_save(const std::filesystem::path &path, ForecastModel &model,
                            const MinMaxScaler &scaler, const AdamState &adam) {
	write_file_atomic(path, checkpoint_serialize(model, scaler, adam));
}

inline Checkpoint checkpoint_load(const std::filesystem::path &path) {
	return checkpoint_deserialize(read_file(path));
}

} // namespace solarcast
