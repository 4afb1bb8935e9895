#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "solarcast/distributions.hpp"
#include "solarcast/matrix.hpp"

namespace solarcast {

enum class HeadKind {
	deterministic,
	quantile,
	mle_gaussian,
	mle_johnson_su,
	mle_johnson_sb,
	mle_weibull,
};

inline bool is_mle_head(HeadKind k) {
	return k == HeadKind::mle_gaussian || k == HeadKind::mle_johnson_su ||
	       k == HeadKind::mle_johnson_sb || k == HeadKind::mle_weibull;
}

inline Family family_of_head(HeadKind k) {
	switch (k) {
	case HeadKind::mle_gaussian: return Family::gaussian;
	case HeadKind::mle_johnson_su: return Family::johnson_su;
	case HeadKind::mle_johnson_sb: return Family::johnson_sb;
	case HeadKind::mle_weibull: return Family::weibull;
	default: throw std::invalid_argument("head kind has no distribution family");
	}
}

inline const char *head_name(HeadKind k) {
	switch (k) {
	case HeadKind::deterministic: return "det";
	case HeadKind::quantile: return "qr";
	case HeadKind::mle_gaussian: return "mle-g";
	case HeadKind::mle_johnson_su: return "mle-jsu";
	case HeadKind::mle_johnson_sb: return "mle-jsb";
	case HeadKind::mle_weibull: return "mle-w";
	}
	return "?";
}

inline HeadKind head_from_name(const std::string &name) {
	if (name == "det") return HeadKind::deterministic;
	if (name == "qr") return HeadKind::quantile;
	if (name == "mle-g") return HeadKind::mle_gaussian;
	if (name == "mle-jsu") return HeadKind::mle_johnson_su;
	if (name == "mle-jsb") return HeadKind::mle_johnson_sb;
	if (name == "mle-w") return HeadKind::mle_weibull;
	throw std::invalid_argument("unknown head kind '" + name +
	                            "' (expected det|qr|mle-g|mle-jsu|mle-jsb|mle-w)");
}

/// Model emission for one batch: point values, a quantile grid, or
/// per-step distribution parameters, all flattened to batch x
/// (horizon * step_width).
struct ForecastOutput {
	HeadKind kind = HeadKind::deterministic;
	std::size_t batch = 0;
	std::size_t horizon = 0;
	std::vector<double> quantile_levels; // quantile head only
	Matrix values;

	std::size_t step_width() const {
		switch (kind) {
		case HeadKind::deterministic: return 1;
		case HeadKind::quantile: return quantile_levels.size();
		default: return static_cast<std::size_t>(family_param_count(family_of_head(kind)));
		}
	}

	double value(std::size_t b, std::size_t p, std::size_t k) const {
		return values(b, p * step_width() + k);
	}
	double point(std::size_t b, std::size_t p) const { return value(b, p, 0); }
	const double *step_params(std::size_t b, std::size_t p) const {
		return values.row(b) + p * step_width();
	}
};

} // namespace solarcast
