#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "solarcast/errors.hpp"
#include "solarcast/forecast_output.hpp"
#include "solarcast/losses.hpp"
#include "solarcast/matrix.hpp"

namespace solarcast {

inline double mae(const Matrix &y, const Matrix &y_hat) {
	require_same_shape(y, y_hat, "mae");
	double acc = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		acc += std::abs(y.storage()[i] - y_hat.storage()[i]);
	}
	return acc / static_cast<double>(y.size());
}

inline double rmse(const Matrix &y, const Matrix &y_hat) {
	return std::sqrt(mse(y, y_hat));
}

/// RMSE per horizon index, reduced over the batch dimension.
inline std::vector<double> per_horizon_rmse(const Matrix &y, const Matrix &y_hat) {
	require_same_shape(y, y_hat, "per_horizon_rmse");
	std::vector<double> out(y.cols(), 0.0);
	for (std::size_t p = 0; p < y.cols(); ++p) {
		double acc = 0.0;
		for (std::size_t b = 0; b < y.rows(); ++b) {
			const double d = y(b, p) - y_hat(b, p);
			acc += d * d;
		}
		out[p] = std::sqrt(acc / static_cast<double>(y.rows()));
	}
	return out;
}

/// Central prediction intervals for one nominal coverage level.
struct PredictionIntervals {
	double coverage = 0.0;
	Matrix lower; // batch x horizon
	Matrix upper;
};

/// Symmetric coverages expressible by an output's quantile grid; for
/// parametric heads every coverage is available.
inline std::vector<double> available_coverages(const ForecastOutput &out) {
	if (out.kind != HeadKind::quantile) {
		throw std::invalid_argument("available_coverages applies to quantile outputs only");
	}
	std::vector<double> cov;
	const auto &q = out.quantile_levels;
	for (std::size_t i = 0; i < q.size(); ++i) {
		for (std::size_t j = i + 1; j < q.size(); ++j) {
			if (std::abs(q[i] + q[j] - 1.0) < 1e-9) cov.push_back(q[j] - q[i]);
		}
	}
	std::sort(cov.begin(), cov.end());
	return cov;
}

/// Quantile grid extracted from a probabilistic output: parametric heads
/// evaluate their quantile functions, the quantile head looks levels up in
/// its trained set. Returns batch x (horizon * |levels|).
inline Matrix quantiles_from_output(const ForecastOutput &out,
                                    const std::vector<double> &levels) {
	check_quantile_set(levels);
	const std::size_t b = out.batch, p = out.horizon, nq = levels.size();
	Matrix grid(b, p * nq);
	if (out.kind == HeadKind::quantile) {
		std::vector<std::size_t> col(nq);
		for (std::size_t j = 0; j < nq; ++j) {
			bool found = false;
			for (std::size_t i = 0; i < out.quantile_levels.size(); ++i) {
				if (std::abs(out.quantile_levels[i] - levels[j]) < 1e-9) {
					col[j] = i;
					found = true;
					break;
				}
			}
			if (!found) {
				throw ConfigError("quantile level " + std::to_string(levels[j]) +
				                  " is not part of the trained quantile set");
			}
		}
		for (std::size_t i = 0; i < b; ++i) {
			for (std::size_t h = 0; h < p; ++h) {
				for (std::size_t j = 0; j < nq; ++j) grid(i, h * nq + j) = out.value(i, h, col[j]);
			}
		}
		return grid;
	}
	if (!is_mle_head(out.kind)) {
		throw std::invalid_argument("quantiles_from_output: deterministic output has no quantiles");
	}
	const Family fam = family_of_head(out.kind);
	for (std::size_t i = 0; i < b; ++i) {
		for (std::size_t h = 0; h < p; ++h) {
			const double *params = out.step_params(i, h);
			for (std::size_t j = 0; j < nq; ++j) {
				grid(i, h * nq + j) = family_quantile(fam, params, levels[j]);
			}
		}
	}
	return grid;
}

/// Central interval [(1-c)/2, (1+c)/2] per requested coverage. For the
/// quantile head the endpoints must exist in the trained set.
inline std::vector<PredictionIntervals>
intervals_from_output(const ForecastOutput &out, const std::vector<double> &coverages) {
	std::vector<PredictionIntervals> result;
	for (double c : coverages) {
		if (!(c > 0.0 && c < 1.0)) {
			throw std::invalid_argument("coverage levels must lie strictly in (0, 1)");
		}
		const std::vector<double> endpoints = {(1.0 - c) / 2.0, (1.0 + c) / 2.0};
		Matrix grid;
		try {
			grid = quantiles_from_output(out, endpoints);
		} catch (const ConfigError &) {
			std::string msg = "coverage " + std::to_string(c) +
			                  " needs quantiles " + std::to_string(endpoints[0]) + " and " +
			                  std::to_string(endpoints[1]) + "; available coverages:";
			for (double a : available_coverages(out)) msg += " " + std::to_string(a);
			throw ConfigError(msg);
		}
		PredictionIntervals pi;
		pi.coverage = c;
		pi.lower = Matrix(out.batch, out.horizon);
		pi.upper = Matrix(out.batch, out.horizon);
		for (std::size_t b = 0; b < out.batch; ++b) {
			for (std::size_t p = 0; p < out.horizon; ++p) {
				pi.lower(b, p) = grid(b, p * 2);
				pi.upper(b, p) = grid(b, p * 2 + 1);
			}
		}
		result.push_back(std::move(pi));
	}
	return result;
}

/// Fraction of observations inside the closed interval [lower, upper].
inline double picp(const Matrix &y, const Matrix &lower, const Matrix &upper) {
	require_same_shape(y, lower, "picp");
	require_same_shape(y, upper, "picp");
	std::size_t inside = 0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double v = y.storage()[i];
		if (v >= lower.storage()[i] && v <= upper.storage()[i]) ++inside;
	}
	return static_cast<double>(inside) / static_cast<double>(y.size());
}

/// Mean absolute gap between nominal and observed coverage.
inline double ace(const std::vector<double> &picp_values, const std::vector<double> &coverages) {
	if (picp_values.size() != coverages.size() || coverages.empty()) {
		throw std::invalid_argument("ace: picp and coverage lists must have equal non-zero length");
	}
	double acc = 0.0;
	for (std::size_t i = 0; i < coverages.size(); ++i) {
		acc += std::abs(coverages[i] - picp_values[i]);
	}
	return acc / static_cast<double>(coverages.size());
}

/// Reliability curve: fraction of observations at or below the predicted
/// p-quantile, for each p in the grid.
inline std::vector<std::pair<double, double>>
reliability(const Matrix &y, const ForecastOutput &out, const std::vector<double> &p_grid) {
	std::vector<std::pair<double, double>> curve;
	for (double p : p_grid) {
		const Matrix q = quantiles_from_output(out, {p});
		require_same_shape(y, q, "reliability");
		std::size_t below = 0;
		for (std::size_t i = 0; i < y.size(); ++i) {
			if (y.storage()[i] <= q.storage()[i]) ++below;
		}
		curve.emplace_back(p, static_cast<double>(below) / static_cast<double>(y.size()));
	}
	return curve;
}

/// Pinball loss of a probabilistic output evaluated on the extracted
/// quantile grid; the conventional cross-head "quantile loss" column.
inline double quantile_loss(const Matrix &y, const ForecastOutput &out,
                            const std::vector<double> &levels) {
	return pinball(y, quantiles_from_output(out, levels), levels);
}

} // namespace solarcast
