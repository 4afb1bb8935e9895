#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "solarcast/forecast_output.hpp"
#include "solarcast/matrix.hpp"

namespace solarcast {

/// Penalty substituted for -log f(y) when y falls outside a bounded
/// support; finite so optimization survives early out-of-support emissions.
inline constexpr double kOutOfSupportPenalty = 1e4;

inline void check_quantile_set(const std::vector<double> &q) {
	if (q.empty()) throw std::invalid_argument("quantile set must be non-empty");
	for (std::size_t i = 0; i < q.size(); ++i) {
		if (!(q[i] > 0.0 && q[i] < 1.0)) {
			throw std::invalid_argument("quantile levels must lie strictly in (0, 1)");
		}
		if (i > 0 && !(q[i] > q[i - 1])) {
			throw std::invalid_argument("quantile levels must be strictly increasing");
		}
	}
}

/// Mean squared error over all entries.
inline double mse(const Matrix &y, const Matrix &y_hat) {
	require_same_shape(y, y_hat, "mse");
	double acc = 0.0;
	for (std::size_t i = 0; i < y.size(); ++i) {
		const double d = y.storage()[i] - y_hat.storage()[i];
		acc += d * d;
	}
	return acc / static_cast<double>(y.size());
}

/// d mse / d y_hat.
inline Matrix mse_grad(const Matrix &y, const Matrix &y_hat) {
	require_same_shape(y, y_hat, "mse_grad");
	Matrix g(y_hat.rows(), y_hat.cols());
	const double scale = 2.0 / static_cast<double>(y.size());
	for (std::size_t i = 0; i < y.size(); ++i) {
		g.storage()[i] = scale * (y_hat.storage()[i] - y.storage()[i]);
	}
	return g;
}

inline double pinball_term(double q, double u) { return u >= 0.0 ? q * u : (q - 1.0) * u; }

/// Pinball (quantile) loss, mean-reduced over batch, horizon, and quantile
/// levels. y is batch x horizon, y_hat is batch x (horizon * |Q|).
inline double pinball(const Matrix &y, const Matrix &y_hat, const std::vector<double> &q) {
	check_quantile_set(q);
	const std::size_t nq = q.size();
	if (y_hat.rows() != y.rows() || y_hat.cols() != y.cols() * nq) {
		throw std::invalid_argument("pinball: prediction shape must be batch x (horizon*|Q|)");
	}
	double acc = 0.0;
	for (std::size_t b = 0; b < y.rows(); ++b) {
		for (std::size_t p = 0; p < y.cols(); ++p) {
			for (std::size_t j = 0; j < nq; ++j) {
				acc += pinball_term(q[j], y(b, p) - y_hat(b, p * nq + j));
			}
		}
	}
	return acc / static_cast<double>(y.size() * nq);
}

inline double pinball(const Matrix &y, const ForecastOutput &out) {
	if (out.kind != HeadKind::quantile) {
		throw std::invalid_argument("pinball: output does not carry quantiles");
	}
	return pinball(y, out.values, out.quantile_levels);
}

/// d pinball / d y_hat. The loss is piecewise linear; the kink at u = 0 is
/// assigned the u >= 0 branch.
inline Matrix pinball_grad(const Matrix &y, const Matrix &y_hat, const std::vector<double> &q) {
	check_quantile_set(q);
	const std::size_t nq = q.size();
	Matrix g(y_hat.rows(), y_hat.cols());
	const double scale = 1.0 / static_cast<double>(y.size() * nq);
	for (std::size_t b = 0; b < y.rows(); ++b) {
		for (std::size_t p = 0; p < y.cols(); ++p) {
			for (std::size_t j = 0; j < nq; ++j) {
				const double u = y(b, p) - y_hat(b, p * nq + j);
				g(b, p * nq + j) = scale * (u >= 0.0 ? -q[j] : (1.0 - q[j]));
			}
		}
	}
	return g;
}

/// Negative log-likelihood of y under the per-step distribution parameters,
/// mean-reduced over batch and horizon. Out-of-support samples contribute
/// the fixed penalty instead of an infinite term.
inline double nll(const Matrix &y, const ForecastOutput &out) {
	if (!is_mle_head(out.kind)) {
		throw std::invalid_argument("nll: output does not carry distribution parameters");
	}
	const Family fam = family_of_head(out.kind);
	if (y.rows() != out.batch || y.cols() != out.horizon) {
		throw std::invalid_argument("nll: target shape must be batch x horizon");
	}
	double acc = 0.0;
	for (std::size_t b = 0; b < y.rows(); ++b) {
		for (std::size_t p = 0; p < y.cols(); ++p) {
			const double lp = family_logpdf(fam, out.step_params(b, p), y(b, p));
			acc += std::isfinite(lp) ? -lp : kOutOfSupportPenalty;
		}
	}
	return acc / static_cast<double>(y.size());
}

/// d nll / d parameter values (same layout as out.values). Out-of-support
/// samples carry zero gradient.
inline Matrix nll_grad(const Matrix &y, const ForecastOutput &out) {
	if (!is_mle_head(out.kind)) {
		throw std::invalid_argument("nll_grad: output does not carry distribution parameters");
	}
	const Family fam = family_of_head(out.kind);
	const std::size_t k = out.step_width();
	Matrix g(out.values.rows(), out.values.cols());
	const double scale = -1.0 / static_cast<double>(y.size());
	double pgrad[4];
	for (std::size_t b = 0; b < y.rows(); ++b) {
		for (std::size_t p = 0; p < y.cols(); ++p) {
			const double *params = out.step_params(b, p);
			const double lp = family_logpdf(fam, params, y(b, p));
			if (!std::isfinite(lp)) continue;
			family_logpdf_grad(fam, params, y(b, p), pgrad);
			for (std::size_t j = 0; j < k; ++j) g(b, p * k + j) = scale * pgrad[j];
		}
	}
	return g;
}

/// Loss value for any head kind, dispatching to mse / pinball / nll.
inline double head_loss(const Matrix &y, const ForecastOutput &out) {
	switch (out.kind) {
	case HeadKind::deterministic: return mse(y, out.values);
	case HeadKind::quantile: return pinball(y, out);
	default: return nll(y, out);
	}
}

/// Gradient of head_loss with respect to the raw output values.
inline Matrix head_loss_grad(const Matrix &y, const ForecastOutput &out) {
	switch (out.kind) {
	case HeadKind::deterministic: return mse_grad(y, out.values);
	case HeadKind::quantile: return pinball_grad(y, out.values, out.quantile_levels);
	default: return nll_grad(y, out);
	}
}

} // namespace solarcast
