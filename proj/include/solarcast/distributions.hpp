#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace solarcast {

inline constexpr double kHalfLog2Pi = 0.9189385332046727; // 0.5 * ln(2*pi)
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double logistic(double x) {
	if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
	const double e = std::exp(x);
	return e / (1.0 + e);
}

/// log(1 + e^x) + 1e-4: smooth map from the reals onto strictly positive
/// values, used for scale-type parameters without an upper bound.
inline double softplus_shifted(double x) {
	const double sp = x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
	return sp + 1e-4;
}

inline double softplus_shifted_derivative(double x) { return logistic(x); }

/// Open interval (or unbounded passthrough) for constrained head outputs.
struct ParamBounds {
	double lower = 0.0;
	double upper = 0.0;
	bool bounded = false;

	static ParamBounds open(double lower, double upper) {
		if (!(upper > lower)) throw std::invalid_argument("ParamBounds: upper must exceed lower");
		return ParamBounds{lower, upper, true};
	}
	static ParamBounds unbounded() { return ParamBounds{}; }
};

/// Maps an unbounded raw value strictly into (lower, upper) via a scaled
/// logistic; identity when unbounded. Strictly monotone in the raw value.
inline double constrain(double raw, const ParamBounds &bounds) {
	if (!bounds.bounded) return raw;
	return bounds.lower + (bounds.upper - bounds.lower) * logistic(raw);
}

inline double constrain_derivative(double raw, const ParamBounds &bounds) {
	if (!bounds.bounded) return 1.0;
	const double s = logistic(raw);
	return (bounds.upper - bounds.lower) * s * (1.0 - s);
}

// ---------------------------------------------------------------------------
// Standard normal building blocks
// ---------------------------------------------------------------------------

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z * 0.7071067811865475244); }

inline double normal_logpdf(double z) { return -kHalfLog2Pi - 0.5 * z * z; }

/// Inverse standard-normal CDF: rational initial guess (Acklam) polished by
/// one Halley step against the erfc-based CDF; absolute error well below
/// 1e-9 across (0, 1).
inline double normal_quantile(double p) {
	if (!(p > 0.0 && p < 1.0)) {
		throw std::invalid_argument("normal_quantile: probability must lie in (0, 1)");
	}
	static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
	                            -2.759285104469687e+02, 1.383577518672690e+02,
	                            -3.066479806614716e+01, 2.506628277459239e+00};
	static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
	                            -1.556989798598866e+02, 6.680131188771972e+01,
	                            -1.328068155288572e+01};
	static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
	                            -2.400758277161838e+00, -2.549732539343734e+00,
	                            4.374664141464968e+00,  2.938163982698783e+00};
	static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
	                            2.445134137142996e+00, 3.754408661907416e+00};
	const double p_low = 0.02425;
	double x;
	if (p < p_low) {
		const double q = std::sqrt(-2.0 * std::log(p));
		x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
		    ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
	} else if (p <= 1.0 - p_low) {
		const double q = p - 0.5;
		const double r = q * q;
		x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
		    (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
	} else {
		const double q = std::sqrt(-2.0 * std::log(1.0 - p));
		x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
		    ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
	}
	// One Halley refinement against the high-precision CDF.
	const double err = normal_cdf(x) - p;
	const double u = err * 2.5066282746310002 * std::exp(0.5 * x * x);
	x -= u / (1.0 + 0.5 * x * u);
	return x;
}

// ---------------------------------------------------------------------------
// Gaussian
// ---------------------------------------------------------------------------

struct GaussianParams {
	double mu = 0.0;
	double sigma = 1.0;
};

inline void check_gaussian(const GaussianParams &p) {
	if (!(p.sigma > 0.0)) throw std::invalid_argument("gaussian: sigma must be positive");
}

inline double gaussian_logpdf(double x, const GaussianParams &p) {
	check_gaussian(p);
	const double z = (x - p.mu) / p.sigma;
	return -kHalfLog2Pi - std::log(p.sigma) - 0.5 * z * z;
}

inline double gaussian_cdf(double x, const GaussianParams &p) {
	check_gaussian(p);
	return normal_cdf((x - p.mu) / p.sigma);
}

inline double gaussian_quantile(double prob, const GaussianParams &p) {
	check_gaussian(p);
	return p.mu + p.sigma * normal_quantile(prob);
}

struct GaussianGrad {
	double d_mu = 0.0;
	double d_sigma = 0.0;
};

inline GaussianGrad gaussian_logpdf_grad(double x, const GaussianParams &p) {
	check_gaussian(p);
	const double z = (x - p.mu) / p.sigma;
	return {z / p.sigma, (z * z - 1.0) / p.sigma};
}

// ---------------------------------------------------------------------------
// Johnson's SU: x = xi + lambda * sinh((z - gamma) / delta), z standard normal
// ---------------------------------------------------------------------------

struct JohnsonSUParams {
	double xi = 0.0;
	double lambda = 1.0;
	double gamma = 0.0;
	double delta = 1.0;
};

inline void check_johnson_su(const JohnsonSUParams &p) {
	if (!(p.lambda > 0.0)) throw std::invalid_argument("johnson_su: lambda must be positive");
	if (!(p.delta > 0.0)) throw std::invalid_argument("johnson_su: delta must be positive");
}

inline double johnson_su_logpdf(double x, const JohnsonSUParams &p) {
	check_johnson_su(p);
	const double u = (x - p.xi) / p.lambda;
	const double z = p.gamma + p.delta * std::asinh(u);
	return std::log(p.delta) - std::log(p.lambda) - kHalfLog2Pi - 0.5 * std::log1p(u * u) -
	       0.5 * z * z;
}

inline double johnson_su_cdf(double x, const JohnsonSUParams &p) {
	check_johnson_su(p);
	const double u = (x - p.xi) / p.lambda;
	return normal_cdf(p.gamma + p.delta * std::asinh(u));
}

inline double johnson_su_quantile(double prob, const JohnsonSUParams &p) {
	check_johnson_su(p);
	const double z = normal_quantile(prob);
	return p.xi + p.lambda * std::sinh((z - p.gamma) / p.delta);
}

struct JohnsonSUGrad {
	double d_xi = 0.0;
	double d_lambda = 0.0;
	double d_gamma = 0.0;
	double d_delta = 0.0;
};

inline JohnsonSUGrad johnson_su_logpdf_grad(double x, const JohnsonSUParams &p) {
	check_johnson_su(p);
	const double u = (x - p.xi) / p.lambda;
	const double s = std::asinh(u);
	const double z = p.gamma + p.delta * s;
	const double root = std::sqrt(1.0 + u * u);
	// d logpdf / d u, then chain into xi and lambda.
	const double dldu = -u / (1.0 + u * u) - z * p.delta / root;
	JohnsonSUGrad g;
	g.d_xi = dldu * (-1.0 / p.lambda);
	g.d_lambda = dldu * (-u / p.lambda) - 1.0 / p.lambda;
	g.d_gamma = -z;
	g.d_delta = 1.0 / p.delta - z * s;
	return g;
}

// ---------------------------------------------------------------------------
// Johnson's SB: x = xi + lambda * logistic((z - gamma) / delta); support
// (xi, xi + lambda). The heads keep xi = 0 and lambda = 1.
// ---------------------------------------------------------------------------

struct JohnsonSBParams {
	double xi = 0.0;
	double lambda = 1.0;
	double gamma = 0.0;
	double delta = 1.0;
};

inline void check_johnson_sb(const JohnsonSBParams &p) {
	if (!(p.lambda > 0.0)) throw std::invalid_argument("johnson_sb: lambda must be positive");
	if (!(p.delta > 0.0)) throw std::invalid_argument("johnson_sb: delta must be positive");
}

/// Returns -inf outside the open support (xi, xi + lambda).
inline double johnson_sb_logpdf(double x, const JohnsonSBParams &p) {
	check_johnson_sb(p);
	const double lo = x - p.xi;
	const double hi = p.xi + p.lambda - x;
	if (!(lo > 0.0) || !(hi > 0.0)) return kNegInf;
	const double z = p.gamma + p.delta * std::log(lo / hi);
	return std::log(p.delta) + std::log(p.lambda) - kHalfLog2Pi - std::log(lo) - std::log(hi) -
	       0.5 * z * z;
}

inline double johnson_sb_cdf(double x, const JohnsonSBParams &p) {
	check_johnson_sb(p);
	if (x <= p.xi) return 0.0;
	if (x >= p.xi + p.lambda) return 1.0;
	const double z = p.gamma + p.delta * std::log((x - p.xi) / (p.xi + p.lambda - x));
	return normal_cdf(z);
}

inline double johnson_sb_quantile(double prob, const JohnsonSBParams &p) {
	check_johnson_sb(p);
	const double z = normal_quantile(prob);
	double s = logistic((z - p.gamma) / p.delta);
	// The logistic saturates in double precision for extreme arguments;
	// nudge the result so quantiles stay strictly inside the open support.
	if (!(s > 0.0)) s = std::numeric_limits<double>::min();
	if (s >= 1.0) s = std::nextafter(1.0, 0.0);
	double x = p.xi + p.lambda * s;
	if (x >= p.xi + p.lambda) x = std::nextafter(p.xi + p.lambda, p.xi);
	if (x <= p.xi) x = std::nextafter(p.xi, p.xi + p.lambda);
	return x;
}

struct JohnsonSBGrad {
	double d_gamma = 0.0;
	double d_delta = 0.0;
};

/// Gradient in the two optimized parameters; xi and lambda stay fixed.
/// Out-of-support points carry no gradient (the loss layer substitutes a
/// constant penalty there).
inline JohnsonSBGrad johnson_sb_logpdf_grad(double x, const JohnsonSBParams &p) {
	check_johnson_sb(p);
	const double lo = x - p.xi;
	const double hi = p.xi + p.lambda - x;
	if (!(lo > 0.0) || !(hi > 0.0)) return {};
	const double t = std::log(lo / hi);
	const double z = p.gamma + p.delta * t;
	return {-z, 1.0 / p.delta - z * t};
}

// ---------------------------------------------------------------------------
// Weibull with scale phi and shape omega; support (0, inf)
// ---------------------------------------------------------------------------

struct WeibullParams {
	double scale = 1.0; // phi
	double shape = 1.0; // omega
};

inline void check_weibull(const WeibullParams &p) {
	if (!(p.scale > 0.0)) throw std::invalid_argument("weibull: scale must be positive");
	if (!(p.shape > 0.0)) throw std::invalid_argument("weibull: shape must be positive");
}

/// Returns -inf for x <= 0.
inline double weibull_logpdf(double x, const WeibullParams &p) {
	check_weibull(p);
	if (!(x > 0.0)) return kNegInf;
	const double lr = std::log(x) - std::log(p.scale);
	return std::log(p.shape) - std::log(p.scale) + (p.shape - 1.0) * lr - std::exp(p.shape * lr);
}

inline double weibull_cdf(double x, const WeibullParams &p) {
	check_weibull(p);
	if (x <= 0.0) return 0.0;
	return -std::expm1(-std::pow(x / p.scale, p.shape));
}

inline double weibull_quantile(double prob, const WeibullParams &p) {
	check_weibull(p);
	if (!(prob > 0.0 && prob < 1.0)) {
		throw std::invalid_argument("weibull_quantile: probability must lie in (0, 1)");
	}
	return p.scale * std::pow(-std::log1p(-prob), 1.0 / p.shape);
}

struct WeibullGrad {
	double d_scale = 0.0;
	double d_shape = 0.0;
};

inline WeibullGrad weibull_logpdf_grad(double x, const WeibullParams &p) {
	check_weibull(p);
	if (!(x > 0.0)) return {};
	const double lr = std::log(x) - std::log(p.scale);
	const double t = std::exp(p.shape * lr); // (x/phi)^omega
	return {(p.shape / p.scale) * (t - 1.0), 1.0 / p.shape + lr * (1.0 - t)};
}

// ---------------------------------------------------------------------------
// Family-tagged dispatch over flat parameter slots
// ---------------------------------------------------------------------------

enum class Family { gaussian, johnson_su, johnson_sb, weibull };

inline int family_param_count(Family f) {
	switch (f) {
	case Family::gaussian: return 2;    // mu, sigma
	case Family::johnson_su: return 4;  // xi, lambda, gamma, delta
	case Family::johnson_sb: return 2;  // gamma, delta (xi = 0, lambda = 1)
	case Family::weibull: return 2;     // phi, omega
	}
	return 0;
}

inline const char *family_name(Family f) {
	switch (f) {
	case Family::gaussian: return "gaussian";
	case Family::johnson_su: return "johnson_su";
	case Family::johnson_sb: return "johnson_sb";
	case Family::weibull: return "weibull";
	}
	return "?";
}

inline const std::vector<std::string> &family_param_names(Family f) {
	static const std::vector<std::string> gaussian = {"mu", "sigma"};
	static const std::vector<std::string> jsu = {"xi", "lambda", "gamma", "delta"};
	static const std::vector<std::string> jsb = {"gamma", "delta"};
	static const std::vector<std::string> weib = {"phi", "omega"};
	switch (f) {
	case Family::gaussian: return gaussian;
	case Family::johnson_su: return jsu;
	case Family::johnson_sb: return jsb;
	case Family::weibull: return weib;
	}
	return gaussian;
}

inline double family_logpdf(Family f, const double *q, double x) {
	switch (f) {
	case Family::gaussian: return gaussian_logpdf(x, {q[0], q[1]});
	case Family::johnson_su: return johnson_su_logpdf(x, {q[0], q[1], q[2], q[3]});
	case Family::johnson_sb: return johnson_sb_logpdf(x, {0.0, 1.0, q[0], q[1]});
	case Family::weibull: return weibull_logpdf(x, {q[0], q[1]});
	}
	return kNegInf;
}

inline double family_cdf(Family f, const double *q, double x) {
	switch (f) {
	case Family::gaussian: return gaussian_cdf(x, {q[0], q[1]});
	case Family::johnson_su: return johnson_su_cdf(x, {q[0], q[1], q[2], q[3]});
	case Family::johnson_sb: return johnson_sb_cdf(x, {0.0, 1.0, q[0], q[1]});
	case Family::weibull: return weibull_cdf(x, {q[0], q[1]});
	}
	return 0.0;
}

inline double family_quantile(Family f, const double *q, double prob) {
	switch (f) {
	case Family::gaussian: return gaussian_quantile(prob, {q[0], q[1]});
	case Family::johnson_su: return johnson_su_quantile(prob, {q[0], q[1], q[2], q[3]});
	case Family::johnson_sb: return johnson_sb_quantile(prob, {0.0, 1.0, q[0], q[1]});
	case Family::weibull: return weibull_quantile(prob, {q[0], q[1]});
	}
	return 0.0;
}

/// d logpdf / d params into grad_out (family_param_count slots). Zero where
/// x falls outside the support.
inline void family_logpdf_grad(Family f, const double *q, double x, double *grad_out) {
	switch (f) {
	case Family::gaussian: {
		const GaussianGrad g = gaussian_logpdf_grad(x, {q[0], q[1]});
		grad_out[0] = g.d_mu;
		grad_out[1] = g.d_sigma;
		return;
	}
	case Family::johnson_su: {
		const JohnsonSUGrad g = johnson_su_logpdf_grad(x, {q[0], q[1], q[2], q[3]});
		grad_out[0] = g.d_xi;
		grad_out[1] = g.d_lambda;
		grad_out[2] = g.d_gamma;
		grad_out[3] = g.d_delta;
		return;
	}
	case Family::johnson_sb: {
		const JohnsonSBGrad g = johnson_sb_logpdf_grad(x, {0.0, 1.0, q[0], q[1]});
		grad_out[0] = g.d_gamma;
		grad_out[1] = g.d_delta;
		return;
	}
	case Family::weibull: {
		const WeibullGrad g = weibull_logpdf_grad(x, {q[0], q[1]});
		grad_out[0] = g.d_scale;
		grad_out[1] = g.d_shape;
		return;
	}
	}
}

} // namespace solarcast
