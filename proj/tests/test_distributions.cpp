#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "solarcast/distributions.hpp"
#include "solarcast/rng.hpp"

#include "oracles.hpp"

using namespace solarcast;

namespace {

struct FamilyDraw {
	Family family;
	std::vector<double> params;
};

// Parameter draws from the intervals the heads optimize over.
FamilyDraw draw_params(Family f, Rng &rng) {
	switch (f) {
	case Family::gaussian:
		return {f, {rng.uniform(-2.0, 2.0), rng.uniform(0.05, 2.0)}};
	case Family::johnson_su:
		return {f, {rng.uniform(-2.0, 2.0), rng.uniform(0.1, 3.0), rng.uniform(-4.0, 4.0),
		            rng.uniform(5.0, 9.0)}};
	case Family::johnson_sb:
		return {f, {rng.uniform(-4.0, 4.0), rng.uniform(0.05, 6.0)}};
	case Family::weibull:
		return {f, {rng.uniform(0.05, 1.0), rng.uniform(0.05, 2.0)}};
	}
	return {f, {}};
}

const std::vector<Family> kFamilies = {Family::gaussian, Family::johnson_su, Family::johnson_sb,
                                       Family::weibull};

double integrate_family_pdf(const FamilyDraw &d) {
	const int cells = 512;
	std::vector<double> nodes;
	nodes.reserve(cells + 1);
	for (int i = 0; i <= cells; ++i) {
		const double p = 1e-6 + (1.0 - 2e-6) * static_cast<double>(i) / cells;
		nodes.push_back(family_quantile(d.family, d.params.data(), p));
	}
	auto pdf = [&](double x) { return std::exp(family_logpdf(d.family, d.params.data(), x)); };
	return oracle::integrate_over_nodes(pdf, nodes);
}

} // namespace

TEST_CASE("constrain maps raw values into open intervals") {
	CHECK(constrain(0.0, ParamBounds::open(-4.0, 4.0)) == Catch::Approx(0.0).margin(1e-15));
	CHECK(constrain(0.0, ParamBounds::open(0.0, 2.0)) == Catch::Approx(1.0));
	// Asymptote: approaches the upper bound from below, never attains it.
	const double near_top = constrain(40.0, ParamBounds::open(5.0, 9.0));
	CHECK(near_top < 9.0);
	CHECK(near_top > 9.0 - 1e-9);
	CHECK(constrain(1.5, ParamBounds::unbounded()) == 1.5);
	// Strict monotonicity in the raw value.
	const auto b = ParamBounds::open(-1.0, 3.0);
	double prev = constrain(-8.0, b);
	for (double raw = -7.5; raw <= 8.0; raw += 0.5) {
		const double cur = constrain(raw, b);
		CHECK(cur > prev);
		prev = cur;
	}
	CHECK_THROWS_AS(ParamBounds::open(2.0, 2.0), std::invalid_argument);
}

TEST_CASE("constrain derivative matches central differences") {
	Rng rng(7);
	const auto bounds = {ParamBounds::open(-4.0, 4.0), ParamBounds::open(0.0, 2.0),
	                     ParamBounds::open(5.0, 9.0), ParamBounds::unbounded()};
	for (const auto &b : bounds) {
		for (int i = 0; i < 20; ++i) {
			const double raw = rng.uniform(-6.0, 6.0);
			const double fd =
			    oracle::central_difference([&](double r) { return constrain(r, b); }, raw, 1e-6);
			CHECK(oracle::relative_error(constrain_derivative(raw, b), fd, 1e-6) < 1e-5);
		}
	}
}

TEST_CASE("normal quantile agrees with the bisection oracle") {
	// The spec-level accuracy requirement for the rational approximation.
	for (double p : {1e-6, 1e-4, 0.01, 0.02425, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.99, 0.9999,
	                 1.0 - 1e-6}) {
		CHECK(std::abs(normal_quantile(p) - oracle::normal_quantile(p)) < 1e-8);
	}
	CHECK(normal_quantile(0.975) == Catch::Approx(1.959964).margin(1e-6));
	CHECK_THROWS_AS(normal_quantile(0.0), std::invalid_argument);
	CHECK_THROWS_AS(normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("gaussian density, cdf, quantile") {
	CHECK(gaussian_logpdf(0.0, {0.0, 1.0}) == Catch::Approx(-0.9189385).margin(1e-6));
	CHECK(gaussian_quantile(0.5, {3.25, 0.8}) == Catch::Approx(3.25).margin(1e-12));
	CHECK(gaussian_cdf(-1.75, {-1.75, 2.0}) == Catch::Approx(0.5).margin(1e-12));
	CHECK_THROWS_AS(gaussian_logpdf(0.0, {0.0, -1.0}), std::invalid_argument);
	CHECK_THROWS_AS(gaussian_logpdf(0.0, {0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("johnson su reduces to the standard normal at identity parameters") {
	CHECK(johnson_su_quantile(0.5, {0.0, 1.0, 0.0, 1.0}) == Catch::Approx(0.0).margin(1e-12));
	CHECK(johnson_su_logpdf(0.0, {0.0, 1.0, 0.0, 1.0}) == Catch::Approx(-0.9189385).margin(1e-6));
	// z(0.8413447) is 1 up to CDF rounding, so the quantile is sinh(1).
	CHECK(johnson_su_quantile(0.8413447, {0.0, 1.0, 0.0, 1.0}) ==
	      Catch::Approx(1.175201).margin(1e-5));
	CHECK_THROWS_AS(johnson_su_logpdf(0.0, {0.0, -1.0, 0.0, 1.0}), std::invalid_argument);
	CHECK_THROWS_AS(johnson_su_logpdf(0.0, {0.0, 1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("johnson sb quantiles stay in the open unit interval") {
	CHECK(johnson_sb_quantile(0.5, {0.0, 1.0, 0.0, 1.0}) == Catch::Approx(0.5).margin(1e-12));
	Rng rng(11);
	for (int draw = 0; draw < 25; ++draw) {
		const auto d = draw_params(Family::johnson_sb, rng);
		for (int i = 1; i <= 99; ++i) {
			const double q = family_quantile(Family::johnson_sb, d.params.data(), i / 100.0);
			CHECK(q > 0.0);
			CHECK(q < 1.0);
		}
	}
	// Out-of-support points report -inf; the loss layer owns the penalty.
	CHECK(johnson_sb_logpdf(0.0, {0.0, 1.0, 0.0, 1.0}) == kNegInf);
	CHECK(johnson_sb_logpdf(1.0, {0.0, 1.0, 0.0, 1.0}) == kNegInf);
	CHECK(johnson_sb_logpdf(-0.5, {0.0, 1.0, 0.0, 1.0}) == kNegInf);
}

TEST_CASE("johnson sb density matches a central difference of the oracle cdf") {
	// CDF built from the series-based normal CDF, independent of the pdf.
	auto sb_cdf_oracle = [](double x, double gamma, double delta) {
		return oracle::normal_cdf(gamma + delta * std::log(x / (1.0 - x)));
	};
	Rng rng(13);
	for (int draw = 0; draw < 20; ++draw) {
		const double gamma = rng.uniform(-2.0, 2.0);
		const double delta = rng.uniform(0.5, 4.0);
		const double x = rng.uniform(0.2, 0.8);
		const double fd = oracle::central_difference(
		    [&](double t) { return sb_cdf_oracle(t, gamma, delta); }, x, 1e-6);
		const double pdf = std::exp(johnson_sb_logpdf(x, {0.0, 1.0, gamma, delta}));
		CHECK(oracle::relative_error(pdf, fd, 1e-8) < 1e-5);
	}
	const double fd = oracle::central_difference(
	    [&](double t) { return sb_cdf_oracle(t, 0.0, 1.0); }, 0.5, 1e-6);
	CHECK(std::exp(johnson_sb_logpdf(0.5, {0.0, 1.0, 0.0, 1.0})) ==
	      Catch::Approx(fd).epsilon(1e-5));
}

TEST_CASE("weibull closed forms") {
	const double char_life = 1.0 - std::exp(-1.0);
	for (double omega : {0.3, 1.0, 1.7}) {
		CHECK(weibull_quantile(char_life, {0.62, omega}) == Catch::Approx(0.62).margin(1e-12));
	}
	CHECK(weibull_quantile(0.5, {1.0, 1.0}) == Catch::Approx(0.693147).margin(1e-6));
	CHECK(weibull_logpdf(1.0, {1.0, 1.0}) == Catch::Approx(-1.0).margin(1e-12));
	CHECK(weibull_cdf(0.62, {0.62, 1.3}) == Catch::Approx(0.6321206).margin(1e-7));
	CHECK(weibull_logpdf(-0.1, {1.0, 1.0}) == kNegInf);
	CHECK(weibull_logpdf(0.0, {1.0, 1.0}) == kNegInf);
	CHECK_THROWS_AS(weibull_logpdf(1.0, {-1.0, 1.0}), std::invalid_argument);
	CHECK_THROWS_AS(weibull_quantile(1.2, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("every family integrates to one between its extreme quantiles") {
	Rng rng(17);
	for (Family f : kFamilies) {
		for (int draw = 0; draw < 20; ++draw) {
			const auto d = draw_params(f, rng);
			CHECK(integrate_family_pdf(d) == Catch::Approx(1.0).margin(1e-3));
		}
	}
}

TEST_CASE("cdf of quantile is the identity on the percentile grid") {
	Rng rng(19);
	for (Family f : kFamilies) {
		for (int draw = 0; draw < 25; ++draw) {
			const auto d = draw_params(f, rng);
			for (int i = 1; i <= 99; ++i) {
				const double p = i / 100.0;
				const double q = family_quantile(f, d.params.data(), p);
				CHECK(std::abs(family_cdf(f, d.params.data(), q) - p) <= 1e-6);
			}
		}
	}
}

TEST_CASE("quantiles are strictly increasing in p") {
	Rng rng(23);
	for (Family f : kFamilies) {
		for (int draw = 0; draw < 10; ++draw) {
			const auto d = draw_params(f, rng);
			double prev = family_quantile(f, d.params.data(), 0.005);
			for (int i = 2; i <= 199; ++i) {
				const double cur = family_quantile(f, d.params.data(), 0.005 * i);
				CHECK(cur > prev);
				prev = cur;
			}
		}
	}
}

TEST_CASE("log-pdf parameter gradients match central differences") {
	Rng rng(29);
	for (Family f : kFamilies) {
		const int n_params = family_param_count(f);
		for (int draw = 0; draw < 100; ++draw) {
			auto d = draw_params(f, rng);
			// Sample x from the distribution itself so it is well inside support.
			const double x = family_quantile(f, d.params.data(), rng.uniform(0.02, 0.98));
			double analytic[4];
			family_logpdf_grad(f, d.params.data(), x, analytic);
			for (int k = 0; k < n_params; ++k) {
				const double h = 1e-5 * std::max(1.0, std::abs(d.params[static_cast<std::size_t>(k)]));
				auto loss = [&](double v) {
					auto params = d.params;
					params[static_cast<std::size_t>(k)] = v;
					return family_logpdf(f, params.data(), x);
				};
				const double fd =
				    oracle::central_difference(loss, d.params[static_cast<std::size_t>(k)], h);
				CHECK(oracle::relative_error(analytic[k], fd) < 1e-4);
			}
		}
	}
}

TEST_CASE("unbounded families exceed +-10 for extreme probabilities") {
	CHECK(gaussian_quantile(0.99999, {0.0, 3.0}) > 10.0);
	CHECK(gaussian_quantile(1.0 - 0.99999, {0.0, 3.0}) < -10.0);
	const JohnsonSUParams wide{0.0, 30.0, 0.0, 5.0};
	CHECK(johnson_su_quantile(0.99999, wide) > 10.0);
	CHECK(johnson_su_quantile(1e-5, wide) < -10.0);
	// Weibull stays positive no matter how extreme the probability.
	CHECK(weibull_quantile(1e-9, {0.5, 0.4}) > 0.0);
}
