#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "solarcast/losses.hpp"
#include "solarcast/rng.hpp"

#include "oracles.hpp"

using namespace solarcast;

namespace {

Matrix row_matrix(const std::vector<double> &v) {
	Matrix m(1, v.size());
	for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
	return m;
}

ForecastOutput gaussian_output(std::size_t batch, std::size_t horizon, double mu, double sigma) {
	ForecastOutput out;
	out.kind = HeadKind::mle_gaussian;
	out.batch = batch;
	out.horizon = horizon;
	out.values = Matrix(batch, horizon * 2);
	for (std::size_t b = 0; b < batch; ++b) {
		for (std::size_t p = 0; p < horizon; ++p) {
			out.values(b, p * 2) = mu;
			out.values(b, p * 2 + 1) = sigma;
		}
	}
	return out;
}

double lower_empirical_quantile(std::vector<double> sample, double q) {
	std::sort(sample.begin(), sample.end());
	const std::size_t n = sample.size();
	const std::size_t rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
	return sample[rank - 1];
}

} // namespace

TEST_CASE("mse basics") {
	const Matrix y = row_matrix({0.0, 2.0});
	CHECK(mse(y, y) == 0.0);
	CHECK(mse(y, row_matrix({0.0, 0.0})) == Catch::Approx(2.0));
	// Scaling every error by c multiplies the loss by c^2.
	const Matrix y2 = row_matrix({0.0, 6.0});
	CHECK(mse(y2, row_matrix({0.0, 0.0})) == Catch::Approx(9.0 * 2.0));
	CHECK_THROWS_AS(mse(y, Matrix(2, 2)), std::invalid_argument);
}

TEST_CASE("pinball single terms") {
	const std::vector<double> q = {0.9};
	CHECK(pinball(row_matrix({1.0}), row_matrix({1.0}), q) == 0.0);
	CHECK(pinball(row_matrix({3.0}), row_matrix({1.0}), q) == Catch::Approx(1.8)); // u = +2
	CHECK(pinball(row_matrix({-1.0}), row_matrix({1.0}), q) == Catch::Approx(0.2)); // u = -2
	CHECK_THROWS_AS(pinball(row_matrix({1.0}), row_matrix({1.0}), std::vector<double>{1.5}),
	                std::invalid_argument);
	CHECK_THROWS_AS(pinball(row_matrix({1.0}), row_matrix({1.0}), std::vector<double>{0.0}),
	                std::invalid_argument);
	CHECK_THROWS_AS(
	    pinball(row_matrix({1.0}), Matrix(1, 2), std::vector<double>{0.5, 0.25}),
	    std::invalid_argument);
}

TEST_CASE("pinball vanishes only when every quantile hits the target") {
	const std::vector<double> q = {0.25, 0.5, 0.75};
	Matrix y(2, 2, 1.5);
	Matrix perfect(2, 6, 1.5);
	CHECK(pinball(y, perfect, q) == 0.0);
	perfect(1, 4) = 1.6;
	CHECK(pinball(y, perfect, q) > 0.0);
}

TEST_CASE("constant minimizing pinball is the empirical quantile") {
	Rng rng(31);
	std::vector<double> sample(100);
	for (double &v : sample) v = rng.uniform(0.0, 50.0) + rng.normal();
	const Matrix y = row_matrix(sample);

	const double lo = *std::min_element(sample.begin(), sample.end());
	const double hi = *std::max_element(sample.begin(), sample.end());
	const double step = (hi - lo) / 999.0;
	for (double q : {0.1, 0.25, 0.5, 0.9}) {
		double best_c = lo;
		double best_loss = std::numeric_limits<double>::infinity();
		for (int i = 0; i < 1000; ++i) {
			const double c = lo + step * i;
			const double loss = pinball(y, Matrix(1, sample.size(), c), {q});
			if (loss < best_loss) {
				best_loss = loss;
				best_c = c;
			}
		}
		CHECK(std::abs(best_c - lower_empirical_quantile(sample, q)) <= step + 1e-12);
	}
}

TEST_CASE("pinball gradient matches central differences") {
	Rng rng(37);
	const std::vector<double> q = {0.05, 0.5, 0.95};
	Matrix y(3, 4);
	Matrix y_hat(3, 12);
	for (double &v : y.storage()) v = rng.uniform(-1.0, 1.0);
	for (double &v : y_hat.storage()) v = rng.uniform(-1.0, 1.0);
	const Matrix grad = pinball_grad(y, y_hat, q);
	for (std::size_t i = 0; i < y_hat.size(); ++i) {
		const double fd = oracle::central_difference(
		    [&](double v) {
			    Matrix perturbed = y_hat;
			    perturbed.storage()[i] = v;
			    return pinball(y, perturbed, q);
		    },
		    y_hat.storage()[i], 1e-7);
		CHECK(oracle::relative_error(grad.storage()[i], fd, 1e-6) < 1e-4);
	}
}

TEST_CASE("gaussian nll closed forms") {
	const ForecastOutput unit = gaussian_output(2, 3, 0.25, 1.0);
	Matrix y(2, 3, 0.25);
	CHECK(nll(y, unit) == Catch::Approx(0.9189385).margin(1e-6));
	// Doubling sigma at y = mu raises the loss by ln 2.
	const ForecastOutput doubled = gaussian_output(2, 3, 0.25, 2.0);
	CHECK(nll(y, doubled) - nll(y, unit) == Catch::Approx(std::log(2.0)).margin(1e-12));
}

TEST_CASE("nll substitutes a finite penalty outside bounded supports") {
	ForecastOutput out;
	out.kind = HeadKind::mle_johnson_sb;
	out.batch = 1;
	out.horizon = 2;
	out.values = Matrix(1, 4);
	out.values(0, 0) = 0.0; // gamma
	out.values(0, 1) = 1.0; // delta
	out.values(0, 2) = 0.0;
	out.values(0, 3) = 1.0;
	Matrix y(1, 2);
	y(0, 0) = 0.0; // boundary: outside the open support
	y(0, 1) = 0.5;
	const double loss = nll(y, out);
	CHECK(std::isfinite(loss));
	const double in_support = -johnson_sb_logpdf(0.5, {0.0, 1.0, 0.0, 1.0});
	CHECK(loss == Catch::Approx((kOutOfSupportPenalty + in_support) / 2.0));
	// The penalized sample contributes no gradient.
	const Matrix g = nll_grad(y, out);
	CHECK(g(0, 0) == 0.0);
	CHECK(g(0, 1) == 0.0);
	CHECK(g(0, 2) != 0.0);
}

TEST_CASE("fitted gaussian parameters are locally optimal for nll") {
	Rng rng(41);
	const std::size_t n = 400;
	Matrix y(1, n);
	for (double &v : y.storage()) v = 3.0 + 1.7 * rng.normal();
	double mean = 0.0;
	for (double v : y.storage()) mean += v;
	mean /= static_cast<double>(n);
	double var = 0.0;
	for (double v : y.storage()) var += (v - mean) * (v - mean);
	var /= static_cast<double>(n);
	const double sd = std::sqrt(var);

	const double base = nll(y, gaussian_output(1, n, mean, sd));
	for (double scale : {0.99, 1.01}) {
		CHECK(base <= nll(y, gaussian_output(1, n, mean * scale, sd)));
		CHECK(base <= nll(y, gaussian_output(1, n, mean, sd * scale)));
	}
}

TEST_CASE("nll gradient matches central differences for every family") {
	Rng rng(43);
	struct Case {
		HeadKind kind;
		std::vector<double> params;
	};
	const std::vector<Case> cases = {
	    {HeadKind::mle_gaussian, {0.4, 0.3}},
	    {HeadKind::mle_johnson_su, {0.2, 0.8, -1.0, 6.0}},
	    {HeadKind::mle_johnson_sb, {0.5, 1.2}},
	    {HeadKind::mle_weibull, {0.6, 1.4}},
	};
	for (const auto &c : cases) {
		ForecastOutput out;
		out.kind = c.kind;
		out.batch = 2;
		out.horizon = 2;
		const std::size_t k = c.params.size();
		out.values = Matrix(2, 2 * k);
		for (std::size_t b = 0; b < 2; ++b) {
			for (std::size_t p = 0; p < 2; ++p) {
				for (std::size_t j = 0; j < k; ++j) {
					out.values(b, p * k + j) = c.params[j] * rng.uniform(0.9, 1.1);
				}
			}
		}
		Matrix y(2, 2);
		for (std::size_t i = 0; i < y.size(); ++i) {
			const Family fam = family_of_head(c.kind);
			y.storage()[i] = family_quantile(fam, out.values.row(i / 2) + (i % 2) * k,
			                                 rng.uniform(0.2, 0.8));
		}
		const Matrix grad = nll_grad(y, out);
		for (std::size_t i = 0; i < out.values.size(); ++i) {
			const double fd = oracle::central_difference(
			    [&](double v) {
				    ForecastOutput perturbed = out;
				    perturbed.values.storage()[i] = v;
				    return nll(y, perturbed);
			    },
			    out.values.storage()[i], 1e-6);
			CHECK(oracle::relative_error(grad.storage()[i], fd, 1e-5) < 1e-4);
		}
	}
}

TEST_CASE("batch loss equals the mean of per-sample losses") {
	Rng rng(47);
	const std::size_t batch = 6, horizon = 4;
	Matrix y(batch, horizon);
	for (double &v : y.storage()) v = rng.uniform(0.2, 0.8);

	// Deterministic head.
	Matrix point(batch, horizon);
	for (double &v : point.storage()) v = rng.uniform(0.2, 0.8);
	double acc = 0.0;
	for (std::size_t b = 0; b < batch; ++b) {
		Matrix yb(1, horizon), pb(1, horizon);
		for (std::size_t p = 0; p < horizon; ++p) {
			yb(0, p) = y(b, p);
			pb(0, p) = point(b, p);
		}
		acc += mse(yb, pb);
	}
	CHECK(std::abs(mse(y, point) - acc / batch) < 1e-10);

	// Gaussian head.
	ForecastOutput out = gaussian_output(batch, horizon, 0.5, 0.2);
	for (double &v : out.values.storage()) v *= rng.uniform(0.95, 1.05);
	acc = 0.0;
	for (std::size_t b = 0; b < batch; ++b) {
		ForecastOutput ob;
		ob.kind = out.kind;
		ob.batch = 1;
		ob.horizon = horizon;
		ob.values = Matrix(1, horizon * 2);
		Matrix yb(1, horizon);
		for (std::size_t j = 0; j < horizon * 2; ++j) ob.values(0, j) = out.values(b, j);
		for (std::size_t p = 0; p < horizon; ++p) yb(0, p) = y(b, p);
		acc += nll(yb, ob);
	}
	CHECK(std::abs(nll(y, out) - acc / batch) < 1e-10);
}
