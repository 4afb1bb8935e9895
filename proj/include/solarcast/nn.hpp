#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solarcast/matrix.hpp"
#include "solarcast/rng.hpp"

namespace solarcast {

/// A named learnable tensor with its gradient accumulator.
struct Param {
	std::string name;
	Matrix value;
	Matrix grad;

	Param() = default;
	Param(std::string name_, std::size_t rows, std::size_t cols)
	    : name(std::move(name_)), value(rows, cols), grad(rows, cols) {}

	void zero_grad() { grad.fill(0.0); }
	std::size_t size() const { return value.size(); }
};

/// Uniform init in +-1/sqrt(fan_in).
inline void init_uniform(Matrix &m, std::size_t fan_in, Rng &rng) {
	const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in > 0 ? fan_in : 1));
	for (double &v : m.storage()) v = rng.uniform(-bound, bound);
}

inline double sigmoid(double x) {
	if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
	const double e = std::exp(x);
	return e / (1.0 + e);
}

/// y = x * W^T + b with x: B x in, W: out x in, b: 1 x out.
class LinearLayer {
public:
	LinearLayer() = default;
	LinearLayer(const std::string &name, std::size_t in_dim, std::size_t out_dim, Rng &rng)
	    : w_(name + ".weight", out_dim, in_dim), b_(name + ".bias", 1, out_dim) {
		init_uniform(w_.value, in_dim, rng);
	}

	Matrix forward(const Matrix &x) {
		x_cache_ = x;
		Matrix y(x.rows(), w_.value.rows());
		matmul_abt_add(x, w_.value, y);
		add_bias_rows(y, b_.value);
		return y;
	}

	/// Accumulates weight/bias gradients and returns d loss / d x.
	Matrix backward(const Matrix &d_y) {
		matmul_atb_add(d_y, x_cache_, w_.grad);
		for (std::size_t i = 0; i < d_y.rows(); ++i) {
			for (std::size_t j = 0; j < d_y.cols(); ++j) b_.grad(0, j) += d_y(i, j);
		}
		Matrix d_x(x_cache_.rows(), x_cache_.cols());
		matmul_ab_add(d_y, w_.value, d_x);
		return d_x;
	}

	Param &weight() { return w_; }
	Param &bias() { return b_; }
	std::size_t in_dim() const { return w_.value.cols(); }
	std::size_t out_dim() const { return w_.value.rows(); }

private:
	Param w_, b_;
	Matrix x_cache_;
};

/// Single LSTM layer unrolled over a window. Gate order in the packed
/// pre-activation is [input, forget, candidate, output]; the forget bias
/// starts at +1.
class LstmLayer {
public:
	LstmLayer() = default;
	LstmLayer(const std::string &name, std::size_t input_dim, std::size_t hidden, Rng &rng)
	    : input_dim_(input_dim), hidden_(hidden),
	      w_x_(name + ".w_x", 4 * hidden, input_dim),
	      w_h_(name + ".w_h", 4 * hidden, hidden),
	      b_(name + ".bias", 1, 4 * hidden) {
		init_uniform(w_x_.value, input_dim, rng);
		init_uniform(w_h_.value, hidden, rng);
		for (std::size_t j = hidden; j < 2 * hidden; ++j) b_.value(0, j) = 1.0;
	}

	/// Runs the recurrence over xs (one B x input_dim matrix per hour) and
	/// returns the full hidden sequence.
	const std::vector<Matrix> &forward(const std::vector<Matrix> &xs) {
		const std::size_t steps = xs.size();
		const std::size_t batch = xs.empty() ? 0 : xs[0].rows();
		gates_.assign(steps, Matrix(batch, 4 * hidden_));
		cells_.assign(steps, Matrix(batch, hidden_));
		tanh_cells_.assign(steps, Matrix(batch, hidden_));
		hiddens_.assign(steps, Matrix(batch, hidden_));

		for (std::size_t t = 0; t < steps; ++t) {
			if (xs[t].cols() != input_dim_ || xs[t].rows() != batch) {
				throw std::invalid_argument("lstm: input step " + std::to_string(t) + " is " +
				                            std::to_string(xs[t].rows()) + "x" +
				                            std::to_string(xs[t].cols()) + ", expected " +
				                            std::to_string(batch) + "x" + std::to_string(input_dim_));
			}
			Matrix &a = gates_[t];
			for (std::size_t i = 0; i < batch; ++i) {
				for (std::size_t j = 0; j < 4 * hidden_; ++j) a(i, j) = b_.value(0, j);
			}
			matmul_abt_add(xs[t], w_x_.value, a);
			if (t > 0) matmul_abt_add(hiddens_[t - 1], w_h_.value, a);

			Matrix &c = cells_[t];
			Matrix &tc = tanh_cells_[t];
			Matrix &h = hiddens_[t];
			const Matrix *c_prev = t > 0 ? &cells_[t - 1] : nullptr;
			for (std::size_t i = 0; i < batch; ++i) {
				double *ar = a.row(i);
				for (std::size_t j = 0; j < hidden_; ++j) {
					const double gi = sigmoid(ar[j]);
					const double gf = sigmoid(ar[hidden_ + j]);
					const double gg = std::tanh(ar[2 * hidden_ + j]);
					const double go = sigmoid(ar[3 * hidden_ + j]);
					ar[j] = gi;
					ar[hidden_ + j] = gf;
					ar[2 * hidden_ + j] = gg;
					ar[3 * hidden_ + j] = go;
					const double cp = c_prev ? (*c_prev)(i, j) : 0.0;
					const double cv = gf * cp + gi * gg;
					c(i, j) = cv;
					tc(i, j) = std::tanh(cv);
					h(i, j) = go * tc(i, j);
				}
			}
		}
		return hiddens_;
	}

	/// Backpropagation through time. d_hidden_seq[t] may be empty (treated
	/// as zero). xs must be the same sequence given to forward. Returns
	/// d loss / d xs and accumulates parameter gradients.
	std::vector<Matrix> backward(const std::vector<Matrix> &d_hidden_seq,
	                             const std::vector<Matrix> &xs) {
		const std::size_t steps = hiddens_.size();
		const std::size_t batch = steps ? hiddens_[0].rows() : 0;
		std::vector<Matrix> d_xs(steps, Matrix(batch, input_dim_));
		Matrix d_h_next(batch, hidden_);
		Matrix d_c_next(batch, hidden_);
		Matrix d_a(batch, 4 * hidden_);

		for (std::size_t ti = steps; ti-- > 0;) {
			const Matrix &a = gates_[ti];
			const Matrix &tc = tanh_cells_[ti];
			const Matrix *c_prev = ti > 0 ? &cells_[ti - 1] : nullptr;
			const Matrix *d_h_ext = d_hidden_seq[ti].empty() ? nullptr : &d_hidden_seq[ti];

			for (std::size_t i = 0; i < batch; ++i) {
				const double *ar = a.row(i);
				for (std::size_t j = 0; j < hidden_; ++j) {
					const double gi = ar[j];
					const double gf = ar[hidden_ + j];
					const double gg = ar[2 * hidden_ + j];
					const double go = ar[3 * hidden_ + j];
					const double tcv = tc(i, j);

					const double dh = d_h_next(i, j) + (d_h_ext ? (*d_h_ext)(i, j) : 0.0);
					const double dc = d_c_next(i, j) + dh * go * (1.0 - tcv * tcv);
					const double d_o = dh * tcv;
					const double d_i = dc * gg;
					const double d_g = dc * gi;
					const double d_f = dc * (c_prev ? (*c_prev)(i, j) : 0.0);

					d_a(i, j) = d_i * gi * (1.0 - gi);
					d_a(i, hidden_ + j) = d_f * gf * (1.0 - gf);
					d_a(i, 2 * hidden_ + j) = d_g * (1.0 - gg * gg);
					d_a(i, 3 * hidden_ + j) = d_o * go * (1.0 - go);

					d_c_next(i, j) = dc * gf;
				}
			}

			matmul_atb_add(d_a, xs[ti], w_x_.grad);
			if (ti > 0) matmul_atb_add(d_a, hiddens_[ti - 1], w_h_.grad);
			for (std::size_t i = 0; i < batch; ++i) {
				for (std::size_t j = 0; j < 4 * hidden_; ++j) b_.grad(0, j) += d_a(i, j);
			}
			matmul_ab_add(d_a, w_x_.value, d_xs[ti]);
			d_h_next.fill(0.0);
			if (ti > 0) matmul_ab_add(d_a, w_h_.value, d_h_next);
		}
		return d_xs;
	}

	const std::vector<Matrix> &hidden_sequence() const { return hiddens_; }
	std::size_t hidden_size() const { return hidden_; }
	std::size_t input_dim() const { return input_dim_; }
	Param &weight_input() { return w_x_; }
	Param &weight_hidden() { return w_h_; }
	Param &bias() { return b_; }

private:
	std::size_t input_dim_ = 0;
	std::size_t hidden_ = 0;
	Param w_x_, w_h_, b_;
	std::vector<Matrix> gates_, cells_, tanh_cells_, hiddens_;
};

inline double global_grad_norm(const std::vector<Param *> &params) {
	double acc = 0.0;
	for (const Param *p : params) {
		for (double g : p->grad.storage()) acc += g * g;
	}
	return std::sqrt(acc);
}

/// Scales all gradients down when their global norm exceeds max_norm.
inline void clip_gradients(const std::vector<Param *> &params, double max_norm) {
	const double norm = global_grad_norm(params);
	if (norm <= max_norm || norm == 0.0) return;
	const double scale = max_norm / norm;
	for (Param *p : params) {
		for (double &g : p->grad.storage()) g *= scale;
	}
}

} // namespace solarcast
