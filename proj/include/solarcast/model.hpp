#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solarcast/errors.hpp"
#include "solarcast/forecast_output.hpp"
#include "solarcast/losses.hpp"
#include "solarcast/nn.hpp"
#include "solarcast/windows.hpp"

namespace solarcast {

enum class Arch { lstm, mlp };

inline const char *arch_name(Arch a) { return a == Arch::lstm ? "lstm" : "mlp"; }
inline Arch arch_from_name(const std::string &s) {
	if (s == "lstm") return Arch::lstm;
	if (s == "mlp") return Arch::mlp;
	throw ConfigError("unknown architecture '" + s + "' (expected lstm|mlp)");
}

/// Architecture and training hyperparameters of one model.
struct ModelSpec {
	Arch arch = Arch::lstm;
	HeadKind head = HeadKind::deterministic;
	int layers = 2;
	int hidden = 128;
	int window = 72;
	int horizon = 36;
	int input_dim = 0;
	std::vector<double> quantiles; // quantile head only
	double learning_rate = 1e-5;
	int batch_size = 64;
	std::uint64_t seed = 1;

	int head_width() const {
		switch (head) {
		case HeadKind::deterministic: return 1;
		case HeadKind::quantile: return static_cast<int>(quantiles.size());
		case HeadKind::mle_gaussian: return 2;
		case HeadKind::mle_johnson_su: return 4;
		case HeadKind::mle_johnson_sb: return 2;
		case HeadKind::mle_weibull: return 2;
		}
		return 0;
	}

	/// Index of the 0.5 level in the quantile set (quantile head only).
	int median_index() const {
		for (std::size_t i = 0; i < quantiles.size(); ++i) {
			if (std::abs(quantiles[i] - 0.5) < 1e-9) return static_cast<int>(i);
		}
		throw ConfigError("quantile head requires the 0.5 level for clear-sky injection");
	}

	void validate() const {
		if (layers < 1 || hidden < 1 || window < 1 || horizon < 1 || input_dim < 1 ||
		    batch_size < 1) {
			throw ConfigError("model spec: layers, hidden, window, horizon, input_dim, and "
			                  "batch size must be positive");
		}
		if (!(learning_rate > 0.0)) throw ConfigError("model spec: learning rate must be positive");
		if (head == HeadKind::quantile) {
			check_quantile_set(quantiles);
			(void)median_index();
		} else if (!quantiles.empty()) {
			throw ConfigError("model spec: quantile levels are only valid for the qr head");
		}
		if (arch == Arch::mlp && head != HeadKind::deterministic) {
			throw ConfigError("the mlp baseline supports the deterministic head only");
		}
	}
};

/// One training/evaluation batch in scaled units.
struct Batch {
	std::vector<Matrix> inputs; // window entries, each batch x input_dim
	Matrix targets;             // batch x horizon
	Matrix future_cs;           // batch x horizon

	std::size_t batch_size() const { return targets.rows(); }
};

inline Batch assemble_batch(const WindowSet &ws, std::span<const std::size_t> which) {
	const std::size_t b = which.size();
	const std::size_t d = ws.segments.empty() ? 0 : ws.segments[0].features.cols();
	Batch out;
	out.inputs.assign(static_cast<std::size_t>(ws.window), Matrix(b, d));
	out.targets = Matrix(b, static_cast<std::size_t>(ws.horizon));
	out.future_cs = Matrix(b, static_cast<std::size_t>(ws.horizon));
	for (std::size_t i = 0; i < b; ++i) {
		const auto &[seg_idx, sample] = ws.samples[which[i]];
		const ScaledSeries &seg = ws.segments[seg_idx];
		for (int t = 0; t < ws.window; ++t) {
			const double *src = seg.features.row(sample.input_row(t));
			double *dst = out.inputs[static_cast<std::size_t>(t)].row(i);
			for (std::size_t j = 0; j < d; ++j) dst[j] = src[j];
		}
		for (int h = 0; h < ws.horizon; ++h) {
			out.targets(i, static_cast<std::size_t>(h)) = seg.target[sample.target_row(h)];
			out.future_cs(i, static_cast<std::size_t>(h)) = seg.clear_sky[sample.target_row(h)];
		}
	}
	return out;
}

// Head parameter intervals. Raw network outputs are squashed into these
// open ranges before the distributions see them.
inline ParamBounds jsu_gamma_bounds() { return ParamBounds::open(-4.0, 4.0); }
inline ParamBounds jsu_delta_bounds() { return ParamBounds::open(5.0, 9.0); }
inline ParamBounds jsb_gamma_bounds() { return ParamBounds::open(-4.0, 4.0); }
inline ParamBounds jsb_delta_bounds() { return ParamBounds::open(0.05, 6.0); }
inline ParamBounds weibull_scale_bounds() { return ParamBounds::open(0.0, 1.0); }
inline ParamBounds weibull_shape_bounds() { return ParamBounds::open(0.0, 2.0); }

inline constexpr double kJsbGammaLimit = 4.0 - 1e-3; // clamp after the cs shift
inline constexpr double kWeibullShapeFloor = 1e-4;   // keeps omega positive under injection

/// Linear map from the backbone state to the per-horizon head values, the
/// parameter constraints, and the clear-sky injection. alpha starts at 1 so
/// an untrained deterministic model predicts the clear-sky envelope.
class ForecastHead {
public:
	ForecastHead() = default;
	ForecastHead(const ModelSpec &spec, Rng &rng)
	    : kind_(spec.head), horizon_(spec.horizon), width_(spec.head_width()),
	      quantiles_(spec.quantiles),
	      median_idx_(spec.head == HeadKind::quantile ? spec.median_index() : 0),
	      linear_("head", static_cast<std::size_t>(spec.hidden),
	              static_cast<std::size_t>(spec.horizon * spec.head_width()), rng),
	      alpha_("alpha", 1, 1) {
		alpha_.value(0, 0) = 1.0;
	}

	ForecastOutput forward(const Matrix &hidden, const Matrix &future_cs) {
		raw_ = linear_.forward(hidden);
		cs_ = future_cs;
		const double alpha = alpha_.value(0, 0);
		const std::size_t b = raw_.rows();
		const std::size_t p = static_cast<std::size_t>(horizon_);
		const std::size_t k = static_cast<std::size_t>(width_);

		ForecastOutput out;
		out.kind = kind_;
		out.batch = b;
		out.horizon = p;
		out.quantile_levels = quantiles_;
		out.values = raw_;
		Matrix &v = out.values;

		switch (kind_) {
		case HeadKind::deterministic:
			for (std::size_t i = 0; i < b; ++i)
				for (std::size_t j = 0; j < p; ++j) v(i, j) += alpha * cs_(i, j);
			break;
		case HeadKind::quantile:
			for (std::size_t i = 0; i < b; ++i)
				for (std::size_t j = 0; j < p; ++j)
					v(i, j * k + static_cast<std::size_t>(median_idx_)) += alpha * cs_(i, j);
			break;
		case HeadKind::mle_gaussian:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					v(i, j * k) += alpha * cs_(i, j);
					v(i, j * k + 1) = softplus_shifted(raw_(i, j * k + 1));
				}
			}
			break;
		case HeadKind::mle_johnson_su:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					v(i, j * k) += alpha * cs_(i, j);
					v(i, j * k + 1) = softplus_shifted(raw_(i, j * k + 1));
					v(i, j * k + 2) = constrain(raw_(i, j * k + 2), jsu_gamma_bounds());
					v(i, j * k + 3) = constrain(raw_(i, j * k + 3), jsu_delta_bounds());
				}
			}
			break;
		case HeadKind::mle_johnson_sb:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					const double g = constrain(raw_(i, j * k), jsb_gamma_bounds());
					double shifted = g + (1.0 - cs_(i, j)) * 4.0;
					if (shifted > kJsbGammaLimit) shifted = kJsbGammaLimit;
					if (shifted < -kJsbGammaLimit) shifted = -kJsbGammaLimit;
					v(i, j * k) = shifted;
					v(i, j * k + 1) = constrain(raw_(i, j * k + 1), jsb_delta_bounds());
				}
			}
			break;
		case HeadKind::mle_weibull:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					v(i, j * k) = constrain(raw_(i, j * k), weibull_scale_bounds());
					double omega = constrain(raw_(i, j * k + 1), weibull_shape_bounds()) + alpha * cs_(i, j);
					if (omega < kWeibullShapeFloor) omega = kWeibullShapeFloor;
					v(i, j * k + 1) = omega;
				}
			}
			break;
		}
		return out;
	}

	/// Chains d loss / d output values back through the injection and the
	/// constraints, accumulates the alpha and linear-layer gradients, and
	/// returns d loss / d hidden.
	Matrix backward(const Matrix &d_out) {
		const double alpha = alpha_.value(0, 0);
		const std::size_t b = raw_.rows();
		const std::size_t p = static_cast<std::size_t>(horizon_);
		const std::size_t k = static_cast<std::size_t>(width_);
		Matrix d_raw = d_out;
		double d_alpha = 0.0;

		switch (kind_) {
		case HeadKind::deterministic:
			for (std::size_t i = 0; i < b; ++i)
				for (std::size_t j = 0; j < p; ++j) d_alpha += d_out(i, j) * cs_(i, j);
			break;
		case HeadKind::quantile:
			for (std::size_t i = 0; i < b; ++i)
				for (std::size_t j = 0; j < p; ++j)
					d_alpha += d_out(i, j * k + static_cast<std::size_t>(median_idx_)) * cs_(i, j);
			break;
		case HeadKind::mle_gaussian:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					d_alpha += d_out(i, j * k) * cs_(i, j);
					d_raw(i, j * k + 1) =
					    d_out(i, j * k + 1) * softplus_shifted_derivative(raw_(i, j * k + 1));
				}
			}
			break;
		case HeadKind::mle_johnson_su:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					d_alpha += d_out(i, j * k) * cs_(i, j);
					d_raw(i, j * k + 1) =
					    d_out(i, j * k + 1) * softplus_shifted_derivative(raw_(i, j * k + 1));
					d_raw(i, j * k + 2) =
					    d_out(i, j * k + 2) * constrain_derivative(raw_(i, j * k + 2), jsu_gamma_bounds());
					d_raw(i, j * k + 3) =
					    d_out(i, j * k + 3) * constrain_derivative(raw_(i, j * k + 3), jsu_delta_bounds());
				}
			}
			break;
		case HeadKind::mle_johnson_sb:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					const double g = constrain(raw_(i, j * k), jsb_gamma_bounds());
					const double shifted = g + (1.0 - cs_(i, j)) * 4.0;
					const bool clamped = shifted > kJsbGammaLimit || shifted < -kJsbGammaLimit;
					d_raw(i, j * k) =
					    clamped ? 0.0
					            : d_out(i, j * k) * constrain_derivative(raw_(i, j * k), jsb_gamma_bounds());
					d_raw(i, j * k + 1) =
					    d_out(i, j * k + 1) * constrain_derivative(raw_(i, j * k + 1), jsb_delta_bounds());
				}
			}
			break;
		case HeadKind::mle_weibull:
			for (std::size_t i = 0; i < b; ++i) {
				for (std::size_t j = 0; j < p; ++j) {
					d_raw(i, j * k) =
					    d_out(i, j * k) * constrain_derivative(raw_(i, j * k), weibull_scale_bounds());
					const double omega =
					    constrain(raw_(i, j * k + 1), weibull_shape_bounds()) + alpha * cs_(i, j);
					if (omega < kWeibullShapeFloor) {
						d_raw(i, j * k + 1) = 0.0;
					} else {
						d_raw(i, j * k + 1) = d_out(i, j * k + 1) *
						                      constrain_derivative(raw_(i, j * k + 1), weibull_shape_bounds());
						d_alpha += d_out(i, j * k + 1) * cs_(i, j);
					}
				}
			}
			break;
		}

		alpha_.grad(0, 0) += d_alpha;
		return linear_.backward(d_raw);
	}

	Param &alpha() { return alpha_; }
	LinearLayer &linear() { return linear_; }
	HeadKind kind() const { return kind_; }

private:
	HeadKind kind_ = HeadKind::deterministic;
	int horizon_ = 0;
	int width_ = 1;
	std::vector<double> quantiles_;
	int median_idx_ = 0;
	LinearLayer linear_;
	Param alpha_;
	Matrix raw_, cs_;
};

/// Common interface of the trainable forecasters.
class ForecastModel {
public:
	explicit ForecastModel(ModelSpec spec) : spec_(std::move(spec)) {}
	virtual ~ForecastModel() = default;

	const ModelSpec &spec() const { return spec_; }

	virtual ForecastOutput forward(const Batch &batch) = 0;
	virtual void backward(const Matrix &d_out) = 0;
	virtual std::vector<Param *> parameters() = 0;

	void zero_grad() {
		for (Param *p : parameters()) p->zero_grad();
	}

	std::vector<std::vector<double>> snapshot() {
		std::vector<std::vector<double>> s;
		for (Param *p : parameters()) s.push_back(p->value.storage());
		return s;
	}

	void restore(const std::vector<std::vector<double>> &s) {
		auto params = parameters();
		if (s.size() != params.size()) throw std::invalid_argument("restore: snapshot mismatch");
		for (std::size_t i = 0; i < params.size(); ++i) {
			if (s[i].size() != params[i]->value.size()) {
				throw std::invalid_argument("restore: size mismatch for " + params[i]->name);
			}
			params[i]->value.storage() = s[i];
		}
	}

protected:
	ModelSpec spec_;
};

/// Stacked LSTM over the input window; the top layer's final hidden state
/// feeds the forecast head.
class LstmForecastModel : public ForecastModel {
public:
	explicit LstmForecastModel(ModelSpec spec) : ForecastModel(std::move(spec)) {
		spec_.validate();
		Rng rng(spec_.seed);
		std::size_t in_dim = static_cast<std::size_t>(spec_.input_dim);
		for (int l = 0; l < spec_.layers; ++l) {
			layers_.emplace_back("lstm" + std::to_string(l), in_dim,
			                     static_cast<std::size_t>(spec_.hidden), rng);
			in_dim = static_cast<std::size_t>(spec_.hidden);
		}
		head_ = ForecastHead(spec_, rng);
	}

	ForecastOutput forward(const Batch &batch) override {
		if (batch.inputs.size() != static_cast<std::size_t>(spec_.window)) {
			throw std::invalid_argument("forward: expected " + std::to_string(spec_.window) +
			                            " input steps, got " + std::to_string(batch.inputs.size()));
		}
		xs_ = batch.inputs;
		const std::vector<Matrix> *seq = &xs_;
		for (LstmLayer &layer : layers_) seq = &layer.forward(*seq);
		forward_done_ = true;
		return head_.forward(seq->back(), batch.future_cs);
	}

	void backward(const Matrix &d_out) override {
		if (!forward_done_) throw std::logic_error("backward called before forward");
		const Matrix d_hidden = head_.backward(d_out);
		const std::size_t steps = xs_.size();
		std::vector<Matrix> d_seq(steps);
		d_seq.back() = d_hidden;
		for (std::size_t l = layers_.size(); l-- > 0;) {
			const std::vector<Matrix> &layer_input =
			    l == 0 ? xs_ : layers_[l - 1].hidden_sequence();
			d_seq = layers_[l].backward(d_seq, layer_input);
		}
	}

	std::vector<Param *> parameters() override {
		std::vector<Param *> out;
		for (LstmLayer &layer : layers_) {
			out.push_back(&layer.weight_input());
			out.push_back(&layer.weight_hidden());
			out.push_back(&layer.bias());
		}
		out.push_back(&head_.linear().weight());
		out.push_back(&head_.linear().bias());
		out.push_back(&head_.alpha());
		return out;
	}

	ForecastHead &head() { return head_; }
	std::vector<LstmLayer> &lstm_layers() { return layers_; }

private:
	std::vector<LstmLayer> layers_;
	ForecastHead head_;
	std::vector<Matrix> xs_;
	bool forward_done_ = false;
};

/// Feed-forward baseline: flattened window -> tanh hidden layer -> horizon.
/// No clear-sky injection; deterministic output only.
class MlpForecastModel : public ForecastModel {
public:
	explicit MlpForecastModel(ModelSpec spec) : ForecastModel(std::move(spec)) {
		spec_.validate();
		Rng rng(spec_.seed);
		const std::size_t in_dim =
		    static_cast<std::size_t>(spec_.window) * static_cast<std::size_t>(spec_.input_dim);
		l1_ = LinearLayer("mlp.l1", in_dim, static_cast<std::size_t>(spec_.hidden), rng);
		l2_ = LinearLayer("mlp.l2", static_cast<std::size_t>(spec_.hidden),
		                  static_cast<std::size_t>(spec_.horizon), rng);
	}

	ForecastOutput forward(const Batch &batch) override {
		if (batch.inputs.size() != static_cast<std::size_t>(spec_.window)) {
			throw std::invalid_argument("forward: expected " + std::to_string(spec_.window) +
			                            " input steps, got " + std::to_string(batch.inputs.size()));
		}
		const std::size_t b = batch.batch_size();
		const std::size_t d = static_cast<std::size_t>(spec_.input_dim);
		Matrix flat(b, batch.inputs.size() * d);
		for (std::size_t t = 0; t < batch.inputs.size(); ++t) {
			for (std::size_t i = 0; i < b; ++i) {
				const double *src = batch.inputs[t].row(i);
				double *dst = flat.row(i) + t * d;
				for (std::size_t j = 0; j < d; ++j) dst[j] = src[j];
			}
		}
		hidden_pre_ = l1_.forward(flat);
		hidden_act_ = hidden_pre_;
		for (double &v : hidden_act_.storage()) v = std::tanh(v);
		forward_done_ = true;

		ForecastOutput out;
		out.kind = HeadKind::deterministic;
		out.batch = b;
		out.horizon = static_cast<std::size_t>(spec_.horizon);
		out.values = l2_.forward(hidden_act_);
		return out;
	}

	void backward(const Matrix &d_out) override {
		if (!forward_done_) throw std::logic_error("backward called before forward");
		Matrix d_hidden = l2_.backward(d_out);
		for (std::size_t i = 0; i < d_hidden.size(); ++i) {
			const double a = hidden_act_.storage()[i];
			d_hidden.storage()[i] *= 1.0 - a * a;
		}
		l1_.backward(d_hidden);
	}

	std::vector<Param *> parameters() override {
		return {&l1_.weight(), &l1_.bias(), &l2_.weight(), &l2_.bias()};
	}

private:
	LinearLayer l1_, l2_;
	Matrix hidden_pre_, hidden_act_;
	bool forward_done_ = false;
};

inline std::unique_ptr<ForecastModel> make_model(const ModelSpec &spec) {
	spec.validate();
	if (spec.arch == Arch::mlp) return std::make_unique<MlpForecastModel>(spec);
	return std::make_unique<LstmForecastModel>(spec);
}

} // namespace solarcast
