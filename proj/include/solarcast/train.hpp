#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "solarcast/adam.hpp"
#include "solarcast/csv_io.hpp"
#include "solarcast/metrics.hpp"
#include "solarcast/model.hpp"

namespace solarcast {

enum class StopReason { completed, patience, ace_guard, divergence };

inline const char *stop_reason_name(StopReason r) {
	switch (r) {
	case StopReason::completed: return "completed";
	case StopReason::patience: return "patience";
	case StopReason::ace_guard: return "ace_guard";
	case StopReason::divergence: return "divergence";
	}
	return "?";
}

struct EpochLog {
	int epoch = 0;
	double train_loss = 0.0;
	double val_loss = 0.0;
	double val_ace = std::numeric_limits<double>::quiet_NaN();
	bool has_ace = false;
};

struct TrainOptions {
	int max_epochs = 200;
	int patience = 20;
	double clip_norm = 5.0;
	double ace_guard_factor = 1.2;
	int ace_guard_consecutive = 2;
	std::vector<double> ace_coverages = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
	std::size_t eval_chunk = 256;
	bool verbose = false;
};

struct TrainResult {
	std::vector<EpochLog> log;
	int best_epoch = -1;
	double best_val_loss = std::numeric_limits<double>::quiet_NaN();
	StopReason reason = StopReason::completed;
};

/// Mean loss of the model over a window set, evaluated in chunks.
inline double evaluate_loss(ForecastModel &model, const WindowSet &data,
                            std::size_t chunk = 256) {
	double acc = 0.0;
	std::size_t count = 0;
	for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
		const std::size_t end = std::min(begin + chunk, data.size());
		std::vector<std::size_t> idx(end - begin);
		for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
		const Batch batch = assemble_batch(data, idx);
		const ForecastOutput out = model.forward(batch);
		acc += head_loss(batch.targets, out) * static_cast<double>(idx.size());
		count += idx.size();
	}
	return count ? acc / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

/// Validation ACE over the given coverage grid; quantile heads are scored
/// on the coverages their quantile set can express. Returns NaN when no
/// coverage is expressible.
inline double evaluate_ace(ForecastModel &model, const WindowSet &data,
                           const std::vector<double> &coverages, std::size_t chunk = 256) {
	std::vector<double> usable = coverages;
	if (model.spec().head == HeadKind::quantile) {
		usable.clear();
		ForecastOutput probe;
		probe.kind = HeadKind::quantile;
		probe.quantile_levels = model.spec().quantiles;
		const std::vector<double> avail = available_coverages(probe);
		for (double c : coverages) {
			for (double a : avail) {
				if (std::abs(a - c) < 1e-9) {
					usable.push_back(c);
					break;
				}
			}
		}
		if (usable.empty()) return std::numeric_limits<double>::quiet_NaN();
	}
	std::vector<std::size_t> inside(usable.size(), 0);
	std::size_t total = 0;
	for (std::size_t begin = 0; begin < data.size(); begin += chunk) {
		const std::size_t end = std::min(begin + chunk, data.size());
		std::vector<std::size_t> idx(end - begin);
		for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
		const Batch batch = assemble_batch(data, idx);
		const ForecastOutput out = model.forward(batch);
		const auto intervals = intervals_from_output(out, usable);
		for (std::size_t c = 0; c < intervals.size(); ++c) {
			for (std::size_t i = 0; i < batch.targets.size(); ++i) {
				const double y = batch.targets.storage()[i];
				if (y >= intervals[c].lower.storage()[i] && y <= intervals[c].upper.storage()[i]) {
					++inside[c];
				}
			}
		}
		total += batch.targets.size();
	}
	if (total == 0) return std::numeric_limits<double>::quiet_NaN();
	std::vector<double> picps(usable.size());
	for (std::size_t c = 0; c < usable.size(); ++c) {
		picps[c] = static_cast<double>(inside[c]) / static_cast<double>(total);
	}
	return ace(picps, usable);
}

namespace detail {
struct BestSnapshot {
	int epoch = -1;
	double val_loss = std::numeric_limits<double>::infinity();
	std::vector<std::vector<double>> values;
};
} // namespace detail

/// Minibatch training loop: Adam with gradient clipping, per-epoch
/// validation, checkpoint at the best validation loss, early stop on
/// patience, and a calibration guard that rewinds to before a sustained
/// validation-ACE rise. On divergence the last finite checkpoint is kept.
inline TrainResult train_model(ForecastModel &model, AdamState &adam, const WindowSet &train_set,
                               const WindowSet &val_set, const TrainOptions &opts) {
	if (train_set.size() == 0 || val_set.size() == 0) {
		throw std::invalid_argument("train_model: train and validation sets must be non-empty");
	}
	const ModelSpec &spec = model.spec();
	const bool probabilistic = spec.head != HeadKind::deterministic;
	Rng shuffle_rng(spec.seed ^ 0x9e3779b97f4a7c15ULL);

	TrainResult result;
	detail::BestSnapshot best, best_prev1, best_prev2;
	best.values = model.snapshot(); // fallback when nothing finite is seen
	best.epoch = 0;

	double ace_min = std::numeric_limits<double>::infinity();
	int ace_exceed_run = 0;

	std::vector<std::size_t> order(train_set.size());
	for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

	const std::size_t batch_size = static_cast<std::size_t>(spec.batch_size);
	auto params = model.parameters();

	for (int epoch = 1; epoch <= opts.max_epochs; ++epoch) {
		shuffle_rng.shuffle(order);
		double loss_acc = 0.0;
		std::size_t seen = 0;
		bool diverged = false;

		for (std::size_t begin = 0; begin < order.size(); begin += batch_size) {
			const std::size_t end = std::min(begin + batch_size, order.size());
			std::vector<std::size_t> idx(order.begin() + static_cast<std::ptrdiff_t>(begin),
			                             order.begin() + static_cast<std::ptrdiff_t>(end));
			const Batch batch = assemble_batch(train_set, idx);
			const ForecastOutput out = model.forward(batch);
			const double loss = head_loss(batch.targets, out);
			if (!std::isfinite(loss)) {
				diverged = true;
				break;
			}
			loss_acc += loss * static_cast<double>(idx.size());
			seen += idx.size();
			model.zero_grad();
			model.backward(head_loss_grad(batch.targets, out));
			clip_gradients(params, opts.clip_norm);
			adam_step(params, adam, spec.learning_rate);
		}

		if (diverged) {
			model.restore(best.values);
			result.best_epoch = best.epoch;
			result.best_val_loss = std::isfinite(best.val_loss)
			                           ? best.val_loss
			                           : std::numeric_limits<double>::quiet_NaN();
			result.reason = StopReason::divergence;
			return result;
		}

		EpochLog row;
		row.epoch = epoch;
		row.train_loss = loss_acc / static_cast<double>(seen);
		row.val_loss = evaluate_loss(model, val_set, opts.eval_chunk);
		if (probabilistic) {
			row.val_ace = evaluate_ace(model, val_set, opts.ace_coverages, opts.eval_chunk);
			row.has_ace = std::isfinite(row.val_ace);
		}
		result.log.push_back(row);
		if (opts.verbose) {
			std::string line = "epoch " + std::to_string(epoch) + " train " +
			                   format_double(row.train_loss) + " val " + format_double(row.val_loss);
			if (row.has_ace) line += " ace " + format_double(row.val_ace);
			std::fputs((line + "\n").c_str(), stderr);
		}

		if (!std::isfinite(row.val_loss)) {
			model.restore(best.values);
			result.best_epoch = best.epoch;
			result.best_val_loss = std::isfinite(best.val_loss)
			                           ? best.val_loss
			                           : std::numeric_limits<double>::quiet_NaN();
			result.reason = StopReason::divergence;
			return result;
		}

		// Age the best-checkpoint history before considering this epoch, so
		// the ACE guard can rewind to the state two evaluations back.
		best_prev2 = best_prev1;
		best_prev1 = best;
		if (row.val_loss < best.val_loss) {
			best.epoch = epoch;
			best.val_loss = row.val_loss;
			best.values = model.snapshot();
		}

		if (row.has_ace) {
			if (row.val_ace > opts.ace_guard_factor * ace_min) {
				++ace_exceed_run;
			} else {
				ace_exceed_run = 0;
			}
			if (row.val_ace < ace_min) ace_min = row.val_ace;
			if (ace_exceed_run >= opts.ace_guard_consecutive) {
				const detail::BestSnapshot &rewind =
				    best_prev2.epoch >= 0 ? best_prev2 : (best_prev1.epoch >= 0 ? best_prev1 : best);
				model.restore(rewind.values);
				result.best_epoch = rewind.epoch;
				result.best_val_loss = rewind.val_loss;
				result.reason = StopReason::ace_guard;
				return result;
			}
		}

		if (epoch - best.epoch >= opts.patience) {
			model.restore(best.values);
			result.best_epoch = best.epoch;
			result.best_val_loss = best.val_loss;
			result.reason = StopReason::patience;
			return result;
		}
	}

	model.restore(best.values);
	result.best_epoch = best.epoch;
	result.best_val_loss = best.val_loss;
	result.reason = StopReason::completed;
	return result;
}

/// Training log serialization: epoch,train_loss,val_loss,val_ace with the
/// ACE cell left empty for deterministic heads.
inline std::string training_log_csv(const TrainResult &result) {
	std::string out = "epoch,train_loss,val_loss,val_ace\n";
	for (const EpochLog &row : result.log) {
		out += std::to_string(row.epoch);
		out += ',';
		out += format_double(row.train_loss);
		out += ',';
		out += format_double(row.val_loss);
		out += ',';
		if (row.has_ace) out += format_double(row.val_ace);
		out += '\n';
	}
	return out;
}

} // namespace solarcast
