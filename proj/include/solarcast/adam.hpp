#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "solarcast/errors.hpp"
#include "solarcast/nn.hpp"

namespace solarcast {

/// Adam moment accumulators, one pair of buffers per parameter block.
struct AdamState {
	double beta1 = 0.9;
	double beta2 = 0.999;
	double eps = 1e-8;
	std::int64_t step = 0;
	std::vector<std::vector<double>> m;
	std::vector<std::vector<double>> v;

	void reset(const std::vector<Param *> &params) {
		step = 0;
		m.clear();
		v.clear();
		for (const Param *p : params) {
			m.emplace_back(p->size(), 0.0);
			v.emplace_back(p->size(), 0.0);
		}
	}

	bool matches(const std::vector<Param *> &params) const {
		if (m.size() != params.size()) return false;
		for (std::size_t i = 0; i < params.size(); ++i) {
			if (m[i].size() != params[i]->size()) return false;
		}
		return true;
	}
};

/// One bias-corrected Adam update over all parameter blocks. Throws when a
/// gradient has gone non-finite, naming the offending block.
inline void adam_step(const std::vector<Param *> &params, AdamState &state, double lr) {
	if (!state.matches(params)) state.reset(params);
	for (const Param *p : params) {
		for (double g : p->grad.storage()) {
			if (!std::isfinite(g)) {
				throw TrainingError("non-finite gradient in parameter block '" + p->name + "'");
			}
		}
	}
	++state.step;
	const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
	const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
	for (std::size_t i = 0; i < params.size(); ++i) {
		Param &p = *params[i];
		std::vector<double> &mi = state.m[i];
		std::vector<double> &vi = state.v[i];
		for (std::size_t j = 0; j < p.size(); ++j) {
			const double g = p.grad.storage()[j];
			mi[j] = state.beta1 * mi[j] + (1.0 - state.beta1) * g;
			vi[j] = state.beta2 * vi[j] + (1.0 - state.beta2) * g * g;
			const double m_hat = mi[j] / bc1;
			const double v_hat = vi[j] / bc2;
			p.value.storage()[j] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
		}
	}
}

} // namespace solarcast
