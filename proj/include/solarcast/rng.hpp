#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace solarcast {

/// Deterministic random source. All sampling transforms are written out
/// explicitly because the standard distribution objects are not guaranteed
/// to produce the same streams across library implementations, and several
/// contracts here (dataset synthesis, weight init, batch shuffling) promise
/// bit-reproducibility for a given seed.
class Rng {
public:
	explicit Rng(std::uint64_t seed) : engine_(seed) {}

	std::uint64_t next_u64() { return engine_(); }

	/// Uniform in [0, 1) with 53-bit resolution.
	double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

	double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

	/// Standard normal via Box-Muller; the sine partner is cached.
	double normal() {
		if (has_spare_) {
			has_spare_ = false;
			return spare_;
		}
		double u1 = uniform();
		double u2 = uniform();
		while (u1 <= 0.0) u1 = uniform();
		const double r = std::sqrt(-2.0 * std::log(u1));
		const double theta = 2.0 * 3.14159265358979323846 * u2;
		spare_ = r * std::sin(theta);
		has_spare_ = true;
		return r * std::cos(theta);
	}

	/// Uniform index in [0, n). Modulo bias is negligible for the sizes used.
	std::size_t index(std::size_t n) { return static_cast<std::size_t>(next_u64() % n); }

	template <typename T>
	void shuffle(std::vector<T> &v) {
		for (std::size_t i = v.size(); i > 1; --i) {
			std::swap(v[i - 1], v[index(i)]);
		}
	}

private:
	std::mt19937_64 engine_;
	bool has_spare_ = false;
	double spare_ = 0.0;
};

} // namespace solarcast
