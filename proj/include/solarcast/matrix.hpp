#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace solarcast {

/// Dense row-major matrix of doubles. The only tensor type used by the
/// network code; vectors are represented as 1xN or Nx1 as convenient.
class Matrix {
public:
	Matrix() = default;
	Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
	    : rows_(rows), cols_(cols), data_(rows * cols, value) {}

	std::size_t rows() const { return rows_; }
	std::size_t cols() const { return cols_; }
	std::size_t size() const { return data_.size(); }
	bool empty() const { return data_.empty(); }

	double &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
	double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

	double *row(std::size_t r) { return data_.data() + r * cols_; }
	const double *row(std::size_t r) const { return data_.data() + r * cols_; }

	double *data() { return data_.data(); }
	const double *data() const { return data_.data(); }
	std::vector<double> &storage() { return data_; }
	const std::vector<double> &storage() const { return data_; }

	void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

	bool same_shape(const Matrix &other) const {
		return rows_ == other.rows_ && cols_ == other.cols_;
	}

private:
	std::size_t rows_ = 0;
	std::size_t cols_ = 0;
	std::vector<double> data_;
};

inline void require_same_shape(const Matrix &a, const Matrix &b, const std::string &what) {
	if (!a.same_shape(b)) {
		throw std::invalid_argument(what + ": shape mismatch (" + std::to_string(a.rows()) + "x" +
		                            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
		                            "x" + std::to_string(b.cols()) + ")");
	}
}

/// out += a * b^T   (a: m x k, b: n x k, out: m x n)
inline void matmul_abt_add(const Matrix &a, const Matrix &b, Matrix &out) {
	if (a.cols() != b.cols() || out.rows() != a.rows() || out.cols() != b.rows()) {
		throw std::invalid_argument("matmul_abt_add: incompatible shapes");
	}
	const std::size_t m = a.rows(), n = b.rows(), k = a.cols();
	for (std::size_t i = 0; i < m; ++i) {
		const double *ai = a.row(i);
		double *oi = out.row(i);
		for (std::size_t j = 0; j < n; ++j) {
			const double *bj = b.row(j);
			double acc = 0.0;
			for (std::size_t l = 0; l < k; ++l) acc += ai[l] * bj[l];
			oi[j] += acc;
		}
	}
}

/// out += a * b   (a: m x k, b: k x n, out: m x n)
inline void matmul_ab_add(const Matrix &a, const Matrix &b, Matrix &out) {
	if (a.cols() != b.rows() || out.rows() != a.rows() || out.cols() != b.cols()) {
		throw std::invalid_argument("matmul_ab_add: incompatible shapes");
	}
	const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
	for (std::size_t i = 0; i < m; ++i) {
		const double *ai = a.row(i);
		double *oi = out.row(i);
		for (std::size_t l = 0; l < k; ++l) {
			const double s = ai[l];
			if (s == 0.0) continue;
			const double *bl = b.row(l);
			for (std::size_t j = 0; j < n; ++j) oi[j] += s * bl[j];
		}
	}
}

/// out += a^T * b   (a: k x m, b: k x n, out: m x n)
inline void matmul_atb_add(const Matrix &a, const Matrix &b, Matrix &out) {
	if (a.rows() != b.rows() || out.rows() != a.cols() || out.cols() != b.cols()) {
		throw std::invalid_argument("matmul_atb_add: incompatible shapes");
	}
	const std::size_t k = a.rows(), m = a.cols(), n = b.cols();
	for (std::size_t l = 0; l < k; ++l) {
		const double *al = a.row(l);
		const double *bl = b.row(l);
		for (std::size_t i = 0; i < m; ++i) {
			const double s = al[i];
			if (s == 0.0) continue;
			double *oi = out.row(i);
			for (std::size_t j = 0; j < n; ++j) oi[j] += s * bl[j];
		}
	}
}

/// Adds a 1 x n bias row to every row of m.
inline void add_bias_rows(Matrix &m, const Matrix &bias) {
	if (bias.rows() != 1 || bias.cols() != m.cols()) {
		throw std::invalid_argument("add_bias_rows: bias must be 1 x cols");
	}
	for (std::size_t i = 0; i < m.rows(); ++i) {
		double *ri = m.row(i);
		for (std::size_t j = 0; j < m.cols(); ++j) ri[j] += bias(0, j);
	}
}

inline bool all_finite(const Matrix &m) {
	for (double v : m.storage()) {
		if (!std::isfinite(v)) return false;
	}
	return true;
}

} // namespace solarcast
