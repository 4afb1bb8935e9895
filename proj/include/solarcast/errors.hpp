#pragma once

#include <stdexcept>

namespace solarcast {

/// Invalid or inconsistent configuration (flags, spec fields, head/metric
/// pairings). CLI exit code 2.
struct ConfigError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

/// Filesystem and serialization failures. CLI exit code 3.
struct IoError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

/// Optimization failures (non-finite gradients). CLI exit code 4.
struct TrainingError : std::runtime_error {
	using std::runtime_error::runtime_error;
};

} // namespace solarcast
