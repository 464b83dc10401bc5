#pragma once

#include <cmath>

namespace volcast {

inline double sigmoid(double x) {
	if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
	const double e = std::exp(x);
	return e / (1.0 + e);
}

inline double logit(double p) { return std::log(p / (1.0 - p)); }

inline double softplus(double x) {
	if (x > 0.0) return x + std::log1p(std::exp(-x));
	return std::log1p(std::exp(x));
}

// inverse of softplus on (0, inf)
inline double softplus_inv(double y) {
	if (y > 30.0) return y;  // softplus(y) == y to double precision
	return std::log(std::expm1(y));
}

}  // namespace volcast
