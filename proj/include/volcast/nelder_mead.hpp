#pragma once

#include <functional>
#include <span>
#include <vector>

namespace volcast {

struct NmConfig {
	int max_iter = 4000;
	double f_tol = 1e-10;     // converged when the simplex f-spread falls below this
	double init_step = 0.25;  // per-coordinate displacement of the initial simplex
};

struct NmResult {
	std::vector<double> x;
	double fx = 0.0;
	int iterations = 0;
	int evaluations = 0;
	bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

// Downhill simplex with standard reflection/expansion/contraction/shrink
// coefficients (1, 2, 0.5, 0.5). The objective may return a large finite
// penalty for infeasible points; non-finite values are treated the same way.
NmResult nelder_mead(const Objective& f, std::span<const double> x0, const NmConfig& cfg = {});

}  // namespace volcast
