#pragma once

#include <optional>
#include <span>
#include <utility>

#include "volcast/garch.hpp"
#include "volcast/losses.hpp"

namespace volcast::garch {

struct FitConfig {
	LossKind loss = LossKind::n();
	int max_iter = 4000;
	double f_tol = 1e-10;
	int polish_rounds = 2;  // extra simplex restarts from the incumbent
	int figarch_truncation = 50;
	bool figarch_scaled_intercept = false;
};

struct FitReport {
	int iterations = 0;
	int evaluations = 0;
	double initial_loss = 0.0;  // mean per-step loss at the start point
	double final_loss = 0.0;
	bool converged = false;
};

// Classical fit: minimizes the mean per-step loss of the filtered variance
// trace (steps 1..n-1, conditioning on the t=0 init) over a smooth
// unconstrained reparameterization of the model parameters. Non-convergence
// is reported in the flag; the best point found is still returned.
std::pair<ModelParams, FitReport> fit_mle(ModelKind kind, std::span<const double> eps,
                                          const FitConfig& cfg = {},
                                          const std::optional<ModelParams>& init = std::nullopt);

}  // namespace volcast::garch
