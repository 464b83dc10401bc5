#pragma once

#include <span>
#include <vector>

#include "volcast/timeseries.hpp"

namespace volcast::eval {

struct ForecastSeries {
	std::vector<Day> anchor_stamps;
	std::vector<Day> target_stamps;
	std::vector<double> sigma_hat_sq;
	int horizon = 1;
	std::size_t size() const { return sigma_hat_sq.size(); }
};

struct MetricReport {
	double mae = 0.0;
	double mse = 0.0;
	std::size_t n = 0;
	bool sigma_scale = true;  // metrics on sigma by default, variance otherwise
};

// MAE/MSE over aligned pairs; inputs are variances, compared on the sigma
// scale unless on_sigma is false.
MetricReport evaluate_values(std::span<const double> sigma_hat_sq,
                             std::span<const double> sigma_sq_truth, bool on_sigma = true);

// Aligns forecasts to the truth series by target date; unmatched dates are
// dropped, an empty alignment is an error.
MetricReport evaluate(const ForecastSeries& forecasts, const VolSeries& truth,
                      bool on_sigma = true);

struct VarLimits {
	std::vector<double> upper;
	std::vector<double> lower;
	double multiplier = 1.65;
};

VarLimits var_limits(std::span<const double> sigma_hat, double multiplier = 1.65);

struct VarReport {
	double multiplier = 1.65;
	std::size_t n = 0;
	std::size_t upper_count = 0;
	std::size_t lower_count = 0;
	double upper_rate = 0.0;
	double lower_rate = 0.0;
	double total_rate = 0.0;
};

// Counts returns strictly outside the limits.
VarReport var_violations(std::span<const double> returns, const VarLimits& limits);

}  // namespace volcast::eval
