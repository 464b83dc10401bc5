#include "volcast/eval.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace volcast::eval {

MetricReport evaluate_values(std::span<const double> sigma_hat_sq,
                             std::span<const double> sigma_sq_truth, bool on_sigma) {
	if (sigma_hat_sq.size() != sigma_sq_truth.size()) {
		throw std::invalid_argument("evaluate: forecast/truth length mismatch");
	}
	if (sigma_hat_sq.empty()) {
		throw DataError("evaluate: empty alignment");
	}
	MetricReport report;
	report.n = sigma_hat_sq.size();
	report.sigma_scale = on_sigma;
	for (std::size_t i = 0; i < sigma_hat_sq.size(); ++i) {
		if (!(sigma_hat_sq[i] > 0.0)) {
			throw std::invalid_argument("evaluate: non-positive forecast at index " +
			                            std::to_string(i));
		}
		const double a = on_sigma ? std::sqrt(sigma_hat_sq[i]) : sigma_hat_sq[i];
		const double b = on_sigma ? std::sqrt(sigma_sq_truth[i]) : sigma_sq_truth[i];
		report.mae += std::abs(a - b);
		report.mse += (a - b) * (a - b);
	}
	report.mae /= double(report.n);
	report.mse /= double(report.n);
	return report;
}

MetricReport evaluate(const ForecastSeries& forecasts, const VolSeries& truth, bool on_sigma) {
	if (forecasts.target_stamps.size() != forecasts.sigma_hat_sq.size()) {
		throw std::invalid_argument("evaluate: forecast stamps/values length mismatch");
	}
	std::unordered_map<Day, std::size_t> by_stamp;
	by_stamp.reserve(truth.size());
	for (std::size_t i = 0; i < truth.size(); ++i) {
		by_stamp.emplace(truth.stamps[i], i);
	}
	std::vector<double> hat, ref;
	hat.reserve(forecasts.size());
	ref.reserve(forecasts.size());
	for (std::size_t i = 0; i < forecasts.size(); ++i) {
		const auto it = by_stamp.find(forecasts.target_stamps[i]);
		if (it == by_stamp.end()) continue;
		hat.push_back(forecasts.sigma_hat_sq[i]);
		ref.push_back(truth.sigma_sq[it->second]);
	}
	if (hat.empty()) {
		throw DataError("evaluate: no forecast dates align with the truth series");
	}
	return evaluate_values(hat, ref, on_sigma);
}

VarLimits var_limits(std::span<const double> sigma_hat, double multiplier) {
	VarLimits limits;
	limits.multiplier = multiplier;
	limits.upper.reserve(sigma_hat.size());
	limits.lower.reserve(sigma_hat.size());
	for (double s : sigma_hat) {
		if (!(s >= 0.0)) {
			throw std::invalid_argument("var_limits: negative sigma forecast");
		}
		limits.upper.push_back(multiplier * s);
		limits.lower.push_back(-multiplier * s);
	}
	return limits;
}

VarReport var_violations(std::span<const double> returns, const VarLimits& limits) {
	if (returns.size() != limits.upper.size() || returns.size() != limits.lower.size()) {
		throw std::invalid_argument("var_violations: return/limit length mismatch");
	}
	VarReport report;
	report.multiplier = limits.multiplier;
	report.n = returns.size();
	for (std::size_t i = 0; i < returns.size(); ++i) {
		if (returns[i] > limits.upper[i]) ++report.upper_count;
		if (returns[i] < limits.lower[i]) ++report.lower_count;
	}
	if (report.n > 0) {
		report.upper_rate = double(report.upper_count) / double(report.n);
		report.lower_rate = double(report.lower_count) / double(report.n);
		report.total_rate = report.upper_rate + report.lower_rate;
	}
	return report;
}

}  // namespace volcast::eval
