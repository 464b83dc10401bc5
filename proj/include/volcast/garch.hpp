#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "volcast/errors.hpp"

namespace volcast::garch {

enum class ModelKind { garch11, gjr, figarch };

const char* kind_name(ModelKind kind);
ModelKind parse_kind(const std::string& name);

struct Garch11Params {
	double omega = 0.0;
	double alpha = 0.0;
	double beta = 0.0;
	// Throws std::invalid_argument unless omega > 0, alpha,beta >= 0,
	// alpha + beta < 1.
	void validate() const;
};

struct GjrParams {
	double omega = 0.0;
	double alpha = 0.0;
	double lambda_asym = 0.0;
	double beta = 0.0;
	// Stationarity under symmetric shocks: alpha + lambda/2 + beta < 1.
	void validate() const;
};

struct FigarchParams {
	double omega = 0.0;
	double beta = 0.0;
	double phi = 0.0;
	double d = 0.0;
	int truncation = 50;
	// The additive constant is omega itself by default; the switch selects
	// the omega/(1-beta) convention instead.
	bool scaled_intercept = false;
	// Box constraints only; weight non-negativity is checked where the
	// weights are expanded.
	void validate() const;
	double intercept() const;
};

using ModelParams = std::variant<Garch11Params, GjrParams, FigarchParams>;

ModelKind kind_of(const ModelParams& params);
void validate(const ModelParams& params);

// sigma_sq_t = omega + alpha * eps_prev^2 + beta * sigma_sq_prev
double garch11_step(const Garch11Params& p, double eps_prev_sq, double sigma_prev_sq);

// Adds lambda * eps_prev^2 when the previous shock is strictly negative.
double gjr_step(const GjrParams& p, double eps_prev, double sigma_prev_sq);

// First `count` coefficients of (1-B)^d: pi_0 = 1, pi_j = pi_{j-1}*(j-1-d)/j.
std::vector<double> fractional_diff_coeffs(double d, int count);

// First T coefficients of 1 - (1-beta B)^{-1} (1-phi B) (1-B)^d, with
// lambda_0 = 0. Throws std::invalid_argument if any lambda_j < 0 for j >= 1.
std::vector<double> figarch_weights(double beta, double phi, double d, int T);

// sigma_sq_t = intercept + sum_j lambda_j * window[T-1-j]. The window is
// ordered oldest to newest, so its last slot holds the current shock and is
// annihilated by lambda_0 = 0.
double figarch_step(const FigarchParams& p, std::span<const double> eps_sq_window,
                    std::span<const double> lambda);

struct VarianceInit {
	enum class Mode { sample, fixed };
	Mode mode = Mode::sample;
	double value = 0.0;
	static VarianceInit sample() { return {}; }
	static VarianceInit fixed(double v) { return {Mode::fixed, v}; }
};

// Conditional-variance trace aligned to eps: trace[0] is the init value
// (mean of squares by default) and trace[t] advances on eps[t-1]. FIGARCH
// ignores the init and zero-pads its window, so trace[0] is the intercept.
// Throws NumericalError (with the index) on a non-finite intermediate.
std::vector<double> filter_series(const ModelParams& params, std::span<const double> eps,
                                  VarianceInit init = {});

double sample_variance(std::span<const double> eps);

// omega / (1 - persistence); GARCH(1,1) and GJR only.
double unconditional_variance(const ModelParams& params);

struct Innovations {
	enum class Dist { normal, student_t };
	Dist dist = Dist::normal;
	double dof = 5.0;
	static Innovations normal() { return {}; }
	static Innovations student_t(double v) { return {Dist::student_t, v}; }
};

struct SimResult {
	std::vector<double> eps;
	std::vector<double> sigma_sq;
};

// Draws unit-variance innovations z_t (Student-t rescaled by sqrt((v-2)/v))
// and runs eps_t = z_t * sigma_t forward. GARCH(1,1)/GJR start at the
// unconditional variance; FIGARCH starts from a zero-padded window.
SimResult simulate(const ModelParams& params, std::size_t n, std::uint64_t seed,
                   Innovations innov = {});

// Iterated forecasts [sigma_sq_{t+1} .. sigma_sq_{t+h}] from anchor t, with
// future squared shocks replaced by their conditional expectations. eps is
// the observed series through the anchor; sigma_sq_anchor is the filtered
// variance at the anchor.
std::vector<double> forecast_iterated(const ModelParams& params, std::span<const double> eps,
                                      double sigma_sq_anchor, int h);

// Forecast of the k-day realized variance ending at t+h: sums observed
// eps^2 for days at or before the anchor and iterated forecasts beyond it.
double forecast_realized(const ModelParams& params, std::span<const double> eps,
                         double sigma_sq_anchor, int h, int k);

}  // namespace volcast::garch
