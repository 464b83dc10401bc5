#include "volcast/garch.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace volcast::garch {

namespace {

void require(bool ok, const std::string& msg) {
	if (!ok) throw std::invalid_argument(msg);
}

bool all_finite(std::initializer_list<double> xs) {
	for (double x : xs) {
		if (!std::isfinite(x)) return false;
	}
	return true;
}

}  // namespace

const char* kind_name(ModelKind kind) {
	switch (kind) {
		case ModelKind::garch11: return "garch11";
		case ModelKind::gjr: return "gjr";
		case ModelKind::figarch: return "figarch";
	}
	throw std::logic_error("unknown model kind");
}

ModelKind parse_kind(const std::string& name) {
	if (name == "garch11") return ModelKind::garch11;
	if (name == "gjr") return ModelKind::gjr;
	if (name == "figarch") return ModelKind::figarch;
	throw std::invalid_argument("unknown model kind '" + name + "'");
}

void Garch11Params::validate() const {
	require(all_finite({omega, alpha, beta}), "garch11: non-finite parameter");
	require(omega > 0.0, "garch11: omega must be > 0");
	require(alpha >= 0.0 && beta >= 0.0, "garch11: alpha and beta must be >= 0");
	require(alpha + beta < 1.0, "garch11: alpha + beta must be < 1");
}

void GjrParams::validate() const {
	require(all_finite({omega, alpha, lambda_asym, beta}), "gjr: non-finite parameter");
	require(omega > 0.0, "gjr: omega must be > 0");
	require(alpha >= 0.0 && lambda_asym >= 0.0 && beta >= 0.0,
	        "gjr: alpha, lambda and beta must be >= 0");
	require(alpha + lambda_asym / 2.0 + beta < 1.0, "gjr: alpha + lambda/2 + beta must be < 1");
}

void FigarchParams::validate() const {
	require(all_finite({omega, beta, phi, d}), "figarch: non-finite parameter");
	require(omega > 0.0, "figarch: omega must be > 0");
	require(beta >= 0.0 && beta < 1.0, "figarch: beta must be in [0,1)");
	require(phi >= 0.0 && phi < 1.0, "figarch: phi must be in [0,1)");
	require(d > 0.0 && d < 1.0, "figarch: d must be in (0,1)");
	require(truncation >= 2, "figarch: truncation must be >= 2");
}

double FigarchParams::intercept() const {
	return scaled_intercept ? omega / (1.0 - beta) : omega;
}

ModelKind kind_of(const ModelParams& params) {
	if (std::holds_alternative<Garch11Params>(params)) return ModelKind::garch11;
	if (std::holds_alternative<GjrParams>(params)) return ModelKind::gjr;
	return ModelKind::figarch;
}

void validate(const ModelParams& params) {
	std::visit([](const auto& p) { p.validate(); }, params);
}

double garch11_step(const Garch11Params& p, double eps_prev_sq, double sigma_prev_sq) {
	return p.omega + p.alpha * eps_prev_sq + p.beta * sigma_prev_sq;
}

double gjr_step(const GjrParams& p, double eps_prev, double sigma_prev_sq) {
	const double eps_sq = eps_prev * eps_prev;
	const double asym = eps_prev < 0.0 ? p.lambda_asym * eps_sq : 0.0;
	return p.omega + p.alpha * eps_sq + asym + p.beta * sigma_prev_sq;
}

std::vector<double> fractional_diff_coeffs(double d, int count) {
	require(count >= 1, "fractional_diff_coeffs: count must be >= 1");
	std::vector<double> pi(static_cast<std::size_t>(count));
	pi[0] = 1.0;
	for (int j = 1; j < count; ++j) {
		pi[std::size_t(j)] = pi[std::size_t(j - 1)] * (double(j) - 1.0 - d) / double(j);
	}
	return pi;
}

std::vector<double> figarch_weights(double beta, double phi, double d, int T) {
	require(T >= 2, "figarch_weights: T must be >= 2");
	const auto pi = fractional_diff_coeffs(d, T);
	// c = (1 - phi B) * (1 - B)^d, then a = c / (1 - beta B) term by term.
	std::vector<double> a(static_cast<std::size_t>(T));
	a[0] = pi[0];
	for (int j = 1; j < T; ++j) {
		const double c_j = pi[std::size_t(j)] - phi * pi[std::size_t(j - 1)];
		a[std::size_t(j)] = c_j + beta * a[std::size_t(j - 1)];
	}
	std::vector<double> lambda(static_cast<std::size_t>(T));
	lambda[0] = 0.0;
	for (int j = 1; j < T; ++j) {
		lambda[std::size_t(j)] = -a[std::size_t(j)];
		if (lambda[std::size_t(j)] < 0.0) {
			throw std::invalid_argument("figarch_weights: lambda_" + std::to_string(j) +
			                            " negative for (beta=" + std::to_string(beta) +
			                            ", phi=" + std::to_string(phi) + ", d=" + std::to_string(d) +
			                            ")");
		}
	}
	return lambda;
}

double figarch_step(const FigarchParams& p, std::span<const double> eps_sq_window,
                    std::span<const double> lambda) {
	const std::size_t T = std::size_t(p.truncation);
	require(eps_sq_window.size() == T, "figarch_step: window length must equal truncation");
	require(lambda.size() == T, "figarch_step: weight length must equal truncation");
	double acc = p.intercept();
	for (std::size_t j = 1; j < T; ++j) {
		acc += lambda[j] * eps_sq_window[T - 1 - j];
	}
	return acc;
}

double sample_variance(std::span<const double> eps) {
	require(!eps.empty(), "sample_variance: empty series");
	double sum_sq = 0.0;
	for (double e : eps) sum_sq += e * e;
	// Zero-mean convention throughout, so the variance is the mean square.
	return sum_sq / double(eps.size());
}

namespace {

double init_value(const VarianceInit& init, std::span<const double> eps) {
	if (init.mode == VarianceInit::Mode::fixed) {
		require(init.value > 0.0, "filter_series: fixed init must be > 0");
		return init.value;
	}
	const double v = sample_variance(eps);
	require(v > 0.0, "filter_series: series has zero sample variance; pass a fixed init");
	return v;
}

void check_finite(double sigma_sq, std::size_t t) {
	if (!std::isfinite(sigma_sq) || sigma_sq <= 0.0) {
		throw NumericalError("filter_series: non-finite or non-positive variance at index " +
		                     std::to_string(t));
	}
}

std::vector<double> filter_figarch(const FigarchParams& p, std::span<const double> eps) {
	const auto lambda = figarch_weights(p.beta, p.phi, p.d, p.truncation);
	std::vector<double> trace(eps.size());
	std::vector<double> window(std::size_t(p.truncation), 0.0);
	for (std::size_t t = 0; t < eps.size(); ++t) {
		std::rotate(window.begin(), window.begin() + 1, window.end());
		window.back() = eps[t] * eps[t];
		trace[t] = figarch_step(p, window, lambda);
		check_finite(trace[t], t);
	}
	return trace;
}

}  // namespace

std::vector<double> filter_series(const ModelParams& params, std::span<const double> eps,
                                  VarianceInit init) {
	require(!eps.empty(), "filter_series: empty series");
	validate(params);
	if (const auto* fp = std::get_if<FigarchParams>(&params)) {
		return filter_figarch(*fp, eps);
	}
	std::vector<double> trace(eps.size());
	trace[0] = init_value(init, eps);
	if (const auto* gp = std::get_if<Garch11Params>(&params)) {
		for (std::size_t t = 1; t < eps.size(); ++t) {
			trace[t] = garch11_step(*gp, eps[t - 1] * eps[t - 1], trace[t - 1]);
			check_finite(trace[t], t);
		}
	} else {
		const auto& jp = std::get<GjrParams>(params);
		for (std::size_t t = 1; t < eps.size(); ++t) {
			trace[t] = gjr_step(jp, eps[t - 1], trace[t - 1]);
			check_finite(trace[t], t);
		}
	}
	return trace;
}

double unconditional_variance(const ModelParams& params) {
	validate(params);
	if (const auto* gp = std::get_if<Garch11Params>(&params)) {
		return gp->omega / (1.0 - gp->alpha - gp->beta);
	}
	if (const auto* jp = std::get_if<GjrParams>(&params)) {
		return jp->omega / (1.0 - jp->alpha - jp->lambda_asym / 2.0 - jp->beta);
	}
	throw std::invalid_argument("unconditional_variance: undefined for figarch");
}

SimResult simulate(const ModelParams& params, std::size_t n, std::uint64_t seed,
                   Innovations innov) {
	require(n >= 1, "simulate: n must be >= 1");
	validate(params);
	if (innov.dist == Innovations::Dist::student_t) {
		require(innov.dof > 2.0, "simulate: student-t dof must be > 2");
	}

	std::mt19937_64 rng(seed);
	std::normal_distribution<double> normal(0.0, 1.0);
	std::student_t_distribution<double> student(innov.dof);
	const double t_scale =
	    innov.dist == Innovations::Dist::student_t ? std::sqrt((innov.dof - 2.0) / innov.dof) : 1.0;
	auto draw = [&]() {
		return innov.dist == Innovations::Dist::normal ? normal(rng) : t_scale * student(rng);
	};

	SimResult out;
	out.eps.resize(n);
	out.sigma_sq.resize(n);

	if (const auto* fp = std::get_if<FigarchParams>(&params)) {
		const auto lambda = figarch_weights(fp->beta, fp->phi, fp->d, fp->truncation);
		std::vector<double> window(std::size_t(fp->truncation), 0.0);
		for (std::size_t t = 0; t < n; ++t) {
			// The newest slot carries lambda_0 = 0, so the current shock can
			// be filled in after the variance is known.
			std::rotate(window.begin(), window.begin() + 1, window.end());
			window.back() = 0.0;
			const double s = figarch_step(*fp, window, lambda);
			check_finite(s, t);
			out.sigma_sq[t] = s;
			out.eps[t] = draw() * std::sqrt(s);
			window.back() = out.eps[t] * out.eps[t];
		}
		return out;
	}

	double sigma_sq = unconditional_variance(params);
	for (std::size_t t = 0; t < n; ++t) {
		if (t > 0) {
			if (const auto* gp = std::get_if<Garch11Params>(&params)) {
				sigma_sq = garch11_step(*gp, out.eps[t - 1] * out.eps[t - 1], sigma_sq);
			} else {
				sigma_sq = gjr_step(std::get<GjrParams>(params), out.eps[t - 1], sigma_sq);
			}
		}
		check_finite(sigma_sq, t);
		out.sigma_sq[t] = sigma_sq;
		out.eps[t] = draw() * std::sqrt(sigma_sq);
	}
	return out;
}

std::vector<double> forecast_iterated(const ModelParams& params, std::span<const double> eps,
                                      double sigma_sq_anchor, int h) {
	require(h >= 1, "forecast_iterated: horizon must be >= 1");
	require(!eps.empty(), "forecast_iterated: empty history");
	validate(params);
	std::vector<double> fc(static_cast<std::size_t>(h));

	if (const auto* gp = std::get_if<Garch11Params>(&params)) {
		fc[0] = garch11_step(*gp, eps.back() * eps.back(), sigma_sq_anchor);
		for (int i = 1; i < h; ++i) {
			// E[eps^2_{t+i}] = sigma_sq_{t+i} collapses the step to
			// omega + (alpha + beta) * previous forecast.
			fc[std::size_t(i)] = gp->omega + (gp->alpha + gp->beta) * fc[std::size_t(i - 1)];
		}
		return fc;
	}
	if (const auto* jp = std::get_if<GjrParams>(&params)) {
		fc[0] = gjr_step(*jp, eps.back(), sigma_sq_anchor);
		// Symmetric innovations put half the shock mass below zero, so the
		// asymmetry term contributes lambda/2 in expectation.
		const double persist = jp->alpha + jp->lambda_asym / 2.0 + jp->beta;
		for (int i = 1; i < h; ++i) {
			fc[std::size_t(i)] = jp->omega + persist * fc[std::size_t(i - 1)];
		}
		return fc;
	}

	const auto& fp = std::get<FigarchParams>(params);
	const auto lambda = figarch_weights(fp.beta, fp.phi, fp.d, fp.truncation);
	// Extended squared-shock path: observed history, then forecasts standing
	// in for future eps^2.
	std::vector<double> ext;
	ext.reserve(eps.size() + std::size_t(h));
	for (double e : eps) ext.push_back(e * e);
	const std::size_t anchor = eps.size() - 1;
	for (int i = 0; i < h; ++i) {
		const std::size_t s = anchor + 1 + std::size_t(i);
		double acc = fp.intercept();
		for (int j = 1; j < fp.truncation; ++j) {
			if (std::size_t(j) > s) break;
			acc += lambda[std::size_t(j)] * ext[s - std::size_t(j)];
		}
		fc[std::size_t(i)] = acc;
		ext.push_back(acc);
	}
	return fc;
}

double forecast_realized(const ModelParams& params, std::span<const double> eps,
                         double sigma_sq_anchor, int h, int k) {
	require(k >= 1, "forecast_realized: window must be >= 1");
	const auto fc = forecast_iterated(params, eps, sigma_sq_anchor, h);
	const std::ptrdiff_t anchor = std::ptrdiff_t(eps.size()) - 1;
	double acc = 0.0;
	// Realized variance at t+h sums eps^2 over (t+h-k, t+h]; days at or
	// before the anchor are observed, later days take their forecasts.
	for (int i = 0; i < k; ++i) {
		const std::ptrdiff_t day = anchor + h - i;
		if (day > anchor) {
			acc += fc[std::size_t(day - anchor - 1)];
		} else if (day >= 0) {
			acc += eps[std::size_t(day)] * eps[std::size_t(day)];
		}
	}
	return acc;
}

}  // namespace volcast::garch
