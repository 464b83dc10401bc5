#include "volcast/mle.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "volcast/errors.hpp"
#include "volcast/math_util.hpp"
#include "volcast/nelder_mead.hpp"

namespace volcast::garch {

namespace {

constexpr double kHugePenalty = 1e12;

double safe_logit(double p) {
	return logit(std::clamp(p, 1e-9, 1.0 - 1e-9));
}

// Raw layouts keep every simplex point feasible:
//   garch11: [log omega, logit(alpha+beta), logit(beta/(alpha+beta))]
//   gjr:     [log omega, logit(u), logit(beta/u), logit(asym share)]
//            with u = alpha + lambda/2 + beta
//   figarch: [log omega, logit(beta), logit(phi), logit(d)]
// (figarch weight non-negativity is handled by penalty, not encoding).
std::vector<double> encode(const ModelParams& params) {
	if (const auto* gp = std::get_if<Garch11Params>(&params)) {
		const double u = gp->alpha + gp->beta;
		const double v = u > 0.0 ? gp->beta / u : 0.5;
		return {std::log(gp->omega), safe_logit(u), safe_logit(v)};
	}
	if (const auto* jp = std::get_if<GjrParams>(&params)) {
		const double u = jp->alpha + jp->lambda_asym / 2.0 + jp->beta;
		const double v = u > 0.0 ? jp->beta / u : 0.5;
		const double rest = u * (1.0 - v);
		const double w = rest > 0.0 ? (jp->lambda_asym / 2.0) / rest : 0.5;
		return {std::log(jp->omega), safe_logit(u), safe_logit(v), safe_logit(w)};
	}
	const auto& fp = std::get<FigarchParams>(params);
	return {std::log(fp.omega), safe_logit(fp.beta), safe_logit(fp.phi), safe_logit(fp.d)};
}

ModelParams decode(ModelKind kind, std::span<const double> raw, const FitConfig& cfg) {
	switch (kind) {
		case ModelKind::garch11: {
			const double u = sigmoid(raw[1]), v = sigmoid(raw[2]);
			return Garch11Params{std::exp(raw[0]), u * (1.0 - v), u * v};
		}
		case ModelKind::gjr: {
			const double u = sigmoid(raw[1]), v = sigmoid(raw[2]), w = sigmoid(raw[3]);
			const double beta = u * v;
			const double lambda = 2.0 * u * (1.0 - v) * w;
			const double alpha = u * (1.0 - v) * (1.0 - w);
			return GjrParams{std::exp(raw[0]), alpha, lambda, beta};
		}
		case ModelKind::figarch: {
			FigarchParams fp;
			fp.omega = std::exp(raw[0]);
			fp.beta = sigmoid(raw[1]);
			fp.phi = sigmoid(raw[2]);
			fp.d = sigmoid(raw[3]);
			fp.truncation = cfg.figarch_truncation;
			fp.scaled_intercept = cfg.figarch_scaled_intercept;
			return fp;
		}
	}
	throw std::logic_error("unknown model kind");
}

ModelParams default_init(ModelKind kind, double var, const FitConfig& cfg) {
	switch (kind) {
		case ModelKind::garch11:
			return Garch11Params{var * 0.10, 0.05, 0.85};
		case ModelKind::gjr:
			return GjrParams{var * 0.10, 0.03, 0.04, 0.85};
		case ModelKind::figarch: {
			FigarchParams fp;
			fp.omega = var * 0.10;
			fp.beta = 0.3;
			fp.phi = 0.2;
			fp.d = 0.4;
			fp.truncation = cfg.figarch_truncation;
			fp.scaled_intercept = cfg.figarch_scaled_intercept;
			return fp;
		}
	}
	throw std::logic_error("unknown model kind");
}

}  // namespace

std::pair<ModelParams, FitReport> fit_mle(ModelKind kind, std::span<const double> eps,
                                          const FitConfig& cfg,
                                          const std::optional<ModelParams>& init) {
	if (eps.size() < 30) {
		throw DataError("fit_mle: need at least 30 observations, got " +
		                std::to_string(eps.size()));
	}

	auto objective = [&](std::span<const double> raw) -> double {
		ModelParams p = decode(kind, raw, cfg);
		std::vector<double> trace;
		try {
			trace = filter_series(p, eps);
		} catch (const std::invalid_argument&) {
			return kHugePenalty;  // infeasible figarch weights
		} catch (const NumericalError&) {
			return kHugePenalty;
		}
		double acc = 0.0;
		for (std::size_t t = 1; t < eps.size(); ++t) {
			acc += point_loss(cfg.loss, eps[t] * eps[t], trace[t]);
		}
		return acc / double(eps.size() - 1);
	};

	ModelParams start = init ? *init : default_init(kind, sample_variance(eps), cfg);
	if (init && kind_of(*init) != kind) {
		throw std::invalid_argument("fit_mle: init parameter kind does not match model kind");
	}
	validate(start);

	std::vector<double> raw = encode(start);
	FitReport report;
	report.initial_loss = objective(raw);

	NmConfig nm;
	nm.max_iter = cfg.max_iter;
	nm.f_tol = cfg.f_tol;
	NmResult best;
	for (int round = 0; round <= cfg.polish_rounds; ++round) {
		nm.init_step = round == 0 ? 0.25 : 0.05;
		NmResult r = nelder_mead(objective, raw, nm);
		report.iterations += r.iterations;
		report.evaluations += r.evaluations;
		const bool improved = round == 0 || r.fx < best.fx;
		if (improved) best = r;
		raw = best.x;
		if (r.converged && !improved) break;
	}
	report.converged = best.converged;
	report.final_loss = std::min(best.fx, report.initial_loss);

	// The simplex never accepts a worse point, but guard against a start
	// already below everything the search visited.
	ModelParams fitted =
	    best.fx <= report.initial_loss ? decode(kind, best.x, cfg) : start;
	validate(fitted);
	return {fitted, report};
}

}  // namespace volcast::garch
