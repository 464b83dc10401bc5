#include "volcast/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace volcast {

namespace {

constexpr double kHugePenalty = 1e12;

}  // namespace

NmResult nelder_mead(const Objective& f, std::span<const double> x0, const NmConfig& cfg) {
	const std::size_t n = x0.size();
	if (n == 0) throw std::invalid_argument("nelder_mead: empty start point");

	NmResult result;
	auto eval = [&](std::span<const double> x) {
		++result.evaluations;
		const double v = f(x);
		return std::isfinite(v) ? v : kHugePenalty;
	};

	std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
	std::vector<double> fv(n + 1);
	for (std::size_t i = 1; i <= n; ++i) {
		simplex[i][i - 1] += cfg.init_step;
	}
	for (std::size_t i = 0; i <= n; ++i) {
		fv[i] = eval(simplex[i]);
	}

	std::vector<std::size_t> order(n + 1);
	std::vector<double> centroid(n), cand(n);

	for (result.iterations = 0; result.iterations < cfg.max_iter; ++result.iterations) {
		std::iota(order.begin(), order.end(), std::size_t{0});
		std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
		const std::size_t best = order[0], worst = order[n], second_worst = order[n - 1];

		if (fv[worst] - fv[best] < cfg.f_tol) {
			result.converged = true;
			break;
		}

		std::fill(centroid.begin(), centroid.end(), 0.0);
		for (std::size_t i = 0; i <= n; ++i) {
			if (i == worst) continue;
			for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
		}
		for (double& c : centroid) c /= double(n);

		auto blend = [&](double coef) {
			for (std::size_t j = 0; j < n; ++j) {
				cand[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
			}
		};

		blend(-1.0);  // reflect
		const double f_refl = eval(cand);
		if (f_refl < fv[best]) {
			std::vector<double> refl = cand;
			blend(-2.0);  // expand
			const double f_exp = eval(cand);
			if (f_exp < f_refl) {
				simplex[worst] = cand;
				fv[worst] = f_exp;
			} else {
				simplex[worst] = std::move(refl);
				fv[worst] = f_refl;
			}
			continue;
		}
		if (f_refl < fv[second_worst]) {
			simplex[worst] = cand;
			fv[worst] = f_refl;
			continue;
		}

		blend(f_refl < fv[worst] ? -0.5 : 0.5);  // outside/inside contraction
		const double f_con = eval(cand);
		if (f_con < std::min(f_refl, fv[worst])) {
			simplex[worst] = cand;
			fv[worst] = f_con;
			continue;
		}

		for (std::size_t i = 0; i <= n; ++i) {  // shrink toward the best vertex
			if (i == best) continue;
			for (std::size_t j = 0; j < n; ++j) {
				simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
			}
			fv[i] = eval(simplex[i]);
		}
	}

	const std::size_t best =
	    std::size_t(std::min_element(fv.begin(), fv.end()) - fv.begin());
	result.x = simplex[best];
	result.fx = fv[best];
	return result;
}

}  // namespace volcast
