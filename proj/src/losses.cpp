#include "volcast/losses.hpp"

#include <cmath>
#include <stdexcept>

namespace volcast {

std::string LossKind::name() const {
	switch (tag) {
		case Tag::n_loss: return "n";
		case Tag::t_loss: return "t";
		case Tag::mse: return "mse";
		case Tag::mae: return "mae";
	}
	return "?";
}

namespace {

void check_sigma(double sigma_hat_sq) {
	if (!(sigma_hat_sq > 0.0))
		throw std::domain_error("loss: sigma_hat_sq must be positive");
}

void check_dof(double dof) {
	if (!(dof > 2.0))
		throw std::invalid_argument("t_loss: degrees of freedom must exceed 2");
}

}  // namespace

LossKind LossKind::t(double v) {
	check_dof(v);
	return {Tag::t_loss, v};
}

double n_loss(double target_sq, double sigma_hat_sq) {
	check_sigma(sigma_hat_sq);
	return 0.5 * std::log(sigma_hat_sq) + target_sq / (2.0 * sigma_hat_sq);
}

double t_loss(double target_sq, double sigma_hat_sq, double dof) {
	check_dof(dof);
	check_sigma(sigma_hat_sq);
	return 0.5 * std::log(sigma_hat_sq) +
	       0.5 * (dof + 1.0) * std::log1p(target_sq / ((dof - 2.0) * sigma_hat_sq));
}

double point_loss(const LossKind& kind, double target_sq, double sigma_hat_sq) {
	switch (kind.tag) {
		case LossKind::Tag::n_loss:
			return n_loss(target_sq, sigma_hat_sq);
		case LossKind::Tag::t_loss:
			return t_loss(target_sq, sigma_hat_sq, kind.dof);
		case LossKind::Tag::mse: {
			check_sigma(sigma_hat_sq);
			const double d = std::sqrt(sigma_hat_sq) - std::sqrt(target_sq);
			return d * d;
		}
		case LossKind::Tag::mae: {
			check_sigma(sigma_hat_sq);
			return std::fabs(std::sqrt(sigma_hat_sq) - std::sqrt(target_sq));
		}
	}
	throw std::logic_error("point_loss: unknown kind");
}

double series_loss(const LossKind& kind, std::span<const double> targets_sq,
                   std::span<const double> sigma_hat_sq) {
	if (targets_sq.size() != sigma_hat_sq.size())
		throw std::invalid_argument("series_loss: length mismatch");
	if (targets_sq.empty())
		throw std::invalid_argument("series_loss: empty series");
	double total = 0.0;
	for (std::size_t i = 0; i < targets_sq.size(); ++i)
		total += point_loss(kind, targets_sq[i], sigma_hat_sq[i]);
	return total;
}

ad::Var n_loss(double target_sq, ad::Var sigma_hat_sq) {
	return 0.5 * log(sigma_hat_sq) + target_sq / (2.0 * sigma_hat_sq);
}

ad::Var t_loss(double target_sq, ad::Var sigma_hat_sq, double dof) {
	check_dof(dof);
	return 0.5 * log(sigma_hat_sq) +
	       (0.5 * (dof + 1.0)) * log(1.0 + target_sq / ((dof - 2.0) * sigma_hat_sq));
}

ad::Var point_loss(const LossKind& kind, double target_sq, ad::Var sigma_hat_sq) {
	switch (kind.tag) {
		case LossKind::Tag::n_loss:
			return n_loss(target_sq, sigma_hat_sq);
		case LossKind::Tag::t_loss:
			return t_loss(target_sq, sigma_hat_sq, kind.dof);
		case LossKind::Tag::mse: {
			ad::Var d = sqrt(sigma_hat_sq) - std::sqrt(target_sq);
			return d * d;
		}
		case LossKind::Tag::mae:
			return abs(sqrt(sigma_hat_sq) - std::sqrt(target_sq));
	}
	throw std::logic_error("point_loss: unknown kind");
}

}  // namespace volcast
