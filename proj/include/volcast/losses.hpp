#pragma once

#include <span>
#include <string>

#include "volcast/autodiff.hpp"

namespace volcast {

// Training objective selector. n_loss / t_loss are the negative
// log-likelihood kernels under normal / Student-t innovations with the
// additive constants dropped; mse / mae compare on the sigma scale.
struct LossKind {
	enum class Tag { n_loss, t_loss, mse, mae };
	Tag tag = Tag::n_loss;
	double dof = 5.0;  // t_loss only, must be > 2

	static LossKind n() { return {Tag::n_loss, 0.0}; }
	static LossKind t(double v);  // rejects v <= 2 up front
	static LossKind mse() { return {Tag::mse, 0.0}; }
	static LossKind mae() { return {Tag::mae, 0.0}; }

	std::string name() const;
};

// log(s)/2 + q/(2s), the per-step normal NLL with constants dropped.
double n_loss(double target_sq, double sigma_hat_sq);

// log(s)/2 + (v+1)/2 * log(1 + q/((v-2) s)), Student-t counterpart.
double t_loss(double target_sq, double sigma_hat_sq, double dof);

double point_loss(const LossKind& kind, double target_sq, double sigma_hat_sq);

// Sum of per-step losses over aligned series.
double series_loss(const LossKind& kind, std::span<const double> targets_sq,
                   std::span<const double> sigma_hat_sq);

// Tape versions: the target is data (a constant), sigma_hat_sq is traced.
ad::Var n_loss(double target_sq, ad::Var sigma_hat_sq);
ad::Var t_loss(double target_sq, ad::Var sigma_hat_sq, double dof);
ad::Var point_loss(const LossKind& kind, double target_sq, ad::Var sigma_hat_sq);

}  // namespace volcast
