#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "volcast/losses.hpp"
#include "volcast/nn.hpp"
#include "volcast/timeseries.hpp"

namespace volcast::train {

struct AdamState {
	std::vector<double> m;
	std::vector<double> v;
	long step = 0;
};

// Standard bias-corrected update, in place. Sizes the moment buffers on
// first use.
void adam_step(std::vector<double>& params, std::span<const double> grads, AdamState& state,
               double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

enum class Regime { full_sequence, minibatch };
enum class TargetKind { realized_var, eps_sq };

struct TrainConfig {
	double lr = 1e-2;
	double beta1 = 0.9;
	double beta2 = 0.999;
	double adam_eps = 1e-8;
	double plateau_factor = 0.5;
	int plateau_patience = 5;     // epochs without val improvement before halving
	int early_stop_patience = 20;
	int max_epochs = 150;
	int batch_size = 64;          // minibatch regime only
	std::uint64_t seed = 0;       // recorded for manifests; the loop itself is deterministic
	LossKind loss = LossKind::n();
	int horizon = 1;
	Regime regime = Regime::full_sequence;
	TargetKind target = TargetKind::realized_var;
};

struct EpochRecord {
	int epoch = 0;
	double train_loss = 0.0;
	double val_loss = 0.0;
	double lr = 0.0;
};

struct TrainHistory {
	std::vector<EpochRecord> epochs;
	int best_epoch = -1;
	double best_val = 0.0;
	std::string stop_reason;
};

// Rolling task over one series: the model consumes eps in time order and
// its outputs at the anchor indices are scored against the targets. The
// series extends only to the last validation anchor, so test shocks are
// never consumed.
struct SeriesTask {
	std::vector<double> eps;
	std::vector<int> train_anchors;
	std::vector<double> train_targets;
	std::vector<int> val_anchors;
	std::vector<double> val_targets;
	double init_var = 1.0;  // state init: mean square of the train region
};

// Task from a supervised split: targets are the records' realized variances
// or, under the eps_sq kind, the squared shock at anchor + horizon.
SeriesTask make_task(const ReturnSeries& returns, const SplitDataset& split, TargetKind target,
                     int horizon);

// One-step likelihood task over a raw series: every index is an anchor and
// the target is the next squared shock; the tail fraction is held out for
// validation.
SeriesTask make_onestep_task(std::span<const double> eps, double val_fraction = 0.1);

// Mean loss of the model's predictions at the task's train or validation
// anchors, rolling from the series start.
double task_loss(const nn::Model& model, const SeriesTask& task, const LossKind& loss,
                 bool validation);

// ADAM loop with plateau halving and early stopping; returns the best
// validation checkpoint. Figarch kernels are projected back into the
// feasible weight region after each update.
std::pair<nn::Model, TrainHistory> train(const nn::Model& start, const SeriesTask& task,
                                         const TrainConfig& cfg);

}  // namespace volcast::train
