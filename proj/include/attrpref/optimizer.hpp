#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "attrpref/errors.hpp"
#include "attrpref/params.hpp"

namespace attrpref {

// Training hyperparameters. Defaults are the full-scale recipe; desk-scale
// manifests override them (and are validated to total_steps <= 20000).
struct OptimizerConfig {
    double learning_rate = 1e-5;
    double weight_decay = 0.01;
    long batch_size = 128;
    long total_steps = 100000;
    long warmup_steps = -1;  // -1: resolved to round(0.03 * total_steps)
    std::uint64_t seed = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    long resolved_warmup() const {
        if (warmup_steps >= 0) return warmup_steps;
        return static_cast<long>(0.03 * static_cast<double>(total_steps) + 0.5);
    }

    void validate() const;
};

// Linear warmup then cosine decay to zero over the remaining steps.
double scheduled_lr(const OptimizerConfig& config, long step);

// Attribute-branch masking schedule: p(t) = min(cap, t / (ramp_fraction * T)).
struct DropoutSchedule {
    double cap = 0.8;
    double ramp_fraction = 0.75;
    long total_steps = 0;

    void validate() const;
};

double dropout_probability(const DropoutSchedule& sched, long step);

// Decoupled-weight-decay Adam with the warmup+cosine schedule baked in.
// step() is deterministic given (params, grads, step index).
class AdamW {
public:
    explicit AdamW(OptimizerConfig config) : config_(std::move(config)) {
        config_.validate();
    }

    const OptimizerConfig& config() const { return config_; }

    // Applies one update using the gradients stored in params. `step` is the
    // 0-based global step, used for both the schedule and bias correction.
    void step(ParamSet& params, long step);

private:
    struct Moments {
        std::vector<double> m;
        std::vector<double> v;
    };

    OptimizerConfig config_;
    std::map<std::string, Moments> state_;
};

}  // namespace attrpref
