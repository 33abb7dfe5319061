#include "attrpref/optimizer.hpp"

#include <cmath>

namespace attrpref {

void OptimizerConfig::validate() const {
    if (learning_rate <= 0.0) throw ConfigError("learning_rate must be positive");
    if (weight_decay < 0.0) throw ConfigError("weight_decay must be nonnegative");
    if (batch_size <= 0) throw ConfigError("batch_size must be positive");
    if (total_steps <= 0) throw ConfigError("total_steps must be positive");
    if (resolved_warmup() >= total_steps) {
        throw ConfigError("warmup_steps must be < total_steps");
    }
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0) {
        throw ConfigError("adam betas must lie in [0, 1)");
    }
}

double scheduled_lr(const OptimizerConfig& config, long step) {
    if (step < 0 || step >= config.total_steps) {
        throw ConfigError("step outside [0, total_steps)");
    }
    const long warmup = config.resolved_warmup();
    if (warmup > 0 && step < warmup) {
        return config.learning_rate * static_cast<double>(step) /
               static_cast<double>(warmup);
    }
    const double progress = static_cast<double>(step - warmup) /
                            static_cast<double>(config.total_steps - warmup);
    return config.learning_rate * 0.5 * (1.0 + std::cos(3.14159265358979323846 * progress));
}

void DropoutSchedule::validate() const {
    if (cap <= 0.0 || cap > 1.0) throw ConfigError("dropout cap must lie in (0, 1]");
    if (ramp_fraction <= 0.0 || ramp_fraction > 1.0) {
        throw ConfigError("dropout ramp_fraction must lie in (0, 1]");
    }
    if (total_steps <= 0) throw ConfigError("dropout schedule needs total_steps > 0");
}

double dropout_probability(const DropoutSchedule& sched, long step) {
    sched.validate();
    if (step < 0 || step > sched.total_steps) {
        throw ConfigError("dropout_probability: step outside [0, total_steps]");
    }
    const double ramp = static_cast<double>(step) /
                        (sched.ramp_fraction * static_cast<double>(sched.total_steps));
    return std::min(sched.cap, ramp);
}

void AdamW::step(ParamSet& params, long step) {
    const double lr = scheduled_lr(config_, step);
    const double t = static_cast<double>(step + 1);
    const double bc1 = 1.0 - std::pow(config_.beta1, t);
    const double bc2 = 1.0 - std::pow(config_.beta2, t);

    for (auto& [name, p] : params) {
        if (!p.has_grad()) continue;
        const std::vector<double>& g = p.grad();
        for (double gv : g) {
            if (!std::isfinite(gv)) {
                throw NumericError("non-finite gradient for parameter '" + name + "'");
            }
        }
        Moments& mom = state_[name];
        if (mom.m.empty()) {
            mom.m.assign(p.size(), 0.0);
            mom.v.assign(p.size(), 0.0);
        }
        double* x = p.data();
        for (std::size_t i = 0; i < p.size(); ++i) {
            mom.m[i] = config_.beta1 * mom.m[i] + (1.0 - config_.beta1) * g[i];
            mom.v[i] = config_.beta2 * mom.v[i] + (1.0 - config_.beta2) * g[i] * g[i];
            const double mhat = mom.m[i] / bc1;
            const double vhat = mom.v[i] / bc2;
            x[i] -= lr * (mhat / (std::sqrt(vhat) + config_.epsilon) +
                          config_.weight_decay * x[i]);
        }
    }
}

}  // namespace attrpref
