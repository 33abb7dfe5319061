#pragma once

#include <map>
#include <string>

#include "attrpref/errors.hpp"
#include "attrpref/tensor.hpp"

namespace attrpref {

// Named parameter tensors with deterministic (sorted) iteration order.
class ParamSet {
public:
    TensorValue& emplace(const std::string& name, TensorValue value) {
        auto [it, inserted] = params_.emplace(name, std::move(value));
        if (!inserted) {
            throw UsageError("ParamSet: duplicate parameter '" + name + "'");
        }
        return it->second;
    }

    TensorValue& at(const std::string& name) {
        auto it = params_.find(name);
        if (it == params_.end()) {
            throw UsageError("ParamSet: unknown parameter '" + name + "'");
        }
        return it->second;
    }

    const TensorValue& at(const std::string& name) const {
        auto it = params_.find(name);
        if (it == params_.end()) {
            throw UsageError("ParamSet: unknown parameter '" + name + "'");
        }
        return it->second;
    }

    bool contains(const std::string& name) const { return params_.count(name) != 0; }

    void zero_grads() {
        for (auto& [name, p] : params_) p.zero_grad();
    }

    std::size_t size() const { return params_.size(); }
    std::size_t total_elements() const {
        std::size_t n = 0;
        for (const auto& [name, p] : params_) n += p.size();
        return n;
    }

    auto begin() { return params_.begin(); }
    auto end() { return params_.end(); }
    auto begin() const { return params_.begin(); }
    auto end() const { return params_.end(); }

private:
    std::map<std::string, TensorValue> params_;
};

}  // namespace attrpref
