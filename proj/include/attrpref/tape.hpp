#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "attrpref/errors.hpp"
#include "attrpref/tensor.hpp"

namespace attrpref {

// Handle into a Tape. Only valid for the tape that produced it.
struct Var {
    std::uint32_t idx = 0;
};

// Reverse-mode tape, rebuilt per batch. Leaves alias external parameter
// tensors, so backward() accumulates straight into TensorValue::grad of the
// parameter set; everything else is owned by the tape and freed with it.
class Tape {
public:
    Tape() { nodes_.reserve(256); }

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    // Parameter leaf: gradient accumulates into param.grad().
    Var leaf(TensorValue& param) {
        Node n;
        n.op = Op::kLeaf;
        n.leaf = &param;
        return push(std::move(n));
    }

    // Non-differentiable input (e.g. frozen attribute hidden states).
    Var constant(TensorValue value) {
        Node n;
        n.op = Op::kConst;
        n.value = std::move(value);
        return push(std::move(n));
    }

    Var constant_scalar(double v) { return constant(TensorValue::scalar(v)); }

    // y = W x for W[m,k], x[k].
    Var matvec(Var w, Var x) {
        const TensorValue& W = val(w);
        const TensorValue& X = val(x);
        if (W.rank() != 2 || X.rank() != 1 || W.dim(1) != X.dim(0)) {
            throw DimensionError("matvec: shapes do not conform");
        }
        const std::size_t m = W.dim(0), k = W.dim(1);
        TensorValue out({m});
        for (std::size_t i = 0; i < m; ++i) {
            const double* row = W.data() + i * k;
            double acc = 0.0;
            for (std::size_t j = 0; j < k; ++j) acc += row[j] * X[j];
            out[i] = acc;
        }
        out.check_finite("matvec output");
        Node n;
        n.op = Op::kMatVec;
        n.value = std::move(out);
        n.a = w.idx;
        n.b = x.idx;
        return push(std::move(n));
    }

    // y = E phi for E[d,B] and a sparse phi. phi must outlive the tape pass.
    Var sparse_matvec(Var e, const SparseVec& phi) {
        const TensorValue& E = val(e);
        if (E.rank() != 2) throw DimensionError("sparse_matvec: matrix rank != 2");
        const std::size_t d = E.dim(0), buckets = E.dim(1);
        TensorValue out({d});
        for (const auto& [j, wgt] : phi.entries) {
            if (j >= buckets) {
                throw DimensionError("sparse_matvec: feature bucket out of range");
            }
            for (std::size_t i = 0; i < d; ++i) out[i] += E.data()[i * buckets + j] * wgt;
        }
        out.check_finite("sparse_matvec output");
        Node n;
        n.op = Op::kSparseMatVec;
        n.value = std::move(out);
        n.a = e.idx;
        n.sparse = &phi;
        return push(std::move(n));
    }

    Var add(Var a, Var b) {
        const TensorValue& A = val(a);
        const TensorValue& B = val(b);
        if (A.shape() != B.shape()) throw DimensionError("add: shape mismatch");
        TensorValue out(A.shape());
        for (std::size_t i = 0; i < A.size(); ++i) out[i] = A[i] + B[i];
        Node n;
        n.op = Op::kAdd;
        n.value = std::move(out);
        n.a = a.idx;
        n.b = b.idx;
        return push(std::move(n));
    }

    Var sub(Var a, Var b) {
        const TensorValue& A = val(a);
        const TensorValue& B = val(b);
        if (A.shape() != B.shape()) throw DimensionError("sub: shape mismatch");
        TensorValue out(A.shape());
        for (std::size_t i = 0; i < A.size(); ++i) out[i] = A[i] - B[i];
        Node n;
        n.op = Op::kSub;
        n.value = std::move(out);
        n.a = a.idx;
        n.b = b.idx;
        return push(std::move(n));
    }

    Var neg(Var a) {
        const TensorValue& A = val(a);
        TensorValue out(A.shape());
        for (std::size_t i = 0; i < A.size(); ++i) out[i] = -A[i];
        Node n;
        n.op = Op::kNeg;
        n.value = std::move(out);
        n.a = a.idx;
        return push(std::move(n));
    }

    Var tanh(Var a) {
        const TensorValue& A = val(a);
        TensorValue out(A.shape());
        for (std::size_t i = 0; i < A.size(); ++i) out[i] = std::tanh(A[i]);
        out.check_finite("tanh output");
        Node n;
        n.op = Op::kTanh;
        n.value = std::move(out);
        n.a = a.idx;
        return push(std::move(n));
    }

    Var dot(Var a, Var b) {
        const TensorValue& A = val(a);
        const TensorValue& B = val(b);
        if (A.size() != B.size()) throw DimensionError("dot: length mismatch");
        double acc = 0.0;
        for (std::size_t i = 0; i < A.size(); ++i) acc += A[i] * B[i];
        if (!std::isfinite(acc)) throw NumericError("non-finite value in dot output");
        Node n;
        n.op = Op::kDot;
        n.value = TensorValue::scalar(acc);
        n.a = a.idx;
        n.b = b.idx;
        return push(std::move(n));
    }

    // y = s * x for scalar node s.
    Var scale(Var x, Var s) {
        const TensorValue& X = val(x);
        const double sv = val(s).item();
        TensorValue out(X.shape());
        for (std::size_t i = 0; i < X.size(); ++i) out[i] = sv * X[i];
        Node n;
        n.op = Op::kScale;
        n.value = std::move(out);
        n.a = x.idx;
        n.b = s.idx;
        return push(std::move(n));
    }

    // Max-subtracted softmax; sums to 1 within 1e-12 and tolerates large inputs.
    Var softmax(Var e) {
        const TensorValue& E = val(e);
        if (E.rank() != 1 || E.size() == 0) {
            throw DimensionError("softmax: requires a nonempty vector");
        }
        double mx = E[0];
        for (std::size_t i = 1; i < E.size(); ++i) mx = std::max(mx, E[i]);
        TensorValue out(E.shape());
        double z = 0.0;
        for (std::size_t i = 0; i < E.size(); ++i) {
            out[i] = std::exp(E[i] - mx);
            z += out[i];
        }
        for (std::size_t i = 0; i < E.size(); ++i) out[i] /= z;
        Node n;
        n.op = Op::kSoftmax;
        n.value = std::move(out);
        n.a = e.idx;
        return push(std::move(n));
    }

    // y = sum_i w[i] * vs[i] with w a length-n vector node.
    Var weighted_sum(Var w, std::span<const Var> vs) {
        const TensorValue& W = val(w);
        if (W.rank() != 1 || W.size() != vs.size() || vs.empty()) {
            throw DimensionError("weighted_sum: weight count mismatch");
        }
        const std::size_t d = val(vs[0]).size();
        TensorValue out({d});
        for (std::size_t i = 0; i < vs.size(); ++i) {
            const TensorValue& V = val(vs[i]);
            if (V.size() != d) throw DimensionError("weighted_sum: vector dim mismatch");
            for (std::size_t j = 0; j < d; ++j) out[j] += W[i] * V[j];
        }
        Node n;
        n.op = Op::kWeightedSum;
        n.value = std::move(out);
        n.a = w.idx;
        n.inputs.reserve(vs.size());
        for (Var v : vs) n.inputs.push_back(v.idx);
        return push(std::move(n));
    }

    // log(sigmoid(z)), computed as -softplus(-z).
    Var log_sigmoid(Var z) {
        const double zv = val(z).item();
        Node n;
        n.op = Op::kLogSigmoid;
        n.value = TensorValue::scalar(stable_log_sigmoid(zv));
        n.a = z.idx;
        return push(std::move(n));
    }

    // Packs scalar nodes into one vector node (used for attention scores).
    Var pack(std::span<const Var> scalars) {
        if (scalars.empty()) throw DimensionError("pack: empty input");
        TensorValue out({scalars.size()});
        for (std::size_t i = 0; i < scalars.size(); ++i) out[i] = val(scalars[i]).item();
        Node n;
        n.op = Op::kPack;
        n.value = std::move(out);
        n.inputs.reserve(scalars.size());
        for (Var v : scalars) n.inputs.push_back(v.idx);
        return push(std::move(n));
    }

    Var mean(std::span<const Var> scalars) {
        if (scalars.empty()) throw DimensionError("mean: empty input");
        double acc = 0.0;
        for (Var v : scalars) acc += val(v).item();
        Node n;
        n.op = Op::kMean;
        n.value = TensorValue::scalar(acc / static_cast<double>(scalars.size()));
        n.inputs.reserve(scalars.size());
        for (Var v : scalars) n.inputs.push_back(v.idx);
        return push(std::move(n));
    }

    Var concat(Var a, Var b) {
        const TensorValue& A = val(a);
        const TensorValue& B = val(b);
        std::vector<double> out(A.values());
        out.insert(out.end(), B.values().begin(), B.values().end());
        Node n;
        n.op = Op::kConcat;
        n.value = TensorValue::vector(std::move(out));
        n.a = a.idx;
        n.b = b.idx;
        return push(std::move(n));
    }

    const TensorValue& value(Var v) const { return val(v); }
    double scalar_value(Var v) const { return val(v).item(); }
    std::size_t node_count() const { return nodes_.size(); }

    // Seeds d(root)/d(root) = 1 and sweeps the tape in reverse creation order
    // (creation order is already topological). Leaf gradients land in the
    // aliased parameter tensors.
    void backward(Var root) {
        if (val(root).size() != 1) {
            throw DimensionError("backward: root must be scalar");
        }
        grad_of(root.idx)[0] += 1.0;
        for (std::size_t i = nodes_.size(); i-- > 0;) {
            Node& n = nodes_[i];
            if (grad_view(i) == nullptr) continue;  // nothing flowed here
            backprop(static_cast<std::uint32_t>(i), n);
        }
    }

private:
    enum class Op : std::uint8_t {
        kLeaf,
        kConst,
        kMatVec,
        kSparseMatVec,
        kAdd,
        kSub,
        kNeg,
        kTanh,
        kDot,
        kScale,
        kSoftmax,
        kWeightedSum,
        kLogSigmoid,
        kPack,
        kMean,
        kConcat,
    };

    struct Node {
        TensorValue value;
        std::vector<double> grad;
        Op op = Op::kConst;
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        std::vector<std::uint32_t> inputs;
        const SparseVec* sparse = nullptr;
        TensorValue* leaf = nullptr;
    };

    Var push(Node n) {
        nodes_.push_back(std::move(n));
        return Var{static_cast<std::uint32_t>(nodes_.size() - 1)};
    }

    const TensorValue& val(Var v) const { return val(v.idx); }

    const TensorValue& val(std::uint32_t i) const {
        const Node& n = nodes_[i];
        return n.leaf != nullptr ? *n.leaf : n.value;
    }

    // Gradient buffer for node i; leaves alias their parameter's grad.
    std::vector<double>& grad_of(std::uint32_t i) {
        Node& n = nodes_[i];
        if (n.leaf != nullptr) return n.leaf->grad();
        if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
        return n.grad;
    }

    // Returns nullptr when no gradient has been accumulated yet.
    const std::vector<double>* grad_view(std::size_t i) const {
        const Node& n = nodes_[i];
        if (n.leaf != nullptr) return nullptr;  // leaves have no inputs
        return n.grad.empty() ? nullptr : &n.grad;
    }

    static double stable_log_sigmoid(double z) {
        if (z >= 0.0) return -std::log1p(std::exp(-z));
        return z - std::log1p(std::exp(z));
    }

    void backprop(std::uint32_t i, Node& n) {
        const std::vector<double>& g = n.grad;
        switch (n.op) {
            case Op::kLeaf:
            case Op::kConst:
                break;
            case Op::kMatVec: {
                const TensorValue& W = val(n.a);
                const TensorValue& X = val(n.b);
                const std::size_t m = W.dim(0), k = W.dim(1);
                std::vector<double>& gw = grad_of(n.a);
                std::vector<double>& gx = grad_of(n.b);
                for (std::size_t r = 0; r < m; ++r) {
                    const double gi = g[r];
                    if (gi == 0.0) continue;
                    const double* row = W.data() + r * k;
                    double* gwrow = gw.data() + r * k;
                    for (std::size_t c = 0; c < k; ++c) {
                        gwrow[c] += gi * X[c];
                        gx[c] += gi * row[c];
                    }
                }
                break;
            }
            case Op::kSparseMatVec: {
                const TensorValue& E = val(n.a);
                const std::size_t d = E.dim(0), buckets = E.dim(1);
                std::vector<double>& ge = grad_of(n.a);
                for (const auto& [j, wgt] : n.sparse->entries) {
                    for (std::size_t r = 0; r < d; ++r) {
                        ge[r * buckets + j] += g[r] * wgt;
                    }
                }
                break;
            }
            case Op::kAdd: {
                std::vector<double>& ga = grad_of(n.a);
                std::vector<double>& gb = grad_of(n.b);
                for (std::size_t j = 0; j < g.size(); ++j) {
                    ga[j] += g[j];
                    gb[j] += g[j];
                }
                break;
            }
            case Op::kSub: {
                std::vector<double>& ga = grad_of(n.a);
                std::vector<double>& gb = grad_of(n.b);
                for (std::size_t j = 0; j < g.size(); ++j) {
                    ga[j] += g[j];
                    gb[j] -= g[j];
                }
                break;
            }
            case Op::kNeg: {
                std::vector<double>& ga = grad_of(n.a);
                for (std::size_t j = 0; j < g.size(); ++j) ga[j] -= g[j];
                break;
            }
            case Op::kTanh: {
                std::vector<double>& ga = grad_of(n.a);
                for (std::size_t j = 0; j < g.size(); ++j) {
                    const double y = n.value[j];
                    ga[j] += (1.0 - y * y) * g[j];
                }
                break;
            }
            case Op::kDot: {
                const TensorValue& A = val(n.a);
                const TensorValue& B = val(n.b);
                std::vector<double>& ga = grad_of(n.a);
                std::vector<double>& gb = grad_of(n.b);
                const double gs = g[0];
                for (std::size_t j = 0; j < A.size(); ++j) {
                    ga[j] += gs * B[j];
                    gb[j] += gs * A[j];
                }
                break;
            }
            case Op::kScale: {
                const TensorValue& X = val(n.a);
                const double sv = val(n.b).item();
                std::vector<double>& gx = grad_of(n.a);
                std::vector<double>& gs = grad_of(n.b);
                double acc = 0.0;
                for (std::size_t j = 0; j < g.size(); ++j) {
                    gx[j] += sv * g[j];
                    acc += X[j] * g[j];
                }
                gs[0] += acc;
                break;
            }
            case Op::kSoftmax: {
                std::vector<double>& ga = grad_of(n.a);
                double inner = 0.0;
                for (std::size_t j = 0; j < g.size(); ++j) inner += g[j] * n.value[j];
                for (std::size_t j = 0; j < g.size(); ++j) {
                    ga[j] += n.value[j] * (g[j] - inner);
                }
                break;
            }
            case Op::kWeightedSum: {
                const TensorValue& W = val(n.a);
                std::vector<double>& gw = grad_of(n.a);
                for (std::size_t t = 0; t < n.inputs.size(); ++t) {
                    const TensorValue& V = val(n.inputs[t]);
                    std::vector<double>& gv = grad_of(n.inputs[t]);
                    double acc = 0.0;
                    for (std::size_t j = 0; j < g.size(); ++j) {
                        gv[j] += W[t] * g[j];
                        acc += V[j] * g[j];
                    }
                    gw[t] += acc;
                }
                break;
            }
            case Op::kLogSigmoid: {
                const double zv = val(n.a).item();
                const double sig = 1.0 / (1.0 + std::exp(-zv));
                grad_of(n.a)[0] += (1.0 - sig) * g[0];
                break;
            }
            case Op::kPack: {
                for (std::size_t t = 0; t < n.inputs.size(); ++t) {
                    grad_of(n.inputs[t])[0] += g[t];
                }
                break;
            }
            case Op::kMean: {
                const double share = g[0] / static_cast<double>(n.inputs.size());
                for (std::uint32_t in : n.inputs) grad_of(in)[0] += share;
                break;
            }
            case Op::kConcat: {
                const std::size_t na = val(n.a).size();
                std::vector<double>& ga = grad_of(n.a);
                std::vector<double>& gb = grad_of(n.b);
                for (std::size_t j = 0; j < na; ++j) ga[j] += g[j];
                for (std::size_t j = na; j < g.size(); ++j) gb[j - na] += g[j];
                break;
            }
        }
        (void)i;
    }

    std::vector<Node> nodes_;
};

// tanh(W h + b) with gradient flow to all three inputs.
inline Var matmul_add_tanh(Tape& tape, Var w, Var h, Var b) {
    return tape.tanh(tape.add(tape.matvec(w, h), b));
}

}  // namespace attrpref
