#include "proxkit/nn.hpp"

#include "proxkit/common.hpp"
#include "proxkit/rng.hpp"

#include <cmath>

namespace proxkit {

double softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

double mish(double x) { return x * std::tanh(softplus(x)); }

double mish_grad(double x) {
    const double t = std::tanh(softplus(x));
    const double sig = 1.0 / (1.0 + std::exp(-x));
    return t + x * (1.0 - t * t) * sig;
}

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd shifted =
        logits.colwise() - logits.rowwise().maxCoeff();
    Eigen::MatrixXd exps = shifted.array().exp();
    return exps.array().colwise() / exps.rowwise().sum().array();
}

double weighted_cross_entropy(const Eigen::MatrixXd& probs, std::span<const int> labels,
                              std::span<const double> weights) {
    const auto n = probs.rows();
    if (static_cast<std::size_t>(n) != labels.size() ||
        static_cast<std::size_t>(n) != weights.size())
        throw data_error("weighted_cross_entropy: length mismatch");
    double weight_sum = 0.0;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        if (y != 0 && y != 1) throw data_error("weighted_cross_entropy: labels must be 0/1");
        const double w = weights[static_cast<std::size_t>(i)];
        if (w < 0.0) throw data_error("weighted_cross_entropy: weights must be >= 0");
        const double p = std::clamp(probs(i, y), kProbClip, 1.0);
        loss += w * -std::log(p);
        weight_sum += w;
    }
    if (weight_sum <= 0.0) throw data_error("weighted_cross_entropy: all weights are zero");
    return loss / weight_sum;
}

BatchNormLayer BatchNormLayer::identity(Eigen::Index dim) {
    BatchNormLayer layer;
    layer.gamma = Eigen::VectorXd::Ones(dim);
    layer.beta = Eigen::VectorXd::Zero(dim);
    layer.running_mean = Eigen::VectorXd::Zero(dim);
    layer.running_var = Eigen::VectorXd::Ones(dim);
    return layer;
}

Eigen::MatrixXd BatchNormLayer::apply_running(const Eigen::MatrixXd& input) const {
    const Eigen::ArrayXd inv_std = (running_var.array() + kBnEpsilon).sqrt().inverse();
    Eigen::MatrixXd out = input;
    out.rowwise() -= running_mean.transpose();
    out.array().rowwise() *= (inv_std * gamma.array()).transpose();
    out.rowwise() += beta.transpose();
    return out;
}

void TrainConfig::validate() const {
    if (epochs < 1) throw config_error("train: epochs must be >= 1");
    if (batch_size < 2) throw config_error("train: batch_size must be >= 2 (batch norm)");
    if (!(learning_rate > 0.0)) throw config_error("train: learning_rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0))
        throw config_error("train: adam betas must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) throw config_error("train: adam epsilon must be > 0");
    if (weight_decay < 0.0) throw config_error("train: weight_decay must be >= 0");
}

namespace {

// Draw order is pinned: row-major weight fill per layer, He fan-in scale.
DenseLayer init_dense(Eigen::Index out, Eigen::Index in, Rng& rng) {
    DenseLayer layer;
    layer.weights.resize(out, in);
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    for (Eigen::Index r = 0; r < out; ++r)
        for (Eigen::Index c = 0; c < in; ++c) layer.weights(r, c) = scale * rng.normal();
    layer.bias = Eigen::VectorXd::Zero(out);
    return layer;
}

struct LayerCache {
    Eigen::MatrixXd input;     // activations entering the dense layer
    Eigen::MatrixXd centered;  // Z - mu
    Eigen::ArrayXd inv_std;    // 1/sqrt(var + eps), per feature
    Eigen::MatrixXd xhat;
    Eigen::MatrixXd pre_act;   // BN output, input to mish
};

struct ForwardCache {
    std::vector<LayerCache> layers;
    Eigen::MatrixXd last_hidden;  // input to the output dense layer
    Eigen::MatrixXd probs;
};

struct GradientSet {
    std::vector<Eigen::MatrixXd> d_weights;
    std::vector<Eigen::VectorXd> d_bias;
    std::vector<Eigen::VectorXd> d_gamma;
    std::vector<Eigen::VectorXd> d_beta;
    Eigen::MatrixXd d_out_weights;
    Eigen::VectorXd d_out_bias;
};

Eigen::MatrixXd mish_matrix(const Eigen::MatrixXd& x) {
    return x.unaryExpr([](double v) { return mish(v); });
}

Eigen::MatrixXd mish_grad_matrix(const Eigen::MatrixXd& x) {
    return x.unaryExpr([](double v) { return mish_grad(v); });
}

// Training-mode forward pass with batch statistics. Running statistics move
// only when update_running is set (gradient checks must leave them alone).
Eigen::MatrixXd forward_train(MlpClassifier& model, const Eigen::MatrixXd& batch,
                              ForwardCache* cache, bool update_running) {
    const double rows = static_cast<double>(batch.rows());
    Eigen::MatrixXd act = batch;
    if (cache) cache->layers.resize(model.dense.size());
    for (std::size_t i = 0; i < model.dense.size(); ++i) {
        const DenseLayer& dense = model.dense[i];
        BatchNormLayer& bn = model.bn[i];
        Eigen::MatrixXd z = act * dense.weights.transpose();
        z.rowwise() += dense.bias.transpose();

        const Eigen::RowVectorXd mu = z.colwise().mean();
        Eigen::MatrixXd centered = z.rowwise() - mu;
        const Eigen::ArrayXd var =
            (centered.array().square().colwise().sum() / rows).transpose();
        const Eigen::ArrayXd inv_std = (var + kBnEpsilon).sqrt().inverse();
        Eigen::MatrixXd xhat = centered.array().rowwise() * inv_std.transpose();
        Eigen::MatrixXd pre_act = xhat.array().rowwise() * bn.gamma.transpose().array();
        pre_act.rowwise() += bn.beta.transpose();

        if (update_running) {
            bn.running_mean =
                kBnMomentum * bn.running_mean + (1.0 - kBnMomentum) * mu.transpose();
            bn.running_var = kBnMomentum * bn.running_var.array() +
                             (1.0 - kBnMomentum) * var;
        }
        if (cache) {
            LayerCache& lc = cache->layers[i];
            lc.input = std::move(act);
            lc.centered = std::move(centered);
            lc.inv_std = inv_std;
            lc.xhat = std::move(xhat);
            lc.pre_act = pre_act;
        }
        act = mish_matrix(pre_act);
    }
    Eigen::MatrixXd logits = act * model.output.weights.transpose();
    logits.rowwise() += model.output.bias.transpose();
    Eigen::MatrixXd probs = softmax_rows(logits);
    if (cache) {
        cache->last_hidden = std::move(act);
        cache->probs = probs;
    }
    return probs;
}

GradientSet backward(const MlpClassifier& model, const ForwardCache& cache,
                     std::span<const int> labels, std::span<const double> weights) {
    const auto batch_rows = cache.probs.rows();
    const double rows = static_cast<double>(batch_rows);
    double weight_sum = 0.0;
    for (double w : weights) weight_sum += w;

    // d loss / d logits for softmax + weighted cross-entropy.
    Eigen::MatrixXd d_logits = cache.probs;
    for (Eigen::Index i = 0; i < batch_rows; ++i) {
        d_logits(i, labels[static_cast<std::size_t>(i)]) -= 1.0;
        d_logits.row(i) *= weights[static_cast<std::size_t>(i)] / weight_sum;
    }

    GradientSet grads;
    grads.d_weights.resize(model.dense.size());
    grads.d_bias.resize(model.dense.size());
    grads.d_gamma.resize(model.dense.size());
    grads.d_beta.resize(model.dense.size());

    grads.d_out_weights = d_logits.transpose() * cache.last_hidden;
    grads.d_out_bias = d_logits.colwise().sum();
    Eigen::MatrixXd d_act = d_logits * model.output.weights;

    for (std::size_t i = model.dense.size(); i-- > 0;) {
        const LayerCache& lc = cache.layers[i];
        const BatchNormLayer& bn = model.bn[i];

        const Eigen::MatrixXd d_pre = d_act.array() * mish_grad_matrix(lc.pre_act).array();
        grads.d_gamma[i] = (d_pre.array() * lc.xhat.array()).colwise().sum();
        grads.d_beta[i] = d_pre.colwise().sum();

        const Eigen::MatrixXd d_xhat =
            d_pre.array().rowwise() * bn.gamma.transpose().array();
        const Eigen::ArrayXd d_var =
            ((d_xhat.array() * lc.centered.array()).colwise().sum().transpose()) *
            (-0.5) * lc.inv_std.pow(3);
        const Eigen::ArrayXd d_mu =
            -(d_xhat.colwise().sum().transpose().array() * lc.inv_std) +
            d_var * (-2.0 / rows) * lc.centered.colwise().sum().transpose().array();
        Eigen::MatrixXd d_z = d_xhat.array().rowwise() * lc.inv_std.transpose();
        d_z.array() += lc.centered.array().rowwise() * (2.0 / rows * d_var).transpose();
        d_z.array().rowwise() += (d_mu / rows).transpose();

        grads.d_weights[i] = d_z.transpose() * lc.input;
        grads.d_bias[i] = d_z.colwise().sum();
        d_act = d_z * model.dense[i].weights;
    }
    return grads;
}

struct TensorView {
    double* data;
    Eigen::Index size;
};

// Fixed flattening order shared by the optimizer and the gradient checker.
std::vector<TensorView> parameter_views(MlpClassifier& model) {
    std::vector<TensorView> views;
    for (std::size_t i = 0; i < model.dense.size(); ++i) {
        views.push_back({model.dense[i].weights.data(), model.dense[i].weights.size()});
        views.push_back({model.dense[i].bias.data(), model.dense[i].bias.size()});
        views.push_back({model.bn[i].gamma.data(), model.bn[i].gamma.size()});
        views.push_back({model.bn[i].beta.data(), model.bn[i].beta.size()});
    }
    views.push_back({model.output.weights.data(), model.output.weights.size()});
    views.push_back({model.output.bias.data(), model.output.bias.size()});
    return views;
}

std::vector<TensorView> gradient_views(GradientSet& grads) {
    std::vector<TensorView> views;
    for (std::size_t i = 0; i < grads.d_weights.size(); ++i) {
        views.push_back({grads.d_weights[i].data(), grads.d_weights[i].size()});
        views.push_back({grads.d_bias[i].data(), grads.d_bias[i].size()});
        views.push_back({grads.d_gamma[i].data(), grads.d_gamma[i].size()});
        views.push_back({grads.d_beta[i].data(), grads.d_beta[i].size()});
    }
    views.push_back({grads.d_out_weights.data(), grads.d_out_weights.size()});
    views.push_back({grads.d_out_bias.data(), grads.d_out_bias.size()});
    return views;
}

class AdamOptimizer {
  public:
    AdamOptimizer(const std::vector<TensorView>& params, const TrainConfig& config)
        : config_(config) {
        for (const auto& p : params) {
            m_.emplace_back(Eigen::VectorXd::Zero(p.size));
            v_.emplace_back(Eigen::VectorXd::Zero(p.size));
        }
    }

    void step(const std::vector<TensorView>& params, const std::vector<TensorView>& grads) {
        ++t_;
        const double bc1 = 1.0 - std::pow(config_.beta1, t_);
        const double bc2 = 1.0 - std::pow(config_.beta2, t_);
        for (std::size_t k = 0; k < params.size(); ++k) {
            double* theta = params[k].data;
            const double* g = grads[k].data;
            Eigen::VectorXd& m = m_[k];
            Eigen::VectorXd& v = v_[k];
            for (Eigen::Index j = 0; j < params[k].size; ++j) {
                double grad = g[j];
                if (config_.weight_decay > 0.0) grad += config_.weight_decay * theta[j];
                m(j) = config_.beta1 * m(j) + (1.0 - config_.beta1) * grad;
                v(j) = config_.beta2 * v(j) + (1.0 - config_.beta2) * grad * grad;
                theta[j] -= config_.learning_rate * (m(j) / bc1) /
                            (std::sqrt(v(j) / bc2) + config_.adam_epsilon);
            }
        }
    }

  private:
    TrainConfig config_;
    std::vector<Eigen::VectorXd> m_;
    std::vector<Eigen::VectorXd> v_;
    int t_ = 0;
};

}  // namespace

MlpClassifier MlpClassifier::init(int input_dim, std::vector<int> hidden_widths,
                                  std::uint64_t seed) {
    if (input_dim < 1) throw config_error("MlpClassifier: input_dim must be >= 1");
    if (hidden_widths.empty()) throw config_error("MlpClassifier: need at least one hidden layer");
    for (int w : hidden_widths)
        if (w < 1) throw config_error("MlpClassifier: hidden widths must be >= 1");

    Rng rng(seed);
    MlpClassifier model;
    model.input_dim = input_dim;
    model.hidden_widths = std::move(hidden_widths);
    Eigen::Index in = input_dim;
    for (int width : model.hidden_widths) {
        model.dense.push_back(init_dense(width, in, rng));
        model.bn.push_back(BatchNormLayer::identity(width));
        in = width;
    }
    model.output = init_dense(2, in, rng);
    return model;
}

Eigen::MatrixXd MlpClassifier::forward(const Eigen::MatrixXd& batch) const {
    if (batch.cols() != input_dim)
        throw data_error("forward: feature width does not match the model input");
    Eigen::MatrixXd act = batch;
    for (std::size_t i = 0; i < dense.size(); ++i) {
        Eigen::MatrixXd z = act * dense[i].weights.transpose();
        z.rowwise() += dense[i].bias.transpose();
        act = mish_matrix(bn[i].apply_running(z));
    }
    Eigen::MatrixXd logits = act * output.weights.transpose();
    logits.rowwise() += output.bias.transpose();
    return softmax_rows(logits);
}

Eigen::Vector2d MlpClassifier::predict_proba(const Eigen::VectorXd& features) const {
    const Eigen::MatrixXd probs = forward(features.transpose());
    return probs.row(0).transpose();
}

int MlpClassifier::predict(const Eigen::VectorXd& features) const {
    return predict_proba(features)(1) >= 0.5 ? 1 : 0;
}

std::size_t MlpClassifier::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : dense)
        count += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
    for (const auto& layer : bn)
        count += static_cast<std::size_t>(layer.gamma.size() + layer.beta.size());
    count += static_cast<std::size_t>(output.weights.size() + output.bias.size());
    return count;
}

TrainResult train(MlpClassifier& model, const Eigen::MatrixXd& features,
                  const std::vector<int>& labels, const std::vector<double>& weights,
                  const TrainConfig& config) {
    config.validate();
    const auto n = features.rows();
    if (n == 0) throw data_error("train: empty dataset");
    if (features.cols() != model.input_dim)
        throw data_error("train: feature width does not match the model input");
    if (labels.size() != static_cast<std::size_t>(n) ||
        weights.size() != static_cast<std::size_t>(n))
        throw data_error("train: labels/weights length mismatch");

    Rng rng(config.rng_seed);
    auto params = parameter_views(model);
    AdamOptimizer adam(params, config);

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    TrainResult result;
    std::vector<int> batch_labels;
    std::vector<double> batch_weights;
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(order);
        double epoch_loss = 0.0;
        double epoch_weight = 0.0;
        for (std::size_t start = 0; start < order.size();
             start += static_cast<std::size_t>(config.batch_size)) {
            const std::size_t stop =
                std::min(order.size(), start + static_cast<std::size_t>(config.batch_size));
            const auto rows = static_cast<Eigen::Index>(stop - start);
            if (rows < 2) continue;  // batch norm needs at least two rows

            Eigen::MatrixXd batch(rows, features.cols());
            batch_labels.resize(static_cast<std::size_t>(rows));
            batch_weights.resize(static_cast<std::size_t>(rows));
            double batch_weight_sum = 0.0;
            for (Eigen::Index r = 0; r < rows; ++r) {
                const std::size_t src = order[start + static_cast<std::size_t>(r)];
                batch.row(r) = features.row(static_cast<Eigen::Index>(src));
                batch_labels[static_cast<std::size_t>(r)] = labels[src];
                batch_weights[static_cast<std::size_t>(r)] = weights[src];
                batch_weight_sum += weights[src];
            }
            if (batch_weight_sum <= 0.0) continue;  // nothing contributes

            ForwardCache cache;
            forward_train(model, batch, &cache, /*update_running=*/true);
            const double loss = weighted_cross_entropy(cache.probs, batch_labels, batch_weights);
            if (!std::isfinite(loss))
                throw numeric_error(
                    "train: loss is not finite; consider lowering learning_rate");
            GradientSet grads = backward(model, cache, batch_labels, batch_weights);
            adam.step(params, gradient_views(grads));

            epoch_loss += loss * batch_weight_sum;
            epoch_weight += batch_weight_sum;
        }
        result.loss_history.push_back(epoch_weight > 0.0 ? epoch_loss / epoch_weight : 0.0);
    }
    return result;
}

double gradient_check(const MlpClassifier& model, const Eigen::MatrixXd& batch,
                      const std::vector<int>& labels, const std::vector<double>& weights) {
    MlpClassifier probe = model;

    ForwardCache cache;
    forward_train(probe, batch, &cache, /*update_running=*/false);
    GradientSet grads = backward(probe, cache, labels, weights);

    auto params = parameter_views(probe);
    auto grad_views = gradient_views(grads);

    const auto loss_at = [&]() {
        const Eigen::MatrixXd probs =
            forward_train(probe, batch, nullptr, /*update_running=*/false);
        return weighted_cross_entropy(probs, labels, weights);
    };

    constexpr double h = 1e-4;
    double max_rel = 0.0;
    for (std::size_t k = 0; k < params.size(); ++k) {
        for (Eigen::Index j = 0; j < params[k].size; ++j) {
            double& theta = params[k].data[j];
            const double saved = theta;
            theta = saved + h;
            const double loss_hi = loss_at();
            theta = saved - h;
            const double loss_lo = loss_at();
            theta = saved;
            const double numeric = (loss_hi - loss_lo) / (2.0 * h);
            const double analytic = grad_views[k].data[j];
            const double rel = std::abs(analytic - numeric) /
                               std::max(std::abs(analytic) + std::abs(numeric), 1e-6);
            max_rel = std::max(max_rel, rel);
        }
    }
    return max_rel;
}

}  // namespace proxkit
