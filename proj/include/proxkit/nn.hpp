#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <vector>

namespace proxkit {

inline constexpr double kBnEpsilon = 1e-5;
inline constexpr double kBnMomentum = 0.9;
inline constexpr double kProbClip = 1e-12;

struct DenseLayer {
    Eigen::MatrixXd weights;  // out x in
    Eigen::VectorXd bias;     // out
};

struct BatchNormLayer {
    Eigen::VectorXd gamma;
    Eigen::VectorXd beta;
    Eigen::VectorXd running_mean;
    Eigen::VectorXd running_var;

    static BatchNormLayer identity(Eigen::Index dim);
    // Per-row normalization with the running statistics (inference mode).
    Eigen::MatrixXd apply_running(const Eigen::MatrixXd& input) const;
};

struct TrainConfig {
    int epochs = 100;
    int batch_size = 64;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    double weight_decay = 0.0;
    std::uint64_t rng_seed = 0;

    void validate() const;
};

struct TrainResult {
    std::vector<double> loss_history;  // weighted mean loss per epoch
};

double mish(double x);
double mish_grad(double x);
double softplus(double x);

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits);

// Weighted mean cross-entropy: (1/sum w) * sum_i w_i * -ln p_i[y_i], with
// probabilities clipped to [1e-12, 1]. The sum-w normalization makes training
// invariant to a global rescaling of the sample weights.
double weighted_cross_entropy(const Eigen::MatrixXd& probs, std::span<const int> labels,
                              std::span<const double> weights);

// Proximity classifier: [dense -> batch norm -> mish] per hidden layer, then
// dense -> softmax over {no-proximity, proximity}.
class MlpClassifier {
  public:
    int input_dim = 0;
    std::vector<int> hidden_widths;
    std::vector<DenseLayer> dense;  // one per hidden layer
    std::vector<BatchNormLayer> bn;
    DenseLayer output;  // -> 2 logits

    static MlpClassifier init(int input_dim, std::vector<int> hidden_widths,
                              std::uint64_t seed);

    // Inference-mode forward (running batch-norm statistics); rows of the
    // result are probability distributions.
    Eigen::MatrixXd forward(const Eigen::MatrixXd& batch) const;
    Eigen::Vector2d predict_proba(const Eigen::VectorXd& features) const;
    // 1 iff p(proximity) >= 0.5 (ties positive).
    int predict(const Eigen::VectorXd& features) const;

    std::size_t parameter_count() const;
};

// Mini-batch Adam on the weighted cross-entropy. Deterministic for a fixed
// seed: shuffle order, batch boundaries and update order are all pinned.
// Throws numeric_error if the loss leaves the reals.
TrainResult train(MlpClassifier& model, const Eigen::MatrixXd& features,
                  const std::vector<int>& labels, const std::vector<double>& weights,
                  const TrainConfig& config);

// Compares the analytic gradient of the weighted loss against central finite
// differences (h = 1e-4) over every parameter; returns the max relative error.
// Intended for small models (widths <= 16) and batches (<= 8).
double gradient_check(const MlpClassifier& model, const Eigen::MatrixXd& batch,
                      const std::vector<int>& labels, const std::vector<double>& weights);

}  // namespace proxkit
