#pragma once

#include "proxkit/nn.hpp"

#include <cstdint>
#include <vector>

namespace proxkit {

// HardTanh: clamp(x, -1, 1).
double hardtanh(double x);

// Sign with sign(0) = +1, the pinned tie-break for weights and activations.
double binarize_forward(double x);

// Clipped straight-through estimator: the upstream gradient passes iff
// |x| <= 1, where x is the input the forward sign saw.
double binarize_backward(double upstream, double x);

// Row-major bit packing of a sign matrix: one bit per weight, LSB first
// within each byte, bit 1 <=> +1, final partial byte zero-padded. Each row
// occupies ceil(cols/8) bytes.
std::vector<std::uint8_t> pack_signs(const Eigen::MatrixXd& signs);
Eigen::MatrixXd unpack_signs(const std::vector<std::uint8_t>& payload, Eigen::Index rows,
                             Eigen::Index cols);

inline std::size_t packed_row_bytes(Eigen::Index cols) {
    return (static_cast<std::size_t>(cols) + 7) / 8;
}

struct BinaryDenseLayer {
    Eigen::MatrixXd latent;             // full-precision, training only; clipped to [-1, 1]
    std::vector<std::uint8_t> packed;   // sign bits of latent, empty until pack()
    Eigen::Index out_dim = 0;
    Eigen::Index in_dim = 0;

    Eigen::MatrixXd sign_weights() const;  // sign(latent) as +/-1 entries
    void pack();
    bool is_packed() const { return !packed.empty(); }
};

struct BnnArch {
    int float_in_width = 128;
    std::vector<int> bin_widths{1024, 896, 256};
    int last_hidden_width = 64;
    double dropout_rate = 0.2;  // between the last two hidden layers

    void validate() const;
};

// Memory-efficient classifier variant: full-precision input and last hidden
// layers, +/-1 binarized layers in between (batch norm -> hardtanh -> sign),
// softmax output. Binarized layers carry no bias or scale; batch norm
// absorbs both.
class BnnClassifier {
  public:
    int input_dim = 0;
    BnnArch arch;

    DenseLayer input_dense;
    BatchNormLayer input_bn;
    std::vector<BinaryDenseLayer> bin_layers;
    std::vector<BatchNormLayer> bin_bn;
    DenseLayer last_dense;
    BatchNormLayer last_bn;
    DenseLayer output;

    static BnnClassifier init(int input_dim, const BnnArch& arch, std::uint64_t seed);

    void pack_all();
    bool is_packed() const;

    // Reference forward pass: sign arithmetic in doubles, running batch-norm
    // statistics, dropout inactive. The bit-packed path must match it.
    Eigen::Vector2d infer_reference(const Eigen::VectorXd& features) const;

    // XNOR/popcount inference on the packed weights. Binarized dot products
    // are computed as 2 * matches - width. Throws if the model is unpacked.
    Eigen::Vector2d infer_bitpacked(const Eigen::VectorXd& features) const;

    int predict(const Eigen::VectorXd& features) const;
};

// Same optimizer, loss and sample-weight semantics as the full-precision
// trainer; binarized layers run on sign(latent) forward and straight-through
// gradients backward, with latents clipped to [-1, 1] after every step.
TrainResult train_bnn(BnnClassifier& model, const Eigen::MatrixXd& features,
                      const std::vector<int>& labels, const std::vector<double>& weights,
                      const TrainConfig& config);

}  // namespace proxkit
