#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "augkit/types.hpp"

namespace augkit {

// Dense H x W x C activation block, channel-minor storage.
struct FeatureMap {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  FeatureMap() = default;
  FeatureMap(std::size_t h, std::size_t w, std::size_t c)
      : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  double at(std::size_t row, std::size_t col, std::size_t channel) const {
    return values[(row * width + col) * channels + channel];
  }
  double& at(std::size_t row, std::size_t col, std::size_t channel) {
    return values[(row * width + col) * channels + channel];
  }
};

// Activations whose channels come in groups of N orientation responses;
// orientation index n is the response to the content rotated by n
// quarter turns.  Orientation-minor storage.
struct OrientedTensor {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t groups = 0;
  std::size_t orientations = 0;

  std::vector<double> values;

  OrientedTensor() = default;
  OrientedTensor(std::size_t h, std::size_t w, std::size_t g, std::size_t n)
      : height(h), width(w), groups(g), orientations(n),
        values(h * w * g * n, 0.0) {}

  double at(std::size_t row, std::size_t col, std::size_t group,
            std::size_t orientation) const {
    return values[((row * width + col) * groups + group) * orientations +
                  orientation];
  }
  double& at(std::size_t row, std::size_t col, std::size_t group,
             std::size_t orientation) {
    return values[((row * width + col) * groups + group) * orientations +
                  orientation];
  }
};

// Flattens to groups * orientations channels, orientation minor.
FeatureMap to_feature_map(const OrientedTensor& tensor);

// Rotates the content one quarter turn counter-clockwise: every plane
// is spatially rotated and each group's orientation axis shifts by one,
// so orientation n of the result is the old orientation n-1.
OrientedTensor rotate90(const OrientedTensor& tensor);

// Filter bank whose rotated copies are index permutations of the stored
// weights rather than separate parameters.  Weights are n_out x n_in x
// orientations x k x k, k odd, orientations fixed at 4 so the copies
// stay exact.
struct RotatingFilterBank {
  std::size_t n_out = 0;
  std::size_t n_in = 0;
  std::size_t k = 0;
  std::size_t orientations = 4;
  std::vector<double> weights;

  RotatingFilterBank() = default;
  RotatingFilterBank(std::size_t n_out_, std::size_t n_in_, std::size_t k_);

  double at(std::size_t out, std::size_t in, std::size_t orientation,
            std::size_t ky, std::size_t kx) const {
    return weights[(((out * n_in + in) * orientations + orientation) * k + ky) *
                       k +
                   kx];
  }
  double& at(std::size_t out, std::size_t in, std::size_t orientation,
             std::size_t ky, std::size_t kx) {
    return weights[(((out * n_in + in) * orientations + orientation) * k + ky) *
                       k +
                   kx];
  }
};

// One k x k slice rotated by j quarter turns counter-clockwise; an
// exact index permutation, no arithmetic on the weights.
Grid rotate_kernel_slice(const Grid& slice, unsigned j);

// The bank's immaterialized copy for orientation j: every slice rotated
// spatially by j quarter turns and the orientation axis cyclically
// shifted by j.  j = 0 returns the bank unchanged; four applications of
// j = 1 come back to the start exactly.
RotatingFilterBank arf_expand(const RotatingFilterBank& bank, unsigned j);

// Oriented cross-correlation with same-size zero padding: output
// orientation j correlates the input against arf_expand(bank, j), so
// input orientation channels couple cyclically.  Rotating the input
// with rotate90 rotates the output the same way.
OrientedTensor orconv_forward(const OrientedTensor& input,
                              const RotatingFilterBank& bank);

struct SOrAlignResult {
  OrientedTensor aligned;
  // Winning orientation per group before the spin.
  std::vector<std::size_t> main_orientation;
};

// Global-average-pools each group over space and orientation-spins it so
// the strongest orientation comes first; ties pick the lowest index.
// The pooled result is then invariant to cyclic orientation shifts of
// the input (exactly, when the argmax is unique).
SOrAlignResult s_oralign(const OrientedTensor& input);

// Squeeze-excite channel attention weights: w1 is (channels/reduction) x
// channels, w2 is channels x (channels/reduction).
struct ChannelAttentionWeights {
  std::size_t channels = 0;
  std::size_t reduced = 0;
  std::vector<double> w1;
  std::vector<double> w2;

  ChannelAttentionWeights() = default;
  ChannelAttentionWeights(std::size_t channels_, std::size_t reduction);
};

// Per-channel spatial mean.
std::vector<double> channel_squeeze(const FeatureMap& features);

// sigmoid(w2 . relu(w1 . squeezed)); every output lies in (0, 1).
std::vector<double> channel_excite(const std::vector<double>& squeezed,
                                   const ChannelAttentionWeights& weights);

// 1x1 channel mixing with bias.
struct Conv1x1 {
  std::size_t channels = 0;
  std::vector<double> weights;  // channels x channels, row-major
  std::vector<double> bias;     // channels

  Conv1x1() = default;
  explicit Conv1x1(std::size_t channels_)
      : channels(channels_), weights(channels_ * channels_, 0.0),
        bias(channels_, 0.0) {}
};

// Combines a broadcast spatial map, per-channel content and channel
// weights into tanh(mix . ((spatial + content) * channel)) per pixel;
// outputs lie in [-1, 1].
FeatureMap factorize_attention(const Grid& spatial, const FeatureMap& content,
                               const std::vector<double>& channel_weights,
                               const Conv1x1& mixing);

// Residual gating U = (1 + A) * F, elementwise; shapes must agree.
FeatureMap modulate_features(const FeatureMap& features,
                             const FeatureMap& attention);

// Flat tensor container: one ASCII header line
// "augkit-tensor <d0> <d1> ...\n" followed by row-major little-endian
// 64-bit reals.
struct TensorData {
  std::vector<std::size_t> dims;
  std::vector<double> values;
};

void write_tensor(const std::string& path, const std::vector<std::size_t>& dims,
                  const std::vector<double>& values);
TensorData read_tensor(const std::string& path);

// Bank round trip through the tensor container, dims
// {n_out, n_in, orientations, k, k}.
void write_bank(const std::string& path, const RotatingFilterBank& bank);
RotatingFilterBank read_bank(const std::string& path);

}  // namespace augkit
