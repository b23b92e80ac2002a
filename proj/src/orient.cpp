#include "augkit/orient.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "augkit/error.hpp"

namespace augkit {
namespace {

constexpr std::size_t kOrientations = 4;
constexpr const char* kTensorMagic = "augkit-tensor";

double relu(double v) { return v > 0.0 ? v : 0.0; }

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

FeatureMap to_feature_map(const OrientedTensor& tensor) {
  FeatureMap out(tensor.height, tensor.width,
                 tensor.groups * tensor.orientations);
  out.values = tensor.values;  // identical layout, orientation minor
  return out;
}

OrientedTensor rotate90(const OrientedTensor& tensor) {
  const std::size_t n = tensor.orientations;
  OrientedTensor out(tensor.width, tensor.height, tensor.groups, n);
  // Counter-clockwise: out(r, c) = in(c, W-1-r); orientation shifts by +1.
  for (std::size_t r = 0; r < out.height; ++r) {
    for (std::size_t c = 0; c < out.width; ++c) {
      for (std::size_t g = 0; g < tensor.groups; ++g) {
        for (std::size_t o = 0; o < n; ++o) {
          out.at(r, c, g, (o + 1) % n) =
              tensor.at(c, tensor.width - 1 - r, g, o);
        }
      }
    }
  }
  return out;
}

RotatingFilterBank::RotatingFilterBank(std::size_t n_out_, std::size_t n_in_,
                                       std::size_t k_)
    : n_out(n_out_), n_in(n_in_), k(k_), orientations(kOrientations),
      weights(n_out_ * n_in_ * kOrientations * k_ * k_, 0.0) {
  if (n_out == 0 || n_in == 0)
    throw InvalidParameterError("RotatingFilterBank: empty channel extent");
  if (k == 0 || k % 2 == 0)
    throw InvalidParameterError("RotatingFilterBank: k must be odd");
}

Grid rotate_kernel_slice(const Grid& slice, unsigned j) {
  if (slice.height != slice.width)
    throw ShapeError("rotate_kernel_slice: slice must be square");
  const std::size_t k = slice.height;
  Grid out(k, k);
  const unsigned q = j % 4;
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      double v = 0.0;
      switch (q) {
        case 0: v = slice.at(r, c); break;
        case 1: v = slice.at(c, k - 1 - r); break;
        case 2: v = slice.at(k - 1 - r, k - 1 - c); break;
        case 3: v = slice.at(k - 1 - c, r); break;
      }
      out.at(r, c) = v;
    }
  }
  return out;
}

RotatingFilterBank arf_expand(const RotatingFilterBank& bank, unsigned j) {
  const unsigned q = j % 4;
  if (q == 0) return bank;
  RotatingFilterBank out(bank.n_out, bank.n_in, bank.k);
  Grid slice(bank.k, bank.k);
  for (std::size_t o = 0; o < bank.n_out; ++o) {
    for (std::size_t i = 0; i < bank.n_in; ++i) {
      for (std::size_t n = 0; n < bank.orientations; ++n) {
        // Orientation n of the copy holds the spatially rotated
        // orientation (n - j) mod N of the original.
        const std::size_t src = (n + bank.orientations - q) % bank.orientations;
        for (std::size_t ky = 0; ky < bank.k; ++ky)
          for (std::size_t kx = 0; kx < bank.k; ++kx)
            slice.at(ky, kx) = bank.at(o, i, src, ky, kx);
        const Grid rotated = rotate_kernel_slice(slice, q);
        for (std::size_t ky = 0; ky < bank.k; ++ky)
          for (std::size_t kx = 0; kx < bank.k; ++kx)
            out.at(o, i, n, ky, kx) = rotated.at(ky, kx);
      }
    }
  }
  return out;
}

OrientedTensor orconv_forward(const OrientedTensor& input,
                              const RotatingFilterBank& bank) {
  if (input.orientations != bank.orientations)
    throw ShapeError("orconv_forward: orientation counts differ");
  if (input.groups != bank.n_in)
    throw ShapeError("orconv_forward: input groups do not match bank");
  if (input.height == 0 || input.width == 0)
    throw ShapeError("orconv_forward: empty input");

  const auto h = static_cast<std::int64_t>(input.height);
  const auto w = static_cast<std::int64_t>(input.width);
  const int r = static_cast<int>((bank.k - 1) / 2);
  OrientedTensor out(input.height, input.width, bank.n_out, bank.orientations);

  for (std::size_t j = 0; j < bank.orientations; ++j) {
    const RotatingFilterBank expanded = arf_expand(bank, static_cast<unsigned>(j));
    for (std::size_t o = 0; o < bank.n_out; ++o) {
      for (std::int64_t y = 0; y < h; ++y) {
        for (std::int64_t x = 0; x < w; ++x) {
          double acc = 0.0;
          for (std::size_t i = 0; i < bank.n_in; ++i) {
            for (std::size_t n = 0; n < bank.orientations; ++n) {
              for (int ky = -r; ky <= r; ++ky) {
                const std::int64_t sy = y + ky;
                if (sy < 0 || sy >= h) continue;
                for (int kx = -r; kx <= r; ++kx) {
                  const std::int64_t sx = x + kx;
                  if (sx < 0 || sx >= w) continue;
                  acc += expanded.at(o, i, n, static_cast<std::size_t>(ky + r),
                                     static_cast<std::size_t>(kx + r)) *
                         input.at(static_cast<std::size_t>(sy),
                                  static_cast<std::size_t>(sx), i, n);
                }
              }
            }
          }
          out.at(static_cast<std::size_t>(y), static_cast<std::size_t>(x), o, j) =
              acc;
        }
      }
    }
  }
  return out;
}

SOrAlignResult s_oralign(const OrientedTensor& input) {
  if (input.height == 0 || input.width == 0 || input.groups == 0)
    throw ShapeError("s_oralign: empty input");
  const std::size_t n = input.orientations;
  const double inv_area =
      1.0 / (static_cast<double>(input.height) * static_cast<double>(input.width));

  SOrAlignResult result;
  result.aligned =
      OrientedTensor(input.height, input.width, input.groups, n);
  result.main_orientation.resize(input.groups);

  for (std::size_t g = 0; g < input.groups; ++g) {
    std::size_t main = 0;
    double best = 0.0;
    for (std::size_t o = 0; o < n; ++o) {
      double sum = 0.0;
      for (std::size_t y = 0; y < input.height; ++y)
        for (std::size_t x = 0; x < input.width; ++x)
          sum += input.at(y, x, g, o);
      const double pooled = sum * inv_area;
      if (o == 0 || pooled > best) {
        best = pooled;
        main = o;
      }
    }
    result.main_orientation[g] = main;
    // Spin so the winning orientation lands in position 0.
    for (std::size_t o = 0; o < n; ++o) {
      const std::size_t src = (o + main) % n;
      for (std::size_t y = 0; y < input.height; ++y)
        for (std::size_t x = 0; x < input.width; ++x)
          result.aligned.at(y, x, g, o) = input.at(y, x, g, src);
    }
  }
  return result;
}

ChannelAttentionWeights::ChannelAttentionWeights(std::size_t channels_,
                                                 std::size_t reduction)
    : channels(channels_) {
  if (reduction == 0 || channels_ == 0 || channels_ % reduction != 0)
    throw InvalidParameterError(
        "ChannelAttentionWeights: reduction must divide channels");
  reduced = channels_ / reduction;
  w1.assign(reduced * channels, 0.0);
  w2.assign(channels * reduced, 0.0);
}

std::vector<double> channel_squeeze(const FeatureMap& features) {
  if (features.height == 0 || features.width == 0 || features.channels == 0)
    throw ShapeError("channel_squeeze: empty feature map");
  const double inv_area = 1.0 / (static_cast<double>(features.height) *
                                 static_cast<double>(features.width));
  std::vector<double> out(features.channels, 0.0);
  for (std::size_t y = 0; y < features.height; ++y)
    for (std::size_t x = 0; x < features.width; ++x)
      for (std::size_t c = 0; c < features.channels; ++c)
        out[c] += features.at(y, x, c);
  for (double& v : out) v *= inv_area;
  return out;
}

std::vector<double> channel_excite(const std::vector<double>& squeezed,
                                   const ChannelAttentionWeights& weights) {
  if (squeezed.size() != weights.channels)
    throw ShapeError("channel_excite: squeezed size does not match weights");
  std::vector<double> hidden(weights.reduced, 0.0);
  for (std::size_t r = 0; r < weights.reduced; ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < weights.channels; ++c)
      acc += weights.w1[r * weights.channels + c] * squeezed[c];
    hidden[r] = relu(acc);
  }
  std::vector<double> out(weights.channels, 0.0);
  for (std::size_t c = 0; c < weights.channels; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < weights.reduced; ++r)
      acc += weights.w2[c * weights.reduced + r] * hidden[r];
    out[c] = sigmoid(acc);
  }
  return out;
}

FeatureMap factorize_attention(const Grid& spatial, const FeatureMap& content,
                               const std::vector<double>& channel_weights,
                               const Conv1x1& mixing) {
  if (spatial.height != content.height || spatial.width != content.width)
    throw ShapeError("factorize_attention: spatial extents differ");
  if (channel_weights.size() != content.channels ||
      mixing.channels != content.channels)
    throw ShapeError("factorize_attention: channel extents differ");
  if (mixing.weights.size() != mixing.channels * mixing.channels ||
      mixing.bias.size() != mixing.channels)
    throw ShapeError("factorize_attention: mixing weights malformed");

  const std::size_t ch = content.channels;
  FeatureMap out(content.height, content.width, ch);
  std::vector<double> combined(ch, 0.0);
  for (std::size_t y = 0; y < content.height; ++y) {
    for (std::size_t x = 0; x < content.width; ++x) {
      const double s = spatial.at(y, x);
      for (std::size_t c = 0; c < ch; ++c)
        combined[c] = (s + content.at(y, x, c)) * channel_weights[c];
      for (std::size_t co = 0; co < ch; ++co) {
        double acc = mixing.bias[co];
        for (std::size_t ci = 0; ci < ch; ++ci)
          acc += mixing.weights[co * ch + ci] * combined[ci];
        out.at(y, x, co) = std::tanh(acc);
      }
    }
  }
  return out;
}

FeatureMap modulate_features(const FeatureMap& features,
                             const FeatureMap& attention) {
  if (features.height != attention.height || features.width != attention.width ||
      features.channels != attention.channels)
    throw ShapeError("modulate_features: shapes differ");
  FeatureMap out = features;
  for (std::size_t i = 0; i < out.values.size(); ++i)
    out.values[i] = (1.0 + attention.values[i]) * features.values[i];
  return out;
}

void write_tensor(const std::string& path, const std::vector<std::size_t>& dims,
                  const std::vector<double>& values) {
  std::size_t expected = 1;
  for (std::size_t d : dims) expected *= d;
  if (dims.empty() || expected != values.size())
    throw ShapeError("write_tensor: dims do not match value count");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_tensor: cannot open " + path);
  out << kTensorMagic;
  for (std::size_t d : dims) out << ' ' << d;
  out << '\n';
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b)
      bytes[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) throw IoError("write_tensor: write failed for " + path);
}

TensorData read_tensor(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_tensor: cannot open " + path);
  std::string header;
  if (!std::getline(in, header))
    throw ParseError(1, "read_tensor: missing header");
  std::istringstream hs(header);
  std::string magic;
  hs >> magic;
  if (magic != kTensorMagic)
    throw ParseError(1, "read_tensor: bad magic '" + magic + "'");

  TensorData data;
  std::size_t d = 0;
  while (hs >> d) data.dims.push_back(d);
  if (data.dims.empty()) throw ParseError(1, "read_tensor: no dimensions");
  std::size_t count = 1;
  for (std::size_t dim : data.dims) count *= dim;

  data.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8))
      throw IoError("read_tensor: truncated payload in " + path);
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b)
      bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    data.values[i] = std::bit_cast<double>(bits);
  }
  if (in.get() != std::ifstream::traits_type::eof())
    throw ParseError("read_tensor: trailing bytes in " + path);
  return data;
}

void write_bank(const std::string& path, const RotatingFilterBank& bank) {
  write_tensor(path, {bank.n_out, bank.n_in, bank.orientations, bank.k, bank.k},
               bank.weights);
}

RotatingFilterBank read_bank(const std::string& path) {
  const TensorData data = read_tensor(path);
  if (data.dims.size() != 5 || data.dims[2] != kOrientations ||
      data.dims[3] != data.dims[4])
    throw ShapeError("read_bank: expected dims {n_out, n_in, 4, k, k}");
  RotatingFilterBank bank(data.dims[0], data.dims[1], data.dims[3]);
  bank.weights = data.values;
  return bank;
}

}  // namespace augkit
