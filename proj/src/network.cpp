#include "rtpinn/network.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <string>

#include "rtpinn/errors.hpp"
#include "rtpinn/random.hpp"

namespace rtpinn {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstWeights = Eigen::Map<const RowMajor>;
using Weights = Eigen::Map<RowMajor>;
using ConstBias = Eigen::Map<const Eigen::VectorXd>;
using Bias = Eigen::Map<Eigen::VectorXd>;

constexpr char kMagic[4] = {'R', 'T', 'P', 'N'};
constexpr std::uint32_t kCheckpointVersion = 1;

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

template <class T>
void write_raw(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T read_raw(std::ifstream& in) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw Error("truncated checkpoint");
  return v;
}

}  // namespace

MlpShape::MlpShape(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw ConfigError("network needs at least an input and an output width");
  for (auto w : widths_) {
    if (w == 0) throw ConfigError("network widths must be >= 1");
  }
  if (widths_.back() != 1) throw ConfigError("network output width must be 1");
  offsets_.resize(widths_.size() - 1);
  count_ = 0;
  for (std::size_t k = 0; k + 1 < widths_.size(); ++k) {
    offsets_[k] = count_;
    count_ += (widths_[k] + 1) * widths_[k + 1];
  }
}

std::size_t parameter_count(const std::vector<std::size_t>& widths) { return MlpShape(widths).parameter_count(); }

MlpNetwork::MlpNetwork(std::vector<std::size_t> widths)
    : shape_(std::move(widths)), theta_(shape_.parameter_count(), 0.0) {}

void MlpNetwork::set_parameters(std::span<const double> theta) {
  if (theta.size() != theta_.size()) throw ContractError("parameter vector has wrong length");
  std::copy(theta.begin(), theta.end(), theta_.begin());
}

double MlpNetwork::forward(std::span<const double> y) const {
  if (y.size() != input_dim()) throw ContractError("network input has wrong dimension");
  BatchEvaluator eval(shape_);
  Eigen::MatrixXd in = Eigen::Map<const Eigen::MatrixXd>(y.data(), static_cast<Eigen::Index>(y.size()), 1);
  eval.forward(theta_, in);
  return eval.value(0);
}

MlpNetwork init_network(const std::vector<std::size_t>& widths, std::uint64_t seed, InitScheme scheme) {
  (void)scheme;
  MlpNetwork net(widths);
  auto theta = net.parameters();
  const auto& shape = net.shape();
  CounterRng rng(seed, 0x1a2b3c);
  for (std::size_t k = 0; k < shape.layers(); ++k) {
    const double a = std::sqrt(6.0 / static_cast<double>(widths[k] + widths[k + 1]));
    const std::size_t off = shape.weight_offset(k);
    const std::size_t n = widths[k] * widths[k + 1];
    for (std::size_t i = 0; i < n; ++i) theta[off + i] = a * (2.0 * rng.uniform(off + i) - 1.0);
  }
  return net;
}

void tanh_inplace(Eigen::Ref<Eigen::MatrixXd> z) {
  auto a = z.array();
  const Eigen::ArrayXXd e = (-2.0 * a.abs()).exp();
  a = ((1.0 - e) / (1.0 + e)) * a.sign();
}

void BatchEvaluator::forward(std::span<const double> theta, const Eigen::MatrixXd& inputs,
                             const Eigen::MatrixXd& tangents, int n_tangents) {
  if (theta.size() != shape_.parameter_count()) throw ContractError("parameter vector has wrong length");
  if (static_cast<std::size_t>(inputs.rows()) != shape_.input_dim()) {
    throw ContractError("batch input has wrong dimension");
  }
  n_ = static_cast<std::size_t>(inputs.cols());
  n_tan_ = n_tangents;
  const Eigen::Index n = inputs.cols();
  const Eigen::Index cols = n * (1 + n_tangents);
  if (n_tangents > 0 && (tangents.rows() != inputs.rows() || tangents.cols() != n * n_tangents)) {
    throw ContractError("tangent block has wrong shape");
  }
  const std::size_t L = shape_.layers();
  x_.resize(L);
  s_.resize(L > 0 ? L - 1 : 0);
  zt_.resize(L > 0 ? L - 1 : 0);
  const auto& w = shape_.widths();

  x_[0].resize(inputs.rows(), cols);
  x_[0].leftCols(n) = inputs;
  if (n_tangents > 0) x_[0].rightCols(n * n_tangents) = tangents;

  for (std::size_t k = 0; k < L; ++k) {
    const auto rows = static_cast<Eigen::Index>(w[k + 1]);
    const auto in = static_cast<Eigen::Index>(w[k]);
    // Copies into owned storage keep the kernels' blocking independent of the
    // caller's buffer alignment, which would otherwise change the last bit.
    W_ = ConstWeights(theta.data() + shape_.weight_offset(k), rows, in);
    const auto& W = W_;
    const Eigen::VectorXd b = ConstBias(theta.data() + shape_.bias_offset(k), rows);
    if (k + 1 == L) {
      out_.resize(cols);
      out_.leftCols(n).noalias() = W * x_[k].leftCols(n);
      out_.leftCols(n).array() += b[0];
      if (n_tangents > 0) out_.rightCols(n * n_tangents).noalias() = W * x_[k].rightCols(n * n_tangents);
      break;
    }
    // Values and tangents go through separate products so that the values do
    // not depend on how many tangents ride along.
    Eigen::MatrixXd& next = x_[k + 1];
    next.resize(rows, cols);
    next.leftCols(n).noalias() = W * x_[k].leftCols(n);
    next.leftCols(n).colwise() += b;
    if (n_tangents > 0) next.rightCols(n * n_tangents).noalias() = W * x_[k].rightCols(n * n_tangents);
    auto h = next.leftCols(n);
    tanh_inplace(h);
    s_[k] = 1.0 - h.array().square();
    if (n_tangents > 0) {
      zt_[k] = next.rightCols(n * n_tangents);
      for (int j = 0; j < n_tangents; ++j) {
        next.middleCols((j + 1) * n, n).array() *= s_[k].array();
      }
    }
  }
  if (!out_.allFinite()) {
    for (std::size_t k = 1; k < L; ++k) {
      if (!x_[k].allFinite()) throw NumericalError("non-finite activation in layer " + std::to_string(k));
    }
    throw NumericalError("non-finite activation in layer " + std::to_string(L));
  }
}

void BatchEvaluator::backward(std::span<const double> theta, const Eigen::RowVectorXd& seed, std::span<double> grad,
                              Eigen::MatrixXd* input_grad) {
  if (grad.size() != shape_.parameter_count()) throw ContractError("gradient vector has wrong length");
  const Eigen::Index n = static_cast<Eigen::Index>(n_);
  const Eigen::Index cols = n * (1 + n_tan_);
  if (seed.size() != cols) throw ContractError("seed has wrong length");
  const std::size_t L = shape_.layers();
  const auto& w = shape_.widths();

  zbar_ = seed;
  for (std::size_t kk = L; kk-- > 0;) {
    const auto rows = static_cast<Eigen::Index>(w[kk + 1]);
    const auto in = static_cast<Eigen::Index>(w[kk]);
    W_ = ConstWeights(theta.data() + shape_.weight_offset(kk), rows, in);
    const auto& W = W_;
    Weights gW(grad.data() + shape_.weight_offset(kk), rows, in);
    Bias gb(grad.data() + shape_.bias_offset(kk), rows);
    gW_.noalias() = zbar_ * x_[kk].transpose();
    gW += gW_;
    gb_ = zbar_.leftCols(n).rowwise().sum();
    gb += gb_;
    if (kk == 0) {
      if (input_grad != nullptr) *input_grad = W.transpose() * zbar_.leftCols(n);
      break;
    }
    bar_.noalias() = W.transpose() * zbar_;
    // Through h = tanh(z) and hdot_j = s * zdot_j with s = 1 - h^2.
    const std::size_t hk = kk - 1;
    const auto& s = s_[hk];
    auto h = x_[kk].leftCols(n);
    zbar_.resize(bar_.rows(), cols);
    if (n_tan_ > 0) {
      Eigen::ArrayXXd sbar = Eigen::ArrayXXd::Zero(bar_.rows(), n);
      for (int j = 0; j < n_tan_; ++j) {
        const auto hdot_bar = bar_.middleCols((j + 1) * n, n).array();
        sbar += hdot_bar * zt_[hk].middleCols(j * n, n).array();
        zbar_.middleCols((j + 1) * n, n) = (s.array() * hdot_bar).matrix();
      }
      zbar_.leftCols(n) = (s.array() * (bar_.leftCols(n).array() - 2.0 * h.array() * sbar)).matrix();
    } else {
      zbar_.leftCols(n) = (s.array() * bar_.leftCols(n).array()).matrix();
    }
  }
}

EvalRecord eval_with_gradients(const MlpNetwork& net, std::span<const double> y, bool need_param_grads) {
  const std::size_t d = net.input_dim();
  if (y.size() != d) throw ContractError("network input has wrong dimension");
  BatchEvaluator eval(net.shape());
  Eigen::MatrixXd in = Eigen::Map<const Eigen::MatrixXd>(y.data(), static_cast<Eigen::Index>(d), 1);
  const Eigen::MatrixXd tangents = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
  eval.forward(net.parameters(), in, tangents, static_cast<int>(d));
  EvalRecord rec;
  rec.value = eval.value(0);
  rec.input_gradient.resize(d);
  for (std::size_t j = 0; j < d; ++j) rec.input_gradient[j] = eval.derivative(static_cast<int>(j), 0);
  if (!need_param_grads) return rec;
  const std::size_t m = net.parameter_count();
  Eigen::RowVectorXd seed = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(d + 1));
  seed[0] = 1.0;
  rec.param_gradient.assign(m, 0.0);
  eval.backward(net.parameters(), seed, rec.param_gradient);
  rec.mixed_gradient.assign(d, std::vector<double>(m, 0.0));
  for (std::size_t j = 0; j < d; ++j) {
    seed.setZero();
    seed[static_cast<Eigen::Index>(j + 1)] = 1.0;
    eval.backward(net.parameters(), seed, rec.mixed_gradient[j]);
  }
  return rec;
}

void save_checkpoint(const std::filesystem::path& path, const MlpNetwork& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open checkpoint for writing: " + path.string());
  out.write(kMagic, 4);
  write_raw(out, kCheckpointVersion);
  write_raw(out, static_cast<std::uint32_t>(net.widths().size()));
  for (auto w : net.widths()) write_raw(out, static_cast<std::uint32_t>(w));
  write_raw(out, static_cast<std::uint64_t>(net.parameter_count()));
  for (double v : net.parameters()) write_raw(out, v);
  if (!out) throw Error("failed writing checkpoint: " + path.string());
}

MlpNetwork load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path.string());
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0) throw Error("not a checkpoint file: " + path.string());
  const auto version = read_raw<std::uint32_t>(in);
  if (version != kCheckpointVersion) throw Error("unsupported checkpoint version " + std::to_string(version));
  const auto n_widths = read_raw<std::uint32_t>(in);
  std::vector<std::size_t> widths(n_widths);
  for (auto& w : widths) w = read_raw<std::uint32_t>(in);
  MlpNetwork net(widths);
  const auto n_params = read_raw<std::uint64_t>(in);
  if (n_params != net.parameter_count()) throw Error("checkpoint parameter count does not match its widths");
  std::vector<double> theta(n_params);
  for (auto& v : theta) v = read_raw<double>(in);
  net.set_parameters(theta);
  return net;
}

}  // namespace rtpinn
