#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace rtpinn {

// Layer widths [d_1, ..., d_K] with d_1 the input size and d_K = 1. Parameters
// are stored flat, layer by layer: W_k row-major (d_{k+1} x d_k), then b_k.
class MlpShape {
 public:
  MlpShape() = default;
  explicit MlpShape(std::vector<std::size_t> widths);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t input_dim() const { return widths_.front(); }
  std::size_t output_dim() const { return widths_.back(); }
  // Number of affine maps, K - 1.
  std::size_t layers() const { return widths_.size() - 1; }
  std::size_t parameter_count() const { return count_; }
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + widths_[layer + 1] * widths_[layer]; }

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
  std::size_t count_ = 0;
};

std::size_t parameter_count(const std::vector<std::size_t>& widths);

class MlpNetwork {
 public:
  MlpNetwork() = default;
  // All parameters zero.
  explicit MlpNetwork(std::vector<std::size_t> widths);

  const MlpShape& shape() const { return shape_; }
  const std::vector<std::size_t>& widths() const { return shape_.widths(); }
  std::size_t input_dim() const { return shape_.input_dim(); }
  std::size_t parameter_count() const { return shape_.parameter_count(); }

  std::span<double> parameters() { return theta_; }
  std::span<const double> parameters() const { return theta_; }
  void set_parameters(std::span<const double> theta);

  double forward(std::span<const double> y) const;

 private:
  MlpShape shape_;
  std::vector<double> theta_;
};

enum class InitScheme { xavier_uniform };

// W_k ~ U(-a, a) with a = sqrt(6 / (d_k + d_{k+1})), b_k = 0.
MlpNetwork init_network(const std::vector<std::size_t>& widths, std::uint64_t seed,
                        InitScheme scheme = InitScheme::xavier_uniform);

struct EvalRecord {
  double value = 0.0;
  std::vector<double> input_gradient;
  std::vector<double> param_gradient;  // du/dtheta
  // mixed_gradient[j] = d(du/dy_j)/dtheta
  std::vector<std::vector<double>> mixed_gradient;
};

EvalRecord eval_with_gradients(const MlpNetwork& net, std::span<const double> y, bool need_param_grads);

// Column-batched evaluation of u and of directional input derivatives.
//
// For n points stacked as columns of `inputs` and T tangent blocks (each
// in_dim x n, concatenated left to right in `tangents`), forward() computes
// u(y_i) and D_{a_ij} u(y_i). backward() accumulates into `grad` the
// parameter gradient of sum_i (ubar_i u_i + sum_j abar_ij D_{a_ij} u_i).
class BatchEvaluator {
 public:
  explicit BatchEvaluator(const MlpShape& shape) : shape_(shape) {}

  void forward(std::span<const double> theta, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& tangents,
               int n_tangents);
  void forward(std::span<const double> theta, const Eigen::MatrixXd& inputs) {
    forward(theta, inputs, Eigen::MatrixXd(), 0);
  }

  std::size_t batch() const { return n_; }
  int tangent_count() const { return n_tan_; }
  // Row vector of length n(1+T): values, then tangent block j at [(j+1)n, (j+2)n).
  const Eigen::RowVectorXd& output() const { return out_; }
  double value(std::size_t i) const { return out_[static_cast<Eigen::Index>(i)]; }
  double derivative(int j, std::size_t i) const {
    return out_[static_cast<Eigen::Index>((j + 1) * n_ + i)];
  }

  // `seed` has the layout of output(). Also returns the input gradient of the
  // value seeds when `input_grad` is non-null (in_dim x n).
  void backward(std::span<const double> theta, const Eigen::RowVectorXd& seed, std::span<double> grad,
                Eigen::MatrixXd* input_grad = nullptr);

 private:
  MlpShape shape_;
  std::size_t n_ = 0;
  int n_tan_ = 0;
  // x_[k]: layer input (values | tangents), k = 0 .. L-1
  std::vector<Eigen::MatrixXd> x_;
  // s_[k]: 1 - tanh^2 of hidden layer k (values only)
  std::vector<Eigen::MatrixXd> s_;
  // zt_[k]: pre-activation tangents of hidden layer k
  std::vector<Eigen::MatrixXd> zt_;
  Eigen::RowVectorXd out_;
  Eigen::MatrixXd bar_;
  Eigen::MatrixXd zbar_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> W_, gW_;
  Eigen::VectorXd gb_;
};

// Elementwise tanh via exp(-2|z|), which vectorizes for doubles.
void tanh_inplace(Eigen::Ref<Eigen::MatrixXd> z);

// Checkpoint layout, little-endian:
//   "RTPN" | u32 version (1) | u32 n_widths | u32 widths[n_widths] | u64 n_params | f64 theta[n_params]
void save_checkpoint(const std::filesystem::path& path, const MlpNetwork& net);
MlpNetwork load_checkpoint(const std::filesystem::path& path);

}  // namespace rtpinn
