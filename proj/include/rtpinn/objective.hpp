#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "rtpinn/network.hpp"
#include "rtpinn/problems.hpp"
#include "rtpinn/residuals.hpp"
#include "rtpinn/training_sets.hpp"

namespace rtpinn {

// A loss with its gradient. `grad` may be empty when only the value is needed;
// otherwise it is overwritten.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t dimension() const = 0;
  virtual LossReport evaluate(std::span<const double> theta, std::span<double> grad) = 0;
};

struct ObjectiveOptions {
  // Target number of network columns (points times quadrature nodes) per batch.
  std::size_t chunk_columns = 2048;
};

// Full-batch PINN loss over fixed training sets, assembled with batched
// network passes. In inverse mode theta = [theta_u | theta_k] and the
// absorption is k_theta = softplus(net_k(x, nu)).
class PinnObjective final : public Objective {
 public:
  // Forward problem.
  PinnObjective(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule, const MlpShape& u_shape,
                const LossConfig& config, ObjectiveOptions options = {});
  // Inverse problem with measured incident radiation at sets.data. With
  // `freeze_absorption` the true k of `problem` is used instead of k_theta
  // (theta_k then receives zero gradient).
  PinnObjective(const RteProblem& problem, const TrainingSets& sets, std::vector<double> measured,
                const SphereRule& rule, const MlpShape& u_shape, const MlpShape& k_shape, const LossConfig& config,
                bool freeze_absorption = false, ObjectiveOptions options = {});

  std::size_t dimension() const override { return u_params_ + k_params_; }
  std::size_t u_parameter_count() const { return u_params_; }
  std::size_t k_parameter_count() const { return k_params_; }
  bool inverse() const { return inverse_; }
  const LossConfig& config() const { return config_; }

  LossReport evaluate(std::span<const double> theta, std::span<double> grad) override;

  // Residuals of the last evaluate() call, in training-set order.
  const std::vector<double>& interior_residuals() const { return r_int_; }
  const std::vector<double>& spatial_boundary_residuals() const { return r_sb_; }
  const std::vector<double>& temporal_boundary_residuals() const { return r_tb_; }
  const std::vector<double>& data_residuals() const { return r_d_; }

 private:
  struct InteriorChunk {
    std::size_t first = 0;
    Eigen::MatrixXd y;         // in x B
    Eigen::MatrixXd a;         // transport tangents, in x B
    Eigen::MatrixXd y_scatter; // in x (B * N_S), point-major
    Eigen::MatrixXd coef;      // N_S x B: (sigma / s_d) w_i Phi
    Eigen::MatrixXd yk;        // absorption-net inputs, in_k x B
    Eigen::MatrixXd yk_tan;    // in_k x (B * d): spatial unit tangents scaled to physical units
    Eigen::ArrayXd weight, source, sigma, k_true;
  };
  struct BoundaryChunk {
    std::size_t first = 0;
    Eigen::MatrixXd y;
    Eigen::MatrixXd yk;
    Eigen::ArrayXd weight, target, k_true;
  };
  struct DataChunk {
    std::size_t first = 0;
    Eigen::MatrixXd y;  // in x (B * N_S)
    Eigen::ArrayXd weight, measured;
  };

  void build(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule);
  void absorption_inputs(const DomainDescriptor& domain, const std::vector<const PhasePoint*>& pts,
                         Eigen::MatrixXd& yk) const;
  double boundary_term(std::vector<BoundaryChunk>& chunks, std::span<const double> theta_u,
                       std::span<const double> theta_k, std::span<double> grad_u, std::span<double> grad_k,
                       std::vector<double>& residuals, double* k_boundary);

  LossConfig config_;
  ObjectiveOptions options_;
  bool inverse_ = false;
  bool freeze_ = false;
  bool scatter_ = false;
  int spatial_dim_ = 1;
  MlpShape u_shape_;
  MlpShape k_shape_;
  std::size_t u_params_ = 0;
  std::size_t k_params_ = 0;
  std::size_t n_s_ = 0;
  std::vector<double> rule_weights_;
  std::vector<InteriorChunk> interior_;
  std::vector<BoundaryChunk> sb_;
  std::vector<BoundaryChunk> tb_;
  std::vector<DataChunk> data_;
  std::vector<double> r_int_, r_sb_, r_tb_, r_d_;
  BatchEvaluator eval_u_;
  BatchEvaluator eval_s_;
  BatchEvaluator eval_k_;
};

}  // namespace rtpinn
