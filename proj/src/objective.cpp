#include "rtpinn/objective.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rtpinn/errors.hpp"

namespace rtpinn {
namespace {

Eigen::ArrayXd sigmoid(const Eigen::ArrayXd& o) {
  Eigen::ArrayXd s(o.size());
  for (Eigen::Index i = 0; i < o.size(); ++i) {
    s[i] = o[i] >= 0.0 ? 1.0 / (1.0 + std::exp(-o[i])) : std::exp(o[i]) / (1.0 + std::exp(o[i]));
  }
  return s;
}

Eigen::ArrayXd softplus(const Eigen::ArrayXd& o) {
  Eigen::ArrayXd k(o.size());
  for (Eigen::Index i = 0; i < o.size(); ++i) k[i] = rtpinn::softplus(o[i]);
  return k;
}

void put_unit(const DomainDescriptor& domain, const PhasePoint& z, Eigen::MatrixXd& m, Eigen::Index col) {
  domain.to_unit(z, m.col(col).data());
}

double weight_penalty(const MlpShape& shape, std::span<const double> theta, int q, double scale,
                      std::span<double> grad) {
  double s = 0.0;
  for (std::size_t k = 0; k < shape.layers(); ++k) {
    for (std::size_t i = shape.weight_offset(k); i < shape.bias_offset(k); ++i) {
      const double v = theta[i];
      if (q == 2) {
        s += v * v;
        if (!grad.empty()) grad[i] += scale * 2.0 * v;
      } else {
        s += std::abs(v);
        if (!grad.empty()) grad[i] += scale * (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
      }
    }
  }
  return s;
}

void note_nonfinite(const std::vector<double>& r, const char* set, std::ostringstream& out, int& listed) {
  for (std::size_t i = 0; i < r.size() && listed < 8; ++i) {
    if (!std::isfinite(r[i])) {
      out << ' ' << set << '#' << i;
      ++listed;
    }
  }
}

}  // namespace

PinnObjective::PinnObjective(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule,
                             const MlpShape& u_shape, const LossConfig& config, ObjectiveOptions options)
    : config_(config),
      options_(options),
      u_shape_(u_shape),
      u_params_(u_shape.parameter_count()),
      eval_u_(u_shape),
      eval_s_(u_shape),
      eval_k_(MlpShape()) {
  config_.validate();
  if (u_shape.input_dim() != problem.domain.input_dim()) {
    throw ConfigError("network input width " + std::to_string(u_shape.input_dim()) + " does not match the problem (" +
                      std::to_string(problem.domain.input_dim()) + ")");
  }
  build(problem, sets, rule);
}

PinnObjective::PinnObjective(const RteProblem& problem, const TrainingSets& sets, std::vector<double> measured,
                             const SphereRule& rule, const MlpShape& u_shape, const MlpShape& k_shape,
                             const LossConfig& config, bool freeze_absorption, ObjectiveOptions options)
    : config_(config),
      options_(options),
      inverse_(true),
      freeze_(freeze_absorption),
      u_shape_(u_shape),
      k_shape_(k_shape),
      u_params_(u_shape.parameter_count()),
      k_params_(k_shape.parameter_count()),
      eval_u_(u_shape),
      eval_s_(u_shape),
      eval_k_(k_shape) {
  config_.validate();
  if (u_shape.input_dim() != problem.domain.input_dim()) {
    throw ConfigError("intensity network input width does not match the problem");
  }
  if (k_shape.input_dim() != problem.domain.absorption_input_dim()) {
    throw ConfigError("absorption network input width does not match the problem");
  }
  if (sets.data.empty()) throw ConfigError("the inverse problem needs measurement points (N_d > 0)");
  if (measured.size() != sets.data.size()) throw ContractError("one measurement per data point required");
  build(problem, sets, rule);

  const DomainDescriptor& domain = problem.domain;
  const std::size_t in = domain.input_dim();
  const std::size_t per = std::max<std::size_t>(1, options_.chunk_columns / std::max<std::size_t>(1, n_s_));
  for (std::size_t first = 0; first < sets.data.size(); first += per) {
    const std::size_t b = std::min(per, sets.data.size() - first);
    DataChunk c;
    c.first = first;
    c.y.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(b * n_s_));
    c.weight.resize(static_cast<Eigen::Index>(b));
    c.measured.resize(static_cast<Eigen::Index>(b));
    for (std::size_t j = 0; j < b; ++j) {
      const DataPoint& p = sets.data[first + j];
      PhasePoint z;
      z.t = p.t;
      z.x = p.x;
      z.nu = p.nu;
      for (std::size_t i = 0; i < n_s_; ++i) {
        z.omega = rule.directions[i];
        put_unit(domain, z, c.y, static_cast<Eigen::Index>(j * n_s_ + i));
      }
      c.weight[static_cast<Eigen::Index>(j)] = p.weight;
      c.measured[static_cast<Eigen::Index>(j)] = measured[first + j] / problem.intensity_scale;
    }
    data_.push_back(std::move(c));
  }
  r_d_.assign(sets.data.size(), 0.0);
}

void PinnObjective::absorption_inputs(const DomainDescriptor& domain, const std::vector<const PhasePoint*>& pts,
                                      Eigen::MatrixXd& yk) const {
  yk.resize(static_cast<Eigen::Index>(domain.absorption_input_dim()), static_cast<Eigen::Index>(pts.size()));
  for (std::size_t j = 0; j < pts.size(); ++j) {
    domain.absorption_input(pts[j]->x, pts[j]->nu, yk.col(static_cast<Eigen::Index>(j)).data());
  }
}

void PinnObjective::build(const RteProblem& problem, const TrainingSets& sets, const SphereRule& rule) {
  const DomainDescriptor& domain = problem.domain;
  if (rule.dim != domain.spatial_dim()) throw ConfigError("sphere rule dimension does not match the problem");
  if (!(problem.intensity_scale > 0.0)) throw ConfigError("intensity_scale must be > 0");
  spatial_dim_ = domain.spatial_dim();
  n_s_ = rule.size();
  rule_weights_ = rule.weights;
  const std::size_t in = domain.input_dim();
  const double sd = domain.surface_area();

  scatter_ = false;
  if (!problem.scattering_free) {
    for (const auto& p : sets.interior) {
      if (problem.scattering(p.z.x, p.z.nu) != 0.0) {
        scatter_ = true;
        break;
      }
    }
  }

  const std::size_t per_point = 1 + (scatter_ ? n_s_ : 0);
  const std::size_t per = std::max<std::size_t>(1, options_.chunk_columns / per_point);
  const std::size_t d = static_cast<std::size_t>(spatial_dim_);
  for (std::size_t first = 0; first < sets.interior.size(); first += per) {
    const std::size_t b = std::min(per, sets.interior.size() - first);
    const auto B = static_cast<Eigen::Index>(b);
    InteriorChunk c;
    c.first = first;
    c.y.resize(static_cast<Eigen::Index>(in), B);
    c.a.resize(static_cast<Eigen::Index>(in), B);
    c.weight.resize(B);
    c.source.resize(B);
    c.sigma.resize(B);
    c.k_true.resize(B);
    if (scatter_) {
      c.y_scatter.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(b * n_s_));
      c.coef.resize(static_cast<Eigen::Index>(n_s_), B);
    }
    std::vector<const PhasePoint*> pts;
    for (std::size_t j = 0; j < b; ++j) {
      const auto J = static_cast<Eigen::Index>(j);
      const PhasePoint& z = sets.interior[first + j].z;
      pts.push_back(&z);
      put_unit(domain, z, c.y, J);
      domain.transport_tangent(z, problem.light_speed, c.a.col(J).data());
      c.weight[J] = sets.interior[first + j].weight;
      c.source[J] = problem.source(z) / problem.intensity_scale;
      c.sigma[J] = problem.scattering(z.x, z.nu);
      c.k_true[J] = problem.absorption(z.x, z.nu);
      if (scatter_) {
        PhasePoint zi = z;
        for (std::size_t i = 0; i < n_s_; ++i) {
          zi.omega = rule.directions[i];
          zi.nu = rule.frequency(i, z.nu);
          put_unit(domain, zi, c.y_scatter, static_cast<Eigen::Index>(j * n_s_ + i));
          c.coef(static_cast<Eigen::Index>(i), J) =
              c.sigma[J] / sd * rule.weights[i] * problem.kernel(z.omega, rule.directions[i], z.nu, zi.nu);
        }
      }
    }
    if (inverse_) {
      absorption_inputs(domain, pts, c.yk);
      c.yk_tan = Eigen::MatrixXd::Zero(c.yk.rows(), static_cast<Eigen::Index>(b * d));
      for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t j = 0; j < b; ++j) {
          c.yk_tan(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(a * b + j)) =
              domain.spatial_scale(static_cast<int>(a));
        }
      }
    }
    interior_.push_back(std::move(c));
  }

  const auto boundary_chunks = [&](const std::vector<CollocationPoint>& set, bool spatial) {
    std::vector<BoundaryChunk> out;
    const std::size_t step = std::max<std::size_t>(1, options_.chunk_columns);
    for (std::size_t first = 0; first < set.size(); first += step) {
      const std::size_t b = std::min(step, set.size() - first);
      const auto B = static_cast<Eigen::Index>(b);
      BoundaryChunk c;
      c.first = first;
      c.y.resize(static_cast<Eigen::Index>(in), B);
      c.weight.resize(B);
      c.target.resize(B);
      c.k_true.resize(B);
      std::vector<const PhasePoint*> pts;
      for (std::size_t j = 0; j < b; ++j) {
        const auto J = static_cast<Eigen::Index>(j);
        const auto& p = set[first + j];
        pts.push_back(&p.z);
        put_unit(domain, p.z, c.y, J);
        c.weight[J] = p.weight;
        c.target[J] = (spatial ? problem.inflow(p.z, p.normal) : problem.initial(p.z)) / problem.intensity_scale;
        c.k_true[J] = problem.absorption(p.z.x, p.z.nu);
      }
      if (inverse_ && spatial) absorption_inputs(domain, pts, c.yk);
      out.push_back(std::move(c));
    }
    return out;
  };
  sb_ = boundary_chunks(sets.spatial_boundary, true);
  tb_ = boundary_chunks(sets.temporal_boundary, false);
  r_int_.assign(sets.interior.size(), 0.0);
  r_sb_.assign(sets.spatial_boundary.size(), 0.0);
  r_tb_.assign(sets.temporal_boundary.size(), 0.0);
}

double PinnObjective::boundary_term(std::vector<BoundaryChunk>& chunks, std::span<const double> theta_u,
                                    std::span<const double> theta_k, std::span<double> grad_u,
                                    std::span<double> grad_k, std::vector<double>& residuals, double* k_boundary) {
  double sum = 0.0;
  const bool want = !grad_u.empty();
  for (auto& c : chunks) {
    eval_u_.forward(theta_u, c.y);
    const Eigen::ArrayXd u = eval_u_.output().transpose().array();
    const Eigen::ArrayXd r = u - c.target;
    std::copy(r.begin(), r.end(), residuals.begin() + static_cast<std::ptrdiff_t>(c.first));
    sum += (c.weight * r.square()).sum();
    if (want) {
      const Eigen::RowVectorXd seed = (2.0 * c.weight * r).matrix().transpose();
      eval_u_.backward(theta_u, seed, grad_u);
    }
    if (k_boundary != nullptr) {
      eval_k_.forward(theta_k, c.yk);
      const Eigen::ArrayXd o = eval_k_.output().transpose().array();
      const Eigen::ArrayXd rk = softplus(o) - c.k_true;
      *k_boundary += (c.weight * rk.square()).sum();
      if (want) {
        const Eigen::RowVectorXd seed =
            (2.0 * config_.k_boundary_weight * c.weight * rk * sigmoid(o)).matrix().transpose();
        eval_k_.backward(theta_k, seed, grad_k);
      }
    }
  }
  return sum;
}

LossReport PinnObjective::evaluate(std::span<const double> theta, std::span<double> grad) {
  if (theta.size() != dimension()) throw ContractError("parameter vector has wrong length");
  const bool want = !grad.empty();
  if (want) {
    if (grad.size() != dimension()) throw ContractError("gradient vector has wrong length");
    std::fill(grad.begin(), grad.end(), 0.0);
  }
  const auto theta_u = theta.first(u_params_);
  const auto theta_k = theta.subspan(u_params_);
  const std::span<double> grad_u = want ? grad.first(u_params_) : std::span<double>();
  const std::span<double> grad_k = want ? grad.subspan(u_params_) : std::span<double>();
  const bool learn_k = inverse_ && !freeze_;
  const bool tikhonov = learn_k && config_.lambda_k > 0.0;
  const auto d = static_cast<Eigen::Index>(spatial_dim_);
  const auto NS = static_cast<Eigen::Index>(n_s_);

  LossReport raw;
  for (auto& c : interior_) {
    const Eigen::Index B = c.y.cols();
    eval_u_.forward(theta_u, c.y, c.a, 1);
    const Eigen::ArrayXd u = eval_u_.output().head(B).transpose().array();
    const Eigen::ArrayXd du = eval_u_.output().segment(B, B).transpose().array();
    Eigen::ArrayXd scattered = Eigen::ArrayXd::Zero(B);
    if (scatter_) {
      eval_s_.forward(theta_u, c.y_scatter);
      const Eigen::Map<const Eigen::MatrixXd> v(eval_s_.output().data(), NS, B);
      scattered = (c.coef.array() * v.array()).colwise().sum().transpose();
    }
    Eigen::ArrayXd kcoef;
    Eigen::ArrayXd o, s;
    if (learn_k) {
      if (tikhonov) {
        eval_k_.forward(theta_k, c.yk, c.yk_tan, static_cast<int>(d));
      } else {
        eval_k_.forward(theta_k, c.yk);
      }
      o = eval_k_.output().head(B).transpose().array();
      s = sigmoid(o);
      kcoef = softplus(o) + c.sigma;
    } else {
      kcoef = c.k_true + c.sigma;
    }
    const Eigen::ArrayXd r = du + kcoef * u - scattered - c.source;
    std::copy(r.begin(), r.end(), r_int_.begin() + static_cast<std::ptrdiff_t>(c.first));
    raw.interior += (c.weight * r.square()).sum();

    Eigen::ArrayXd grad_norm2;
    if (tikhonov) {
      grad_norm2 = Eigen::ArrayXd::Zero(B);
      for (Eigen::Index a = 0; a < d; ++a) {
        grad_norm2 += eval_k_.output().segment((a + 1) * B, B).transpose().array().square();
      }
      raw.tikhonov += (c.weight * s.square() * grad_norm2).sum();
    }
    if (!want) continue;

    const Eigen::ArrayXd g = 2.0 * config_.lambda * c.weight * r;
    Eigen::RowVectorXd seed(2 * B);
    seed.head(B) = (g * kcoef).matrix().transpose();
    seed.segment(B, B) = g.matrix().transpose();
    eval_u_.backward(theta_u, seed, grad_u);
    if (scatter_) {
      Eigen::MatrixXd sseed = -(c.coef.array().rowwise() * g.transpose()).matrix();
      const Eigen::Map<const Eigen::RowVectorXd> flat(sseed.data(), NS * B);
      eval_s_.backward(theta_u, flat, grad_u);
    }
    if (learn_k) {
      Eigen::RowVectorXd kseed(B * (1 + (tikhonov ? d : 0)));
      Eigen::ArrayXd ob = g * u * s;
      if (tikhonov) {
        const Eigen::ArrayXd scale = config_.lambda_k * c.weight * 2.0 * s.square();
        ob += scale * (1.0 - s) * grad_norm2;
        for (Eigen::Index a = 0; a < d; ++a) {
          kseed.segment((a + 1) * B, B) =
              (scale * eval_k_.output().segment((a + 1) * B, B).transpose().array()).matrix().transpose();
        }
      }
      kseed.head(B) = ob.matrix().transpose();
      eval_k_.backward(theta_k, kseed, grad_k);
    }
  }

  double k_boundary = 0.0;
  raw.spatial_boundary =
      boundary_term(sb_, theta_u, theta_k, grad_u, grad_k, r_sb_, learn_k ? &k_boundary : nullptr);
  raw.k_boundary = k_boundary;
  raw.temporal_boundary = boundary_term(tb_, theta_u, theta_k, grad_u, grad_k, r_tb_, nullptr);

  const Eigen::Map<const Eigen::VectorXd> rw(rule_weights_.data(), NS);
  for (auto& c : data_) {
    const Eigen::Index B = c.weight.size();
    eval_s_.forward(theta_u, c.y);
    const Eigen::Map<const Eigen::MatrixXd> v(eval_s_.output().data(), NS, B);
    const Eigen::ArrayXd gm = (rw.transpose() * v).transpose().array();
    const Eigen::ArrayXd r = gm - c.measured;
    std::copy(r.begin(), r.end(), r_d_.begin() + static_cast<std::ptrdiff_t>(c.first));
    raw.data += (c.weight * r.square()).sum();
    if (!want) continue;
    const Eigen::MatrixXd sseed = rw * (2.0 * c.weight * r).matrix().transpose();
    const Eigen::Map<const Eigen::RowVectorXd> flat(sseed.data(), NS * B);
    eval_s_.backward(theta_u, flat, grad_u);
  }

  if (config_.lambda_reg > 0.0) {
    raw.reg = weight_penalty(u_shape_, theta_u, config_.q, config_.lambda_reg, grad_u);
    if (learn_k) raw.reg += weight_penalty(k_shape_, theta_k, config_.q, config_.lambda_reg, grad_k);
  }

  LossReport report = combine(raw, config_);
  if (!std::isfinite(report.total)) {
    std::ostringstream msg;
    msg << "non-finite loss; offending points:";
    int listed = 0;
    note_nonfinite(r_int_, "interior", msg, listed);
    note_nonfinite(r_sb_, "spatial_boundary", msg, listed);
    note_nonfinite(r_tb_, "temporal_boundary", msg, listed);
    note_nonfinite(r_d_, "data", msg, listed);
    if (listed == 0) msg << " none (non-finite parameters or regularization)";
    throw NumericalError(msg.str());
  }
  return report;
}

}  // namespace rtpinn
