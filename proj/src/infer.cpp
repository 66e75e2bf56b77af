#include "csp/infer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include <Eigen/Cholesky>

namespace csp {

namespace {

// Normalizes log weights into probabilities.
Eigen::VectorXd softmax(const std::vector<double>& log_w) {
  const double top = *std::max_element(log_w.begin(), log_w.end());
  Eigen::VectorXd p(static_cast<Eigen::Index>(log_w.size()));
  for (std::size_t j = 0; j < log_w.size(); ++j) p[static_cast<Eigen::Index>(j)] = std::exp(log_w[j] - top);
  return p / p.sum();
}

void require_conjugate(const ClusterLikelihood& model) {
  if (!model.conjugate()) {
    throw UnsupportedConfiguration("collapsed Gibbs needs a posterior predictive; model '" + model.name() +
                                   "' is not conjugate");
  }
}

// Log weights over the blocks of `blocks` (a copy with x_i already removed
// and empty blocks erased) followed by a new block.
std::vector<double> log_seat_weights(const std::vector<GaussianStats>& blocks, const CrpParams& params,
                                     const ClusterLikelihood& model, double x) {
  std::vector<int> counts;
  counts.reserve(blocks.size());
  for (const GaussianStats& b : blocks) counts.push_back(b.count);
  const Eigen::VectorXd prior = crp_predict(params, counts);
  std::vector<double> log_w(blocks.size() + 1);
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    log_w[k] = std::log(prior[static_cast<Eigen::Index>(k)]) + model.log_predictive(blocks[k], x);
  }
  log_w.back() = std::log(prior[prior.size() - 1]) + model.log_predictive(GaussianStats{}, x);
  return log_w;
}

// Takes index i out of its block; erases the block if it empties.
void detach(MixtureState& state, double x, int i) {
  const int b = state.assignments[i];
  state.blocks[b].remove(x);
  if (state.blocks[b].count == 0) {
    state.blocks.erase(state.blocks.begin() + b);
    for (int& a : state.assignments) {
      if (a > b) --a;
    }
  }
  state.assignments[i] = -1;
}

// Renumbers blocks in order of first appearance.
void relabel(MixtureState& state) {
  std::vector<int> map(state.blocks.size(), -1);
  std::vector<GaussianStats> blocks;
  blocks.reserve(state.blocks.size());
  for (int& a : state.assignments) {
    if (map[a] < 0) {
      map[a] = static_cast<int>(blocks.size());
      blocks.push_back(state.blocks[a]);
    }
    a = map[a];
  }
  state.blocks = std::move(blocks);
}

}  // namespace

// ---------------------------------------------------------------------------
// Likelihoods

double ClusterLikelihood::log_predictive(const GaussianStats&, double) const {
  throw UnsupportedConfiguration("model '" + name() + "' has no closed-form posterior predictive");
}

double ClusterLikelihood::log_marginal(const GaussianStats&) const {
  throw UnsupportedConfiguration("model '" + name() + "' has no closed-form marginal likelihood");
}

ClusterParam ClusterLikelihood::sample_posterior(const GaussianStats&, Rng&) const {
  throw UnsupportedConfiguration("model '" + name() + "' has no exact posterior sampler");
}

NormalNigLikelihood::NormalNigLikelihood(double m0_, double kappa0_, double a0_, double b0_)
    : m0(m0_), kappa0(kappa0_), a0(a0_), b0(b0_) {
  if (!(kappa0 > 0.0) || !(a0 > 0.0) || !(b0 > 0.0)) {
    throw std::domain_error("NormalNigLikelihood: kappa0, a0, b0 must be positive");
  }
}

NormalNigLikelihood::Posterior NormalNigLikelihood::posterior(const GaussianStats& block) const {
  if (block.count == 0) return {m0, kappa0, a0, b0};
  const double n = block.count;
  const double mean = block.sum / n;
  const double scatter = std::max(0.0, block.sum_sq - block.sum * mean);
  const double kappa = kappa0 + n;
  return {(kappa0 * m0 + block.sum) / kappa, kappa, a0 + 0.5 * n,
          b0 + 0.5 * scatter + 0.5 * kappa0 * n * (mean - m0) * (mean - m0) / kappa};
}

double NormalNigLikelihood::log_density(double x, const ClusterParam& p) const {
  const double d = x - p.mean;
  return -0.5 * std::log(2.0 * std::numbers::pi * p.variance) - 0.5 * d * d / p.variance;
}

ClusterParam NormalNigLikelihood::sample_prior(Rng& rng) const {
  const double variance = b0 / gamma_variate(a0, rng);
  return {m0 + std::sqrt(variance / kappa0) * normal(rng), variance};
}

double NormalNigLikelihood::log_predictive(const GaussianStats& block, double x) const {
  const Posterior post = posterior(block);
  // Student t with 2a degrees of freedom.
  const double dof = 2.0 * post.a;
  const double scale2 = post.b * (post.kappa + 1.0) / (post.a * post.kappa);
  const double d = x - post.m;
  return std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof) -
         0.5 * std::log(dof * std::numbers::pi * scale2) -
         0.5 * (dof + 1.0) * std::log1p(d * d / (dof * scale2));
}

double NormalNigLikelihood::log_marginal(const GaussianStats& block) const {
  const Posterior post = posterior(block);
  return std::lgamma(post.a) - std::lgamma(a0) + a0 * std::log(b0) - post.a * std::log(post.b) +
         0.5 * std::log(kappa0 / post.kappa) - 0.5 * block.count * std::log(2.0 * std::numbers::pi);
}

ClusterParam NormalNigLikelihood::sample_posterior(const GaussianStats& block, Rng& rng) const {
  const Posterior post = posterior(block);
  const double variance = post.b / gamma_variate(post.a, rng);
  return {post.m + std::sqrt(variance / post.kappa) * normal(rng), variance};
}

// ---------------------------------------------------------------------------
// CRP mixture

Partition MixtureState::partition() const { return induced_partition(assignments); }

MixtureState make_mixture_state(const CrpParams& params, std::span<const double> data,
                                std::vector<int> assignments) {
  if (assignments.size() != data.size()) {
    throw std::invalid_argument("make_mixture_state: data and assignments differ in length");
  }
  MixtureState state{std::move(assignments), {}, params};
  for (int a : state.assignments) {
    if (a < 0) throw std::invalid_argument("make_mixture_state: negative block label");
  }
  const Partition p = induced_partition(state.assignments);
  state.assignments = p.appearance_labels();
  for (int& a : state.assignments) --a;
  state.blocks.resize(p.num_blocks());
  for (std::size_t i = 0; i < data.size(); ++i) state.blocks[state.assignments[i]].add(data[i]);
  return state;
}

GibbsConditional crp_gibbs_conditional(const MixtureState& state, std::span<const double> data,
                                       const ClusterLikelihood& model, int i) {
  require_conjugate(model);
  const int n = static_cast<int>(data.size());
  if (i < 0 || i >= n) throw std::out_of_range("crp_gibbs_conditional: index out of range");
  MixtureState rest = state;
  detach(rest, data[i], i);
  const Eigen::VectorXd by_id = softmax(log_seat_weights(rest.blocks, rest.params, model, data[i]));

  // Reorder existing blocks by first appearance among the other indices.
  std::vector<int> labels;
  std::vector<int> rank(rest.blocks.size(), -1);
  int next = 0;
  for (int j = 0; j < n; ++j) {
    if (j == i) continue;
    const int a = rest.assignments[j];
    if (rank[a] < 0) rank[a] = next++;
    labels.push_back(a);
  }
  GibbsConditional out;
  out.probs.resize(by_id.size());
  for (std::size_t b = 0; b < rank.size(); ++b) out.probs[rank[b]] = by_id[static_cast<Eigen::Index>(b)];
  out.probs[out.probs.size() - 1] = by_id[by_id.size() - 1];
  out.rest = induced_partition(labels);
  return out;
}

void crp_gibbs_sweep(MixtureState& state, std::span<const double> data, const ClusterLikelihood& model,
                     Rng& rng) {
  require_conjugate(model);
  const int n = static_cast<int>(data.size());
  if (static_cast<int>(state.assignments.size()) != n) {
    throw std::invalid_argument("crp_gibbs_sweep: data and assignments differ in length");
  }
  for (int i = 0; i < n; ++i) {
    const double x = data[i];
    detach(state, x, i);
    const Eigen::VectorXd probs = softmax(log_seat_weights(state.blocks, state.params, model, x));
    const int choice = categorical(probs, rng);
    if (choice == static_cast<int>(state.blocks.size())) state.blocks.emplace_back();
    state.blocks[choice].add(x);
    state.assignments[i] = choice;
  }
  relabel(state);
}

double mixture_log_joint(const MixtureState& state, const ClusterLikelihood& model) {
  std::vector<int> sizes;
  double value = 0.0;
  for (const GaussianStats& b : state.blocks) {
    sizes.push_back(b.count);
    value += model.log_marginal(b);
  }
  return value + eppf_crp(state.params, sizes).log_prob;
}

std::vector<ClusterParam> sample_cluster_parameters(const MixtureState& state,
                                                    const ClusterLikelihood& model, Rng& rng) {
  std::vector<ClusterParam> params;
  params.reserve(state.blocks.size());
  for (const GaussianStats& b : state.blocks) params.push_back(model.sample_posterior(b, rng));
  return params;
}

MixtureSample crp_mixture_forward(const CrpParams& params, const ClusterLikelihood& model, int n,
                                  Rng& rng) {
  const Partition p = crp_sample(params, n, rng);
  std::vector<ClusterParam> cluster;
  cluster.reserve(p.num_blocks());
  for (int k = 0; k < p.num_blocks(); ++k) cluster.push_back(model.sample_prior(rng));
  std::vector<int> labels = p.appearance_labels();
  for (int& a : labels) --a;
  std::vector<double> data(n);
  for (int i = 0; i < n; ++i) {
    const ClusterParam& c = cluster[labels[i]];
    data[i] = c.mean + std::sqrt(c.variance) * normal(rng);
  }
  MixtureSample out{make_mixture_state(params, data, labels), std::move(data)};
  return out;
}

void regenerate_mixture_data(MixtureSample& sample, const ClusterLikelihood& model, Rng& rng) {
  const std::vector<ClusterParam> cluster = sample_cluster_parameters(sample.state, model, rng);
  for (GaussianStats& b : sample.state.blocks) b = GaussianStats{};
  for (std::size_t i = 0; i < sample.data.size(); ++i) {
    const int a = sample.state.assignments[i];
    const double x = cluster[a].mean + std::sqrt(cluster[a].variance) * normal(rng);
    sample.data[i] = x;
    sample.state.blocks[a].add(x);
  }
}

// ---------------------------------------------------------------------------
// Linear-Gaussian feature model

LinearGaussianModel::LinearGaussianModel(double noise_sd_, double feature_sd_)
    : noise_sd(noise_sd_), feature_sd(feature_sd_) {
  if (!(noise_sd > 0.0) || !(feature_sd > 0.0)) {
    throw std::domain_error("LinearGaussianModel: standard deviations must be positive");
  }
}

FeatureAllocation FeatureState::allocation() const { return from_membership_matrix(z); }

void prune_dead_features(FeatureState& state) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < state.z.cols(); ++k) {
    if (state.z.col(k).sum() > 0) keep.push_back(k);
  }
  if (static_cast<Eigen::Index>(keep.size()) == state.z.cols()) return;
  Eigen::MatrixXi z(state.z.rows(), static_cast<Eigen::Index>(keep.size()));
  Eigen::MatrixXd a(static_cast<Eigen::Index>(keep.size()), state.a.cols());
  for (std::size_t j = 0; j < keep.size(); ++j) {
    z.col(static_cast<Eigen::Index>(j)) = state.z.col(keep[j]);
    a.row(static_cast<Eigen::Index>(j)) = state.a.row(keep[j]);
  }
  state.z = std::move(z);
  state.a = std::move(a);
}

namespace {

Eigen::MatrixXd normal_matrix(Eigen::Index rows, Eigen::Index cols, double sd, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = sd * normal(rng);
  }
  return m;
}

void resample_loadings(FeatureState& state, const Eigen::MatrixXd& data, const LinearGaussianModel& model,
                       Rng& rng) {
  const Eigen::Index k = state.z.cols();
  if (k == 0) {
    state.a.resize(0, data.cols());
    return;
  }
  const double noise_var = model.noise_sd * model.noise_sd;
  const Eigen::MatrixXd zd = state.z.cast<double>();
  Eigen::MatrixXd precision = zd.transpose() * zd / noise_var;
  precision.diagonal().array() += 1.0 / (model.feature_sd * model.feature_sd);
  const Eigen::LLT<Eigen::MatrixXd> llt(precision);
  const Eigen::MatrixXd mean = llt.solve(zd.transpose() * data / noise_var);
  const Eigen::MatrixXd xi = normal_matrix(k, data.cols(), 1.0, rng);
  state.a = mean + llt.matrixU().solve(xi);
}

}  // namespace

namespace {

// Log weights of every membership pattern of one row over `shared`
// (bit j of the pattern = membership in shared[j]), given the row target
// after the features the row owns alone are subtracted.
std::vector<double> pattern_log_weights(const Eigen::RowVectorXd& target, const std::vector<Eigen::Index>& shared,
                                        const std::vector<double>& prior_on, const Eigen::MatrixXd& a,
                                        double two_var) {
  const int m = static_cast<int>(shared.size());
  std::vector<double> log_w(std::size_t{1} << m);
  for (std::size_t mask = 0; mask < log_w.size(); ++mask) {
    Eigen::RowVectorXd r = target;
    double lp = 0.0;
    for (int j = 0; j < m; ++j) {
      if (mask >> j & 1) {
        r -= a.row(shared[j]);
        lp += std::log(prior_on[j]);
      } else {
        lp += std::log1p(-prior_on[j]);
      }
    }
    log_w[mask] = lp - r.squaredNorm() / two_var;
  }
  return log_w;
}

double log_sum_exp(const std::vector<double>& v) {
  const double top = *std::max_element(v.begin(), v.end());
  double total = 0.0;
  for (double x : v) total += std::exp(x - top);
  return top + std::log(total);
}

}  // namespace

void ibp_gibbs_sweep(FeatureState& state, const Eigen::MatrixXd& data, const LinearGaussianModel& model,
                     Rng& rng, const IbpSweepOptions& options) {
  const Eigen::Index n = data.rows();
  const Eigen::Index dims = data.cols();
  if (state.z.rows() != n || state.a.rows() != state.z.cols() || (state.z.cols() > 0 && state.a.cols() != dims)) {
    throw std::invalid_argument("ibp_gibbs_sweep: inconsistent dimensions");
  }
  if (state.z.cols() == 0) state.a.resize(0, dims);
  const double two_var = 2.0 * model.noise_sd * model.noise_sd;
  const double denom = state.params.theta + n - 1.0;
  const double fresh_rate = state.params.gamma * state.params.theta / denom;

  Eigen::MatrixXd residual = data - state.z.cast<double>() * state.a;
  Eigen::VectorXi counts = state.z.colwise().sum().transpose();

  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Eigen::Index> shared;
    std::vector<double> prior_on;
    for (Eigen::Index k = 0; k < state.z.cols(); ++k) {
      const int others = counts[k] - state.z(i, k);
      if (others > 0) {
        shared.push_back(k);
        prior_on.push_back(others / denom);
      }
    }
    const bool joint = static_cast<int>(shared.size()) <= options.joint_row_limit;

    if (!joint) {
      for (std::size_t j = 0; j < shared.size(); ++j) {
        const Eigen::Index k = shared[j];
        const Eigen::RowVectorXd off = residual.row(i) + state.z(i, k) * state.a.row(k);
        const Eigen::RowVectorXd on = off - state.a.row(k);
        const double log_on = std::log(prior_on[j]) - on.squaredNorm() / two_var;
        const double log_off = std::log1p(-prior_on[j]) - off.squaredNorm() / two_var;
        const int value = bernoulli(1.0 / (1.0 + std::exp(log_off - log_on)), rng) ? 1 : 0;
        counts[k] += value - state.z(i, k);
        state.z(i, k) = value;
        residual.row(i) = value ? on : off;
      }
    }

    // Features owned by i alone: replaced by Poisson(fresh_rate) prior draws.
    // In joint mode the shared pattern is integrated out of the acceptance
    // ratio and then drawn exactly given the surviving owned features.
    std::vector<Eigen::Index> owned;
    Eigen::RowVectorXd owned_sum = Eigen::RowVectorXd::Zero(dims);
    for (Eigen::Index k = 0; k < state.z.cols(); ++k) {
      if (state.z(i, k) == 1 && counts[k] == 1) {
        owned.push_back(k);
        owned_sum += state.a.row(k);
      }
    }
    const int proposed = poisson_variate(fresh_rate, rng);
    const Eigen::MatrixXd loadings = normal_matrix(proposed, dims, model.feature_sd, rng);
    const Eigen::RowVectorXd fresh_sum = loadings.colwise().sum();

    double log_ratio;
    std::vector<double> log_w_old;
    std::vector<double> log_w_new;
    if (joint) {
      log_w_old = pattern_log_weights(data.row(i) - owned_sum, shared, prior_on, state.a, two_var);
      log_w_new = pattern_log_weights(data.row(i) - fresh_sum, shared, prior_on, state.a, two_var);
      log_ratio = log_sum_exp(log_w_new) - log_sum_exp(log_w_old);
    } else {
      const Eigen::RowVectorXd candidate = residual.row(i) + owned_sum - fresh_sum;
      log_ratio = (residual.row(i).squaredNorm() - candidate.squaredNorm()) / two_var;
    }
    const bool accept = log_ratio >= 0.0 || uniform(rng) < std::exp(log_ratio);
    if (accept) {
      residual.row(i) += owned_sum - fresh_sum;
      for (Eigen::Index k : owned) {
        state.z(i, k) = 0;
        counts[k] = 0;
      }
      const Eigen::Index old_k = state.z.cols();
      state.z.conservativeResize(n, old_k + proposed);
      state.a.conservativeResize(old_k + proposed, dims);
      counts.conservativeResize(old_k + proposed);
      for (int j = 0; j < proposed; ++j) {
        state.z.col(old_k + j).setZero();
        state.z(i, old_k + j) = 1;
        state.a.row(old_k + j) = loadings.row(j);
        counts[old_k + j] = 1;
      }
    }
    if (joint && !shared.empty()) {
      const Eigen::RowVectorXd owned_now = accept ? fresh_sum : owned_sum;
      const int pick = categorical(softmax(accept ? log_w_new : log_w_old), rng);
      Eigen::RowVectorXd r = data.row(i) - owned_now;
      for (std::size_t j = 0; j < shared.size(); ++j) {
        const Eigen::Index k = shared[j];
        const int value = pick >> j & 1;
        counts[k] += value - state.z(i, k);
        state.z(i, k) = value;
        if (value) r -= state.a.row(k);
      }
      residual.row(i) = r;
    }
    if (accept && !owned.empty()) {
      prune_dead_features(state);
      counts = state.z.colwise().sum().transpose();
    }
  }
  prune_dead_features(state);
  resample_loadings(state, data, model, rng);
}

double feature_log_likelihood(const FeatureState& state, const Eigen::MatrixXd& data,
                              const LinearGaussianModel& model) {
  const double var = model.noise_sd * model.noise_sd;
  const Eigen::MatrixXd residual =
      state.z.cols() > 0 ? Eigen::MatrixXd(data - state.z.cast<double>() * state.a) : data;
  return -0.5 * residual.squaredNorm() / var -
         0.5 * static_cast<double>(data.size()) * std::log(2.0 * std::numbers::pi * var);
}

double feature_log_joint(const FeatureState& state, const Eigen::MatrixXd& data,
                         const LinearGaussianModel& model) {
  const double var = model.feature_sd * model.feature_sd;
  const double prior_a = -0.5 * state.a.squaredNorm() / var -
                         0.5 * static_cast<double>(state.a.size()) * std::log(2.0 * std::numbers::pi * var);
  return feature_log_likelihood(state, data, model) + prior_a +
         ibp_allocation_log_prob(state.params, state.allocation()).log_prob;
}

FeatureSample ibp_model_forward(const IbpParams& params, const LinearGaussianModel& model, int n, int dims,
                                Rng& rng) {
  if (dims < 1) throw std::domain_error("ibp_model_forward: dims must be >= 1");
  FeatureSample out{FeatureState{membership_matrix(ibp_sample(params, n, rng)), {}, params}, {}};
  out.state.a = normal_matrix(out.state.z.cols(), dims, model.feature_sd, rng);
  out.data = Eigen::MatrixXd::Zero(n, dims);
  regenerate_feature_data(out, model, rng);
  return out;
}

void regenerate_feature_data(FeatureSample& sample, const LinearGaussianModel& model, Rng& rng) {
  const Eigen::Index n = sample.state.z.rows();
  const Eigen::Index dims = sample.data.cols();
  Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(n, dims);
  if (sample.state.z.cols() > 0) mean = sample.state.z.cast<double>() * sample.state.a;
  sample.data = mean + normal_matrix(n, dims, model.noise_sd, rng);
}

// ---------------------------------------------------------------------------
// Summaries

double adjusted_rand_index(const Partition& a, const Partition& b) {
  if (a.n() != b.n()) throw std::invalid_argument("adjusted_rand_index: partitions of different sets");
  const std::vector<int> la = a.appearance_labels();
  const std::vector<int> lb = b.appearance_labels();
  Eigen::MatrixXd table = Eigen::MatrixXd::Zero(a.num_blocks(), b.num_blocks());
  for (std::size_t i = 0; i < la.size(); ++i) table(la[i] - 1, lb[i] - 1) += 1.0;
  auto pairs = [](double m) { return 0.5 * m * (m - 1.0); };
  const double index = table.unaryExpr(pairs).sum();
  const double rows = table.rowwise().sum().unaryExpr(pairs).sum();
  const double cols = table.colwise().sum().unaryExpr(pairs).sum();
  const double expected = rows * cols / pairs(a.n());
  const double maximum = 0.5 * (rows + cols);
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

Eigen::MatrixXd co_clustering(std::span<const Partition> draws) {
  if (draws.empty()) throw std::invalid_argument("co_clustering: no draws");
  const int n = draws.front().n();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (const Partition& p : draws) {
    if (p.n() != n) throw std::invalid_argument("co_clustering: draws over different sets");
    for (const Block& block : p.blocks()) {
      for (int i : block) {
        for (int j : block) m(i - 1, j - 1) += 1.0;
      }
    }
  }
  return m / static_cast<double>(draws.size());
}

}  // namespace csp
