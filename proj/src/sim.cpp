#include "sgl/sim.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sgl/errors.hpp"
#include "sgl/rng.hpp"
#include "sgl/solver.hpp"
#include "sgl/threads.hpp"

namespace sgl {

namespace {

void validate_scenario(const ScenarioSpec& spec) {
  if (spec.T < 1) throw_error(ErrorCode::InvalidSize, "T must be >= 1");
  if (!(spec.x_scale > 0.0)) throw_error(ErrorCode::InvalidData, "x_scale must be > 0");
  if (spec.n_groups < 1) throw_error(ErrorCode::InvalidData, "n_groups must be >= 1");
  if (!(spec.sigma >= 0.0)) throw_error(ErrorCode::InvalidData, "sigma must be >= 0");
  if (spec.rho_choices.empty())
    throw_error(ErrorCode::InvalidData, "rho_choices must be non-empty");
  for (double r : spec.rho_choices)
    if (!(r > -1.0) || !(r < 1.0))
      throw_error(ErrorCode::InvalidData, "rho values must lie in (-1, 1)");
  if (spec.group_size_min < 1 || spec.group_size_max < spec.group_size_min)
    throw_error(ErrorCode::InvalidData, "invalid group_size_range");
  if (!(spec.signal_min > 0.0) || !(spec.signal_max >= spec.signal_min))
    throw_error(ErrorCode::InvalidData, "invalid signal_range");
}

}  // namespace

int scenario_dimension(const ScenarioSpec& spec) {
  return static_cast<int>(std::floor(spec.x_scale * std::pow(static_cast<double>(spec.T), 1.0 / 6.0)));
}

ScenarioSpec desk_scenario(int T, int replications, std::uint64_t master_seed) {
  ScenarioSpec spec;
  spec.T = T;
  spec.x_scale = 4.0;
  spec.n_groups = 3;
  spec.sigma = 1.1;
  spec.rho_choices = {0.5, 0.8, 0.9};
  spec.group_size_min = 2;
  spec.group_size_max = 6;
  spec.signal_min = 0.8;
  spec.signal_max = 0.99;
  spec.replications = replications;
  spec.master_seed = master_seed;
  return spec;
}

TruthInstance generate_instance(const ScenarioSpec& spec, std::uint64_t seed) {
  validate_scenario(spec);
  const int d = scenario_dimension(spec);
  if (d < 1) throw_error(ErrorCode::InvalidData, "d_T = floor(x_scale * T^(1/6)) must be >= 1");
  const int m = spec.n_groups;
  if (m > d)
    throw_error(ErrorCode::InfeasibleScenario,
                "n_groups " + std::to_string(m) + " exceeds d_T " + std::to_string(d));

  Rng rng(seed);

  // raw uniform sizes, proportionally rescaled; the last group absorbs the
  // remainder, borrowing from the largest groups if it would drop below 1
  std::vector<int> sizes(m);
  if (m == 1) {
    sizes[0] = d;
    rng.uniform_int(spec.group_size_min, spec.group_size_max);  // keep the draw count stable
  } else {
    std::vector<int> raw(m);
    long raw_sum = 0;
    for (int k = 0; k < m; ++k) {
      raw[k] = rng.uniform_int(spec.group_size_min, spec.group_size_max);
      raw_sum += raw[k];
    }
    int partial = 0;
    for (int k = 0; k < m - 1; ++k) {
      sizes[k] = std::max(1, static_cast<int>(std::floor(
                                 static_cast<double>(raw[k]) * d / static_cast<double>(raw_sum))));
      partial += sizes[k];
    }
    int last = d - partial;
    while (last < 1) {
      int big = -1;
      for (int k = 0; k < m - 1; ++k)
        if (sizes[k] > 1 && (big < 0 || sizes[k] > sizes[big])) big = k;
      if (big < 0) throw_error(ErrorCode::InfeasibleScenario, "cannot host n_groups groups");
      --sizes[big];
      ++last;
    }
    sizes[m - 1] = last;
  }

  TruthInstance inst;
  inst.groups = build_groups(sizes);

  const int S = 2 * (m / 3);
  if (S < 1)
    throw_error(ErrorCode::InfeasibleScenario,
                "|S| = 2*floor(N_g/3) = 0; need n_groups >= 3");
  const int A = 3 * (d / 9);
  if (A < S)
    throw_error(ErrorCode::InfeasibleScenario,
                "|A| = " + std::to_string(A) + " cannot cover " + std::to_string(S) +
                    " active groups");

  std::vector<int> active_groups = rng.sample_without_replacement(m, S);
  std::sort(active_groups.begin(), active_groups.end());
  int capacity = 0;
  for (int k : active_groups) capacity += inst.groups.size(k);
  if (capacity < A)
    throw_error(ErrorCode::InfeasibleScenario,
                "active groups hold " + std::to_string(capacity) + " coordinates, need " +
                    std::to_string(A));

  // one non-zero per active group, then the rest uniformly over the remainder
  std::vector<int> chosen;
  chosen.reserve(A);
  std::vector<char> used(d, 0);
  for (int k : active_groups) {
    const int j = inst.groups.offset(k) + rng.uniform_int(0, inst.groups.size(k) - 1);
    chosen.push_back(j);
    used[j] = 1;
  }
  std::vector<int> pool;
  for (int k : active_groups)
    for (int i = 0; i < inst.groups.size(k); ++i) {
      const int j = inst.groups.offset(k) + i;
      if (!used[j]) pool.push_back(j);
    }
  const int extra = A - S;
  if (extra > 0) {
    const std::vector<int> picks =
        rng.sample_without_replacement(static_cast<int>(pool.size()), extra);
    for (int p : picks) chosen.push_back(pool[p]);
  }

  inst.beta0 = Eigen::VectorXd::Zero(d);
  std::sort(chosen.begin(), chosen.end());
  for (int j : chosen) inst.beta0(j) = rng.uniform(spec.signal_min, spec.signal_max);

  inst.rho_per_group.resize(m);
  for (int k = 0; k < m; ++k) inst.rho_per_group[k] = rng.pick(spec.rho_choices);

  inst.truth_sets = active_sets_from(inst.beta0, inst.groups, 0.0);
  return inst;
}

Dataset generate_data(const TruthInstance& instance, int T, double sigma, std::uint64_t seed) {
  if (T < 1) throw_error(ErrorCode::InvalidSize, "T must be >= 1");
  if (!(sigma >= 0.0)) throw_error(ErrorCode::InvalidData, "sigma must be >= 0");
  const GroupStructure& g = instance.groups;
  Rng rng(seed);

  Eigen::MatrixXd X(T, g.d);
  for (int k = 0; k < g.m; ++k) {
    const int c = g.size(k);
    const double rho = instance.rho_per_group[k];
    Eigen::MatrixXd cov(c, c);
    for (int i = 0; i < c; ++i)
      for (int j = 0; j < c; ++j) cov(i, j) = std::pow(rho, std::abs(i - j));
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() != Eigen::Success)
      throw_error(ErrorCode::InvalidData, "Toeplitz factorization failed");
    const Eigen::MatrixXd L = llt.matrixL();
    Eigen::MatrixXd Z(T, c);
    for (int t = 0; t < T; ++t)
      for (int i = 0; i < c; ++i) Z(t, i) = rng.normal();
    X.middleCols(g.offset(k), c) = Z * L.transpose();
  }

  Eigen::VectorXd y = X * instance.beta0;
  if (sigma > 0.0)
    for (int t = 0; t < T; ++t) y(t) += sigma * rng.normal();
  return make_dataset(std::move(X), std::move(y));
}

std::string MethodSpec::name() const {
  switch (type) {
    case Type::oracle:
      return "oracle";
    case Type::fixed_sgl:
      return "fixed_sgl";
    case Type::pipeline:
    default:
      return to_string(kind);
  }
}

MethodSpec MethodSpec::parse(const std::string& text) {
  MethodSpec m;
  if (text == "oracle") {
    m.type = Type::oracle;
    return m;
  }
  if (text == "fixed_sgl" || text.rfind("fixed_sgl:", 0) == 0) {
    m.type = Type::fixed_sgl;
    if (text.size() > 10) m.fixed_multiplier = std::stod(text.substr(10));
    if (!(m.fixed_multiplier > 0.0))
      throw_error(ErrorCode::InvalidData, "fixed_sgl multiplier must be > 0");
    return m;
  }
  m.type = Type::pipeline;
  m.kind = estimator_kind_from_string(text);
  return m;
}

std::vector<MethodSpec> MethodSpec::six_methods() {
  std::vector<MethodSpec> out;
  for (EstimatorKind kind :
       {EstimatorKind::lasso, EstimatorKind::adaptive_lasso, EstimatorKind::group_lasso,
        EstimatorKind::adaptive_group_lasso, EstimatorKind::sgl, EstimatorKind::adaptive_sgl}) {
    MethodSpec m;
    m.type = Type::pipeline;
    m.kind = kind;
    out.push_back(m);
  }
  return out;
}

Eigen::VectorXd oracle_estimate(const Dataset& data, const TruthInstance& instance) {
  const auto& coords = instance.truth_sets.active_coords;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(instance.groups.d);
  if (coords.empty()) return theta;
  const int a = static_cast<int>(coords.size());
  if (data.T() <= a)
    throw_error(ErrorCode::IllPosed, "oracle fit needs T > |A|");
  Eigen::MatrixXd Xa(data.T(), a);
  for (int i = 0; i < a; ++i) Xa.col(i) = data.design.col(coords[i]);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(Xa);
  if (qr.rank() < a) throw_error(ErrorCode::IllPosed, "restricted design is rank deficient");
  const Eigen::VectorXd sol = qr.solve(data.response);
  for (int i = 0; i < a; ++i) theta(coords[i]) = sol(i);
  return theta;
}

Eigen::VectorXd standardized_errors(const Dataset& data, const Eigen::VectorXd& theta,
                                    const TruthInstance& instance, Family family) {
  const auto& coords = instance.truth_sets.active_coords;
  const int a = static_cast<int>(coords.size());
  if (a == 0) throw_error(ErrorCode::InvalidData, "empty true support");
  const Eigen::MatrixXd V = sandwich_covariance(data, theta, family, instance.truth_sets);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(V);
  const double emin = eig.eigenvalues().minCoeff();
  if (emin <= 0.0)
    throw_error(ErrorCode::SingularHessian, "sandwich covariance is not positive definite");
  const Eigen::MatrixXd Vinv_half = eig.eigenvectors() *
                                    eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                    eig.eigenvectors().transpose();
  Eigen::VectorXd diff(a);
  for (int i = 0; i < a; ++i) diff(i) = theta(coords[i]) - instance.beta0(coords[i]);
  return std::sqrt(static_cast<double>(data.T())) * (Vinv_half * diff);
}

namespace {

Eigen::VectorXd run_method(const MethodSpec& method, const Dataset& data,
                           const TruthInstance& instance, const PipelineConfig& config) {
  switch (method.type) {
    case MethodSpec::Type::oracle:
      return oracle_estimate(data, instance);
    case MethodSpec::Type::fixed_sgl: {
      const double level = method.fixed_multiplier * std::sqrt(static_cast<double>(data.T()));
      const PenaltySpec spec = unit_penalty(level, level, instance.groups, config.xi_scale);
      return solve(data, instance.groups, spec, Family::squared, config.solver).theta_hat;
    }
    case MethodSpec::Type::pipeline:
    default:
      return fit_estimator(data, instance.groups, method.kind, Family::squared, config)
          .fit.theta_hat;
  }
}

ReplicationRecord make_record(const MethodSpec& method, int rep, const Dataset& data,
                              const TruthInstance& instance, const PipelineConfig& config) {
  ReplicationRecord rec;
  rec.method = method.name();
  rec.rep = rep;
  try {
    const Eigen::VectorXd theta = run_method(method, data, instance, config);
    rec.mse = (theta - instance.beta0).squaredNorm() / instance.groups.d;
    const ActiveSets est = active_sets_from(theta, instance.groups, 0.0);
    const SupportComparison cmp = compare_supports(est, instance.truth_sets);
    rec.C = cmp.correct_zeros;
    rec.IC = cmp.incorrect_zeros;
    rec.exact_recovery = cmp.exact_recovery;
    if (rec.exact_recovery) {
      try {
        rec.standardized_active_errors =
            standardized_errors(data, theta, instance, Family::squared);
      } catch (const Error&) {
        // recovery stands; the record just cannot feed the normality diagnostic
      }
    }
  } catch (const Error& e) {
    rec.failed = true;
    rec.error = e.what();
  }
  return rec;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioSpec& spec, const std::vector<MethodSpec>& methods,
                            const PipelineConfig& config) {
  validate_scenario(spec);
  if (spec.replications < 1)
    throw_error(ErrorCode::InvalidData, "replications must be >= 1");
  if (methods.empty()) throw_error(ErrorCode::InvalidData, "no methods requested");

  const int R = spec.replications;
  const int M = static_cast<int>(methods.size());
  ScenarioResult result;
  result.d = scenario_dimension(spec);
  const int A = 3 * (result.d / 9);
  result.true_zero_count = result.d - A;
  result.records.assign(static_cast<size_t>(R) * M, ReplicationRecord{});

  parallel_for(R, [&](int r) {
    Rng rng(spec.master_seed ^ static_cast<std::uint64_t>(r));
    const std::uint64_t instance_seed = rng.next_u64();
    const std::uint64_t data_seed = rng.next_u64();
    try {
      const TruthInstance instance = generate_instance(spec, instance_seed);
      const Dataset data = generate_data(instance, spec.T, spec.sigma, data_seed);
      for (int i = 0; i < M; ++i)
        result.records[static_cast<size_t>(r) * M + i] =
            make_record(methods[i], r, data, instance, config);
    } catch (const Error& e) {
      for (int i = 0; i < M; ++i) {
        ReplicationRecord rec;
        rec.method = methods[i].name();
        rec.rep = r;
        rec.failed = true;
        rec.error = e.what();
        result.records[static_cast<size_t>(r) * M + i] = rec;
      }
    }
  });

  for (int i = 0; i < M; ++i) {
    MethodAggregate agg;
    agg.method = methods[i].name();
    for (int r = 0; r < R; ++r) {
      const ReplicationRecord& rec = result.records[static_cast<size_t>(r) * M + i];
      if (rec.failed) {
        ++agg.n_failed;
        continue;
      }
      ++agg.n_ok;
      agg.mean_mse += rec.mse;
      agg.mean_C += rec.C;
      agg.mean_IC += rec.IC;
      agg.exact_rate += rec.exact_recovery ? 1.0 : 0.0;
    }
    if (agg.n_ok > 0) {
      agg.mean_mse /= agg.n_ok;
      agg.mean_C /= agg.n_ok;
      agg.mean_IC /= agg.n_ok;
      agg.exact_rate /= agg.n_ok;
    }
    result.aggregates.push_back(std::move(agg));
  }
  return result;
}

std::vector<CurvePoint> selection_consistency_curve(const ScenarioSpec& base,
                                                    const std::vector<int>& T_list,
                                                    const MethodSpec& method, int replications,
                                                    const PipelineConfig& config) {
  if (T_list.empty()) throw_error(ErrorCode::InvalidData, "empty T list");
  for (size_t i = 1; i < T_list.size(); ++i)
    if (T_list[i] <= T_list[i - 1])
      throw_error(ErrorCode::InvalidData, "T list must be strictly increasing");

  std::vector<CurvePoint> out;
  for (int T : T_list) {
    ScenarioSpec spec = base;
    spec.T = T;
    spec.replications = replications;
    const ScenarioResult res = run_scenario(spec, {method}, config);
    const MethodAggregate& agg = res.aggregates.front();
    CurvePoint pt;
    pt.T = T;
    pt.recovery_rate = agg.exact_rate;
    pt.replications = agg.n_ok;
    pt.standard_error =
        agg.n_ok > 0 ? std::sqrt(agg.exact_rate * (1.0 - agg.exact_rate) / agg.n_ok) : 0.0;
    out.push_back(pt);
  }
  return out;
}

NormalityReport normality_diagnostic(const std::vector<ReplicationRecord>& records) {
  std::vector<const Eigen::VectorXd*> vecs;
  for (const auto& rec : records)
    if (!rec.failed && rec.exact_recovery && rec.standardized_active_errors.size() > 0)
      vecs.push_back(&rec.standardized_active_errors);
  const int n = static_cast<int>(vecs.size());
  if (n < 30)
    throw_error(ErrorCode::InsufficientRecoveries,
                "only " + std::to_string(n) + " exact-recovery replications; need >= 30");
  const Eigen::Index L = vecs.front()->size();
  for (const auto* v : vecs)
    if (v->size() != L)
      throw_error(ErrorCode::InvalidData, "mixed standardized-error lengths");

  NormalityReport report;
  report.n_qualifying = n;
  report.per_coordinate.resize(L);
  for (Eigen::Index j = 0; j < L; ++j) {
    double mean = 0.0;
    for (const auto* v : vecs) mean += (*v)(j);
    mean /= n;
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (const auto* v : vecs) {
      const double c = (*v)(j)-mean;
      m2 += c * c;
      m3 += c * c * c;
      m4 += c * c * c * c;
    }
    const double var = m2 / (n - 1);
    m2 /= n;
    m3 /= n;
    m4 /= n;
    CoordinateMoments mom;
    mom.mean = mean;
    mom.variance = var;
    mom.skewness = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
    mom.kurtosis = m2 > 0.0 ? m4 / (m2 * m2) : 0.0;
    report.per_coordinate[static_cast<size_t>(j)] = mom;
  }
  return report;
}

}  // namespace sgl
