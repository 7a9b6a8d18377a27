#include "pmdkit/devices.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

namespace pmdkit {

namespace {

void add_issue(ValidationReport& report, std::string what, double magnitude) {
  report.issues.push_back(ValidationIssue{std::move(what), magnitude});
}

void check_labels(ValidationReport& report, const std::vector<std::string>& labels,
                  const char* which) {
  if (labels.empty()) {
    add_issue(report, std::string(which) + " alphabet is empty", 0.0);
    return;
  }
  std::set<std::string> seen(labels.begin(), labels.end());
  if (seen.size() != labels.size()) {
    add_issue(report, std::string(which) + " alphabet has duplicate labels",
              static_cast<double>(labels.size() - seen.size()));
  }
}

bool distribution_ok(const std::vector<double>& p, double tol, double& defect) {
  double sum = 0.0;
  double min_entry = 0.0;
  for (double v : p) {
    sum += v;
    min_entry = std::min(min_entry, v);
  }
  defect = std::max(std::abs(sum - 1.0), -min_entry);
  return defect <= tol;
}

}  // namespace

std::string ValidationReport::summary() const {
  if (issues.empty()) return "valid";
  std::ostringstream os;
  for (std::size_t i = 0; i < issues.size(); ++i) {
    if (i > 0) os << "; ";
    os << issues[i].what << " (magnitude " << issues[i].magnitude << ")";
  }
  return os.str();
}

Povm Pmd::povm(int x) const {
  Povm p;
  for (int a = 0; a < n_outcomes(); ++a) p.effects.push_back(effect(a, x));
  return p;
}

ValidationReport validate_povm(const Povm& povm) {
  ValidationReport report;
  if (povm.effects.empty()) {
    add_issue(report, "POVM has no effects", 0.0);
    return report;
  }
  const int dim = povm.dim();
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t a = 0; a < povm.effects.size(); ++a) {
    const Matrix& e = povm.effects[a];
    if (e.rows() != dim || e.cols() != dim) {
      add_issue(report, "effect " + std::to_string(a) + " has wrong shape",
                static_cast<double>(e.rows()));
      return report;
    }
    const double herm = hermiticity_violation(e);
    if (herm > kHermTol) {
      add_issue(report, "effect " + std::to_string(a) + " is not Hermitian",
                herm);
      continue;
    }
    const PsdReport psd = psd_check(e);
    if (!psd.is_psd) {
      add_issue(report, "effect " + std::to_string(a) + " is not PSD",
                -psd.min_eigenvalue);
    }
    sum += e;
  }
  const double completeness =
      (sum - Matrix::Identity(dim, dim)).cwiseAbs().maxCoeff();
  if (completeness > kPovmCompletenessTol) {
    add_issue(report, "effects do not sum to identity", completeness);
  }
  return report;
}

ValidationReport validate_pmd(const Pmd& pmd) {
  ValidationReport report;
  if (pmd.dim <= 0) {
    add_issue(report, "dimension must be positive",
              static_cast<double>(pmd.dim));
    return report;
  }
  check_labels(report, pmd.programs, "program");
  check_labels(report, pmd.outcomes, "outcome");
  if (pmd.effects.size() !=
      pmd.programs.size() * pmd.outcomes.size()) {
    add_issue(report, "effect table size does not match alphabets",
              static_cast<double>(pmd.effects.size()));
    return report;
  }
  for (int x = 0; x < pmd.n_programs(); ++x) {
    ValidationReport slice = validate_povm(pmd.povm(x));
    for (ValidationIssue& issue : slice.issues) {
      issue.what = "program '" + pmd.programs[x] + "': " + issue.what;
      report.issues.push_back(std::move(issue));
    }
    for (int a = 0; a < pmd.n_outcomes(); ++a) {
      if (pmd.effect(a, x).rows() != pmd.dim) {
        add_issue(report,
                  "effect dimension differs from declared dim at program '" +
                      pmd.programs[x] + "'",
                  static_cast<double>(pmd.effect(a, x).rows()));
        return report;
      }
    }
  }
  return report;
}

void require_valid(const Pmd& pmd) {
  const ValidationReport report = validate_pmd(pmd);
  if (!report.ok()) {
    throw InvalidInputError("invalid PMD: " + report.summary());
  }
}

double max_effect_distance(const Pmd& a, const Pmd& b) {
  if (a.dim != b.dim || a.programs != b.programs || a.outcomes != b.outcomes) {
    throw DimensionError("max_effect_distance: alphabets or dims differ");
  }
  double d = 0.0;
  for (std::size_t k = 0; k < a.effects.size(); ++k) {
    d = std::max(d, (a.effects[k] - b.effects[k]).cwiseAbs().maxCoeff());
  }
  return d;
}

bool pmds_equal(const Pmd& a, const Pmd& b, double tol) {
  return a.dim == b.dim && a.programs == b.programs &&
         a.outcomes == b.outcomes && max_effect_distance(a, b) <= tol;
}

ValidationReport validate_decomposition(const SimpleDecomposition& dec) {
  ValidationReport report;
  ValidationReport parent = validate_povm(dec.parent);
  for (ValidationIssue& issue : parent.issues) {
    issue.what = "parent POVM: " + issue.what;
    report.issues.push_back(std::move(issue));
  }
  check_labels(report, dec.programs, "program");
  check_labels(report, dec.outcomes, "outcome");
  const std::size_t expect = dec.parent.effects.size() * dec.programs.size() *
                             dec.outcomes.size();
  if (dec.post.size() != expect) {
    add_issue(report, "post-processing table size mismatch",
              static_cast<double>(dec.post.size()));
    return report;
  }
  for (int i = 0; i < dec.parent.outcomes(); ++i) {
    for (int x = 0; x < dec.n_programs(); ++x) {
      std::vector<double> row(dec.outcomes.size());
      for (int a = 0; a < dec.n_outcomes(); ++a) row[a] = dec.post_prob(a, i, x);
      double defect = 0.0;
      if (!distribution_ok(row, kChannelNormTol, defect)) {
        add_issue(report,
                  "post-processing slice (i=" + std::to_string(i) +
                      ", x=" + std::to_string(x) + ") is not a distribution",
                  defect);
      }
    }
  }
  return report;
}

ValidationReport validate_ensemble(const Ensemble& ensemble) {
  ValidationReport report;
  if (ensemble.dim <= 0) {
    add_issue(report, "dimension must be positive",
              static_cast<double>(ensemble.dim));
    return report;
  }
  check_labels(report, ensemble.post_info, "post-information");
  check_labels(report, ensemble.answers, "answer");
  if (ensemble.states.size() !=
      ensemble.post_info.size() * ensemble.answers.size()) {
    add_issue(report, "state table size does not match alphabets",
              static_cast<double>(ensemble.states.size()));
    return report;
  }
  double total = 0.0;
  for (int w = 0; w < ensemble.n_post_info(); ++w) {
    for (int z = 0; z < ensemble.n_answers(); ++z) {
      const Matrix& rho = ensemble.state(w, z);
      if (rho.rows() != ensemble.dim || rho.cols() != ensemble.dim) {
        add_issue(report, "state has wrong shape",
                  static_cast<double>(rho.rows()));
        return report;
      }
      const double herm = hermiticity_violation(rho);
      if (herm > kHermTol) {
        add_issue(report,
                  "state (" + ensemble.post_info[w] + "," +
                      ensemble.answers[z] + ") is not Hermitian",
                  herm);
        continue;
      }
      const PsdReport psd = psd_check(rho);
      if (!psd.is_psd) {
        add_issue(report,
                  "state (" + ensemble.post_info[w] + "," +
                      ensemble.answers[z] + ") is not PSD",
                  -psd.min_eigenvalue);
      }
      total += rho.trace().real();
    }
  }
  if (std::abs(total - 1.0) > kEnsembleNormTol) {
    add_issue(report, "joint trace distribution does not sum to 1",
              std::abs(total - 1.0));
  }
  return report;
}

void require_valid(const Ensemble& ensemble) {
  const ValidationReport report = validate_ensemble(ensemble);
  if (!report.ok()) {
    throw InvalidInputError("invalid ensemble: " + report.summary());
  }
}

int ClassicalChannel::joint_inputs() const {
  int n = 1;
  for (int s : input_sizes) n *= s;
  return n;
}

int ClassicalChannel::joint_index(const std::vector<int>& inputs) const {
  if (inputs.size() != input_sizes.size()) {
    throw DimensionError("ClassicalChannel: wrong number of input indices");
  }
  int idx = 0;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    if (inputs[k] < 0 || inputs[k] >= input_sizes[k]) {
      throw DimensionError("ClassicalChannel: input index out of range");
    }
    idx = idx * input_sizes[k] + inputs[k];
  }
  return idx;
}

double ClassicalChannel::prob(const std::vector<int>& inputs,
                              int output) const {
  if (output < 0 || output >= output_size) {
    throw DimensionError("ClassicalChannel: output index out of range");
  }
  return table[static_cast<std::size_t>(joint_index(inputs)) * output_size +
               output];
}

ClassicalChannel ClassicalChannel::deterministic(
    std::vector<int> input_sizes, int output_size,
    const std::function<int(const std::vector<int>&)>& choice) {
  ClassicalChannel ch;
  ch.input_sizes = std::move(input_sizes);
  ch.output_size = output_size;
  ch.table.assign(static_cast<std::size_t>(ch.joint_inputs()) * output_size,
                  0.0);
  std::vector<int> inputs(ch.input_sizes.size(), 0);
  for (int j = 0; j < ch.joint_inputs(); ++j) {
    int rem = j;
    for (int k = static_cast<int>(ch.input_sizes.size()) - 1; k >= 0; --k) {
      inputs[k] = rem % ch.input_sizes[k];
      rem /= ch.input_sizes[k];
    }
    const int out = choice(inputs);
    if (out < 0 || out >= output_size) {
      throw DimensionError("deterministic channel: choice out of range");
    }
    ch.table[static_cast<std::size_t>(j) * output_size + out] = 1.0;
  }
  return ch;
}

ClassicalChannel ClassicalChannel::uniform(std::vector<int> input_sizes,
                                           int output_size) {
  ClassicalChannel ch;
  ch.input_sizes = std::move(input_sizes);
  ch.output_size = output_size;
  ch.table.assign(static_cast<std::size_t>(ch.joint_inputs()) * output_size,
                  1.0 / output_size);
  return ch;
}

ValidationReport validate_channel(const ClassicalChannel& channel) {
  ValidationReport report;
  if (channel.output_size <= 0) {
    add_issue(report, "channel output alphabet empty", 0.0);
    return report;
  }
  for (int s : channel.input_sizes) {
    if (s <= 0) {
      add_issue(report, "channel input alphabet empty", 0.0);
      return report;
    }
  }
  if (channel.table.size() !=
      static_cast<std::size_t>(channel.joint_inputs()) * channel.output_size) {
    add_issue(report, "channel table size mismatch",
              static_cast<double>(channel.table.size()));
    return report;
  }
  for (int j = 0; j < channel.joint_inputs(); ++j) {
    double sum = 0.0;
    double min_entry = 0.0;
    for (int o = 0; o < channel.output_size; ++o) {
      const double v =
          channel.table[static_cast<std::size_t>(j) * channel.output_size + o];
      sum += v;
      min_entry = std::min(min_entry, v);
    }
    const double defect = std::max(std::abs(sum - 1.0), -min_entry);
    if (defect > kChannelNormTol) {
      add_issue(report,
                "channel slice " + std::to_string(j) + " is not a distribution",
                defect);
    }
  }
  return report;
}

int FreeOperation::target_dim() const {
  return instruments.empty() || instruments.front().empty()
             ? 0
             : instruments.front().front().in_dim;
}

int FreeOperation::source_dim() const {
  return instruments.empty() || instruments.front().empty()
             ? 0
             : instruments.front().front().out_dim;
}

ValidationReport validate_free_operation(const FreeOperation& op,
                                         int source_programs,
                                         int source_outcomes, int source_dim) {
  ValidationReport report;
  double defect = 0.0;
  if (!distribution_ok(op.randomness, kChannelNormTol, defect)) {
    add_issue(report, "shared randomness is not a distribution", defect);
  }
  if (op.instruments.size() != op.randomness.size()) {
    add_issue(report, "instrument family count differs from randomness size",
              static_cast<double>(op.instruments.size()));
    return report;
  }
  check_labels(report, op.target_programs, "target program");
  check_labels(report, op.target_outcomes, "target outcome");

  const int n_i = op.n_instrument_outcomes();
  for (std::size_t r = 0; r < op.instruments.size(); ++r) {
    const auto& family = op.instruments[r];
    if (static_cast<int>(family.size()) != n_i || n_i == 0) {
      add_issue(report,
                "instrument family " + std::to_string(r) +
                    " has inconsistent outcome count",
                static_cast<double>(family.size()));
      return report;
    }
    for (std::size_t i = 0; i < family.size(); ++i) {
      if (family[i].in_dim != op.target_dim() ||
          family[i].out_dim != op.source_dim()) {
        add_issue(report, "instrument dimensions are inconsistent",
                  static_cast<double>(family[i].in_dim));
        return report;
      }
      const double herm = hermiticity_violation(family[i].choi);
      if (herm > kHermTol) {
        add_issue(report, "Choi block is not Hermitian", herm);
        continue;
      }
      const PsdReport psd = psd_check(family[i].choi);
      if (!psd.is_psd) {
        add_issue(report,
                  "Choi block (r=" + std::to_string(r) +
                      ", i=" + std::to_string(i) + ") is not PSD",
                  -psd.min_eigenvalue);
      }
    }
    const double tp = trace_preservation_defect(family);
    if (tp > kPovmCompletenessTol) {
      add_issue(report,
                "instrument family " + std::to_string(r) +
                    " is not trace preserving in sum",
                tp);
    }
  }
  if (op.source_dim() != source_dim) {
    add_issue(report, "instrument output dimension differs from source PMD",
              static_cast<double>(op.source_dim()));
  }

  const int n_y = static_cast<int>(op.target_programs.size());
  const int n_b = static_cast<int>(op.target_outcomes.size());
  const std::vector<int> pre_axes{n_i, n_y, op.n_random()};
  if (op.pre.input_sizes != pre_axes || op.pre.output_size != source_programs) {
    add_issue(report, "pre channel alphabets do not match (i, y, r) -> x", 0.0);
  }
  const std::vector<int> post_axes{source_outcomes, source_programs, n_i, n_y,
                                   op.n_random()};
  if (op.post.input_sizes != post_axes || op.post.output_size != n_b) {
    add_issue(report,
              "post channel alphabets do not match (a, x, i, y, r) -> b", 0.0);
  }
  for (const ClassicalChannel* ch : {&op.pre, &op.post}) {
    ValidationReport chrep = validate_channel(*ch);
    for (ValidationIssue& issue : chrep.issues) {
      report.issues.push_back(std::move(issue));
    }
  }
  return report;
}

FreeOperation identity_operation(const Pmd& pmd) {
  FreeOperation op;
  op.randomness = {1.0};
  op.instruments = {{identity_choi(pmd.dim)}};
  op.target_programs = pmd.programs;
  op.target_outcomes = pmd.outcomes;
  const int n_x = pmd.n_programs();
  const int n_a = pmd.n_outcomes();
  op.pre = ClassicalChannel::deterministic(
      {1, n_x, 1}, n_x, [](const std::vector<int>& in) { return in[1]; });
  op.post = ClassicalChannel::deterministic(
      {n_a, n_x, 1, n_x, 1}, n_a,
      [](const std::vector<int>& in) { return in[0]; });
  return op;
}

Pmd apply_free_operation(const FreeOperation& op, const Pmd& pmd) {
  require_valid(pmd);
  const ValidationReport oprep = validate_free_operation(
      op, pmd.n_programs(), pmd.n_outcomes(), pmd.dim);
  if (!oprep.ok()) {
    throw InvalidInputError("invalid free operation: " + oprep.summary());
  }

  const int n_r = op.n_random();
  const int n_i = op.n_instrument_outcomes();
  const int n_x = pmd.n_programs();
  const int n_a = pmd.n_outcomes();
  const int n_y = static_cast<int>(op.target_programs.size());
  const int n_b = static_cast<int>(op.target_outcomes.size());
  const int dim_out = op.target_dim();

  // E_{i|r}^dag[M(a|x)] for every (r, i, x, a)
  std::vector<Matrix> adj(static_cast<std::size_t>(n_r) * n_i * n_x * n_a);
  for (int r = 0; r < n_r; ++r) {
    for (int i = 0; i < n_i; ++i) {
      for (int x = 0; x < n_x; ++x) {
        for (int a = 0; a < n_a; ++a) {
          adj[((static_cast<std::size_t>(r) * n_i + i) * n_x + x) * n_a + a] =
              adjoint_apply(op.instruments[r][i], pmd.effect(a, x));
        }
      }
    }
  }

  Pmd out;
  out.dim = dim_out;
  out.programs = op.target_programs;
  out.outcomes = op.target_outcomes;
  out.effects.assign(static_cast<std::size_t>(n_y) * n_b,
                     Matrix::Zero(dim_out, dim_out));
  for (int y = 0; y < n_y; ++y) {
    for (int r = 0; r < n_r; ++r) {
      const double mu = op.randomness[r];
      if (mu == 0.0) continue;
      for (int i = 0; i < n_i; ++i) {
        for (int x = 0; x < n_x; ++x) {
          const double p = op.pre.prob({i, y, r}, x);
          if (p == 0.0) continue;
          for (int a = 0; a < n_a; ++a) {
            const Matrix& lifted =
                adj[((static_cast<std::size_t>(r) * n_i + i) * n_x + x) * n_a +
                    a];
            for (int b = 0; b < n_b; ++b) {
              const double q = op.post.prob({a, x, i, y, r}, b);
              if (q == 0.0) continue;
              out.effect(b, y) += mu * p * q * lifted;
            }
          }
        }
      }
    }
  }
  return out;
}

FreeOperation compose_free_operations(const FreeOperation& second,
                                      const FreeOperation& first) {
  const int n_y1 = static_cast<int>(first.target_programs.size());
  const int n_b1 = static_cast<int>(first.target_outcomes.size());
  const ValidationReport rep = validate_free_operation(
      second, n_y1, n_b1, first.target_dim());
  if (!rep.ok()) {
    throw InvalidInputError(
        "compose_free_operations: second stage does not accept the first "
        "stage's output: " +
        rep.summary());
  }

  const int n_r1 = first.n_random();
  const int n_r2 = second.n_random();
  const int n_i1 = first.n_instrument_outcomes();
  const int n_i2 = second.n_instrument_outcomes();
  const int n_w = static_cast<int>(second.target_programs.size());
  const int n_c = static_cast<int>(second.target_outcomes.size());
  const int n_x = first.pre.output_size;
  const int n_a = first.post.input_sizes.at(0);

  FreeOperation out;
  out.target_programs = second.target_programs;
  out.target_outcomes = second.target_outcomes;

  out.randomness.resize(static_cast<std::size_t>(n_r1) * n_r2);
  out.instruments.resize(static_cast<std::size_t>(n_r1) * n_r2);
  for (int r1 = 0; r1 < n_r1; ++r1) {
    for (int r2 = 0; r2 < n_r2; ++r2) {
      const int r = r1 * n_r2 + r2;
      out.randomness[r] = first.randomness[r1] * second.randomness[r2];
      out.instruments[r].reserve(static_cast<std::size_t>(n_i1) * n_i2);
      for (int i1 = 0; i1 < n_i1; ++i1) {
        for (int i2 = 0; i2 < n_i2; ++i2) {
          out.instruments[r].push_back(choi_compose(
              first.instruments[r1][i1], second.instruments[r2][i2]));
        }
      }
    }
  }

  const int n_i = n_i1 * n_i2;
  const int n_r = n_r1 * n_r2;

  // pre~(x | (i1,i2), w, (r1,r2)) = sum_y p2(y|i2,w,r2) p1(x|i1,y,r1)
  ClassicalChannel pre;
  pre.input_sizes = {n_i, n_w, n_r};
  pre.output_size = n_x;
  pre.table.assign(static_cast<std::size_t>(n_i) * n_w * n_r * n_x, 0.0);
  // post~(c | a, x, i, w, r): Bayes-invert the intermediate program draw
  ClassicalChannel post;
  post.input_sizes = {n_a, n_x, n_i, n_w, n_r};
  post.output_size = n_c;
  post.table.assign(
      static_cast<std::size_t>(n_a) * n_x * n_i * n_w * n_r * n_c, 0.0);

  for (int i1 = 0; i1 < n_i1; ++i1) {
    for (int i2 = 0; i2 < n_i2; ++i2) {
      const int i = i1 * n_i2 + i2;
      for (int w = 0; w < n_w; ++w) {
        for (int r1 = 0; r1 < n_r1; ++r1) {
          for (int r2 = 0; r2 < n_r2; ++r2) {
            const int r = r1 * n_r2 + r2;
            for (int x = 0; x < n_x; ++x) {
              double px = 0.0;
              for (int y = 0; y < n_y1; ++y) {
                px += second.pre.prob({i2, w, r2}, y) *
                      first.pre.prob({i1, y, r1}, x);
              }
              pre.table[static_cast<std::size_t>(
                            pre.joint_index({i, w, r})) *
                            n_x +
                        x] = px;
              for (int a = 0; a < n_a; ++a) {
                const std::size_t post_row =
                    static_cast<std::size_t>(post.joint_index({a, x, i, w, r}));
                if (px == 0.0) {
                  // unreachable branch; any normalized row is fine
                  for (int cc = 0; cc < n_c; ++cc) {
                    post.table[post_row * n_c + cc] = 1.0 / n_c;
                  }
                  continue;
                }
                for (int y = 0; y < n_y1; ++y) {
                  const double py = second.pre.prob({i2, w, r2}, y) *
                                    first.pre.prob({i1, y, r1}, x) / px;
                  if (py == 0.0) continue;
                  for (int b = 0; b < n_b1; ++b) {
                    const double qb = first.post.prob({a, x, i1, y, r1}, b);
                    if (qb == 0.0) continue;
                    for (int cc = 0; cc < n_c; ++cc) {
                      post.table[post_row * n_c + cc] +=
                          py * qb * second.post.prob({b, y, i2, w, r2}, cc);
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  out.pre = std::move(pre);
  out.post = std::move(post);
  return out;
}

Pmd mix_pmds(const std::vector<double>& weights,
             const std::vector<Pmd>& pmds) {
  if (weights.size() != pmds.size() || pmds.empty()) {
    throw DimensionError("mix_pmds: need one weight per PMD");
  }
  double defect = 0.0;
  if (!distribution_ok(weights, kChannelNormTol, defect)) {
    throw InvalidInputError("mix_pmds: weights are not a distribution");
  }
  const Pmd& first = pmds.front();
  Pmd out = first;
  for (Matrix& e : out.effects) e = Matrix::Zero(first.dim, first.dim);
  for (std::size_t k = 0; k < pmds.size(); ++k) {
    if (pmds[k].dim != first.dim || pmds[k].programs != first.programs ||
        pmds[k].outcomes != first.outcomes) {
      throw DimensionError("mix_pmds: mismatched alphabets or dimensions");
    }
    for (std::size_t e = 0; e < out.effects.size(); ++e) {
      out.effects[e] += weights[k] * pmds[k].effects[e];
    }
  }
  return out;
}

}  // namespace pmdkit
