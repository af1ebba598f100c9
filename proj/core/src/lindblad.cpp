#include "dispread/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "dispread/errors.hpp"

namespace dispread {

double bose_occupation(double omega, double temperature) {
  if (!(omega > 0.0)) throw InvalidArgument(fmt::format("Bose occupation needs omega > 0, got {}", omega));
  if (temperature < 0.0) throw InvalidArgument("temperature must be non-negative");
  if (temperature == 0.0) return 0.0;
  return 1.0 / std::expm1(kHbarOverKb * omega / temperature);
}

int EigenLadder::position(LevelLabel label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw InvalidArgument(fmt::format("no level labelled ({}, {})", to_string(label.branch), label.n));
  }
  return static_cast<int>(it - labels.begin());
}

StateVector EigenLadder::state(int j) const { return StateVector::normalized(space, vectors.col(j)); }

Matrix EigenLadder::to_eigenbasis(const Matrix& bare) const { return vectors.adjoint() * bare * vectors; }

double EigenLadder::branch_population(const Matrix& rho, Branch branch) const {
  double total = 0.0;
  for (int j = 0; j < size(); ++j) {
    if (labels[j].branch != branch) continue;
    total += vectors.col(j).dot(rho * vectors.col(j)).real();
  }
  return total;
}

EigenLadder eigenladder(const HilbertSpace& space, const SystemParams& p) {
  const Matrix h = jc_hamiltonian(space, p).matrix();
  const int dim = space.dim();

  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) {
      if (h(i, j) != cplx(0.0) && space.excitation_of(i) != space.excitation_of(j)) {
        throw NumericalError("Hamiltonian does not conserve the excitation number");
      }
    }
  }

  std::vector<double> energy;
  std::vector<Vector> vecs;
  std::vector<int> excit;
  const int max_excitation = space.n_max() + 1;
  for (int k = 0; k <= max_excitation; ++k) {
    std::vector<int> members;
    for (int i = 0; i < dim; ++i) {
      if (space.excitation_of(i) == k) members.push_back(i);
    }
    const auto m = static_cast<Eigen::Index>(members.size());
    Matrix block(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) block(a, b) = h(members[a], members[b]);
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(block);
    for (Eigen::Index c = 0; c < m; ++c) {
      Vector v = Vector::Zero(dim);
      for (Eigen::Index a = 0; a < m; ++a) v(members[a]) = es.eigenvectors()(a, c);
      energy.push_back(es.eigenvalues()(c));
      vecs.push_back(std::move(v));
      excit.push_back(k);
    }
  }

  std::vector<int> order(energy.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return energy[a] < energy[b]; });

  EigenLadder ladder;
  ladder.space = space;
  ladder.energies.resize(dim);
  ladder.vectors.resize(dim, dim);
  std::vector<bool> taken(dim, false);
  for (int j = 0; j < dim; ++j) {
    const int src = order[j];
    Vector v = vecs[src];
    Eigen::Index dominant = 0;
    const double weight = v.cwiseAbs2().maxCoeff(&dominant);
    if (weight < 0.7) {
      throw LabelingError(fmt::format("level {} has largest bare overlap {:.4f} < 0.7", j, weight));
    }
    if (taken[dominant]) throw LabelingError(fmt::format("level {} duplicates the label of another level", j));
    taken[dominant] = true;
    const cplx phase = v(dominant) / std::abs(v(dominant));
    v /= phase;
    const int s = space.qubit_of(static_cast<int>(dominant));
    const int n = space.photons_of(static_cast<int>(dominant));
    ladder.labels.push_back(s == 0 ? LevelLabel{Branch::G, n} : LevelLabel{Branch::E, n + 1});
    ladder.energies(j) = energy[src];
    ladder.vectors.col(j) = v;
    ladder.excitations.push_back(excit[src]);
  }
  return ladder;
}

Matrix transition_elements(const EigenLadder& ladder) {
  const auto ops = ladder_ops(ladder.space);
  const Matrix x = ops.a.matrix() + ops.a_dag.matrix();
  return ladder.to_eigenbasis(x);
}

TransitionClass classify(LevelLabel a, LevelLabel b) {
  if (a.branch == b.branch) return std::abs(a.n - b.n) == 1 ? TransitionClass::Cavity : TransitionClass::Other;
  const LevelLabel& g = a.branch == Branch::G ? a : b;
  const LevelLabel& e = a.branch == Branch::G ? b : a;
  return e.n == g.n + 1 ? TransitionClass::Purcell : TransitionClass::Other;
}

DecayOperators decay_operators(const EigenLadder& ladder, const SystemParams& p) {
  const Matrix c = transition_elements(ladder);
  const int dim = ladder.size();
  Matrix cav = Matrix::Zero(dim, dim);
  Matrix pur = Matrix::Zero(dim, dim);
  const double bound = 10.0 * p.lambda() * p.lambda();
  DecayOperators out;
  for (int j = 0; j < dim; ++j) {
    for (int k = j + 1; k < dim; ++k) {
      const cplx cjk = c(j, k);
      switch (classify(ladder.labels[j], ladder.labels[k])) {
        case TransitionClass::Cavity: cav(j, k) = cjk; break;
        case TransitionClass::Purcell: pur(j, k) = cjk; break;
        case TransitionClass::Other: {
          const double mag = std::abs(cjk);
          out.max_dropped = std::max(out.max_dropped, mag);
          if (mag > bound) {
            const auto& lj = ladder.labels[j];
            const auto& lk = ladder.labels[k];
            out.warnings.push_back(fmt::format("dropped transition ({},{}) <-> ({},{}) has |C| = {:.4g} > {:.4g}",
                                               to_string(lj.branch), lj.n, to_string(lk.branch), lk.n, mag, bound));
          }
          break;
        }
      }
    }
  }
  const Matrix& v = ladder.vectors;
  out.a_c = Operator(ladder.space, v * cav * v.adjoint());
  out.a_p = Operator(ladder.space, v * pur * v.adjoint());
  return out;
}

std::string_view to_string(Variant v) { return v == Variant::Filtered ? "filtered" : "unfiltered"; }
std::string_view to_string(PurcellFormula f) { return f == PurcellFormula::BareQubit ? "bare_qubit" : "shifted_qubit"; }
std::string_view to_string(PurcellScaling s) {
  return s == PurcellScaling::SpectralDensity ? "spectral_density" : "literal";
}

double purcell_rate(const SystemParams& p, double q_factor, PurcellFormula formula) {
  if (!(q_factor > 0.0)) throw InvalidArgument("quality factor must be positive");
  const double l = p.lambda();
  const double w = formula == PurcellFormula::BareQubit ? p.omega_q : p.omega_q + p.chi();
  return l * l * w / q_factor;
}

double DecayModel::purcell_coefficient() const {
  return scaling == PurcellScaling::Literal ? gamma_p : spectral_density_q;
}

std::vector<JumpTerm> DecayModel::jump_terms() const {
  std::vector<JumpTerm> terms;
  auto add = [&terms](const Operator& op, double rate) {
    if (rate > 0.0) terms.push_back({op, rate});
  };
  add(a_c, kappa * (1.0 + n_th_c));
  add(a_c.adjoint(), kappa * n_th_c);
  if (variant == Variant::Unfiltered) {
    const double c = purcell_coefficient();
    add(a_p, c * (1.0 + n_th_q));
    add(a_p.adjoint(), c * n_th_q);
  }
  return terms;
}

DecayModel make_decay_model(const EigenLadder& ladder, const SystemParams& p, const DecaySettings& settings) {
  if (!(settings.q_factor > 0.0)) throw InvalidArgument("quality factor must be positive");
  if (!(settings.temperature >= 0.0)) throw InvalidArgument("temperature must be non-negative");
  DecayOperators ops = decay_operators(ladder, p);
  DecayModel m;
  m.q_factor = settings.q_factor;
  m.temperature = settings.temperature;
  m.kappa = p.omega_c / settings.q_factor;
  m.gamma_p = purcell_rate(p, settings.q_factor, settings.formula);
  m.variant = settings.variant;
  m.formula = settings.formula;
  m.scaling = settings.scaling;
  m.a_c = std::move(ops.a_c);
  m.a_p = std::move(ops.a_p);
  m.n_th_c = bose_occupation(p.omega_c, settings.temperature);
  m.n_th_q = bose_occupation(p.omega_q, settings.temperature);
  const double wq = settings.formula == PurcellFormula::BareQubit ? p.omega_q : p.omega_q + p.chi();
  m.spectral_density_q = wq / settings.q_factor;
  m.warnings = std::move(ops.warnings);
  return m;
}

Matrix dissipator(const Operator& x, const Matrix& rho) {
  const Matrix& l = x.matrix();
  if (rho.rows() != l.rows() || rho.cols() != l.cols()) {
    throw InvalidArgument(fmt::format("dissipator shape mismatch: operator {}x{}, state {}x{}", l.rows(), l.cols(),
                                      rho.rows(), rho.cols()));
  }
  const Matrix ldl = l.adjoint() * l;
  return l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl);
}

Matrix me_rhs(const DecayModel& model, const SystemParams& p, const Matrix& rho, double t, DriveForm form) {
  const HilbertSpace& space = model.a_c.space();
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw InvalidArgument(fmt::format("state shape {}x{} does not match dimension {}", rho.rows(), rho.cols(),
                                      space.dim()));
  }
  const Matrix h = total_hamiltonian(space, p, t, form).matrix();
  const cplx minus_i(0.0, -1.0);
  Matrix out = minus_i * (h * rho - rho * h);
  for (const auto& term : model.jump_terms()) out += term.rate * dissipator(term.op, rho);
  return out;
}

ValidityHorizon validity_horizon(const SystemParams& p, int photons) {
  if (photons < 1) throw InvalidArgument("validity horizon needs at least one photon");
  const double chi_cycles = std::abs(p.chi()) / kTwoPi;
  const double l2 = p.lambda() * p.lambda();
  const double n = photons;
  return {1.0 / (n * chi_cycles * l2), 1.0 / (n * chi_cycles)};
}

}  // namespace dispread
