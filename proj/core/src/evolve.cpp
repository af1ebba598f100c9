#include "dispread/evolve.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <fmt/format.h>

#include "dispread/errors.hpp"

namespace dispread {

using SparseRow = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

std::string_view to_string(InitialState s) {
  switch (s) {
    case InitialState::BareGround: return "bare_ground";
    case InitialState::DressedExcited: return "dressed_excited";
    case InitialState::BareExcited: return "bare_excited";
  }
  return "unknown";
}

Protocol Protocol::standard(const SystemParams& p, InitialState initial) {
  return {initial, p.t_d, p.t_d + 500.0, 1.0};
}

void Protocol::validate() const {
  if (!(t_d >= 0.0) || !(t_end >= t_d) || !std::isfinite(t_end)) {
    throw InvalidArgument(fmt::format("protocol needs 0 <= t_d <= t_end, got t_d={} t_end={}", t_d, t_end));
  }
  if (!(sample_dt > 0.0)) throw InvalidArgument(fmt::format("sample_dt must be positive, got {}", sample_dt));
}

std::vector<double> Protocol::sample_times() const {
  const auto count = static_cast<std::size_t>(std::floor(t_end / sample_dt + 1e-9)) + 1;
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) times[k] = static_cast<double>(k) * sample_dt;
  return times;
}

double Trajectory::branch_population(std::size_t i, Branch branch) const {
  double total = 0.0;
  const auto& pops = samples.at(i).level_populations;
  for (std::size_t j = 0; j < labels.size(); ++j) {
    if (labels[j].branch == branch) total += pops(static_cast<Eigen::Index>(j));
  }
  return total;
}

double Trajectory::level_population(std::size_t i, LevelLabel label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw InvalidArgument("label not present in trajectory");
  return samples.at(i).level_populations(it - labels.begin());
}

double Trajectory::max_trace_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.trace_error);
  return m;
}

double Trajectory::max_hermiticity_error() const {
  double m = 0.0;
  for (const auto& s : samples) m = std::max(m, s.hermiticity_error);
  return m;
}

double Trajectory::min_eigenvalue() const {
  double m = samples.empty() ? 0.0 : samples.front().min_eigenvalue;
  for (const auto& s : samples) m = std::min(m, s.min_eigenvalue);
  return m;
}

StateVector initial_state(const EigenLadder& ladder, InitialState s) {
  switch (s) {
    case InitialState::BareGround: return StateVector::basis(ladder.space, 0, 0);
    case InitialState::BareExcited: return StateVector::basis(ladder.space, 1, 0);
    case InitialState::DressedExcited: return ladder.state(ladder.position({Branch::E, 1}));
  }
  throw InvalidArgument("unknown initial state");
}

namespace {

/// Sparse operator in the eigenbasis whose elements rotate as X_jk e^{i(E'_j − E'_k)t}.
struct PhasedOperator {
  SparseRow mat;
  std::vector<cplx> base;
  std::vector<double> freq;

  void update(double t) {
    cplx* v = mat.valuePtr();
    for (std::size_t i = 0; i < base.size(); ++i) v[i] = base[i] * std::polar(1.0, freq[i] * t);
  }
};

PhasedOperator make_phased(const Matrix& eig, const Eigen::VectorXd& eprime) {
  const double scale = eig.cwiseAbs().maxCoeff();
  const double drop = 1e-14 * std::max(scale, 1.0);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (Eigen::Index j = 0; j < eig.rows(); ++j) {
    for (Eigen::Index k = 0; k < eig.cols(); ++k) {
      if (std::abs(eig(j, k)) > drop) trips.emplace_back(j, k, eig(j, k));
    }
  }
  PhasedOperator op;
  op.mat.resize(eig.rows(), eig.cols());
  op.mat.setFromTriplets(trips.begin(), trips.end());
  op.mat.makeCompressed();
  const auto nnz = static_cast<std::size_t>(op.mat.nonZeros());
  op.base.resize(nnz);
  op.freq.resize(nnz);
  for (Eigen::Index r = 0; r < op.mat.outerSize(); ++r) {
    for (auto p = op.mat.outerIndexPtr()[r]; p < op.mat.outerIndexPtr()[r + 1]; ++p) {
      const auto c = op.mat.innerIndexPtr()[p];
      op.base[static_cast<std::size_t>(p)] = op.mat.valuePtr()[p];
      op.freq[static_cast<std::size_t>(p)] = eprime(r) - eprime(c);
    }
  }
  return op;
}

/// Right-hand side in the interaction picture of H_JC − ω_d N_ex, expressed in the eigenbasis.
class Generator {
 public:
  Generator(const SystemParams& p, const EigenLadder& ladder, const DecayModel* model, DriveForm form)
      : eps_(p.epsilon()), omega_d_(p.omega_d), form_(form) {
    const int dim = ladder.size();
    eprime_.resize(dim);
    for (int j = 0; j < dim; ++j) eprime_(j) = ladder.energies(j) - p.omega_d * ladder.excitations[j];

    const auto ops = ladder_ops(ladder.space);
    const Matrix a_eig = ladder.to_eigenbasis(ops.a.matrix());
    drive_ = make_phased(a_eig + a_eig.adjoint(), eprime_);
    lowering_.resize(drive_.base.size());
    for (Eigen::Index r = 0; r < drive_.mat.outerSize(); ++r) {
      for (auto q = drive_.mat.outerIndexPtr()[r]; q < drive_.mat.outerIndexPtr()[r + 1]; ++q) {
        const auto c = drive_.mat.innerIndexPtr()[q];
        lowering_[static_cast<std::size_t>(q)] = ladder.excitations[c] > ladder.excitations[r];
      }
    }
    has_drive_ = eps_ != cplx(0.0) && drive_.mat.nonZeros() > 0;

    if (model != nullptr) {
      for (const auto& term : model->jump_terms()) {
        if (!(term.op.space() == ladder.space)) throw InvalidArgument("decay model and ladder use different spaces");
        PhasedOperator op = make_phased(ladder.to_eigenbasis(term.op.matrix()), eprime_);
        if (op.mat.nonZeros() == 0) continue;
        check_uniform_shift(op, ladder);
        jumps_.push_back(std::move(op));
        rates_.push_back(term.rate);
      }
    }
    rho_.resize(dim, dim);
    x_.resize(dim, dim);
    y_.resize(dim, dim);
    z_.resize(dim, dim);
  }

  [[nodiscard]] const Eigen::VectorXd& eprime() const { return eprime_; }

  void density_rhs(double t, bool drive_on, const Matrix& raw, Matrix& out) {
    rho_ = 0.5 * (raw + raw.adjoint());
    out.setZero(rho_.rows(), rho_.cols());
    if (drive_on && has_drive_) {
      update_drive(t);
      x_.noalias() = drive_.mat * rho_;
      out.noalias() += cplx(0.0, -1.0) * x_;
      out.noalias() += cplx(0.0, 1.0) * x_.adjoint();
    }
    for (std::size_t i = 0; i < jumps_.size(); ++i) {
      auto& l = jumps_[i];
      l.update(t);
      const double r = rates_[i];
      y_.noalias() = l.mat * rho_;
      x_.noalias() = l.mat * y_.adjoint();
      z_.noalias() = l.mat.adjoint() * y_;
      out.noalias() += r * x_;
      out.noalias() -= (0.5 * r) * z_;
      out.noalias() -= (0.5 * r) * z_.adjoint();
    }
    x_ = 0.5 * (out + out.adjoint());
    out.swap(x_);
  }

  void pure_rhs(double t, const Matrix& psi, Matrix& out) {
    update_drive(t);
    out.noalias() = cplx(0.0, -1.0) * (drive_.mat * psi);
  }

  [[nodiscard]] bool has_drive() const { return has_drive_; }

 private:
  void update_drive(double t) {
    cplx f = eps_;
    if (form_ == DriveForm::Lab) f *= 1.0 + std::polar(1.0, -2.0 * omega_d_ * t);
    const cplx fc = std::conj(f);
    cplx* v = drive_.mat.valuePtr();
    for (std::size_t i = 0; i < drive_.base.size(); ++i) {
      v[i] = (lowering_[i] ? f : fc) * drive_.base[i] * std::polar(1.0, drive_.freq[i] * t);
    }
  }

  static void check_uniform_shift(const PhasedOperator& op, const EigenLadder& ladder) {
    int shift = 0;
    bool first = true;
    for (Eigen::Index r = 0; r < op.mat.outerSize(); ++r) {
      for (auto q = op.mat.outerIndexPtr()[r]; q < op.mat.outerIndexPtr()[r + 1]; ++q) {
        const int d = ladder.excitations[r] - ladder.excitations[op.mat.innerIndexPtr()[q]];
        if (first) {
          shift = d;
          first = false;
        } else if (d != shift) {
          throw NumericalError("jump operator does not shift the excitation number uniformly");
        }
      }
    }
  }

  cplx eps_;
  double omega_d_;
  DriveForm form_;
  Eigen::VectorXd eprime_;
  PhasedOperator drive_;
  std::vector<bool> lowering_;
  bool has_drive_ = false;
  std::vector<PhasedOperator> jumps_;
  std::vector<double> rates_;
  Matrix rho_, x_, y_, z_;
};

/// Converts eigenbasis interaction-picture states back to the lab frame and records observables.
class LabView {
 public:
  LabView(const SystemParams& p, const EigenLadder& ladder, const Eigen::VectorXd& eprime,
          const IntegratorOptions& options)
      : space_(ladder.space), eprime_(eprime), omega_d_(p.omega_d), options_(options) {
    const int dim = ladder.size();
    std::vector<Eigen::Triplet<cplx>> trips;
    for (int j = 0; j < dim; ++j) {
      for (int i = 0; i < dim; ++i) {
        if (ladder.vectors(i, j) != cplx(0.0)) trips.emplace_back(i, j, ladder.vectors(i, j));
      }
    }
    v_.resize(dim, dim);
    v_.setFromTriplets(trips.begin(), trips.end());
    vt_ = v_.adjoint();
    excitation_.resize(dim);
    for (int i = 0; i < dim; ++i) excitation_(i) = space_.excitation_of(i);
  }

  Sample observe(double t, const Matrix& raw, std::vector<Matrix>* states) {
    Sample s;
    s.t = t;
    const cplx tr = raw.trace();
    s.trace_error = std::abs(tr - cplx(1.0));
    s.hermiticity_error = (raw - raw.adjoint()).cwiseAbs().maxCoeff();
    herm_ = 0.5 * (raw + raw.adjoint());
    s.level_populations = herm_.diagonal().real();
    if (options_.check_positivity) {
      Eigen::SelfAdjointEigenSolver<Matrix> es(herm_, Eigen::EigenvaluesOnly);
      s.min_eigenvalue = es.eigenvalues().minCoeff();
    }

    const Eigen::Index dim = herm_.rows();
    Eigen::VectorXcd ph(dim);
    for (Eigen::Index j = 0; j < dim; ++j) ph(j) = std::polar(1.0, -eprime_(j) * t);
    scratch_ = ph.asDiagonal() * herm_ * ph.conjugate().asDiagonal();
    tmp_.noalias() = v_ * scratch_;
    rot_.noalias() = tmp_ * vt_;
    Eigen::VectorXcd lab_phase(dim);
    for (Eigen::Index i = 0; i < dim; ++i) lab_phase(i) = std::polar(1.0, -omega_d_ * excitation_(i) * t);
    lab_ = lab_phase.asDiagonal() * rot_ * lab_phase.conjugate().asDiagonal();

    s.qubit = partial_trace_cavity(space_, lab_);
    s.n_cav = cavity_occupation(space_, lab_);
    const int top = space_.n_max();
    double tail = 0.0;
    for (int q = 0; q < 2; ++q) {
      tail += lab_(space_.index(q, top), space_.index(q, top)).real();
      if (top >= 1) tail += lab_(space_.index(q, top - 1), space_.index(q, top - 1)).real();
    }
    s.top_fock_population = tail;
    if (space_.n_max() >= 1 && tail > options_.cutoff_guard) {
      throw CutoffError(fmt::format("population {:.3e} in the top two Fock levels exceeds {:.1e} at t = {} ns; "
                                    "increase n_max (currently {})",
                                    tail, options_.cutoff_guard, t, space_.n_max()));
    }
    if (states != nullptr) states->push_back(lab_);
    return s;
  }

  [[nodiscard]] Vector lab_vector(double t, const Vector& psi) const {
    const Eigen::Index dim = psi.size();
    Vector phased(dim);
    for (Eigen::Index j = 0; j < dim; ++j) phased(j) = psi(j) * std::polar(1.0, -eprime_(j) * t);
    Vector out = v_ * phased;
    for (Eigen::Index i = 0; i < dim; ++i) out(i) *= std::polar(1.0, -omega_d_ * excitation_(i) * t);
    return out;
  }

 private:
  HilbertSpace space_;
  Eigen::VectorXd eprime_;
  double omega_d_;
  IntegratorOptions options_;
  Eigen::SparseMatrix<cplx> v_;
  Eigen::SparseMatrix<cplx> vt_;
  Eigen::VectorXd excitation_;
  Matrix herm_, scratch_, tmp_, rot_, lab_;
};

Dopri5::Options solver_options(const IntegratorOptions& o) {
  Dopri5::Options s;
  s.rel_tol = o.rel_tol;
  s.abs_tol = o.abs_tol;
  s.max_step = o.max_step;
  return s;
}

void add_stats(Dopri5::Stats& total, const Dopri5::Stats& s) {
  total.accepted += s.accepted;
  total.rejected += s.rejected;
  total.rhs_evaluations += s.rhs_evaluations;
}

void check_options(const IntegratorOptions& o) {
  if (!(o.rel_tol > 0.0) || !(o.abs_tol > 0.0) || !(o.max_step > 0.0)) {
    throw InvalidArgument("integrator tolerances and max_step must be positive");
  }
}

struct Schedule {
  std::vector<double> drive_outputs;
  std::vector<double> free_outputs;
  double drive_end;
};

Schedule split_schedule(const Protocol& protocol) {
  Schedule s;
  const auto times = protocol.sample_times();
  s.drive_end = std::min(protocol.t_d, protocol.t_end);
  for (double t : times) {
    if (protocol.t_d > 0.0 && t <= s.drive_end) {
      s.drive_outputs.push_back(t);
    } else {
      s.free_outputs.push_back(t);
    }
  }
  return s;
}

}  // namespace

Trajectory integrate_from(const SystemParams& p, const EigenLadder& ladder, const Matrix& rho0,
                          const Protocol& protocol, const DecayModel* model, const IntegratorOptions& options) {
  protocol.validate();
  check_options(options);
  if (rho0.rows() != ladder.size() || rho0.cols() != ladder.size()) {
    throw InvalidArgument("initial density matrix does not match the ladder dimension");
  }
  Generator gen(p, ladder, model, options.drive_form);
  LabView view(p, ladder, gen.eprime(), options);
  Trajectory traj;
  traj.labels = ladder.labels;
  std::vector<Matrix>* states = options.keep_states ? &traj.states : nullptr;
  const Dopri5::Observer observe = [&](double t, const Matrix& y) {
    traj.times.push_back(t);
    traj.samples.push_back(view.observe(t, y, states));
  };

  Matrix y = ladder.to_eigenbasis(rho0);
  const Schedule sched = split_schedule(protocol);
  const Dopri5 solver(solver_options(options));
  if (protocol.t_d > 0.0) {
    const Dopri5::Rhs rhs = [&](double t, const Matrix& s, Matrix& d) { gen.density_rhs(t, true, s, d); };
    add_stats(traj.stats, solver.integrate(rhs, 0.0, sched.drive_end, y, sched.drive_outputs, observe));
  }
  if (protocol.t_end > protocol.t_d || protocol.t_d == 0.0) {
    const Dopri5::Rhs rhs = [&](double t, const Matrix& s, Matrix& d) { gen.density_rhs(t, false, s, d); };
    const double start = protocol.t_d > 0.0 ? sched.drive_end : 0.0;
    add_stats(traj.stats, solver.integrate(rhs, start, protocol.t_end, y, sched.free_outputs, observe));
  }
  return traj;
}

Trajectory integrate(const SystemParams& p, const HilbertSpace& space, const Protocol& protocol,
                     const DecayModel* model, const IntegratorOptions& options) {
  const EigenLadder ladder = eigenladder(space, p);
  const StateVector psi0 = initial_state(ladder, protocol.initial_state);
  const Matrix rho0 = psi0.vector() * psi0.vector().adjoint();
  return integrate_from(p, ladder, rho0, protocol, model, options);
}

Trajectory integrate_pure(const SystemParams& p, const HilbertSpace& space, const Protocol& protocol,
                          const IntegratorOptions& options) {
  protocol.validate();
  check_options(options);
  const EigenLadder ladder = eigenladder(space, p);
  const StateVector psi0 = initial_state(ladder, protocol.initial_state);
  IntegratorOptions opts = options;
  opts.check_positivity = false;
  Generator gen(p, ladder, nullptr, opts.drive_form);
  LabView view(p, ladder, gen.eprime(), opts);
  Trajectory traj;
  traj.labels = ladder.labels;
  std::vector<Matrix>* states = opts.keep_states ? &traj.states : nullptr;
  const Dopri5::Observer observe = [&](double t, const Matrix& y) {
    const Matrix rho = y * y.adjoint();
    traj.times.push_back(t);
    traj.samples.push_back(view.observe(t, rho, states));
  };

  Matrix y = ladder.vectors.adjoint() * psi0.vector();
  const Schedule sched = split_schedule(protocol);
  if (protocol.t_d > 0.0) {
    const Dopri5 solver(solver_options(opts));
    const Dopri5::Rhs rhs = [&](double t, const Matrix& s, Matrix& d) { gen.pure_rhs(t, s, d); };
    add_stats(traj.stats, solver.integrate(rhs, 0.0, sched.drive_end, y, sched.drive_outputs, observe));
  }
  for (double t : sched.free_outputs) observe(t, y);
  return traj;
}

StateVector evolve_pure_state(const SystemParams& p, const EigenLadder& ladder, const StateVector& psi0,
                              double t_end, const IntegratorOptions& options) {
  check_options(options);
  if (!(t_end >= 0.0)) throw InvalidArgument("t_end must be non-negative");
  Generator gen(p, ladder, nullptr, options.drive_form);
  LabView view(p, ladder, gen.eprime(), options);
  Matrix y = ladder.vectors.adjoint() * psi0.vector();
  const double drive_end = std::min(p.t_d, t_end);
  if (drive_end > 0.0 && gen.has_drive()) {
    const Dopri5 solver(solver_options(options));
    const Dopri5::Rhs rhs = [&](double t, const Matrix& s, Matrix& d) { gen.pure_rhs(t, s, d); };
    solver.integrate(rhs, 0.0, drive_end, y, {}, [](double, const Matrix&) {});
  }
  return StateVector::normalized(ladder.space, view.lab_vector(t_end, y.col(0)));
}

Qubit2 partial_trace_cavity(const HilbertSpace& space, const Matrix& rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw InvalidArgument("partial trace: shape does not match the space");
  }
  const int levels = space.levels();
  Qubit2 q;
  for (int s = 0; s < 2; ++s) {
    for (int r = 0; r < 2; ++r) q(s, r) = rho.block(s * levels, r * levels, levels, levels).trace();
  }
  return q;
}

Qubit2 partial_trace_cavity(const DensityMatrix& rho) { return partial_trace_cavity(rho.space(), rho.matrix()); }

double cavity_occupation(const HilbertSpace& space, const Matrix& rho) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim()) {
    throw InvalidArgument("cavity occupation: shape does not match the space");
  }
  double n = 0.0;
  for (int i = 0; i < space.dim(); ++i) n += space.photons_of(i) * rho(i, i).real();
  return n;
}

double cavity_occupation(const DensityMatrix& rho) { return cavity_occupation(rho.space(), rho.matrix()); }

double purity(const Qubit2& rho) { return (rho * rho).trace().real(); }

}  // namespace dispread
