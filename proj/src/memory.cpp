#include "spinres/memory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "spinres/constants.hpp"
#include "spinres/errors.hpp"

namespace spinres {

using std::complex;
using namespace std::complex_literals;

MemoryState MemoryState::photon_in_cavity(std::size_t n_spins, complex<double> amplitude) {
  MemoryState st;
  st.a = amplitude;
  st.s = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n_spins));
  return st;
}

MemoryParams MemoryParams::from_ensemble(const SpinEnsemble& e, std::size_t n_spins,
                                         double kappa, double gamma2, double delta_c) {
  MemoryParams p;
  p.spins = e.materialize(n_spins);
  // The macro-spins stand in for the full population: scaling each coupling
  // by sqrt(total / count) keeps the collective coupling of the ensemble.
  const double scale = std::sqrt(e.total() / static_cast<double>(p.spins.size()));
  for (auto& m : p.spins) m.g *= scale;
  p.kappa = kappa;
  p.gamma2 = gamma2;
  p.delta_c = delta_c;
  return p;
}

double MemoryParams::g_ens() const {
  double sum_sq = 0.0;
  for (const auto& m : spins) sum_sq += m.g * m.g;
  return std::sqrt(sum_sq);
}

double MemoryParams::default_dt() const {
  double max_rate = std::max({g_ens(), kappa, gamma2, std::abs(delta_c)});
  for (const auto& m : spins) max_rate = std::max(max_rate, std::abs(m.delta));
  if (max_rate <= 0.0) return std::numeric_limits<double>::infinity();
  return 0.01 / max_rate;
}

void MemoryParams::validate() const {
  if (spins.empty()) throw InvalidInputError("memory model needs at least one spin");
  if (kappa < 0.0 || gamma2 < 0.0 || !std::isfinite(kappa) || !std::isfinite(gamma2))
    throw InvalidInputError("loss rates must be finite and non-negative");
  if (!std::isfinite(delta_c)) throw InvalidInputError("cavity detuning must be finite");
  for (const auto& m : spins) {
    if (!std::isfinite(m.g) || m.g < 0.0)
      throw InvalidInputError("spin couplings must be finite and non-negative");
    if (!std::isfinite(m.delta)) throw InvalidInputError("spin detunings must be finite");
  }
}

complex<double> ModeVector::overlap(const MemoryState& state) const {
  if (u.size() != state.s.size())
    throw InvalidInputError("mode vector and state have different spin counts");
  return u.dot(state.s);
}

ModeVector bright_mode(const MemoryParams& params) {
  const double g = params.g_ens();
  if (!(g > 0.0)) throw InvalidInputError("bright mode undefined without coupling");
  ModeVector m;
  m.u.resize(static_cast<Eigen::Index>(params.spins.size()));
  for (std::size_t j = 0; j < params.spins.size(); ++j)
    m.u[static_cast<Eigen::Index>(j)] = params.spins[j].g / g;
  return m;
}

namespace {

constexpr std::size_t max_steps_allowed = 40'000'000;

// Right-hand side of the coupled amplitude equations plus the flux stage
// value kappa |a|^2, evaluated at (a, s).
struct Model {
  Eigen::VectorXcd g;       // couplings as complex entries for dot products
  Eigen::VectorXcd coef_s;  // -(i delta_j + gamma2/2)
  complex<double> coef_a;   // -(i delta_c + kappa/2)
  double kappa = 0.0;

  explicit Model(const MemoryParams& p) {
    const auto n = static_cast<Eigen::Index>(p.spins.size());
    g.resize(n);
    coef_s.resize(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      g[j] = complex<double>(p.spins[static_cast<std::size_t>(j)].g, 0.0);
      coef_s[j] = complex<double>(-0.5 * p.gamma2, -p.spins[static_cast<std::size_t>(j)].delta);
    }
    coef_a = complex<double>(-0.5 * p.kappa, -p.delta_c);
    kappa = p.kappa;
  }

  void deriv(const complex<double>& a, const Eigen::VectorXcd& s, complex<double>& da,
             Eigen::VectorXcd& ds) const {
    da = coef_a * a - 1.0i * g.dot(s);
    ds = coef_s.cwiseProduct(s) - (1.0i * a) * g;
  }
};

bool finite(const MemoryState& st) {
  return std::isfinite(st.a.real()) && std::isfinite(st.a.imag()) && st.s.allFinite();
}

}  // namespace

EvolveRecord evolve_recorded(const MemoryState& state, const MemoryParams& params,
                             double duration, double dt, std::size_t max_trace_points) {
  params.validate();
  if (state.s.size() != static_cast<Eigen::Index>(params.spins.size()))
    throw InvalidInputError("state and parameters have different spin counts");
  if (!(duration >= 0.0) || !std::isfinite(duration))
    throw InvalidInputError("duration must be finite and non-negative");
  if (dt < 0.0 || !std::isfinite(dt)) throw InvalidInputError("dt must be finite and non-negative");
  if (!finite(state)) throw NumericalInstabilityError("initial state has non-finite amplitudes");

  EvolveRecord rec;
  rec.state = state;
  if (duration == 0.0) return rec;

  if (dt == 0.0) {
    dt = params.default_dt();
    if (!std::isfinite(dt)) dt = duration / 100.0;  // nothing evolves fast; any step works
  }
  const double steps_needed = std::ceil(duration / dt - 1e-12);
  if (steps_needed > static_cast<double>(max_steps_allowed))
    throw InvalidInputError("step count exceeds the fixed-step budget; raise dt or shorten the run");
  const auto n_steps = static_cast<std::size_t>(steps_needed);

  const Model model(params);
  const auto n = state.s.size();
  Eigen::VectorXcd k1s(n), k2s(n), k3s(n), k4s(n), stmp(n);
  complex<double> k1a, k2a, k3a, k4a;

  std::size_t stride = 0;
  if (max_trace_points > 1) {
    stride = std::max<std::size_t>(1, n_steps / (max_trace_points - 1));
    rec.trace.reserve(n_steps / stride + 2);
  }
  auto record = [&](const MemoryState& st) {
    rec.trace.push_back(TracePoint{st.time, st.a, st.s.squaredNorm(),
                                   model.kappa * std::norm(st.a)});
  };
  if (stride > 0) record(rec.state);

  MemoryState& st = rec.state;
  const double t_end = state.time + duration;
  for (std::size_t step = 0; step < n_steps; ++step) {
    const double h = std::min(dt, t_end - st.time);
    if (!(h > 0.0)) break;

    model.deriv(st.a, st.s, k1a, k1s);
    stmp = st.s + (0.5 * h) * k1s;
    const complex<double> a2 = st.a + (0.5 * h) * k1a;
    model.deriv(a2, stmp, k2a, k2s);
    stmp = st.s + (0.5 * h) * k2s;
    const complex<double> a3 = st.a + (0.5 * h) * k2a;
    model.deriv(a3, stmp, k3a, k3s);
    stmp = st.s + h * k3s;
    const complex<double> a4 = st.a + h * k3a;
    model.deriv(a4, stmp, k4a, k4s);

    rec.emitted_flux += model.kappa * (h / 6.0) *
                        (std::norm(st.a) + 2.0 * std::norm(a2) + 2.0 * std::norm(a3) +
                         std::norm(a4));
    st.a += (h / 6.0) * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
    st.s += (h / 6.0) * (k1s + 2.0 * k2s + 2.0 * k3s + k4s);
    st.time += h;

    if ((step & 1023u) == 1023u && !finite(st))
      throw NumericalInstabilityError("amplitudes diverged during integration");
    if (stride > 0 && (step + 1) % stride == 0 && step + 1 < n_steps) record(st);
  }
  st.time = t_end;  // exact landing, immune to rounding drift
  if (!finite(st)) throw NumericalInstabilityError("amplitudes diverged during integration");
  if (stride > 0) record(st);
  return rec;
}

MemoryState evolve(const MemoryState& state, const MemoryParams& params, double duration,
                   double dt) {
  return evolve_recorded(state, params, duration, dt).state;
}

SwapResult swap(const MemoryState& state, const MemoryParams& params) {
  params.validate();
  const double g = params.g_ens();
  if (!(g > 0.0)) throw NoTransferError("no spin couples to the cavity; nothing can transfer");
  const double a0 = std::norm(state.a);
  if (!(a0 > 0.0)) throw InvalidInputError("swap needs an excited cavity to start from");

  // Scan |a(t)|^2 across ten Rabi windows, then refine the first qualifying
  // local minimum with a parabola through its neighbours.
  const int scan_points = 600;
  const double window = 10.0 * constants::pi / g;
  const double seg = window / scan_points;

  std::vector<double> f(static_cast<std::size_t>(scan_points) + 1);
  f[0] = a0;
  MemoryState cur = state;
  for (int k = 1; k <= scan_points; ++k) {
    cur = evolve(cur, params, seg);
    f[static_cast<std::size_t>(k)] = std::norm(cur.a);
  }

  int best = -1;
  for (int k = 1; k < scan_points; ++k) {
    const auto i = static_cast<std::size_t>(k);
    if (f[i] <= f[i - 1] && f[i] <= f[i + 1] && f[i] < 0.5 * a0) {
      best = k;
      break;
    }
  }
  if (best < 0)
    throw NoTransferError(
        "cavity population never dropped below half its initial value within ten Rabi windows");

  const auto i = static_cast<std::size_t>(best);
  const double denom = f[i - 1] - 2.0 * f[i] + f[i + 1];
  double shift = 0.0;
  if (denom > 0.0) shift = 0.5 * seg * (f[i - 1] - f[i + 1]) / denom;
  shift = std::clamp(shift, -seg, seg);
  const double t_swap = static_cast<double>(best) * seg + shift;

  SwapResult result;
  result.state = evolve(state, params, t_swap);
  result.t_swap = t_swap;
  result.residual_fraction = std::norm(result.state.a) / a0;
  return result;
}

MemoryState apply_gradient(const MemoryState& state, const std::vector<double>& phases) {
  if (phases.size() != static_cast<std::size_t>(state.s.size()))
    throw InvalidInputError("one phase per spin required");
  MemoryState out = state;
  for (std::size_t j = 0; j < phases.size(); ++j) {
    if (!std::isfinite(phases[j])) throw InvalidInputError("phases must be finite");
    out.s[static_cast<Eigen::Index>(j)] *= std::exp(complex<double>(0.0, -phases[j]));
  }
  return out;
}

std::vector<double> mode_phases(std::size_t n, int k) {
  if (n == 0) throw InvalidInputError("mode phases need at least one spin");
  std::vector<double> phases(n);
  for (std::size_t j = 0; j < n; ++j)
    phases[j] = 2.0 * constants::pi * static_cast<double>(k) * static_cast<double>(j) /
                static_cast<double>(n);
  return phases;
}

RetrievalResult retrieve(const MemoryState& state, const MemoryParams& params,
                         const std::vector<double>& phases, double duration) {
  params.validate();
  MemoryState st = state;
  if (!phases.empty()) {
    std::vector<double> inverse(phases.size());
    std::transform(phases.begin(), phases.end(), inverse.begin(), std::negate<double>());
    st = apply_gradient(st, inverse);
  }
  const double initial = st.norm_sq();
  RetrievalResult result;
  if (initial <= 0.0) return result;

  if (duration <= 0.0) {
    const double g = params.g_ens();
    duration = 0.0;
    if (g > 0.0) duration = 4.0 * constants::pi / g;
    if (params.kappa > 0.0) duration = std::max(duration, 25.0 / params.kappa);
    if (duration == 0.0) duration = 1.0;  // static state, any window reports zero
  }

  auto rec = evolve_recorded(st, params, duration, 0.0, 1500);
  result.state = std::move(rec.state);
  result.efficiency = rec.emitted_flux / initial;
  result.duration = duration;
  result.trace = std::move(rec.trace);
  return result;
}

MultimodeReport multimode_store_retrieve(const Eigen::VectorXcd& inputs,
                                         const MemoryParams& params) {
  params.validate();
  const std::size_t n = params.spins.size();
  const auto m_count = static_cast<std::size_t>(inputs.size());
  if (m_count == 0) throw InvalidInputError("need at least one qubit amplitude");
  if (m_count > n)
    throw CapacityError("more qubits than spins: the mode ladder holds at most one per spin");

  // Reference transfer time from a clean single-photon swap.
  const double t_swap = swap(MemoryState::photon_in_cavity(n), params).t_swap;
  const auto step_fwd = mode_phases(n, 1);
  const auto step_back = mode_phases(n, -1);

  // Whole protocol on one input vector: store swaps each qubit into the
  // bright mode and shifts the ladder; retrieval walks back LIFO, reads the
  // cavity and empties it into the (ideal) output line.
  auto run = [&](const Eigen::VectorXcd& in) {
    MemoryState st = MemoryState::photon_in_cavity(n, 0.0);
    for (std::size_t m = 0; m < m_count; ++m) {
      st.a += in[static_cast<Eigen::Index>(m)];
      st = evolve(st, params, t_swap);
      st = apply_gradient(st, step_fwd);
    }
    Eigen::VectorXcd out(static_cast<Eigen::Index>(m_count));
    for (std::size_t m = m_count; m-- > 0;) {
      st = apply_gradient(st, step_back);
      st = evolve(st, params, t_swap);
      out[static_cast<Eigen::Index>(m)] = st.a;
      st.a = 0.0;
    }
    return out;
  };

  MultimodeReport report;
  report.t_swap = t_swap;
  report.transfer.resize(static_cast<Eigen::Index>(m_count), static_cast<Eigen::Index>(m_count));
  for (std::size_t j = 0; j < m_count; ++j) {
    Eigen::VectorXcd basis = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(m_count));
    basis[static_cast<Eigen::Index>(j)] = 1.0;
    report.transfer.col(static_cast<Eigen::Index>(j)) = run(basis);
  }

  report.fidelities.resize(m_count);
  report.max_crosstalk = 0.0;
  for (std::size_t i = 0; i < m_count; ++i) {
    report.fidelities[i] = std::abs(report.transfer(static_cast<Eigen::Index>(i),
                                                    static_cast<Eigen::Index>(i)));
    for (std::size_t j = 0; j < m_count; ++j)
      if (i != j)
        report.max_crosstalk = std::max(report.max_crosstalk,
                                        std::abs(report.transfer(static_cast<Eigen::Index>(i),
                                                                 static_cast<Eigen::Index>(j))));
  }
  report.retrieved = report.transfer * inputs;
  return report;
}

EchoReport echo_photon_count(double g0, double kappa, double gamma2_star, double n_spins,
                             const EchoOptions& options) {
  if (!(g0 >= 0.0) || !std::isfinite(g0))
    throw InvalidInputError("single-spin coupling must be finite and non-negative");
  if (!(kappa > 0.0)) throw InvalidInputError("cavity decay must be positive");
  if (!(gamma2_star > 0.0)) throw InvalidInputError("dephasing rate must be positive");
  if (!(n_spins >= 1.0)) throw InvalidInputError("need at least one spin");
  if (options.n_sim < 2) throw InvalidInputError("need at least two simulated spins");

  EchoReport report;
  report.cooperativity = 4.0 * g0 * g0 / (kappa * gamma2_star);
  report.analytic_photons = n_spins * n_spins * report.cooperativity;
  if (g0 == 0.0) return report;

  // n_sim macro-spins carry the ensemble: couplings scaled to preserve
  // sum g^2 = N g0^2, amplitudes scaled to norm^2 = N, detunings placed at
  // stratified quantiles of the Lorentzian line (half width gamma2_star).
  const auto n = options.n_sim;
  MemoryParams p;
  p.kappa = kappa;
  p.spins.resize(n);
  const double scale = std::sqrt(n_spins / static_cast<double>(n));
  const double clamp = options.clamp_widths * gamma2_star;
  for (std::size_t i = 0; i < n; ++i) {
    const double q = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    const double delta = gamma2_star * std::tan(constants::pi * (q - 0.5));
    p.spins[i] = SpinMember{g0 * scale, std::clamp(delta, -clamp, clamp)};
  }

  MemoryState st;
  st.a = 0.0;
  st.s = Eigen::VectorXcd::Constant(static_cast<Eigen::Index>(n), scale);

  const double duration = options.duration_widths / gamma2_star;
  report.simulated_photons = evolve_recorded(st, p, duration).emitted_flux;
  return report;
}

}  // namespace spinres
