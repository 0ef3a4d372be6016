#include "privlq/sim.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <cstdio>
#include <deque>
#include <optional>

#include "privlq/errors.hpp"
#include "privlq/linalg.hpp"

namespace privlq {

namespace {

/// Mailbox-driven controller: consumes a blurred state, replies with
/// u = L(k) x_blurred. Both controllers derive the same schedule from the
/// public parameters; the plant side never holds it.
class ControllerActor {
 public:
  ControllerActor(Side side, const GainSchedule& gains) : side_(side), gains_(gains) {}

  void deliver(const Message& msg) {
    const Eigen::VectorXd reply = lq_control(gains_.L[msg.k], msg.payload);
    outbox_.push_back(Message{Message::Kind::ControlToPlant, msg.k, side_, reply, 0});
  }

  /// Sequence numbers stamp arrival order on the shared channel.
  std::optional<Message> poll(std::int64_t& sequence) {
    if (outbox_.empty()) return std::nullopt;
    Message msg = outbox_.front();
    outbox_.pop_front();
    msg.sequence = sequence++;
    return msg;
  }

 private:
  Side side_;
  const GainSchedule& gains_;
  std::deque<Message> outbox_;
};

Eigen::VectorXd observation_for(const AdversaryMode& mode, const BlurredStatePair& pair) {
  if (!mode.is_colluding()) return mode.side == Side::Alpha ? pair.x_alpha : pair.x_beta;
  Eigen::VectorXd stacked(pair.x_alpha.size() + pair.x_beta.size());
  stacked << pair.x_alpha, pair.x_beta;
  return stacked;
}

}  // namespace

Eigen::VectorXd plant_step(const SystemModel& model, const Eigen::VectorXd& x, const Eigen::VectorXd& u,
                           const Eigen::VectorXd& w) {
  return model.A * x + model.B * u + w;
}

SimTrace run_closed_loop(const SystemModel& model, const NoiseScheme& scheme,
                         const std::vector<AdversaryMode>& adversaries, RngStream rng, SimOptions options) {
  const int n = model.state_dim();
  const int m = model.input_dim();
  const int N = model.N;
  if (scheme.dim() != n)
    throw DimensionMismatchError("noise scheme dimension " + std::to_string(scheme.dim()) +
                                 " does not match state dimension " + std::to_string(n));
  if (options.w_override && static_cast<int>(options.w_override->size()) < N)
    throw DimensionMismatchError("w_override must supply at least N noise vectors");

  const GainSchedule gains = compute_gain_schedule(model);
  std::vector<Eigen::MatrixXd> F(N);
  for (int k = 0; k < N; ++k) F[k] = model.A + model.B * gains.L[k];

  SimTrace trace;
  trace.n = n;
  trace.m = m;
  trace.N = N;
  trace.x.reserve(N + 1);
  trace.x.push_back(model.x0);

  ControllerActor controller_alpha(Side::Alpha, gains);
  ControllerActor controller_beta(Side::Beta, gains);
  std::int64_t sequence = 0;

  struct AdversaryRun {
    AdversaryMode mode;
    AdversaryState state;
  };
  std::vector<AdversaryRun> runs;
  for (const auto& mode : adversaries) {
    AdversaryTrace at;
    at.mode = mode;
    at.init = options.collusion_init;
    at.gains.F = F;
    at.gains.G.assign(1, Eigen::MatrixXd());  // slot 0: no gain at the init step
    const auto bounds = trace_bounds(scheme, model.W, mode);
    at.trace_lower = bounds.first;
    at.trace_upper = bounds.second;
    trace.adversaries.push_back(std::move(at));
    runs.push_back(AdversaryRun{mode, AdversaryState{}});
  }

  const Eigen::MatrixXd chol_w = Eigen::LLT<Eigen::MatrixXd>(model.W).matrixL();

  for (int k = 0; k < N; ++k) {
    const Eigen::VectorXd& x = trace.x.back();
    const NoiseDraw draw = generate_noise(scheme, k, rng);
    const BlurredStatePair pair = encode(x, draw);

    trace.messages.push_back(Message{Message::Kind::StateToController, k, Side::Alpha, pair.x_alpha, sequence++});
    controller_alpha.deliver(trace.messages.back());
    trace.messages.push_back(Message{Message::Kind::StateToController, k, Side::Beta, pair.x_beta, sequence++});
    controller_beta.deliver(trace.messages.back());

    const Message reply_alpha = *controller_alpha.poll(sequence);
    const Message reply_beta = *controller_beta.poll(sequence);
    trace.messages.push_back(reply_alpha);
    trace.messages.push_back(reply_beta);

    const Eigen::VectorXd u_nominal = gains.L[k] * x;
    const Eigen::VectorXd u = options.restorer_enabled
                                  ? restore(reply_alpha.payload, reply_beta.payload, draw.rho_used,
                                            scheme.min_rho_gap)
                                  : reply_beta.payload;

    const double scale = 1.0 + u_nominal.cwiseAbs().maxCoeff();
    const double residual = (u - u_nominal).cwiseAbs().maxCoeff() / scale;
    if (options.restorer_enabled) trace.max_restoration_residual = std::max(trace.max_restoration_residual, residual);

    for (std::size_t a = 0; a < runs.size(); ++a) {
      auto& run = runs[a];
      auto& at = trace.adversaries[a];
      const Eigen::VectorXd obs = observation_for(run.mode, pair);
      if (k == 0) {
        run.state = kf_init(scheme, obs, run.mode, options.collusion_init);
      } else {
        KfStepResult step = kf_step(run.state, obs, F[k - 1], model.W, scheme, run.mode);
        run.state = std::move(step.state);
        at.gains.G.push_back(std::move(step.gain));
      }
      at.xhat.push_back(run.state.xhat);
      at.P.push_back(run.state.P);
      at.trace_P.push_back(run.state.P.trace());
    }

    Eigen::VectorXd w;
    if (options.w_override) {
      w = (*options.w_override)[k];
    } else {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z(i) = rng.gaussian();
      w = chol_w * z;
    }

    trace.u.push_back(u);
    trace.u_nominal.push_back(u_nominal);
    trace.x_alpha.push_back(pair.x_alpha);
    trace.x_beta.push_back(pair.x_beta);
    trace.u_alpha.push_back(reply_alpha.payload);
    trace.u_beta.push_back(reply_beta.payload);
    trace.rho.push_back(draw.rho_used);
    trace.w.push_back(w);
    trace.x.push_back(plant_step(model, x, u, w));
  }

  const std::vector<Eigen::VectorXd> states(trace.x.begin() + 1, trace.x.end());
  const std::vector<Eigen::VectorXd> controls(trace.u.begin() + 1, trace.u.end());
  trace.cost = evaluate_cost(states, controls, model);
  return trace;
}

PairedCostResult paired_cost_experiment(const SystemModel& model, const NoiseScheme& scheme, RngStream rng,
                                        int runs, bool restorer_enabled) {
  if (runs < 1) throw ParameterOutOfRangeError("paired experiment needs runs >= 1");
  const int n = model.state_dim();
  const int N = model.N;
  const GainSchedule gains = compute_gain_schedule(model);
  const Eigen::MatrixXd chol_w = Eigen::LLT<Eigen::MatrixXd>(model.W).matrixL();

  PairedCostResult result;
  result.delta_j.reserve(runs);
  for (int run = 0; run < runs; ++run) {
    RngStream run_rng = rng.substream(static_cast<std::uint64_t>(run));
    RngStream w_rng = run_rng.substream(0);
    RngStream noise_rng = run_rng.substream(1);

    std::vector<Eigen::VectorXd> w_seq(N);
    for (int k = 0; k < N; ++k) {
      Eigen::VectorXd z(n);
      for (int i = 0; i < n; ++i) z(i) = w_rng.gaussian();
      w_seq[k] = chol_w * z;
    }

    SimOptions options;
    options.restorer_enabled = restorer_enabled;
    options.w_override = &w_seq;
    const SimTrace trace = run_closed_loop(model, scheme, {}, noise_rng, options);

    // Plain rollout, u = L x directly, on the identical noise.
    std::vector<Eigen::VectorXd> states;
    std::vector<Eigen::VectorXd> controls;
    Eigen::VectorXd x = model.x0;
    for (int k = 0; k < N; ++k) {
      const Eigen::VectorXd u = gains.L[k] * x;
      if (k >= 1) controls.push_back(u);
      x = plant_step(model, x, u, w_seq[k]);
      states.push_back(x);
    }
    const double j_plain = evaluate_cost(states, controls, model);

    result.j_privacy.push_back(trace.cost);
    result.j_plain.push_back(j_plain);
    result.delta_j.push_back(trace.cost - j_plain);
  }

  const double count = static_cast<double>(runs);
  for (int run = 0; run < runs; ++run) {
    result.j_privacy_mean += result.j_privacy[run] / count;
    result.j_plain_mean += result.j_plain[run] / count;
    result.delta_j_mean += result.delta_j[run] / count;
  }
  if (runs > 1) {
    double var = 0.0;
    for (double dj : result.delta_j) var += (dj - result.delta_j_mean) * (dj - result.delta_j_mean);
    var /= count - 1.0;
    result.delta_j_stderr = std::sqrt(var / count);
  }
  return result;
}

CollusionResult collusion_experiment(const SystemModel& model, const NoiseScheme& scheme, RngStream rng,
                                     double epsilon, std::int64_t mc_samples, CollusionInit init) {
  if (!scheme.is_random_rho())
    throw ParameterOutOfRangeError("collusion experiment requires the RandomRho noise mode");
  SimOptions options;
  options.collusion_init = init;
  CollusionResult result;
  result.trace = run_closed_loop(model, scheme, {AdversaryMode::colluding()}, rng.substream(0), options);
  const AdversaryTrace& at = result.trace.adversaries.front();
  result.report = make_privacy_report(at.mode, at.init, at.P, at.gains, scheme, model.W, epsilon, mc_samples,
                                      rng.substream(1));
  return result;
}

namespace {

void append_num(std::string& line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  line += ',';
  line += buf;
}

void append_vec_header(std::string& header, const std::string& prefix, int dim) {
  for (int i = 1; i <= dim; ++i) header += "," + prefix + "_" + std::to_string(i);
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace) {
  std::string header = "k";
  append_vec_header(header, "x", trace.n);
  append_vec_header(header, "u", trace.m);
  append_vec_header(header, "xt_a", trace.n);
  append_vec_header(header, "xt_b", trace.n);
  append_vec_header(header, "ut_a", trace.m);
  append_vec_header(header, "ut_b", trace.m);
  header += ",rho";
  append_vec_header(header, "w", trace.n);
  for (const auto& at : trace.adversaries) {
    append_vec_header(header, at.mode.tag() + "_xhat", trace.n);
    header += "," + at.mode.tag() + "_trP," + at.mode.tag() + "_trP_lo," + at.mode.tag() + "_trP_hi";
  }
  out << header << '\n';

  for (int k = 0; k < trace.N; ++k) {
    std::string line = std::to_string(k);
    for (int i = 0; i < trace.n; ++i) append_num(line, trace.x[k](i));
    for (int i = 0; i < trace.m; ++i) append_num(line, trace.u[k](i));
    for (int i = 0; i < trace.n; ++i) append_num(line, trace.x_alpha[k](i));
    for (int i = 0; i < trace.n; ++i) append_num(line, trace.x_beta[k](i));
    for (int i = 0; i < trace.m; ++i) append_num(line, trace.u_alpha[k](i));
    for (int i = 0; i < trace.m; ++i) append_num(line, trace.u_beta[k](i));
    append_num(line, trace.rho[k]);
    for (int i = 0; i < trace.n; ++i) append_num(line, trace.w[k](i));
    for (const auto& at : trace.adversaries) {
      for (int i = 0; i < trace.n; ++i) append_num(line, at.xhat[k](i));
      append_num(line, at.trace_P[k]);
      append_num(line, at.trace_lower);
      append_num(line, at.trace_upper);
    }
    out << line << '\n';
  }
}

}  // namespace privlq
