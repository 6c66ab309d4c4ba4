#include "anet/math/layers.hpp"

#include <cmath>

namespace anet::math {
namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// y = W x + b, W row-major rows x cols
void affine(const ParamBlock& w, const ParamBlock& b, std::span<const double> x, Vec& out) {
  out.resize(w.rows);
  const double* wp = w.value.data();
  for (std::size_t r = 0; r < w.rows; ++r) {
    double acc = b.value[r];
    const double* row = wp + r * w.cols;
    for (std::size_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
}

// grads for y = W x + b given dz = dL/dy:
//   dW += dz x^T, db += dz, dx += W^T dz
void affine_backward(ParamBlock& w, ParamBlock& b, std::span<const double> x,
                     std::span<const double> dz, Vec* dx) {
  double* wg = w.grad.data();
  const double* wp = w.value.data();
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double d = dz[r];
    if (d == 0.0) continue;
    double* grow = wg + r * w.cols;
    const double* row = wp + r * w.cols;
    for (std::size_t c = 0; c < w.cols; ++c) grow[c] += d * x[c];
    b.grad[r] += d;
    if (dx) {
      double* dxp = dx->data();
      for (std::size_t c = 0; c < w.cols; ++c) dxp[c] += row[c] * d;
    }
  }
}

double glorot_bound(std::size_t fan_in, std::size_t fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

void fill_uniform(Vec& v, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (double& x : v) x = dist(rng);
}

}  // namespace

DenseLayer::DenseLayer(std::string name, std::size_t out_dim, std::size_t in_dim, Activation act)
    : weights(name + ".w", out_dim, in_dim, true),
      bias(name + ".b", out_dim, 1, false),
      act_(act) {
  require(out_dim >= 1 && in_dim >= 1, "DenseLayer: dims must be >= 1");
}

void DenseLayer::init(std::mt19937_64& rng) {
  fill_uniform(weights.value, glorot_bound(in_dim(), out_dim()), rng);
  std::fill(bias.value.begin(), bias.value.end(), 0.0);
}

Vec DenseLayer::forward(std::span<const double> input) const {
  require(input.size() == in_dim(),
          "dense_forward(" + weights.name + "): input length " + std::to_string(input.size()) +
              " != in_dim " + std::to_string(in_dim()));
  Vec out;
  affine(weights, bias, input, out);
  if (act_ == Activation::ReLU) {
    for (double& x : out) x = x > 0.0 ? x : 0.0;
  }
  return out;
}

NodeId DenseLayer::forward(Tape& tape, NodeId input) {
  const Vec& x = tape.value(input);
  require(x.size() == in_dim(),
          "dense_forward(" + weights.name + "): input length " + std::to_string(x.size()) +
              " != in_dim " + std::to_string(in_dim()));
  Vec pre;
  affine(weights, bias, x, pre);
  Vec act = pre;
  if (act_ == Activation::ReLU) {
    for (double& v : act) v = v > 0.0 ? v : 0.0;
  }
  NodeId out = tape.leaf(std::move(act));
  tape.record([this, &tape, input, out, pre = std::move(pre)]() {
    const Vec& dy = tape.grad(out);
    Vec dz(dy.begin(), dy.end());
    if (act_ == Activation::ReLU) {
      for (std::size_t i = 0; i < dz.size(); ++i) {
        if (pre[i] <= 0.0) dz[i] = 0.0;
      }
    }
    affine_backward(weights, bias, tape.value(input), dz, &tape.grad(input));
  });
  return out;
}

LstmCell::LstmCell(std::string name, std::size_t input_dim, std::size_t hidden_dim)
    : w_input(name + ".wi", hidden_dim, input_dim + hidden_dim, true),
      w_forget(name + ".wf", hidden_dim, input_dim + hidden_dim, true),
      w_candidate(name + ".wg", hidden_dim, input_dim + hidden_dim, true),
      w_output(name + ".wo", hidden_dim, input_dim + hidden_dim, true),
      b_input(name + ".bi", hidden_dim, 1, false),
      b_forget(name + ".bf", hidden_dim, 1, false),
      b_candidate(name + ".bg", hidden_dim, 1, false),
      b_output(name + ".bo", hidden_dim, 1, false),
      input_dim_(input_dim),
      hidden_dim_(hidden_dim) {
  require(input_dim >= 1 && hidden_dim >= 1, "LstmCell: dims must be >= 1");
}

void LstmCell::init(std::mt19937_64& rng) {
  const double bound = glorot_bound(input_dim_ + hidden_dim_, hidden_dim_);
  fill_uniform(w_input.value, bound, rng);
  fill_uniform(w_forget.value, bound, rng);
  fill_uniform(w_candidate.value, bound, rng);
  fill_uniform(w_output.value, bound, rng);
  std::fill(b_input.value.begin(), b_input.value.end(), 0.0);
  // forget bias 1.0: keeps long histories flowing early in training
  std::fill(b_forget.value.begin(), b_forget.value.end(), 1.0);
  std::fill(b_candidate.value.begin(), b_candidate.value.end(), 0.0);
  std::fill(b_output.value.begin(), b_output.value.end(), 0.0);
}

Vec LstmCell::forward(std::span<const Vec> sequence) const {
  Vec h(hidden_dim_, 0.0);
  Vec c(hidden_dim_, 0.0);
  Vec xh(input_dim_ + hidden_dim_);
  Vec zi, zf, zg, zo;
  for (const Vec& x : sequence) {
    require(x.size() == input_dim_,
            "lstm_forward: element length " + std::to_string(x.size()) + " != input_dim " +
                std::to_string(input_dim_));
    std::copy(x.begin(), x.end(), xh.begin());
    std::copy(h.begin(), h.end(), xh.begin() + static_cast<std::ptrdiff_t>(input_dim_));
    affine(w_input, b_input, xh, zi);
    affine(w_forget, b_forget, xh, zf);
    affine(w_candidate, b_candidate, xh, zg);
    affine(w_output, b_output, xh, zo);
    for (std::size_t j = 0; j < hidden_dim_; ++j) {
      const double i = sigmoid(zi[j]);
      const double f = sigmoid(zf[j]);
      const double g = std::tanh(zg[j]);
      const double o = sigmoid(zo[j]);
      c[j] = f * c[j] + i * g;
      h[j] = o * std::tanh(c[j]);
    }
  }
  return h;
}

LstmCell::State LstmCell::initial_state(Tape& tape) const {
  return State{tape.zeros(hidden_dim_), tape.zeros(hidden_dim_)};
}

LstmCell::State LstmCell::step(Tape& tape, NodeId input, State prev) {
  const Vec& x = tape.value(input);
  require(x.size() == input_dim_,
          "lstm step: element length " + std::to_string(x.size()) + " != input_dim " +
              std::to_string(input_dim_));
  const Vec& h_prev = tape.value(prev.hidden);
  const Vec& c_prev = tape.value(prev.cell);

  Vec xh(input_dim_ + hidden_dim_);
  std::copy(x.begin(), x.end(), xh.begin());
  std::copy(h_prev.begin(), h_prev.end(), xh.begin() + static_cast<std::ptrdiff_t>(input_dim_));

  Vec zi, zf, zg, zo;
  affine(w_input, b_input, xh, zi);
  affine(w_forget, b_forget, xh, zf);
  affine(w_candidate, b_candidate, xh, zg);
  affine(w_output, b_output, xh, zo);

  Vec gi(hidden_dim_), gf(hidden_dim_), gg(hidden_dim_), go(hidden_dim_);
  Vec c_new(hidden_dim_), tanh_c(hidden_dim_), h_new(hidden_dim_);
  for (std::size_t j = 0; j < hidden_dim_; ++j) {
    gi[j] = sigmoid(zi[j]);
    gf[j] = sigmoid(zf[j]);
    gg[j] = std::tanh(zg[j]);
    go[j] = sigmoid(zo[j]);
    c_new[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
    tanh_c[j] = std::tanh(c_new[j]);
    h_new[j] = go[j] * tanh_c[j];
  }

  NodeId h_out = tape.leaf(std::move(h_new));
  NodeId c_out = tape.leaf(std::move(c_new));

  tape.record([this, &tape, input, prev, h_out, c_out, xh = std::move(xh), gi = std::move(gi),
               gf = std::move(gf), gg = std::move(gg), go = std::move(go),
               tanh_c = std::move(tanh_c)]() {
    const Vec& dh = tape.grad(h_out);
    const Vec& dc_out = tape.grad(c_out);
    const Vec& c_prev = tape.value(prev.cell);

    const std::size_t h_dim = hidden_dim_;
    Vec dzi(h_dim), dzf(h_dim), dzg(h_dim), dzo(h_dim);
    Vec& dc_prev = tape.grad(prev.cell);
    for (std::size_t j = 0; j < h_dim; ++j) {
      const double dc = dc_out[j] + dh[j] * go[j] * (1.0 - tanh_c[j] * tanh_c[j]);
      dzo[j] = dh[j] * tanh_c[j] * go[j] * (1.0 - go[j]);
      dzi[j] = dc * gg[j] * gi[j] * (1.0 - gi[j]);
      dzf[j] = dc * c_prev[j] * gf[j] * (1.0 - gf[j]);
      dzg[j] = dc * gi[j] * (1.0 - gg[j] * gg[j]);
      dc_prev[j] += dc * gf[j];
    }

    Vec dxh(input_dim_ + h_dim, 0.0);
    affine_backward(w_input, b_input, xh, dzi, &dxh);
    affine_backward(w_forget, b_forget, xh, dzf, &dxh);
    affine_backward(w_candidate, b_candidate, xh, dzg, &dxh);
    affine_backward(w_output, b_output, xh, dzo, &dxh);

    Vec& dx = tape.grad(input);
    for (std::size_t j = 0; j < input_dim_; ++j) dx[j] += dxh[j];
    Vec& dhp = tape.grad(prev.hidden);
    for (std::size_t j = 0; j < h_dim; ++j) dhp[j] += dxh[input_dim_ + j];
  });

  return State{h_out, c_out};
}

NodeId LstmCell::forward(Tape& tape, std::span<const NodeId> sequence) {
  State state = initial_state(tape);
  for (NodeId x : sequence) state = step(tape, x, state);
  return state.hidden;
}

Vec dropout_forward(std::span<const double> input, double rate, bool training,
                    std::mt19937_64& rng) {
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0, 1)");
  Vec out(input.begin(), input.end());
  if (!training || rate == 0.0) return out;
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double scale = 1.0 / (1.0 - rate);
  for (double& x : out) x = dist(rng) < rate ? 0.0 : x * scale;
  return out;
}

NodeId dropout_forward(Tape& tape, NodeId input, double rate, bool training,
                       std::mt19937_64& rng) {
  require(rate >= 0.0 && rate < 1.0, "dropout: rate must be in [0, 1)");
  const Vec& x = tape.value(input);
  if (!training || rate == 0.0) {
    // identity still records so gradients pass through unchanged
    NodeId out = tape.leaf(Vec(x));
    tape.record([&tape, input, out]() {
      const Vec& d = tape.grad(out);
      Vec& dx = tape.grad(input);
      for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += d[i];
    });
    return out;
  }
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  const double scale = 1.0 / (1.0 - rate);
  Vec mask(x.size());
  Vec out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mask[i] = dist(rng) < rate ? 0.0 : scale;
    out[i] = x[i] * mask[i];
  }
  NodeId id = tape.leaf(std::move(out));
  tape.record([&tape, input, id, mask = std::move(mask)]() {
    const Vec& d = tape.grad(id);
    Vec& dx = tape.grad(input);
    for (std::size_t i = 0; i < dx.size(); ++i) dx[i] += d[i] * mask[i];
  });
  return id;
}

}  // namespace anet::math
