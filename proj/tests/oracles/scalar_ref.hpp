#pragma once

// Independent scalar reference implementations used only by tests. These
// deliberately avoid the library's math code paths: plain loops over plain
// arrays, so they can serve as oracles for the real implementations.

#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;
using Mat = std::vector<std::vector<double>>;  // [row][col]

inline Vec matvec_ref(const Mat& w, const Vec& x, const Vec& b) {
  Vec out(w.size(), 0.0);
  for (std::size_t r = 0; r < w.size(); ++r) {
    double acc = 0.0;
    for (std::size_t c = 0; c < w[r].size(); ++c) acc += w[r][c] * x[c];
    out[r] = acc + b[r];
  }
  return out;
}

inline Vec relu_ref(Vec v) {
  for (double& x : v) x = x > 0.0 ? x : 0.0;
  return v;
}

inline double sigmoid_ref(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LstmWeights {
  // gate matrices are hidden x (input + hidden), acting on [x ; h]
  Mat wi, wf, wg, wo;
  Vec bi, bf, bg, bo;
};

// Step-by-step scalar LSTM over a sequence, zero initial state, returning
// the final hidden state.
inline Vec lstm_ref(const LstmWeights& w, const std::vector<Vec>& sequence, std::size_t hidden) {
  Vec h(hidden, 0.0), c(hidden, 0.0);
  for (const Vec& x : sequence) {
    Vec xh(x);
    xh.insert(xh.end(), h.begin(), h.end());
    const Vec zi = matvec_ref(w.wi, xh, w.bi);
    const Vec zf = matvec_ref(w.wf, xh, w.bf);
    const Vec zg = matvec_ref(w.wg, xh, w.bg);
    const Vec zo = matvec_ref(w.wo, xh, w.bo);
    for (std::size_t j = 0; j < hidden; ++j) {
      const double i = sigmoid_ref(zi[j]);
      const double f = sigmoid_ref(zf[j]);
      const double g = std::tanh(zg[j]);
      const double o = sigmoid_ref(zo[j]);
      c[j] = f * c[j] + i * g;
      h[j] = o * std::tanh(c[j]);
    }
  }
  return h;
}

inline double rel_diff(double a, double b) {
  const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

inline double max_rel_diff(const Vec& a, const Vec& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, rel_diff(a[i], b[i]));
  return worst;
}

}  // namespace oracle
