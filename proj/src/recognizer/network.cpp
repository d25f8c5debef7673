// Copyright 2026 The typedhwr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "typedhwr/recognizer/network.hpp"

#include <algorithm>
#include <cmath>

#include "typedhwr/common/error.hpp"
#include "typedhwr/common/parallel.hpp"

namespace typedhwr::recognizer {

namespace {

using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMap = Eigen::Map<const RowMat>;
using RowMap = Eigen::Map<RowMat>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kBnEps = 1e-5;

// C x H x W activation, row-major per channel plane.
struct Act {
  int c = 0, h = 0, w = 0;
  std::vector<double> v;

  Act() = default;
  Act(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<std::size_t>(c_) * h_ * w_, 0.0) {}
  double* plane(int ch) { return v.data() + static_cast<std::size_t>(ch) * h * w; }
  const double* plane(int ch) const { return v.data() + static_cast<std::size_t>(ch) * h * w; }
  double& at(int ch, int y, int x) { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
  double at(int ch, int y, int x) const { return v[(static_cast<std::size_t>(ch) * h + y) * w + x]; }
};

struct PoolTape {
  Act out;
  std::vector<int> argmax;  // flat index into the input plane, per output element
  PoolKind kind;
};

struct ConvTape {
  Act z;      // conv output
  Act xhat;   // BatchNorm-normalized z (BatchNorm layers only)
  Act relu;   // after BatchNorm and ReLU
  std::vector<PoolTape> pools;
  const Act& out() const { return pools.empty() ? relu : pools.back().out; }
};

struct LstmDirTape {
  MatrixXd gates;  // 4H x v, activated (i, f, g, o)
  MatrixXd c, tanh_c, h;
};

struct LstmLayerTape {
  MatrixXd input;  // D x v
  LstmDirTape fw, bw;
};

struct SampleTape {
  int original_width = 0;
  int out_columns = 0;  // full (uncropped) column count
  int valid = 0;
  Act image;
  std::vector<ConvTape> conv;
  std::vector<LstmLayerTape> lstm;
  MatrixXd features;  // 2H x v
  ctc::LogitSequence logits;
};

struct BnStats {
  std::vector<double> mean, inv_std, var;
};

std::vector<std::vector<const PoolSpec*>> pools_by_layer(const ArchConfig& arch) {
  std::vector<std::vector<const PoolSpec*>> out(arch.conv_layers.size());
  for (const auto& p : arch.pools) out[static_cast<std::size_t>(p.after_layer)].push_back(&p);
  return out;
}

// Horizontal stride of the input of conv layer l.
int stride_before(const ArchConfig& arch, std::size_t layer) {
  int s = 1;
  for (const auto& p : arch.pools) {
    if (static_cast<std::size_t>(p.after_layer) < layer && p.kind == PoolKind::k2x2) s *= 2;
  }
  return s;
}

// Input columns needed for the first `valid` output columns to be exact.
int needed_input_width(const ArchConfig& arch, int valid) {
  const auto by_layer = pools_by_layer(arch);
  long need = valid;
  for (std::size_t l = arch.conv_layers.size(); l-- > 0;) {
    for (auto it = by_layer[l].rbegin(); it != by_layer[l].rend(); ++it) {
      if ((*it)->kind == PoolKind::k2x2) need *= 2;
    }
    need += 1;
  }
  return static_cast<int>(std::min<long>(need, 1L << 30));
}

// out = bias + sum_ci sum_ky sum_kx w * in, zero padding 1. Each output
// element accumulates in (ci, ky, kx) order whatever the image width.
void conv_forward(const Act& in, const double* weight, const double* bias, Act& out) {
  const int H = in.h, W = in.w;
  for (int co = 0; co < out.c; ++co) {
    double* o = out.plane(co);
    std::fill(o, o + static_cast<std::size_t>(H) * W, bias[co]);
    for (int ci = 0; ci < in.c; ++ci) {
      const double* src = in.plane(ci);
      const double* k = weight + (static_cast<std::size_t>(co) * in.c + ci) * 9;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const double wv = k[ky * 3 + kx];
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          for (int y = std::max(0, 1 - ky); y < std::min(H, H + 1 - ky); ++y) {
            double* orow = o + static_cast<std::size_t>(y) * W;
            const double* irow = src + static_cast<std::size_t>(y + ky - 1) * W + dx;
            for (int x = x0; x < x1; ++x) orow[x] += wv * irow[x];
          }
        }
      }
    }
  }
}

// sum_x a[x] * b[x] with four accumulators keyed by absolute x, so extra
// zero terms at the end never change the result.
double lane_dot(const double* a, const double* b, int x0, int x1) {
  double acc[4] = {0, 0, 0, 0};
  int x = x0;
  for (; x < x1 && (x & 3) != 0; ++x) acc[x & 3] += a[x] * b[x];
  for (; x + 4 <= x1; x += 4) {
    acc[0] += a[x] * b[x];
    acc[1] += a[x + 1] * b[x + 1];
    acc[2] += a[x + 2] * b[x + 2];
    acc[3] += a[x + 3] * b[x + 3];
  }
  for (; x < x1; ++x) acc[x & 3] += a[x] * b[x];
  return (acc[0] + acc[1]) + (acc[2] + acc[3]);
}

void conv_backward(const Act& in, const double* weight, const Act& dout, double* dweight, double* dbias,
                   Act* din) {
  const int H = in.h, W = in.w;
  for (int co = 0; co < dout.c; ++co) {
    const double* g = dout.plane(co);
    double acc[4] = {0, 0, 0, 0};
    for (int y = 0; y < H; ++y) {
      for (int x = 0; x < W; ++x) acc[x & 3] += g[static_cast<std::size_t>(y) * W + x];
    }
    dbias[co] += (acc[0] + acc[1]) + (acc[2] + acc[3]);
    for (int ci = 0; ci < in.c; ++ci) {
      const double* src = in.plane(ci);
      double* dk = dweight + (static_cast<std::size_t>(co) * in.c + ci) * 9;
      const double* k = weight + (static_cast<std::size_t>(co) * in.c + ci) * 9;
      double* dsrc = din ? din->plane(ci) : nullptr;
      for (int ky = 0; ky < 3; ++ky) {
        for (int kx = 0; kx < 3; ++kx) {
          const int dx = kx - 1;
          const int x0 = std::max(0, -dx), x1 = std::min(W, W - dx);
          double s = 0;
          const double wv = k[ky * 3 + kx];
          for (int y = std::max(0, 1 - ky); y < std::min(H, H + 1 - ky); ++y) {
            const double* grow = g + static_cast<std::size_t>(y) * W;
            const double* irow = src + static_cast<std::size_t>(y + ky - 1) * W + dx;
            s += lane_dot(grow, irow, x0, x1);
            if (dsrc) {
              double* drow = dsrc + static_cast<std::size_t>(y + ky - 1) * W + dx;
              for (int x = x0; x < x1; ++x) drow[x] += wv * grow[x];
            }
          }
          dk[ky * 3 + kx] += s;
        }
      }
    }
  }
}

PoolTape pool_forward(const Act& in, PoolKind kind) {
  PoolTape p;
  p.kind = kind;
  const int sx = kind == PoolKind::k2x2 ? 2 : 1;
  p.out = Act(in.c, in.h / 2, in.w / sx);
  p.argmax.resize(p.out.v.size());
  std::size_t k = 0;
  for (int c = 0; c < in.c; ++c) {
    const double* src = in.plane(c);
    for (int y = 0; y < p.out.h; ++y) {
      for (int x = 0; x < p.out.w; ++x, ++k) {
        int best = (2 * y) * in.w + sx * x;
        for (int dy = 0; dy < 2; ++dy) {
          for (int dx = 0; dx < sx; ++dx) {
            const int idx = (2 * y + dy) * in.w + sx * x + dx;
            if (src[idx] > src[best]) best = idx;
          }
        }
        p.out.v[k] = src[best];
        p.argmax[k] = best;
      }
    }
  }
  return p;
}

Act pool_backward(const PoolTape& p, const Act& dout, const Act& in_shape) {
  Act din(in_shape.c, in_shape.h, in_shape.w);
  const std::size_t per_out = static_cast<std::size_t>(p.out.h) * p.out.w;
  for (int c = 0; c < dout.c; ++c) {
    double* d = din.plane(c);
    const double* g = dout.plane(c);
    const int* am = p.argmax.data() + c * per_out;
    for (std::size_t k = 0; k < per_out; ++k) d[am[k]] += g[k];
  }
  return din;
}

// Fixed left-to-right order; Eigen's vectorized reductions peel by address
// alignment, which varies between heap blocks.
void add_row_sums(const MatrixXd& m, double* out) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double s = 0;
    for (Eigen::Index c = 0; c < m.cols(); ++c) s += m(r, c);
    out[r] += s;
  }
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void lstm_forward(const MatrixXd& X, const Tensor& w_ih, const Tensor& w_hh, const Tensor& bias, bool reverse,
                  LstmDirTape& tape) {
  const int H = w_hh.shape[1];
  const int v = static_cast<int>(X.cols());
  const ConstRowMap Wih(w_ih.data(), 4 * H, X.rows());
  const ConstRowMap Whh(w_hh.data(), 4 * H, H);
  const Eigen::Map<const VectorXd> b(bias.data(), 4 * H);
  MatrixXd Z = Wih * X;
  Z.colwise() += b;
  tape.gates.resize(4 * H, v);
  tape.c.resize(H, v);
  tape.tanh_c.resize(H, v);
  tape.h.resize(H, v);
  VectorXd h_prev = VectorXd::Zero(H), c_prev = VectorXd::Zero(H);
  VectorXd z(4 * H);
  for (int s = 0; s < v; ++s) {
    const int t = reverse ? v - 1 - s : s;
    z.noalias() = Z.col(t) + Whh * h_prev;
    auto g = tape.gates.col(t);
    for (int k = 0; k < H; ++k) {
      g(k) = sigmoid(z(k));
      g(H + k) = sigmoid(z(H + k));
      g(2 * H + k) = std::tanh(z(2 * H + k));
      g(3 * H + k) = sigmoid(z(3 * H + k));
      const double c = g(H + k) * c_prev(k) + g(k) * g(2 * H + k);
      const double tc = std::tanh(c);
      tape.c(k, t) = c;
      tape.tanh_c(k, t) = tc;
      tape.h(k, t) = g(3 * H + k) * tc;
    }
    h_prev = tape.h.col(t);
    c_prev = tape.c.col(t);
  }
}

// Accumulates weight gradients and returns dX.
MatrixXd lstm_backward(const MatrixXd& X, const Tensor& w_ih, const Tensor& w_hh, bool reverse,
                       const LstmDirTape& tape, const MatrixXd& dH, Tensor& dw_ih, Tensor& dw_hh, Tensor& dbias) {
  const int H = w_hh.shape[1];
  const int v = static_cast<int>(X.cols());
  const ConstRowMap Wih(w_ih.data(), 4 * H, X.rows());
  const ConstRowMap Whh(w_hh.data(), 4 * H, H);
  MatrixXd dZ(4 * H, v);
  MatrixXd Hprev = MatrixXd::Zero(H, v);
  VectorXd dh_rec = VectorXd::Zero(H), dc_next = VectorXd::Zero(H);
  for (int s = v - 1; s >= 0; --s) {
    const int t = reverse ? v - 1 - s : s;
    const int tp = reverse ? t + 1 : t - 1;  // previous step in processing order
    const bool has_prev = s > 0;
    if (has_prev) Hprev.col(t) = tape.h.col(tp);
    const auto g = tape.gates.col(t);
    auto dz = dZ.col(t);
    for (int k = 0; k < H; ++k) {
      const double i = g(k), f = g(H + k), gg = g(2 * H + k), o = g(3 * H + k);
      const double tc = tape.tanh_c(k, t);
      const double c_prev = has_prev ? tape.c(k, tp) : 0.0;
      const double dh = dH(k, t) + dh_rec(k);
      const double dc = dc_next(k) + dh * o * (1.0 - tc * tc);
      dz(k) = dc * gg * i * (1.0 - i);
      dz(H + k) = dc * c_prev * f * (1.0 - f);
      dz(2 * H + k) = dc * i * (1.0 - gg * gg);
      dz(3 * H + k) = dh * tc * o * (1.0 - o);
      dc_next(k) = dc * f;
    }
    dh_rec.noalias() = Whh.transpose() * dz;
  }
  RowMap(dw_ih.data(), 4 * H, X.rows()).noalias() += dZ * X.transpose();
  RowMap(dw_hh.data(), 4 * H, H).noalias() += dZ * Hprev.transpose();
  add_row_sums(dZ, dbias.data());
  return Wih.transpose() * dZ;
}

std::string conv_name(std::size_t l) { return "conv" + std::to_string(l); }
std::string bn_name(std::size_t l) { return "bn" + std::to_string(l); }
std::string lstm_name(int l, bool bw) { return "lstm" + std::to_string(l) + (bw ? ".bw" : ".fw"); }

class Network {
 public:
  Network(const ModelParams& params, const ArchConfig& arch) : p_(params), a_(arch), by_layer_(pools_by_layer(arch)) {}

  void check_sample(const SampleInput& s) const {
    if (!s.image || s.image->empty()) throw ConfigError("recognizer: missing input image");
    if (s.image->height() != a_.input_height) {
      throw ConfigError("recognizer: input height " + std::to_string(s.image->height()) + " does not match the arch (" +
                        std::to_string(a_.input_height) + ")");
    }
    if (a_.type_input_enabled && !s.ctype) throw ConfigError("recognizer: typed model needs a content type");
    if (a_.type_input_enabled && typedgen::index_of(*s.ctype) >= a_.num_types) {
      throw ConfigError("recognizer: content type index out of range");
    }
    if (s.original_width < 1) throw ConfigError("recognizer: original width must be >= 1");
    if (column_count(a_, s.image->width()) < 1) throw ConfigError("recognizer: input too narrow for the pooling");
  }

  SampleTape start(const SampleInput& s) const {
    SampleTape t;
    t.original_width = std::min(s.original_width, s.image->width());
    t.out_columns = column_count(a_, s.image->width());
    t.valid = valid_columns(a_, s.image->width(), s.original_width);
    const int width = std::min(s.image->width(), needed_input_width(a_, t.valid));
    t.image = Act(1, a_.input_height, width);
    for (int y = 0; y < a_.input_height; ++y) {
      const auto row = s.image->row(y);
      for (int x = 0; x < width; ++x) t.image.at(0, y, x) = input_value(row[static_cast<std::size_t>(x)]);
    }
    t.conv.resize(a_.conv_layers.size());
    return t;
  }

  const Act& layer_input(const SampleTape& t, std::size_t l) const { return l == 0 ? t.image : t.conv[l - 1].out(); }

  // Columns of conv layer l's output that lie inside the original width.
  int bn_columns(const SampleTape& t, std::size_t l, int w) const {
    const int s = stride_before(a_, l);
    return std::min(w, (t.original_width + s - 1) / s);
  }

  void conv_step(SampleTape& t, std::size_t l) const {
    const Act& in = layer_input(t, l);
    const auto& spec = a_.conv_layers[l];
    ConvTape& ct = t.conv[l];
    ct.z = Act(spec.out_channels, in.h, in.w);
    conv_forward(in, p_.at(conv_name(l) + ".weight").data(), p_.at(conv_name(l) + ".bias").data(), ct.z);
  }

  BnStats batch_stats(const std::vector<SampleTape>& tapes, std::size_t l) const {
    const int C = a_.conv_layers[l].out_channels;
    BnStats st{std::vector<double>(C, 0.0), std::vector<double>(C, 0.0), std::vector<double>(C, 0.0)};
    std::vector<double> count(C, 0.0);
    for (const auto& t : tapes) {
      const Act& z = t.conv[l].z;
      const int wv = bn_columns(t, l, z.w);
      for (int c = 0; c < C; ++c) {
        for (int y = 0; y < z.h; ++y) {
          for (int x = 0; x < wv; ++x) st.mean[c] += z.at(c, y, x);
        }
        count[c] += static_cast<double>(z.h) * wv;
      }
    }
    for (int c = 0; c < C; ++c) st.mean[c] /= count[c];
    for (const auto& t : tapes) {
      const Act& z = t.conv[l].z;
      const int wv = bn_columns(t, l, z.w);
      for (int c = 0; c < C; ++c) {
        for (int y = 0; y < z.h; ++y) {
          for (int x = 0; x < wv; ++x) {
            const double d = z.at(c, y, x) - st.mean[c];
            st.var[c] += d * d;
          }
        }
      }
    }
    for (int c = 0; c < C; ++c) {
      st.var[c] /= count[c];
      st.inv_std[c] = 1.0 / std::sqrt(st.var[c] + kBnEps);
    }
    return st;
  }

  BnStats running_stats(std::size_t l) const {
    const auto& rm = p_.at(bn_name(l) + ".running_mean").values;
    const auto& rv = p_.at(bn_name(l) + ".running_var").values;
    BnStats st{rm, {}, rv};
    for (double v : rv) st.inv_std.push_back(1.0 / std::sqrt(v + kBnEps));
    return st;
  }

  void post_conv(SampleTape& t, std::size_t l, const BnStats* bn) const {
    ConvTape& ct = t.conv[l];
    ct.relu = ct.z;
    if (bn) {
      const auto& gamma = p_.at(bn_name(l) + ".gamma").values;
      const auto& beta = p_.at(bn_name(l) + ".beta").values;
      ct.xhat = ct.z;
      const std::size_t plane = static_cast<std::size_t>(ct.z.h) * ct.z.w;
      for (int c = 0; c < ct.z.c; ++c) {
        double* xh = ct.xhat.plane(c);
        double* r = ct.relu.plane(c);
        for (std::size_t i = 0; i < plane; ++i) {
          xh[i] = (xh[i] - bn->mean[c]) * bn->inv_std[c];
          r[i] = gamma[c] * xh[i] + beta[c];
        }
      }
    }
    for (auto& v : ct.relu.v) v = v > 0.0 ? v : 0.0;
    ct.pools.clear();
    for (const PoolSpec* ps : by_layer_[l]) ct.pools.push_back(pool_forward(ct.pools.empty() ? ct.relu : ct.pools.back().out, ps->kind));
  }

  void head_forward(SampleTape& t, const SampleInput& s) const {
    const Act& fin = t.conv.back().out();
    const int v = t.valid;
    const int Dc = a_.conv_feature_dim();
    MatrixXd X = MatrixXd::Zero(a_.column_feature_dim(), v);
    for (int c = 0; c < fin.c; ++c) {
      for (int y = 0; y < fin.h; ++y) {
        for (int x = 0; x < v; ++x) X(c * fin.h + y, x) = fin.at(c, y, x);
      }
    }
    if (a_.type_input_enabled) X.row(Dc + typedgen::index_of(*s.ctype)).setOnes();
    t.lstm.resize(static_cast<std::size_t>(a_.recurrent_layers));
    const int H = a_.recurrent_hidden;
    for (int l = 0; l < a_.recurrent_layers; ++l) {
      auto& lt = t.lstm[static_cast<std::size_t>(l)];
      lt.input = l == 0 ? std::move(X) : t.features;
      for (bool bw : {false, true}) {
        const std::string n = lstm_name(l, bw);
        lstm_forward(lt.input, p_.at(n + ".w_ih"), p_.at(n + ".w_hh"), p_.at(n + ".bias"), bw, bw ? lt.bw : lt.fw);
      }
      t.features.resize(2 * H, v);
      t.features.topRows(H) = lt.fw.h;
      t.features.bottomRows(H) = lt.bw.h;
    }
    const Tensor& pw = p_.at("proj.weight");
    const Tensor& pb = p_.at("proj.bias");
    const int S = a_.num_classes;
    const ConstRowMap Wp(pw.data(), S, 2 * H);
    const MatrixXd L = Wp * t.features;
    t.logits = ctc::LogitSequence(t.out_columns, S);
    for (int r = 0; r < t.out_columns; ++r) {
      for (int k = 0; k < S; ++k) t.logits.at(r, k) = pb.values[static_cast<std::size_t>(k)] + (r < v ? L(k, r) : 0.0);
    }
  }

  // Returns d(loss)/d(final conv activation), shaped like it.
  Act head_backward(const SampleTape& t, const std::vector<double>& dlogits, ModelParams& g) const {
    const int v = t.valid, S = a_.num_classes, H = a_.recurrent_hidden;
    MatrixXd dL(S, v);
    for (int r = 0; r < v; ++r) {
      for (int k = 0; k < S; ++k) dL(k, r) = dlogits[static_cast<std::size_t>(r) * S + k];
    }
    const ConstRowMap Wp(p_.at("proj.weight").data(), S, 2 * H);
    RowMap(g.at("proj.weight").data(), S, 2 * H).noalias() += dL * t.features.transpose();
    add_row_sums(dL, g.at("proj.bias").data());
    MatrixXd dF = Wp.transpose() * dL;
    for (int l = a_.recurrent_layers - 1; l >= 0; --l) {
      const auto& lt = t.lstm[static_cast<std::size_t>(l)];
      MatrixXd dX = MatrixXd::Zero(lt.input.rows(), v);
      for (bool bw : {false, true}) {
        const std::string n = lstm_name(l, bw);
        const MatrixXd dH = bw ? MatrixXd(dF.bottomRows(H)) : MatrixXd(dF.topRows(H));
        dX += lstm_backward(lt.input, p_.at(n + ".w_ih"), p_.at(n + ".w_hh"), bw, bw ? lt.bw : lt.fw, dH,
                            g.at(n + ".w_ih"), g.at(n + ".w_hh"), g.at(n + ".bias"));
      }
      dF = std::move(dX);
    }
    const Act& fin = t.conv.back().out();
    Act d(fin.c, fin.h, fin.w);
    for (int c = 0; c < fin.c; ++c) {
      for (int y = 0; y < fin.h; ++y) {
        for (int x = 0; x < v; ++x) d.at(c, y, x) = dF(c * fin.h + y, x);
      }
    }
    return d;
  }

  // From d(out of layer l) to d(z of layer l), stopping before BatchNorm.
  Act through_pools_relu(const SampleTape& t, std::size_t l, Act d) const {
    const ConvTape& ct = t.conv[l];
    for (std::size_t k = ct.pools.size(); k-- > 0;) {
      d = pool_backward(ct.pools[k], d, k == 0 ? ct.relu : ct.pools[k - 1].out);
    }
    for (std::size_t i = 0; i < d.v.size(); ++i) {
      if (!(ct.relu.v[i] > 0.0)) d.v[i] = 0.0;
    }
    return d;
  }

  Act conv_back(const SampleTape& t, std::size_t l, const Act& dz, ModelParams& g) const {
    const Act& in = layer_input(t, l);
    Act din;
    if (l > 0) din = Act(in.c, in.h, in.w);
    conv_backward(in, p_.at(conv_name(l) + ".weight").data(), dz, g.at(conv_name(l) + ".weight").data(),
                  g.at(conv_name(l) + ".bias").data(), l > 0 ? &din : nullptr);
    return din;
  }

  const ModelParams& p_;
  const ArchConfig& a_;
  std::vector<std::vector<const PoolSpec*>> by_layer_;
};

std::vector<SampleTape> run_forward(const Network& net, const ArchConfig& arch, std::span<const SampleInput> batch,
                                    Mode mode, int workers, std::vector<BnStats>* stats_out) {
  for (const auto& s : batch) net.check_sample(s);
  std::vector<SampleTape> tapes(batch.size());
  parallel_for(batch.size(), workers, [&](std::size_t i) { tapes[i] = net.start(batch[i]); });
  if (stats_out) stats_out->assign(arch.conv_layers.size(), {});
  for (std::size_t l = 0; l < arch.conv_layers.size(); ++l) {
    parallel_for(batch.size(), workers, [&](std::size_t i) { net.conv_step(tapes[i], l); });
    BnStats st;
    const bool bn = arch.conv_layers[l].batchnorm;
    if (bn) st = mode == Mode::kTraining ? net.batch_stats(tapes, l) : net.running_stats(l);
    if (bn && stats_out) (*stats_out)[l] = st;
    parallel_for(batch.size(), workers, [&](std::size_t i) { net.post_conv(tapes[i], l, bn ? &st : nullptr); });
  }
  parallel_for(batch.size(), workers, [&](std::size_t i) { net.head_forward(tapes[i], batch[i]); });
  return tapes;
}

}  // namespace

int column_count(const ArchConfig& arch, int width) {
  int w = width;
  for (const auto& p : arch.pools) {
    if (p.kind == PoolKind::k2x2) w /= 2;
  }
  return w;
}

int valid_columns(const ArchConfig& arch, int width, int original_width) {
  const int f = arch.horizontal_factor();
  return std::clamp((original_width + f - 1) / f, 0, column_count(arch, width));
}

std::vector<ForwardResult> forward_batch(const ModelParams& params, const ArchConfig& arch,
                                         std::span<const SampleInput> batch, Mode mode, int workers) {
  const Network net(params, arch);
  auto tapes = run_forward(net, arch, batch, mode, workers, nullptr);
  std::vector<ForwardResult> out;
  out.reserve(tapes.size());
  for (auto& t : tapes) out.push_back({std::move(t.logits), t.valid});
  return out;
}

ForwardResult forward(const ModelParams& params, const ArchConfig& arch, const SampleInput& sample) {
  return std::move(forward_batch(params, arch, std::span(&sample, 1)).front());
}

BatchGradient loss_and_gradient(const ModelParams& params, const ArchConfig& arch, std::span<const SampleInput> batch,
                                std::span<const std::vector<int>> labels, int workers) {
  if (labels.size() != batch.size()) throw ShapeMismatchError("loss_and_gradient: batch and labels differ in length");
  const Network net(params, arch);
  std::vector<BnStats> stats;
  auto tapes = run_forward(net, arch, batch, Mode::kTraining, workers, &stats);
  const std::size_t B = batch.size();

  std::vector<ModelParams> grads(B);
  std::vector<double> losses(B);
  std::vector<Act> d(B);
  parallel_for(B, workers, [&](std::size_t i) {
    grads[i] = params.zeros_like();
    const auto res = ctc::ctc_loss(tapes[i].logits, labels[i], tapes[i].valid);
    losses[i] = res.loss;
    d[i] = net.head_backward(tapes[i], res.grad, grads[i]);
  });

  for (std::size_t l = arch.conv_layers.size(); l-- > 0;) {
    parallel_for(B, workers, [&](std::size_t i) { d[i] = net.through_pools_relu(tapes[i], l, std::move(d[i])); });
    if (arch.conv_layers[l].batchnorm) {
      const int C = arch.conv_layers[l].out_channels;
      const auto& gamma = params.at(bn_name(l) + ".gamma").values;
      const BnStats& st = stats[l];
      // Sums over every computed position; stats depend only on unpadded ones.
      std::vector<double> sum_dy(C, 0.0), sum_dy_xhat(C, 0.0), count(C, 0.0);
      for (std::size_t i = 0; i < B; ++i) {
        const Act& xh = tapes[i].conv[l].xhat;
        const std::size_t plane = static_cast<std::size_t>(xh.h) * xh.w;
        for (int c = 0; c < C; ++c) {
          const double* dy = d[i].plane(c);
          const double* x = xh.plane(c);
          for (std::size_t k = 0; k < plane; ++k) {
            sum_dy[c] += dy[k];
            sum_dy_xhat[c] += dy[k] * x[k];
          }
          count[c] += static_cast<double>(xh.h) * net.bn_columns(tapes[i], l, xh.w);
        }
      }
      for (int c = 0; c < C; ++c) {
        grads[0].at(bn_name(l) + ".gamma").values[static_cast<std::size_t>(c)] += sum_dy_xhat[c];
        grads[0].at(bn_name(l) + ".beta").values[static_cast<std::size_t>(c)] += sum_dy[c];
      }
      parallel_for(B, workers, [&](std::size_t i) {
        const Act& xh = tapes[i].conv[l].xhat;
        const int wv = net.bn_columns(tapes[i], l, xh.w);
        for (int c = 0; c < C; ++c) {
          const double scale = gamma[static_cast<std::size_t>(c)] * st.inv_std[c];
          for (int y = 0; y < xh.h; ++y) {
            for (int x = 0; x < xh.w; ++x) {
              double& g = d[i].at(c, y, x);
              g *= scale;
              if (x < wv) g -= scale / count[c] * (sum_dy[c] + xh.at(c, y, x) * sum_dy_xhat[c]);
            }
          }
        }
      });
    }
    parallel_for(B, workers, [&](std::size_t i) { d[i] = net.conv_back(tapes[i], l, d[i], grads[i]); });
  }

  BatchGradient out;
  out.grads = params.zeros_like();
  out.sample_losses = losses;
  const double inv_b = 1.0 / static_cast<double>(B);
  for (std::size_t i = 0; i < B; ++i) {
    out.loss += losses[i];
    for (auto& [name, t] : out.grads.tensors()) {
      const auto& src = grads[i].at(name).values;
      for (std::size_t k = 0; k < t.values.size(); ++k) t.values[k] += src[k];
    }
  }
  out.loss *= inv_b;
  for (auto& [name, t] : out.grads.tensors()) {
    if (!is_trainable(name)) {
      std::fill(t.values.begin(), t.values.end(), 0.0);
      continue;
    }
    for (auto& v : t.values) v *= inv_b;
  }
  for (std::size_t l = 0; l < arch.conv_layers.size(); ++l) {
    if (!arch.conv_layers[l].batchnorm) continue;
    out.batch_mean[bn_name(l)] = stats[l].mean;
    out.batch_var[bn_name(l)] = stats[l].var;
  }
  return out;
}

Eigen::MatrixXd features_before_projection(const ModelParams& params, const ArchConfig& arch,
                                           const SampleInput& sample) {
  const Network net(params, arch);
  auto tapes = run_forward(net, arch, std::span(&sample, 1), Mode::kInference, 1, nullptr);
  return tapes.front().features.transpose();
}

ModelParams mirrored_params(const ModelParams& params, const ArchConfig& arch) {
  ModelParams out = params;
  for (std::size_t l = 0; l < arch.conv_layers.size(); ++l) {
    auto& w = out.at(conv_name(l) + ".weight").values;
    for (std::size_t k = 0; k < w.size(); k += 3) std::swap(w[k], w[k + 2]);
  }
  for (int l = 0; l < arch.recurrent_layers; ++l) {
    for (const char* part : {".w_ih", ".w_hh", ".bias"}) {
      std::swap(out.at(lstm_name(l, false) + part), out.at(lstm_name(l, true) + part));
    }
    if (l == 0) continue;
    // deeper layers read [fw; bw], which trade places under the mirror
    const int H = arch.recurrent_hidden;
    for (bool bw : {false, true}) {
      auto& w = out.at(lstm_name(l, bw) + ".w_ih").values;
      for (int r = 0; r < 4 * H; ++r) {
        double* row = w.data() + static_cast<std::size_t>(r) * 2 * H;
        std::swap_ranges(row, row + H, row + H);
      }
    }
  }
  return out;
}

}  // namespace typedhwr::recognizer
