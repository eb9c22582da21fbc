#include "lite/ops.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lite/kernels.hpp"

namespace lite::ad {

namespace {

bool tracking(std::initializer_list<const Tensor*> inputs) {
  if (active_tape() == nullptr) return false;
  for (const Tensor* t : inputs)
    if (t->requires_grad()) return true;
  return false;
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape())
    throw ShapeError(std::string(op) + ": shapes differ: " + shape_str(a.shape()) + " vs " +
                     shape_str(b.shape()));
}

void require_matrix(const char* op, const Tensor& a) {
  if (a.rank() != 2)
    throw ShapeError(std::string(op) + ": expected a matrix, got " + shape_str(a.shape()));
}

}  // namespace

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::relu;
  if (name == "gelu") return Activation::gelu;
  if (name == "sigmoid") return Activation::sigmoid;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

double sigmoid_value(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double gelu_value(double x) { return 0.5 * x * (1.0 + std::erf(x * std::numbers::sqrt2 / 2.0)); }

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix("matmul", a);
  require_matrix("matmul", b);
  const std::size_t m = a.dim(0), k = a.dim(1), n = b.dim(1);
  if (b.dim(0) != k)
    throw ShapeError("matmul: inner dimensions differ: " + shape_str(a.shape()) + " x " +
                     shape_str(b.shape()));
  std::vector<double> c(m * n);
  kernels::matmul(a.data(), b.data(), c, m, k, n);
  const bool track = tracking({&a, &b});
  Tensor out = make_result({m, n}, std::move(c), track);
  if (track) {
    active_tape()->record(out, [a, b, m, k, n](std::span<const double> g, Tape& tape) {
      if (auto ga = tape.grad_buffer(a); !ga.empty()) kernels::matmul_nt_acc(g, b.data(), ga, m, n, k);
      if (auto gb = tape.grad_buffer(b); !gb.empty()) kernels::matmul_tn_acc(a.data(), g, gb, m, k, n);
    });
  }
  return out;
}

Tensor transpose(const Tensor& a) {
  require_matrix("transpose", a);
  const std::size_t m = a.dim(0), n = a.dim(1);
  std::vector<double> t(m * n);
  auto x = a.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) t[j * m + i] = x[i * n + j];
  const bool track = tracking({&a});
  Tensor out = make_result({n, m}, std::move(t), track);
  if (track) {
    active_tape()->record(out, [a, m, n](std::span<const double> g, Tape& tape) {
      auto ga = tape.grad_buffer(a);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += g[j * m + i];
    });
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape("add", a, b);
  std::vector<double> c(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = x[i] + y[i];
  const bool track = tracking({&a, &b});
  Tensor out = make_result(a.shape(), std::move(c), track);
  if (track) {
    active_tape()->record(out, [a, b](std::span<const double> g, Tape& tape) {
      tape.accumulate(a, g);
      tape.accumulate(b, g);
    });
  }
  return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape("sub", a, b);
  std::vector<double> c(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = x[i] - y[i];
  const bool track = tracking({&a, &b});
  Tensor out = make_result(a.shape(), std::move(c), track);
  if (track) {
    active_tape()->record(out, [a, b](std::span<const double> g, Tape& tape) {
      tape.accumulate(a, g);
      if (auto gb = tape.grad_buffer(b); !gb.empty())
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
    });
  }
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape("mul", a, b);
  std::vector<double> c(a.numel());
  auto x = a.data(), y = b.data();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = x[i] * y[i];
  const bool track = tracking({&a, &b});
  Tensor out = make_result(a.shape(), std::move(c), track);
  if (track) {
    active_tape()->record(out, [a, b](std::span<const double> g, Tape& tape) {
      if (auto ga = tape.grad_buffer(a); !ga.empty())
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += g[i] * b[i];
      if (auto gb = tape.grad_buffer(b); !gb.empty())
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] += g[i] * a[i];
    });
  }
  return out;
}

Tensor scale(const Tensor& a, double s) {
  std::vector<double> c(a.data().begin(), a.data().end());
  for (double& v : c) v *= s;
  const bool track = tracking({&a});
  Tensor out = make_result(a.shape(), std::move(c), track);
  if (track) {
    active_tape()->record(out, [a, s](std::span<const double> g, Tape& tape) {
      auto ga = tape.grad_buffer(a);
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += s * g[i];
    });
  }
  return out;
}

Tensor add_row_bias(const Tensor& x, const Tensor& bias) {
  const std::size_t m = x.rows(), n = x.cols();
  if (bias.numel() != n)
    throw ShapeError("add_row_bias: bias " + shape_str(bias.shape()) + " does not match rows of " +
                     shape_str(x.shape()));
  std::vector<double> c(x.data().begin(), x.data().end());
  auto b = bias.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += b[j];
  const bool track = tracking({&x, &bias});
  Tensor out = make_result(x.shape(), std::move(c), track);
  if (track) {
    active_tape()->record(out, [x, bias, m, n](std::span<const double> g, Tape& tape) {
      tape.accumulate(x, g);
      if (auto gb = tape.grad_buffer(bias); !gb.empty())
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
    });
  }
  return out;
}

Tensor activation(const Tensor& x, Activation kind) {
  auto in = x.data();
  std::vector<double> y(in.size());
  switch (kind) {
    case Activation::relu:
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = in[i] > 0.0 ? in[i] : 0.0;
      break;
    case Activation::gelu:
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = gelu_value(in[i]);
      break;
    case Activation::sigmoid:
      for (std::size_t i = 0; i < y.size(); ++i) y[i] = sigmoid_value(in[i]);
      break;
  }
  const bool track = tracking({&x});
  Tensor out = make_result(x.shape(), std::move(y), track);
  if (track) {
    active_tape()->record(out, [x, out_node = out.node_ptr(), kind](std::span<const double> g,
                                                                   Tape& tape) {
      auto gx = tape.grad_buffer(x);
      if (gx.empty()) return;
      auto in = x.data();
      const auto& y = out_node->value;
      switch (kind) {
        case Activation::relu:
          for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += in[i] > 0.0 ? g[i] : 0.0;
          break;
        case Activation::gelu: {
          constexpr double inv_sqrt_2pi = 0.3989422804014327;
          for (std::size_t i = 0; i < gx.size(); ++i) {
            const double v = in[i];
            const double cdf = 0.5 * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0));
            const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
            gx[i] += g[i] * (cdf + v * pdf);
          }
          break;
        }
        case Activation::sigmoid:
          for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
          break;
      }
    });
  }
  return out;
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  if (axis >= x.rank())
    throw ShapeError("softmax: axis " + std::to_string(axis) + " out of range for " +
                     shape_str(x.shape()));
  std::size_t outer = 1, inner = 1;
  for (std::size_t d = 0; d < axis; ++d) outer *= x.dim(d);
  for (std::size_t d = axis + 1; d < x.rank(); ++d) inner *= x.dim(d);
  const std::size_t len = x.dim(axis);
  auto in = x.data();
  std::vector<double> y(in.size());
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t i = 0; i < inner; ++i) {
      const std::size_t base = o * len * inner + i;
      double mx = -INFINITY;
      for (std::size_t l = 0; l < len; ++l) {
        const double v = in[base + l * inner];
        if (std::isnan(v)) throw NumericError("softmax: NaN input");
        mx = std::max(mx, v);
      }
      double total = 0.0;
      for (std::size_t l = 0; l < len; ++l) {
        const double e = std::exp(in[base + l * inner] - mx);
        y[base + l * inner] = e;
        total += e;
      }
      const double inv = 1.0 / total;
      for (std::size_t l = 0; l < len; ++l) y[base + l * inner] *= inv;
    }
  const bool track = tracking({&x});
  Tensor out = make_result(x.shape(), std::move(y), track);
  if (track) {
    active_tape()->record(out, [x, out_node = out.node_ptr(), outer, inner, len](
                                   std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(x);
      const auto& y = out_node->value;
      for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t i = 0; i < inner; ++i) {
          const std::size_t base = o * len * inner + i;
          double dot = 0.0;
          for (std::size_t l = 0; l < len; ++l) dot += g[base + l * inner] * y[base + l * inner];
          for (std::size_t l = 0; l < len; ++l) {
            const std::size_t idx = base + l * inner;
            gx[idx] += y[idx] * (g[idx] - dot);
          }
        }
    });
  }
  return out;
}

Tensor layernorm(const Tensor& x, const Tensor& gain, const Tensor& bias, double eps) {
  if (!(eps > 0.0)) throw ContractError("layernorm: eps must be positive");
  const std::size_t d = x.shape().back();
  const std::size_t rows = x.numel() / d;
  if (gain.numel() != d || bias.numel() != d)
    throw ShapeError("layernorm: gain/bias " + shape_str(gain.shape()) + "/" +
                     shape_str(bias.shape()) + " do not match last axis of " + shape_str(x.shape()));
  auto in = x.data();
  auto gv = gain.data(), bv = bias.data();
  std::vector<double> xhat(in.size()), rstd(rows), y(in.size());
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = in.data() + r * d;
    double mu = 0.0;
    for (std::size_t j = 0; j < d; ++j) mu += row[j];
    mu /= static_cast<double>(d);
    double var = 0.0;
    for (std::size_t j = 0; j < d; ++j) var += (row[j] - mu) * (row[j] - mu);
    var /= static_cast<double>(d);
    rstd[r] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = (row[j] - mu) * rstd[r];
      xhat[r * d + j] = h;
      y[r * d + j] = h * gv[j] + bv[j];
    }
  }
  const bool track = tracking({&x, &gain, &bias});
  Tensor out = make_result(x.shape(), std::move(y), track);
  if (track) {
    active_tape()->record(out, [x, gain, bias, xhat = std::move(xhat), rstd = std::move(rstd), rows,
                                d](std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(x);
      auto gg = tape.grad_buffer(gain);
      auto gb = tape.grad_buffer(bias);
      auto gv = gain.data();
      const double inv_d = 1.0 / static_cast<double>(d);
      for (std::size_t r = 0; r < rows; ++r) {
        const double* gr = g.data() + r * d;
        const double* hr = xhat.data() + r * d;
        if (!gg.empty())
          for (std::size_t j = 0; j < d; ++j) gg[j] += gr[j] * hr[j];
        if (!gb.empty())
          for (std::size_t j = 0; j < d; ++j) gb[j] += gr[j];
        if (gx.empty()) continue;
        double mean_dh = 0.0, mean_dh_h = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
          const double dh = gr[j] * gv[j];
          mean_dh += dh;
          mean_dh_h += dh * hr[j];
        }
        mean_dh *= inv_d;
        mean_dh_h *= inv_d;
        for (std::size_t j = 0; j < d; ++j)
          gx[r * d + j] += rstd[r] * (gr[j] * gv[j] - mean_dh - hr[j] * mean_dh_h);
      }
    });
  }
  return out;
}

Tensor slice_cols(const Tensor& x, std::size_t begin, std::size_t count) {
  const std::size_t m = x.rows(), n = x.cols();
  if (count == 0 || begin + count > n)
    throw ShapeError("slice_cols: columns [" + std::to_string(begin) + ", " +
                     std::to_string(begin + count) + ") out of range for " + shape_str(x.shape()));
  std::vector<double> y(m * count);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i)
    std::copy_n(in.data() + i * n + begin, count, y.data() + i * count);
  const bool track = tracking({&x});
  Tensor out = make_result({m, count}, std::move(y), track);
  if (track) {
    active_tape()->record(out, [x, m, n, begin, count](std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(x);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < count; ++j) gx[i * n + begin + j] += g[i * count + j];
    });
  }
  return out;
}

Tensor concat_cols(std::span<const Tensor> parts) {
  if (parts.empty()) throw ContractError("concat_cols: no inputs");
  const std::size_t m = parts[0].rows();
  std::size_t n = 0;
  bool any_grad = false;
  for (const auto& p : parts) {
    if (p.rows() != m)
      throw ShapeError("concat_cols: row counts differ: " + shape_str(parts[0].shape()) + " vs " +
                       shape_str(p.shape()));
    n += p.cols();
    any_grad = any_grad || p.requires_grad();
  }
  std::vector<double> y(m * n);
  std::size_t off = 0;
  for (const auto& p : parts) {
    const std::size_t c = p.cols();
    for (std::size_t i = 0; i < m; ++i) std::copy_n(p.data().data() + i * c, c, y.data() + i * n + off);
    off += c;
  }
  const bool track = any_grad && active_tape() != nullptr;
  Tensor out = make_result({m, n}, std::move(y), track);
  if (track) {
    std::vector<Tensor> inputs(parts.begin(), parts.end());
    active_tape()->record(out, [inputs = std::move(inputs), m, n](std::span<const double> g,
                                                                  Tape& tape) {
      std::size_t off = 0;
      for (const auto& p : inputs) {
        const std::size_t c = p.cols();
        if (auto gp = tape.grad_buffer(p); !gp.empty())
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < c; ++j) gp[i * c + j] += g[i * n + off + j];
        off += c;
      }
    });
  }
  return out;
}

Tensor gather_rows(const Tensor& x, std::span<const std::size_t> rows) {
  if (rows.empty()) throw ContractError("gather_rows: empty row list");
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> y(rows.size() * n);
  auto in = x.data();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= m)
      throw ShapeError("gather_rows: row " + std::to_string(rows[i]) + " out of range for " +
                       shape_str(x.shape()));
    std::copy_n(in.data() + rows[i] * n, n, y.data() + i * n);
  }
  const bool track = tracking({&x});
  Tensor out = make_result({rows.size(), n}, std::move(y), track);
  if (track) {
    active_tape()->record(out, [x, idx = std::vector<std::size_t>(rows.begin(), rows.end()), n](
                                   std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(x);
      for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = 0; j < n; ++j) gx[idx[i] * n + j] += g[i * n + j];
    });
  }
  return out;
}

Tensor mean_rows(const Tensor& x) {
  const std::size_t m = x.rows(), n = x.cols();
  std::vector<double> y(n, 0.0);
  auto in = x.data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) y[j] += in[i * n + j];
  const double inv = 1.0 / static_cast<double>(m);
  for (double& v : y) v *= inv;
  const bool track = tracking({&x});
  Tensor out = make_result({1, n}, std::move(y), track);
  if (track) {
    active_tape()->record(out, [x, m, n, inv](std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(x);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += g[j] * inv;
    });
  }
  return out;
}

Tensor sum(const Tensor& x) {
  double s = 0.0;
  for (double v : x.data()) s += v;
  const bool track = tracking({&x});
  Tensor out = make_result({1}, {s}, track);
  if (track) {
    active_tape()->record(out, [x](std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(x);
      for (double& v : gx) v += g[0];
    });
  }
  return out;
}

Tensor mean(const Tensor& x) { return scale(sum(x), 1.0 / static_cast<double>(x.numel())); }

Tensor cross_entropy(const Tensor& logits, std::size_t target) {
  if (logits.rows() != 1)
    throw ShapeError("cross_entropy: expected one logit row, got " + shape_str(logits.shape()));
  const std::size_t c = logits.cols();
  if (target >= c)
    throw ContractError("cross_entropy: target " + std::to_string(target) + " >= classes " +
                        std::to_string(c));
  auto z = logits.data();
  const double mx = *std::max_element(z.begin(), z.end());
  std::vector<double> p(c);
  double total = 0.0;
  for (std::size_t i = 0; i < c; ++i) total += (p[i] = std::exp(z[i] - mx));
  for (double& v : p) v /= total;
  const double loss = std::log(total) + mx - z[target];
  const bool track = tracking({&logits});
  Tensor out = make_result({1}, {loss}, track);
  if (track) {
    active_tape()->record(out, [logits, p = std::move(p), target](std::span<const double> g,
                                                                  Tape& tape) {
      auto gz = tape.grad_buffer(logits);
      for (std::size_t i = 0; i < p.size(); ++i) gz[i] += g[0] * (p[i] - (i == target ? 1.0 : 0.0));
    });
  }
  return out;
}

Tensor bce_with_logits(const Tensor& logits, std::span<const double> targets) {
  if (targets.size() != logits.numel())
    throw ShapeError("bce_with_logits: " + std::to_string(targets.size()) + " targets for logits " +
                     shape_str(logits.shape()));
  auto x = logits.data();
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i)
    total += std::max(x[i], 0.0) - x[i] * targets[i] + std::log1p(std::exp(-std::abs(x[i])));
  const double inv = 1.0 / static_cast<double>(x.size());
  const bool track = tracking({&logits});
  Tensor out = make_result({1}, {total * inv}, track);
  if (track) {
    active_tape()->record(out, [logits, t = std::vector<double>(targets.begin(), targets.end()),
                                inv](std::span<const double> g, Tape& tape) {
      auto gx = tape.grad_buffer(logits);
      auto x = logits.data();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g[0] * inv * (sigmoid_value(x[i]) - t[i]);
    });
  }
  return out;
}

}  // namespace lite::ad
