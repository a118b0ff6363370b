// Copyright 2025 The ssdrt Authors.
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

#include "ssdrt/net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ssdrt/error.hpp"

namespace ssdrt {

namespace {

constexpr const char* kModule = "tensorkit";

Error layer_error(size_t index, const std::string& message) {
  return Error(kModule, "layer " + std::to_string(index), message);
}

int64_t shape_product(const std::vector<int>& shape) {
  int64_t p = 1;
  for (int d : shape) p *= d;
  return p;
}

}  // namespace

Tensor Tensor::zeros(std::vector<int> shape) {
  Tensor t;
  t.data.assign(size_t(shape_product(shape)), 0.0);
  t.shape = std::move(shape);
  return t;
}

int conv_out_length(int in_length, int kernel, int stride, int dilation) {
  return (in_length - dilation * (kernel - 1) - 1) / stride + 1;
}

std::vector<int> validate_chain(const std::vector<LayerSpec>& layers,
                                const std::vector<int>& input_shape) {
  std::vector<int> shape = input_shape;
  for (size_t i = 0; i < layers.size(); ++i) {
    const LayerSpec& layer = layers[i];
    if (std::holds_alternative<SoftmaxCESpec>(layer) && i + 1 != layers.size()) {
      throw layer_error(i, "SoftmaxCE marker must be the last layer");
    }
    if (const auto* c = std::get_if<Conv1dSpec>(&layer)) {
      if (c->kernel < 1 || c->stride < 1 || c->dilation < 1 || c->c_in < 1 ||
          c->c_out < 1) {
        throw layer_error(i, "conv parameters must be >= 1");
      }
      if (shape.size() != 2 || shape[0] != c->c_in) {
        throw layer_error(i, "conv expects (c_in, length) input");
      }
      const int span = c->dilation * (c->kernel - 1) + 1;
      if (shape[1] < span) {
        throw layer_error(i, "input shorter than the dilated kernel");
      }
      shape = {c->c_out,
               conv_out_length(shape[1], c->kernel, c->stride, c->dilation)};
    } else if (const auto* p = std::get_if<MaxPool1dSpec>(&layer)) {
      if (p->kernel < 1 || p->stride < 1) {
        throw layer_error(i, "pool parameters must be >= 1");
      }
      if (shape.size() != 2 || shape[1] < p->kernel) {
        throw layer_error(i, "maxpool expects (c, length >= kernel) input");
      }
      shape = {shape[0], conv_out_length(shape[1], p->kernel, p->stride, 1)};
    } else if (std::holds_alternative<AvgPoolGlobalSpec>(layer)) {
      if (shape.size() != 2) {
        throw layer_error(i, "global average pool expects (c, length) input");
      }
      shape = {shape[0]};
    } else if (const auto* d = std::get_if<DenseSpec>(&layer)) {
      if (d->n_in < 1 || d->n_out < 1) {
        throw layer_error(i, "dense dimensions must be >= 1");
      }
      if (int(shape_product(shape)) != d->n_in) {
        throw layer_error(i, "dense n_in does not match incoming size");
      }
      shape = {d->n_out};
    }
    // ReLU and SoftmaxCE keep the incoming shape.
  }
  return shape;
}

ForwardResult forward(const std::vector<LayerSpec>& layers,
                      const ParamSet& params, const Tensor& input) {
  if (params.size() != layers.size()) {
    throw Error(kModule, "params", "one LayerParams entry per layer required");
  }
  validate_chain(layers, input.shape);

  ForwardResult r;
  r.cache.layers = &layers;
  r.cache.params = &params;
  r.cache.acts.reserve(layers.size() + 1);
  r.cache.pool_argmax.resize(layers.size());
  r.cache.acts.push_back(input);

  for (size_t i = 0; i < layers.size(); ++i) {
    const Tensor& x = r.cache.acts.back();
    Tensor y;
    if (const auto* c = std::get_if<Conv1dSpec>(&layers[i])) {
      const Tensor& w = params[i].weight;
      const Tensor& b = params[i].bias;
      const int l_in = x.shape[1];
      const int l_out = conv_out_length(l_in, c->kernel, c->stride, c->dilation);
      y = Tensor::zeros({c->c_out, l_out});
      for (int co = 0; co < c->c_out; ++co) {
        const double bias = b.data[co];
        double* yp = &y.data[size_t(co) * l_out];
        for (int ci = 0; ci < c->c_in; ++ci) {
          const double* wp = &w.data[(size_t(co) * c->c_in + ci) * c->kernel];
          const double* xp = &x.data[size_t(ci) * l_in];
          if (c->dilation == 1) {
            for (int j = 0; j < l_out; ++j) {
              const double* xs = xp + size_t(j) * c->stride;
              double acc = 0.0;
              for (int t = 0; t < c->kernel; ++t) acc += wp[t] * xs[t];
              yp[j] += acc;
            }
          } else {
            for (int j = 0; j < l_out; ++j) {
              const double* xs = xp + size_t(j) * c->stride;
              double acc = 0.0;
              for (int t = 0; t < c->kernel; ++t) {
                acc += wp[t] * xs[size_t(t) * c->dilation];
              }
              yp[j] += acc;
            }
          }
        }
        for (int j = 0; j < l_out; ++j) yp[j] += bias;
      }
    } else if (std::holds_alternative<ReluSpec>(layers[i])) {
      y = x;
      for (double& v : y.data) v = v > 0.0 ? v : 0.0;
    } else if (const auto* p = std::get_if<MaxPool1dSpec>(&layers[i])) {
      const int ch = x.shape[0], l_in = x.shape[1];
      const int l_out = conv_out_length(l_in, p->kernel, p->stride, 1);
      y = Tensor::zeros({ch, l_out});
      auto& argmax = r.cache.pool_argmax[i];
      argmax.assign(size_t(ch) * l_out, 0);
      for (int cidx = 0; cidx < ch; ++cidx) {
        const double* xp = &x.data[size_t(cidx) * l_in];
        for (int j = 0; j < l_out; ++j) {
          int best = j * p->stride;
          double bv = xp[best];
          // Ties keep the lowest index; backward stays deterministic.
          for (int t = 1; t < p->kernel; ++t) {
            const int idx = j * p->stride + t;
            if (xp[idx] > bv) {
              bv = xp[idx];
              best = idx;
            }
          }
          y.data[size_t(cidx) * l_out + j] = bv;
          argmax[size_t(cidx) * l_out + j] = best;
        }
      }
    } else if (std::holds_alternative<AvgPoolGlobalSpec>(layers[i])) {
      const int ch = x.shape[0], l_in = x.shape[1];
      y = Tensor::zeros({ch});
      for (int cidx = 0; cidx < ch; ++cidx) {
        const double* xp = &x.data[size_t(cidx) * l_in];
        double acc = 0.0;
        for (int j = 0; j < l_in; ++j) acc += xp[j];
        y.data[cidx] = acc / double(l_in);
      }
    } else if (const auto* d = std::get_if<DenseSpec>(&layers[i])) {
      const Tensor& w = params[i].weight;
      const Tensor& b = params[i].bias;
      y = Tensor::zeros({d->n_out});
      for (int o = 0; o < d->n_out; ++o) {
        const double* wp = &w.data[size_t(o) * d->n_in];
        double acc = b.data[o];
        for (int j = 0; j < d->n_in; ++j) acc += wp[j] * x.data[j];
        y.data[o] = acc;
      }
    } else {  // SoftmaxCE marker: identity
      y = x;
    }
    r.cache.acts.push_back(std::move(y));
  }
  r.output = r.cache.acts.back();
  return r;
}

namespace {

// Shared reverse walk. Computes the input gradient always; fills param
// gradients only when grads != nullptr (they cost the bulk of the work and
// the attack hot path never needs them).
Tensor backward_walk(const ForwardCache& cache, const Tensor& grad_output,
                     ParamSet* grads) {
  const auto& layers = *cache.layers;
  const auto& params = *cache.params;
  if (grad_output.shape != cache.acts.back().shape) {
    throw Error(kModule, "grad_output", "shape does not match forward output");
  }
  if (grads) {
    grads->clear();
    grads->resize(layers.size());
  }

  Tensor g = grad_output;
  for (size_t ii = layers.size(); ii-- > 0;) {
    const Tensor& x = cache.acts[ii];
    Tensor gx;
    if (const auto* c = std::get_if<Conv1dSpec>(&layers[ii])) {
      const Tensor& w = params[ii].weight;
      const int l_in = x.shape[1];
      const int l_out = g.shape[1];
      gx = Tensor::zeros(x.shape);
      Tensor* gw = nullptr;
      Tensor* gb = nullptr;
      if (grads) {
        (*grads)[ii].weight = Tensor::zeros(w.shape);
        (*grads)[ii].bias = Tensor::zeros({c->c_out});
        gw = &(*grads)[ii].weight;
        gb = &(*grads)[ii].bias;
      }
      for (int co = 0; co < c->c_out; ++co) {
        const double* gp = &g.data[size_t(co) * l_out];
        if (gb) {
          double acc = 0.0;
          for (int j = 0; j < l_out; ++j) acc += gp[j];
          gb->data[co] = acc;
        }
        for (int ci = 0; ci < c->c_in; ++ci) {
          const double* wp = &w.data[(size_t(co) * c->c_in + ci) * c->kernel];
          const double* xp = &x.data[size_t(ci) * l_in];
          double* gxp = &gx.data[size_t(ci) * l_in];
          double* gwp =
              gw ? &gw->data[(size_t(co) * c->c_in + ci) * c->kernel] : nullptr;
          for (int t = 0; t < c->kernel; ++t) {
            const int off = t * c->dilation;
            const double wv = wp[t];
            double acc = 0.0;
            for (int j = 0; j < l_out; ++j) {
              const int idx = j * c->stride + off;
              gxp[idx] += wv * gp[j];
              acc += xp[idx] * gp[j];
            }
            if (gwp) gwp[t] = acc;
          }
        }
      }
    } else if (std::holds_alternative<ReluSpec>(layers[ii])) {
      gx = g;
      for (size_t k = 0; k < gx.data.size(); ++k) {
        if (x.data[k] <= 0.0) gx.data[k] = 0.0;
      }
    } else if (std::holds_alternative<MaxPool1dSpec>(layers[ii])) {
      const int ch = x.shape[0], l_in = x.shape[1];
      const int l_out = g.shape[1];
      const auto& argmax = cache.pool_argmax[ii];
      gx = Tensor::zeros(x.shape);
      for (int cidx = 0; cidx < ch; ++cidx) {
        for (int j = 0; j < l_out; ++j) {
          gx.data[size_t(cidx) * l_in + argmax[size_t(cidx) * l_out + j]] +=
              g.data[size_t(cidx) * l_out + j];
        }
      }
    } else if (std::holds_alternative<AvgPoolGlobalSpec>(layers[ii])) {
      const int ch = x.shape[0], l_in = x.shape[1];
      gx = Tensor::zeros(x.shape);
      for (int cidx = 0; cidx < ch; ++cidx) {
        const double gv = g.data[cidx] / double(l_in);
        double* gxp = &gx.data[size_t(cidx) * l_in];
        for (int j = 0; j < l_in; ++j) gxp[j] = gv;
      }
    } else if (const auto* d = std::get_if<DenseSpec>(&layers[ii])) {
      const Tensor& w = params[ii].weight;
      gx = Tensor::zeros(x.shape);
      if (grads) {
        (*grads)[ii].weight = Tensor::zeros(w.shape);
        (*grads)[ii].bias = Tensor::zeros({d->n_out});
      }
      for (int o = 0; o < d->n_out; ++o) {
        const double gv = g.data[o];
        const double* wp = &w.data[size_t(o) * d->n_in];
        for (int j = 0; j < d->n_in; ++j) gx.data[j] += wp[j] * gv;
        if (grads) {
          double* gwp = &(*grads)[ii].weight.data[size_t(o) * d->n_in];
          for (int j = 0; j < d->n_in; ++j) gwp[j] = x.data[j] * gv;
          (*grads)[ii].bias.data[o] = gv;
        }
      }
    } else {  // SoftmaxCE marker
      gx = g;
    }
    g = std::move(gx);
  }
  return g;
}

}  // namespace

Tensor backward_input(const ForwardCache& cache, const Tensor& grad_output) {
  return backward_walk(cache, grad_output, nullptr);
}

ParamSet backward_params(const ForwardCache& cache, const Tensor& grad_output) {
  ParamSet grads;
  backward_walk(cache, grad_output, &grads);
  return grads;
}

double cross_entropy(const Tensor& logits, int target_class) {
  const double m = std::max(logits.data[0], logits.data[1]);
  const double lse =
      m + std::log(std::exp(logits.data[0] - m) + std::exp(logits.data[1] - m));
  return lse - logits.data[target_class];
}

std::array<double, 2> softmax2(const Tensor& logits) {
  const double m = std::max(logits.data[0], logits.data[1]);
  const double e0 = std::exp(logits.data[0] - m);
  const double e1 = std::exp(logits.data[1] - m);
  const double z = e0 + e1;
  return {e0 / z, e1 / z};
}

Tensor cross_entropy_grad(const Tensor& logits, int target_class) {
  const auto p = softmax2(logits);
  Tensor g = Tensor::zeros({2});
  g.data[0] = p[0] - (target_class == 0 ? 1.0 : 0.0);
  g.data[1] = p[1] - (target_class == 1 ? 1.0 : 0.0);
  return g;
}

ParamSet init_params(const std::vector<LayerSpec>& layers, Rng& rng) {
  ParamSet params(layers.size());
  for (size_t i = 0; i < layers.size(); ++i) {
    if (const auto* c = std::get_if<Conv1dSpec>(&layers[i])) {
      const double scale = std::sqrt(2.0 / double(c->c_in * c->kernel));
      params[i].weight = Tensor::zeros({c->c_out, c->c_in, c->kernel});
      for (double& v : params[i].weight.data) v = scale * rng.normal();
      params[i].bias = Tensor::zeros({c->c_out});
    } else if (const auto* d = std::get_if<DenseSpec>(&layers[i])) {
      const double scale = std::sqrt(2.0 / double(d->n_in));
      params[i].weight = Tensor::zeros({d->n_out, d->n_in});
      for (double& v : params[i].weight.data) v = scale * rng.normal();
      params[i].bias = Tensor::zeros({d->n_out});
    }
  }
  round_params_to_float32(params);
  return params;
}

void round_params_to_float32(ParamSet& params) {
  for (LayerParams& lp : params) {
    for (double& v : lp.weight.data) v = double(float(v));
    for (double& v : lp.bias.data) v = double(float(v));
  }
}

}  // namespace ssdrt
