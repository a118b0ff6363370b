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

#ifndef SSDRT_NET_HPP_
#define SSDRT_NET_HPP_

#include <array>
#include <cstdint>
#include <variant>
#include <vector>

#include "ssdrt/rng.hpp"

namespace ssdrt {

// Dense row-major tensor. Storage is double; reductions accumulate in
// double. Model parameters are additionally kept on the float32 grid (see
// round_params_to_float32) so checkpoints round-trip bit-exactly.
struct Tensor {
  std::vector<int> shape;
  std::vector<double> data;

  static Tensor zeros(std::vector<int> shape);
  int64_t size() const { return int64_t(data.size()); }
  bool empty() const { return data.empty(); }
};

// Fixed layer set. 1-D activations are (channels, length); Dense operates
// on flat vectors, which is what AvgPoolGlobal produces.
struct Conv1dSpec {
  int kernel = 1;
  int c_in = 1;
  int c_out = 1;
  int stride = 1;
  int dilation = 1;
};
struct ReluSpec {};
struct MaxPool1dSpec {
  int kernel = 1;
  int stride = 1;
};
struct AvgPoolGlobalSpec {};
struct DenseSpec {
  int n_in = 1;
  int n_out = 1;
};
// Terminal marker naming the loss head in architecture tables. Forward and
// backward are identity; the cross-entropy itself is the free function
// below, applied to the logits this marker passes through.
struct SoftmaxCESpec {};

using LayerSpec = std::variant<Conv1dSpec, ReluSpec, MaxPool1dSpec,
                               AvgPoolGlobalSpec, DenseSpec, SoftmaxCESpec>;

// Conv1d holds weight (c_out, c_in, kernel) and bias (c_out); Dense holds
// weight (n_out, n_in) and bias (n_out); other kinds hold empty tensors.
struct LayerParams {
  Tensor weight;
  Tensor bias;
};
using ParamSet = std::vector<LayerParams>;

// Valid cross-correlation length: floor((L - dilation*(kernel-1) - 1) /
// stride) + 1. Shared by conv and maxpool (maxpool has dilation 1).
int conv_out_length(int in_length, int kernel, int stride, int dilation);

// Walks the shape chain, throwing Error("tensorkit", "layer <i>", ...) on
// the first layer whose input does not compose. Returns the output shape.
std::vector<int> validate_chain(const std::vector<LayerSpec>& layers,
                                const std::vector<int>& input_shape);

struct ForwardCache {
  const std::vector<LayerSpec>* layers = nullptr;
  const ParamSet* params = nullptr;
  // acts[i] is the input to layer i; acts[layers.size()] is the output.
  std::vector<Tensor> acts;
  // Winning input index per pooled cell, maxpool layers only.
  std::vector<std::vector<int>> pool_argmax;
};

struct ForwardResult {
  Tensor output;
  ForwardCache cache;
};

// The cache borrows layers and params; both must outlive any backward call.
ForwardResult forward(const std::vector<LayerSpec>& layers,
                      const ParamSet& params, const Tensor& input);

// Exact reverse-mode gradients of the implemented forward. grad_output is
// the gradient of a chosen scalar with respect to the chain's output.
Tensor backward_input(const ForwardCache& cache, const Tensor& grad_output);
ParamSet backward_params(const ForwardCache& cache, const Tensor& grad_output);

// -log softmax(logits)[target] with the usual max-shift stabilization.
double cross_entropy(const Tensor& logits, int target_class);

// Two-class softmax; sums to 1 within 1e-12.
std::array<double, 2> softmax2(const Tensor& logits);

// d cross_entropy / d logits = softmax(logits) - one_hot(target).
Tensor cross_entropy_grad(const Tensor& logits, int target_class);

// He-style init: conv and dense weights ~ N(0, 2/fan_in), biases zero, all
// values rounded to the float32 grid.
ParamSet init_params(const std::vector<LayerSpec>& layers, Rng& rng);

// Snaps every parameter to the nearest float32. Training re-applies this
// after each SGD step so the float32 checkpoint blob is lossless.
void round_params_to_float32(ParamSet& params);

}  // namespace ssdrt

#endif  // SSDRT_NET_HPP_
