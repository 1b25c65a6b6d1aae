/*
 * Copyright 2026 The zdce Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <functional>
#include <span>
#include <vector>

#include "zdce/tensor.hpp"

namespace zdce {

enum class OpKind {
  leaf,
  conv2d,
  relu,
  tanh,
  concat,
  curve_step,
  region_mean,
  channel_mean,
  scalar_reduce,
};

const char* to_string(OpKind kind);

// Handle to a value recorded on a Tape.
class Var {
public:
  Var() = default;
  int id() const { return id_; }
  bool valid() const { return id_ >= 0; }

private:
  friend class Tape;
  explicit Var(int id) : id_(id) {}
  int id_ = -1;
};

struct BackwardArgs {
  const Tensor& output;
  const Tensor& grad_output;
  std::span<const Tensor* const> inputs;
  // Null where the input does not need a gradient. Backward functions must
  // accumulate (+=): the same tensor may appear more than once.
  std::span<Tensor* const> grad_inputs;
};

using BackwardFn = std::function<void(const BackwardArgs&)>;

// Records forward values of a computation so gradients can be propagated in
// reverse. Nodes are appended in evaluation order, which is a topological
// order, so backward is a single reverse sweep.
//
// Gradients of parameter leaves are added into caller-owned sinks: calling
// backward twice without zeroing the sinks doubles them. Intermediate
// gradients are recomputed from scratch on every call.
class Tape {
public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Leaf that never receives a gradient.
  Var constant(Tensor value);
  // Trainable leaf; backward adds dL/dvalue into *sink (same shape).
  Var parameter(Tensor value, Tensor* sink);

  Var record(OpKind kind, Tensor value, std::vector<Var> inputs,
             BackwardFn backward);

  // Scalar node that also keeps its value in double precision, so sums of
  // losses and finite differences are not limited by Real rounding.
  Var record_scalar(OpKind kind, double value, std::vector<Var> inputs,
                    BackwardFn backward);

  const Tensor& value(Var v) const { return node(v).value; }
  // Double-precision value of a one-element node.
  double scalar(Var v) const;
  // Gradient left by the last backward on a leaf; empty if it was unreached.
  const Tensor& grad(Var v) const { return node(v).grad; }
  bool requires_grad(Var v) const { return node(v).requires_grad; }
  OpKind kind(Var v) const { return node(v).kind; }
  std::size_t size() const { return nodes_.size(); }
  // Handle of the i-th recorded node.
  Var at(std::size_t i) const;

  // loss must hold exactly one element.
  void backward(Var loss);

  // Piecewise ops (ReLU, |.|) can record which side of each kink they
  // evaluated on. Off by default; the finite-difference checker turns it on
  // to discard probes that straddle a kink.
  void track_branches(bool on) { track_branches_ = on; }
  bool tracks_branches() const { return track_branches_; }
  void set_branches(Var v, std::vector<bool> sides);
  const std::vector<bool>& branches(Var v) const { return node(v).branches; }

private:
  struct Node {
    OpKind kind = OpKind::leaf;
    Tensor value;
    Tensor grad;
    std::vector<int> inputs;
    BackwardFn backward;
    Tensor* sink = nullptr;
    bool requires_grad = false;
    std::vector<bool> branches;
    double precise = 0;
    bool has_precise = false;
  };

  const Node& node(Var v) const;

  std::vector<Node> nodes_;
  bool track_branches_ = false;
};

} // namespace zdce
