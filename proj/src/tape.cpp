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

#include "zdce/tape.hpp"

namespace zdce {

const char* to_string(OpKind kind) {
  switch (kind) {
  case OpKind::leaf:
    return "leaf";
  case OpKind::conv2d:
    return "conv2d";
  case OpKind::relu:
    return "relu";
  case OpKind::tanh:
    return "tanh";
  case OpKind::concat:
    return "concat";
  case OpKind::curve_step:
    return "curve-step";
  case OpKind::region_mean:
    return "region-mean";
  case OpKind::channel_mean:
    return "channel-mean";
  case OpKind::scalar_reduce:
    return "scalar-reduce";
  }
  return "?";
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id_ < 0 || v.id_ >= static_cast<int>(nodes_.size()))
    throw ContractError("Var does not belong to this tape");
  return nodes_[v.id_];
}

Var Tape::at(std::size_t i) const {
  if (i >= nodes_.size())
    throw ContractError("tape index out of range");
  return Var(static_cast<int>(i));
}

Var Tape::record_scalar(OpKind kind, double value, std::vector<Var> inputs,
                        BackwardFn backward) {
  Var v = record(kind, Tensor::scalar(static_cast<Real>(value)),
                 std::move(inputs), std::move(backward));
  nodes_[v.id_].precise = value;
  nodes_[v.id_].has_precise = true;
  return v;
}

double Tape::scalar(Var v) const {
  const Node& n = node(v);
  return n.has_precise ? n.precise : static_cast<double>(n.value.item());
}

void Tape::set_branches(Var v, std::vector<bool> sides) {
  node(v);
  nodes_[v.id_].branches = std::move(sides);
}

Var Tape::constant(Tensor value) {
  Node n;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return Var(static_cast<int>(nodes_.size()) - 1);
}

Var Tape::parameter(Tensor value, Tensor* sink) {
  if (!sink)
    throw ContractError("parameter leaf needs a gradient sink");
  require_same_shape(value, *sink, "parameter sink");
  Node n;
  n.value = std::move(value);
  n.sink = sink;
  n.requires_grad = true;
  nodes_.push_back(std::move(n));
  return Var(static_cast<int>(nodes_.size()) - 1);
}

Var Tape::record(OpKind kind, Tensor value, std::vector<Var> inputs,
                 BackwardFn backward) {
  Node n;
  n.kind = kind;
  n.value = std::move(value);
  n.backward = std::move(backward);
  for (Var in : inputs) {
    n.requires_grad = n.requires_grad || node(in).requires_grad;
    n.inputs.push_back(in.id_);
  }
  nodes_.push_back(std::move(n));
  return Var(static_cast<int>(nodes_.size()) - 1);
}

void Tape::backward(Var loss) {
  const Node& root = node(loss);
  if (root.value.size() != 1)
    throw ContractError("backward needs a scalar loss, got shape " +
                        root.value.shape().str());
  for (Node& n : nodes_)
    n.grad = Tensor();
  if (!root.requires_grad)
    return;
  nodes_[loss.id_].grad = Tensor(root.value.shape(), Real(1));

  std::vector<const Tensor*> in_values;
  std::vector<Tensor*> in_grads;
  for (int i = loss.id_; i >= 0; --i) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.empty())
      continue;
    if (n.kind == OpKind::leaf) {
      if (n.sink)
        n.sink->add(n.grad);
      continue;
    }
    in_values.clear();
    in_grads.clear();
    for (int j : n.inputs) {
      Node& in = nodes_[j];
      in_values.push_back(&in.value);
      if (in.requires_grad) {
        if (in.grad.empty())
          in.grad = Tensor(in.value.shape());
        in_grads.push_back(&in.grad);
      } else {
        in_grads.push_back(nullptr);
      }
    }
    n.backward(BackwardArgs{n.value, n.grad, in_values, in_grads});
    // Intermediate gradients are no longer needed once propagated.
    n.grad = Tensor();
  }
}

} // namespace zdce
