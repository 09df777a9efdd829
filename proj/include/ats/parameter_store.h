// Copyright (c) 2026 The ATS Authors. All Rights Reserved.
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

#ifndef ATS_PARAMETER_STORE_H_
#define ATS_PARAMETER_STORE_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ats {

// Row-major dense array. A tensor of shape [d0, d1, ...] is viewed as a
// d0 x (d1 * ...) matrix; a 1-D tensor [n] is viewed as a 1 x n row.
struct Tensor {
  std::vector<int64_t> shape;
  std::vector<double> data;

  int64_t size() const { return static_cast<int64_t>(data.size()); }
  Eigen::Index matrix_rows() const;
  Eigen::Index matrix_cols() const;
  Eigen::MatrixXd ToMatrix() const;
  // Copies a matrix with matching view dimensions into data.
  void AssignFrom(const Eigen::MatrixXd& m);
};

// Named learnable arrays in registration order. Shapes are fixed once a name
// is added. An optional observer is told about every read through Get(),
// which is how tests trace which parameters a forward pass touches.
class ParameterStore {
 public:
  using AccessObserver = std::function<void(const std::string&)>;

  // Throws std::invalid_argument on duplicate names or a shape/data mismatch.
  void Add(std::string name, std::vector<int64_t> shape, std::vector<double> data);

  bool Contains(std::string_view name) const;
  // Throws std::out_of_range naming the parameter when absent.
  const Tensor& Get(std::string_view name) const;
  // Mutable access; the shape must not be changed by callers.
  Tensor& Mutable(std::string_view name);

  const std::vector<std::string>& names() const { return names_; }
  size_t size() const { return names_.size(); }
  int64_t ParameterCount() const;

  void set_access_observer(AccessObserver observer) {
    observer_ = std::move(observer);
  }

  // Exact equality of names, shapes and values.
  bool operator==(const ParameterStore& other) const;

 private:
  size_t IndexOf(std::string_view name) const;

  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, size_t> index_;
  AccessObserver observer_;
};

}  // namespace ats

#endif  // ATS_PARAMETER_STORE_H_
