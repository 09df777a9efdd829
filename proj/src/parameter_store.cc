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

#include "ats/parameter_store.h"

#include <numeric>
#include <stdexcept>

namespace ats {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Index Tensor::matrix_rows() const {
  return shape.size() <= 1 ? 1 : static_cast<Eigen::Index>(shape[0]);
}

Eigen::Index Tensor::matrix_cols() const {
  if (shape.empty()) return 1;
  if (shape.size() == 1) return static_cast<Eigen::Index>(shape[0]);
  return static_cast<Eigen::Index>(std::accumulate(
      shape.begin() + 1, shape.end(), int64_t{1}, std::multiplies<int64_t>()));
}

Eigen::MatrixXd Tensor::ToMatrix() const {
  return Eigen::Map<const RowMajorMatrix>(data.data(), matrix_rows(),
                                          matrix_cols());
}

void Tensor::AssignFrom(const Eigen::MatrixXd& m) {
  if (m.rows() != matrix_rows() || m.cols() != matrix_cols()) {
    throw std::invalid_argument("Tensor::AssignFrom: shape mismatch");
  }
  Eigen::Map<RowMajorMatrix>(data.data(), m.rows(), m.cols()) = m;
}

void ParameterStore::Add(std::string name, std::vector<int64_t> shape,
                         std::vector<double> data) {
  if (index_.contains(name)) {
    throw std::invalid_argument("duplicate parameter '" + name + "'");
  }
  const int64_t count = std::accumulate(shape.begin(), shape.end(), int64_t{1},
                                        std::multiplies<int64_t>());
  if (count != static_cast<int64_t>(data.size())) {
    throw std::invalid_argument("parameter '" + name +
                                "': data size does not match shape");
  }
  index_.emplace(name, names_.size());
  names_.push_back(std::move(name));
  tensors_.push_back(Tensor{std::move(shape), std::move(data)});
}

bool ParameterStore::Contains(std::string_view name) const {
  return index_.contains(std::string(name));
}

size_t ParameterStore::IndexOf(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) {
    throw std::out_of_range("missing parameter '" + std::string(name) + "'");
  }
  return it->second;
}

const Tensor& ParameterStore::Get(std::string_view name) const {
  const size_t i = IndexOf(name);
  if (observer_) observer_(names_[i]);
  return tensors_[i];
}

Tensor& ParameterStore::Mutable(std::string_view name) {
  return tensors_[IndexOf(name)];
}

int64_t ParameterStore::ParameterCount() const {
  int64_t total = 0;
  for (const auto& t : tensors_) total += t.size();
  return total;
}

bool ParameterStore::operator==(const ParameterStore& other) const {
  if (names_ != other.names_) return false;
  for (size_t i = 0; i < tensors_.size(); ++i) {
    if (tensors_[i].shape != other.tensors_[i].shape ||
        tensors_[i].data != other.tensors_[i].data) {
      return false;
    }
  }
  return true;
}

}  // namespace ats
