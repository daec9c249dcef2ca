// Copyright 2026 The Rugbyrank Authors.
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

#ifndef RUGBYRANK_KERNELS_H_
#define RUGBYRANK_KERNELS_H_

#include <span>
#include <vector>

#include "rugbyrank/domain.h"
#include "rugbyrank/model.h"

namespace rugbyrank {

// A dataset compiled into independent multinomial blocks. Each block is one
// normalized outcome table (the result or try table of one pairing) with a
// count per cell and a log-weight that is linear in the parameter vector.
// Within a block, the parameters it touches are renumbered 0..k-1 and the
// features are stored densely as a cells x k matrix.
class Design {
 public:
  struct Block {
    double total = 0;
    int num_cells = 0;
    int num_local = 0;
    int cell_offset = 0;     // into counts()
    int local_offset = 0;    // into local_params()
    int feature_offset = 0;  // into features(), row-major cells x num_local
    int cov_offset = 0;      // scratch for num_local x num_local
  };

  explicit Design(int num_params) : num_params_(num_params) {}

  // Adds one block. Blocks with no observations are skipped.
  void AddBlock(std::span<const double> counts,
                std::span<const LinearForm> forms);

  int num_params() const { return num_params_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  const std::vector<double>& counts() const { return counts_; }
  const std::vector<int>& local_params() const { return local_params_; }
  const std::vector<double>& features() const { return features_; }
  int cov_size() const { return cov_size_; }
  // Sparse forms as given, for the reference evaluator.
  const std::vector<LinearForm>& forms() const { return forms_; }

 private:
  int num_params_;
  std::vector<Block> blocks_;
  std::vector<double> counts_;
  std::vector<int> local_params_;
  std::vector<double> features_;
  std::vector<LinearForm> forms_;
  int cov_size_ = 0;
};

// Two blocks (result, try) per observed (home, away, venue) pairing.
Design BuildDesign(const ParamLayout& layout, const OutcomeCounts& counts);

struct Evaluation {
  double log_likelihood = 0;
  // d logL / d theta.
  std::vector<double> gradient;
  // Row-major num_params x num_params; empty unless requested. This is the
  // exact Hessian: minus the summed per-block feature covariance.
  std::vector<double> hessian;
};

// Straightforward single-threaded evaluation, kept as the reference the
// parallel kernel is tested against.
Evaluation EvaluateReference(const Design& design,
                             std::span<const double> theta, bool with_hessian);

// OpenMP evaluation. Blocks are evaluated in parallel into per-block buffers
// and reduced in block order, so the result is bit-identical for any thread
// count.
Evaluation EvaluateParallel(const Design& design, std::span<const double> theta,
                            bool with_hessian);

}  // namespace rugbyrank

#endif  // RUGBYRANK_KERNELS_H_
