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

#include "rugbyrank/kernels.h"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rugbyrank {

void Design::AddBlock(std::span<const double> counts,
                      std::span<const LinearForm> forms) {
  if (counts.size() != forms.size()) {
    throw Error("block needs one form per cell");
  }
  double total = 0;
  for (double c : counts) {
    if (c < 0) throw Error("negative outcome count");
    total += c;
  }
  if (total == 0) return;

  std::vector<int> local;
  for (const LinearForm& f : forms) {
    for (const auto& [p, c] : f) {
      if (p < 0 || p >= num_params_) throw Error("form parameter out of range");
      local.push_back(p);
    }
  }
  std::sort(local.begin(), local.end());
  local.erase(std::unique(local.begin(), local.end()), local.end());

  Block b;
  b.total = total;
  b.num_cells = static_cast<int>(counts.size());
  b.num_local = static_cast<int>(local.size());
  b.cell_offset = static_cast<int>(counts_.size());
  b.local_offset = static_cast<int>(local_params_.size());
  b.feature_offset = static_cast<int>(features_.size());
  b.cov_offset = cov_size_;
  cov_size_ += b.num_local * b.num_local;

  counts_.insert(counts_.end(), counts.begin(), counts.end());
  local_params_.insert(local_params_.end(), local.begin(), local.end());
  features_.resize(features_.size() + b.num_cells * b.num_local, 0.0);
  for (int c = 0; c < b.num_cells; ++c) {
    for (const auto& [p, coeff] : forms[c]) {
      const int l = static_cast<int>(
          std::lower_bound(local.begin(), local.end(), p) - local.begin());
      features_[b.feature_offset + c * b.num_local + l] += coeff;
    }
    forms_.push_back(forms[c]);
  }
  blocks_.push_back(b);
}

Design BuildDesign(const ParamLayout& layout, const OutcomeCounts& counts) {
  if (counts.num_teams != layout.num_teams()) {
    throw Error("counts and layout disagree on the number of teams");
  }
  Design design(layout.size());
  for (const PairCounts& pc : counts.pairs) {
    const PairForms forms = DescribePair(layout, pc.home, pc.away, pc.venue);
    design.AddBlock(pc.results, forms.result);
    design.AddBlock(pc.tries, forms.tries);
  }
  return design;
}

namespace {

// Largest block in cells; outcome tables here have at most five.
constexpr int kMaxCells = 16;

// Log-likelihood contribution, local gradient and local covariance of one
// block.
double EvaluateBlock(const Design& d, const Design::Block& b,
                     std::span<const double> theta, double* local_grad,
                     double* local_cov) {
  const double* counts = d.counts().data() + b.cell_offset;
  const int* params = d.local_params().data() + b.local_offset;
  const double* f = d.features().data() + b.feature_offset;
  const int k = b.num_local;

  double lw[kMaxCells];
  double mx = -std::numeric_limits<double>::infinity();
  for (int c = 0; c < b.num_cells; ++c) {
    double s = 0;
    for (int l = 0; l < k; ++l) s += f[c * k + l] * theta[params[l]];
    lw[c] = s;
    mx = std::max(mx, s);
  }
  double z = 0;
  for (int c = 0; c < b.num_cells; ++c) z += std::exp(lw[c] - mx);
  const double lse = mx + std::log(z);

  double ll = 0;
  double p[kMaxCells];
  for (int c = 0; c < b.num_cells; ++c) {
    p[c] = std::exp(lw[c] - lse);
    if (counts[c] != 0) ll += counts[c] * lw[c];
  }
  ll -= b.total * lse;

  double mean[kMaxCells * 2];
  for (int l = 0; l < k; ++l) {
    double g = 0;
    double mu = 0;
    for (int c = 0; c < b.num_cells; ++c) {
      g += (counts[c] - b.total * p[c]) * f[c * k + l];
      mu += p[c] * f[c * k + l];
    }
    local_grad[l] = g;
    mean[l] = mu;
  }
  if (local_cov != nullptr) {
    for (int l1 = 0; l1 < k; ++l1) {
      for (int l2 = l1; l2 < k; ++l2) {
        double s = 0;
        for (int c = 0; c < b.num_cells; ++c) {
          s += p[c] * (f[c * k + l1] - mean[l1]) * (f[c * k + l2] - mean[l2]);
        }
        local_cov[l1 * k + l2] = b.total * s;
        local_cov[l2 * k + l1] = b.total * s;
      }
    }
  }
  return ll;
}

}  // namespace

Evaluation EvaluateParallel(const Design& design, std::span<const double> theta,
                            bool with_hessian) {
  const auto& blocks = design.blocks();
  const int nb = static_cast<int>(blocks.size());
  const int n = design.num_params();
  for (const auto& b : blocks) {
    if (b.num_cells > kMaxCells || b.num_local > 2 * kMaxCells) {
      throw Error("outcome table too large for the evaluation kernel");
    }
  }

  std::vector<double> block_ll(nb);
  std::vector<double> local_grad(design.local_params().size());
  std::vector<double> local_cov(with_hessian ? design.cov_size() : 0);

#pragma omp parallel for schedule(static)
  for (int i = 0; i < nb; ++i) {
    const Design::Block& b = blocks[i];
    block_ll[i] =
        EvaluateBlock(design, b, theta, local_grad.data() + b.local_offset,
                      with_hessian ? local_cov.data() + b.cov_offset : nullptr);
  }

  // Fixed-order reduction.
  Evaluation out;
  out.gradient.assign(n, 0.0);
  if (with_hessian) out.hessian.assign(static_cast<size_t>(n) * n, 0.0);
  const int* params = design.local_params().data();
  for (int i = 0; i < nb; ++i) {
    const Design::Block& b = blocks[i];
    out.log_likelihood += block_ll[i];
    const int k = b.num_local;
    for (int l = 0; l < k; ++l) {
      out.gradient[params[b.local_offset + l]] +=
          local_grad[b.local_offset + l];
    }
    if (with_hessian) {
      for (int l1 = 0; l1 < k; ++l1) {
        const size_t row = static_cast<size_t>(params[b.local_offset + l1]) * n;
        for (int l2 = 0; l2 < k; ++l2) {
          out.hessian[row + params[b.local_offset + l2]] -=
              local_cov[b.cov_offset + l1 * k + l2];
        }
      }
    }
  }
  return out;
}

}  // namespace rugbyrank
