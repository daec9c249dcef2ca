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

#include <cmath>
#include <map>

#include "rugbyrank/kernels.h"

namespace rugbyrank {

Evaluation EvaluateReference(const Design& design,
                             std::span<const double> theta, bool with_hessian) {
  const int n = design.num_params();
  Evaluation out;
  out.gradient.assign(n, 0.0);
  if (with_hessian) out.hessian.assign(static_cast<size_t>(n) * n, 0.0);

  const auto& forms = design.forms();
  const auto& counts = design.counts();
  for (const Design::Block& b : design.blocks()) {
    std::vector<double> lw(b.num_cells);
    for (int c = 0; c < b.num_cells; ++c) {
      lw[c] = EvaluateForm(forms[b.cell_offset + c], theta);
    }
    const double lse = LogSumExp(lw);
    std::vector<double> p(b.num_cells);
    for (int c = 0; c < b.num_cells; ++c) {
      const double count = counts[b.cell_offset + c];
      p[c] = std::exp(lw[c] - lse);
      out.log_likelihood += count * (lw[c] - lse);
      for (const auto& [param, coeff] : forms[b.cell_offset + c]) {
        out.gradient[param] += (count - b.total * p[c]) * coeff;
      }
    }
    if (!with_hessian) continue;
    // -total * (E[f f'] - E[f] E[f']).
    std::map<int, double> mean;
    for (int c = 0; c < b.num_cells; ++c) {
      for (const auto& [param, coeff] : forms[b.cell_offset + c]) {
        mean[param] += p[c] * coeff;
      }
    }
    for (int c = 0; c < b.num_cells; ++c) {
      for (const auto& [pa, ca] : forms[b.cell_offset + c]) {
        for (const auto& [pb, cb] : forms[b.cell_offset + c]) {
          out.hessian[static_cast<size_t>(pa) * n + pb] -=
              b.total * p[c] * ca * cb;
        }
      }
    }
    for (const auto& [pa, ma] : mean) {
      for (const auto& [pb, mb] : mean) {
        out.hessian[static_cast<size_t>(pa) * n + pb] += b.total * ma * mb;
      }
    }
  }
  return out;
}

}  // namespace rugbyrank
