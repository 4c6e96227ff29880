// Copyright 2026 The entdetect Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Results tables. Columns:
//   [d12,] d1, d2, k, n, n_npt, then for each criterion c in
//   {pt, reduction, majorization, entropy, realignment}: F_c, F_stderr_c, M_c, m_c.
// Reals use 6 significant digits; undefined values and unselected criteria
// are empty fields.

#pragma once

#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "entdetect/analytics.hpp"
#include "entdetect/harness/config.hpp"

namespace entdetect::harness {

inline std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string format_optional(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

inline std::string csv_header(bool with_d12) {
  std::string h = with_d12 ? "d12,d1,d2,k,n,n_npt" : "d1,d2,k,n,n_npt";
  for (Criterion c : kAllCriteria) {
    const std::string name(criterion_name(c));
    h += ",F_" + name + ",F_stderr_" + name + ",M_" + name + ",m_" + name;
  }
  return h;
}

inline std::string csv_row(const SweepStats& s, const SweepConfig& config, bool with_d12) {
  std::ostringstream row;
  if (with_d12) row << s.d1 * s.d2 << ',';
  row << s.d1 << ',' << s.d2 << ',' << s.k << ',' << s.n_total << ',' << s.n_npt;
  for (Criterion c : kAllCriteria) {
    if (!config.selected(c)) {
      row << ",,,,";
      continue;
    }
    const CriterionStats& cs = s[c];
    row << ',' << format_optional(cs.fraction) << ',' << format_optional(cs.fraction_stderr) << ','
        << format_optional(cs.mean_ln) << ',' << format_optional(cs.min_ln);
  }
  return row.str();
}

inline std::string format_csv(const std::vector<SweepStats>& stats, const SweepConfig& config, bool with_d12) {
  std::string out = csv_header(with_d12) + "\n";
  for (const SweepStats& s : stats) out += csv_row(s, config, with_d12) + "\n";
  return out;
}

}  // namespace entdetect::harness
