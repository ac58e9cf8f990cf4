// Copyright 2026 PLD Accountant Authors
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

#ifndef PLDACCT_PLD_CSV_HPP_
#define PLDACCT_PLD_CSV_HPP_

#include <iosfwd>
#include <optional>
#include <string>

#include "pldacct/grid.hpp"
#include "pldacct/pld.hpp"

namespace pldacct {

// PLD interchange format: a `delta_inf=<float>` header line, an optional
// `grid=<L>,<n>` line for grid-aligned PLDs, then one `s,mass` line per atom
// in increasing s. Decimal floats, UTF-8, LF line endings.

struct ParsedPld {
  AtomicPld pld;
  std::optional<GridSpec> grid;
};

ParsedPld read_pld_csv(std::istream& in);
ParsedPld read_pld_csv_file(const std::string& path);

void write_pld_csv(std::ostream& out, const AtomicPld& pld,
                   const std::optional<GridSpec>& grid = std::nullopt);
std::string pld_to_csv(const AtomicPld& pld,
                       const std::optional<GridSpec>& grid = std::nullopt);

}  // namespace pldacct

#endif  // PLDACCT_PLD_CSV_HPP_
