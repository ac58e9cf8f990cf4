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

#include "pldacct/pld_csv.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace pldacct {
namespace {

double parse_double(const std::string& text, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    if (pos != text.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    std::ostringstream msg;
    msg << "PLD CSV line " << line_no << ": cannot parse number '" << text << "'";
    throw std::invalid_argument(msg.str());
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

ParsedPld read_pld_csv(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) return true;
    }
    return false;
  };

  if (!next_line() || line.rfind("delta_inf=", 0) != 0) {
    throw std::invalid_argument(
        "PLD CSV must start with a 'delta_inf=<float>' header line");
  }
  const double delta_inf = parse_double(line.substr(10), line_no);

  std::optional<GridSpec> grid;
  std::vector<PldAtom> atoms;
  bool first_data = true;
  while (next_line()) {
    if (first_data && line.rfind("grid=", 0) == 0) {
      first_data = false;
      const std::string body = line.substr(5);
      const std::size_t comma = body.find(',');
      if (comma == std::string::npos) {
        throw std::invalid_argument("grid header must be 'grid=<L>,<n>'");
      }
      GridSpec g;
      g.half_width = parse_double(body.substr(0, comma), line_no);
      g.n = static_cast<std::int64_t>(
          parse_double(body.substr(comma + 1), line_no));
      validate_grid(g);
      grid = g;
      continue;
    }
    first_data = false;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      std::ostringstream msg;
      msg << "PLD CSV line " << line_no << ": expected 's,mass'";
      throw std::invalid_argument(msg.str());
    }
    atoms.push_back({parse_double(line.substr(0, comma), line_no),
                     parse_double(line.substr(comma + 1), line_no)});
  }
  return ParsedPld{AtomicPld(std::move(atoms), delta_inf), grid};
}

ParsedPld read_pld_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("cannot open PLD file: " + path);
  }
  return read_pld_csv(in);
}

void write_pld_csv(std::ostream& out, const AtomicPld& pld,
                   const std::optional<GridSpec>& grid) {
  out << "delta_inf=" << format_double(pld.delta_inf()) << "\n";
  if (grid.has_value()) {
    out << "grid=" << format_double(grid->half_width) << "," << grid->n << "\n";
  }
  for (const PldAtom& a : pld.atoms()) {
    out << format_double(a.s) << "," << format_double(a.mass) << "\n";
  }
}

std::string pld_to_csv(const AtomicPld& pld,
                       const std::optional<GridSpec>& grid) {
  std::ostringstream out;
  write_pld_csv(out, pld, grid);
  return out.str();
}

}  // namespace pldacct
