// Copyright 2026 The cfm Authors
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

#include "cfm/io.h"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

#include "cfm/error.h"

namespace cfm {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
    s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
    s.remove_suffix(1);
  return s;
}

// A line with its number and the offset of its first character in the raw
// line, for column reporting.
struct Line {
  int number;
  std::string_view raw;
  std::string_view text;  // comment stripped, trimmed
  int Column(std::string_view part) const {
    return static_cast<int>(part.data() - raw.data()) + 1;
  }
};

std::vector<Line> SplitLines(std::string_view text) {
  std::vector<Line> out;
  int number = 0;
  while (!text.empty()) {
    size_t end = text.find('\n');
    std::string_view raw = text.substr(0, end);
    text.remove_prefix(end == std::string_view::npos ? text.size() : end + 1);
    ++number;
    std::string_view body = raw;
    if (size_t hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = Trim(body);
    if (!body.empty()) out.push_back({number, raw, body});
  }
  return out;
}

[[noreturn]] void SyntaxFail(const Line& line, std::string_view at,
                             const std::string& what) {
  throw Error(ErrorCode::kSyntaxError,
              "line " + std::to_string(line.number) + ", column " +
                  std::to_string(line.Column(at)) + ": " + what);
}

[[noreturn]] void SemanticFail(const std::string& field,
                               const std::string& what) {
  throw Error(ErrorCode::kSemanticError, field + ": " + what);
}

Rational Number(const Line& line, std::string_view token) {
  token = Trim(token);
  auto q = ParseRational(token);
  if (!q) SyntaxFail(line, token, "expected integer or p/q, got '" +
                                      std::string(token) + "'");
  return *q;
}

std::vector<std::string_view> Split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    size_t at = s.find(sep);
    out.push_back(Trim(s.substr(0, at)));
    if (at == std::string_view::npos) break;
    s.remove_prefix(at + 1);
  }
  return out;
}

std::vector<std::string_view> Words(std::string_view s) {
  std::vector<std::string_view> out;
  size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    size_t start = i;
    while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

// Splits "key = value"; returns false when there is no '='.
bool KeyValue(std::string_view text, std::string_view& key,
              std::string_view& value) {
  size_t eq = text.find('=');
  if (eq == std::string_view::npos) return false;
  key = Trim(text.substr(0, eq));
  value = Trim(text.substr(eq + 1));
  return true;
}

bool SectionHeader(const Line& line, std::string_view& inside) {
  if (line.text.front() != '[') return false;
  if (line.text.back() != ']') SyntaxFail(line, line.text, "unterminated section");
  inside = Trim(line.text.substr(1, line.text.size() - 2));
  return true;
}

}  // namespace

MarketInstance ParseInstance(std::string_view text) {
  MarketInstance out;
  enum class Section { kNone, kMarket, kGoods, kAgent } section = Section::kNone;
  bool have_budget = false, have_delays = false;
  auto finish_agent = [&]() {
    if (section != Section::kAgent) return;
    const Agent& a = out.agents.back();
    if (!have_budget) SemanticFail("budget", "missing for agent " + a.id);
    if (!have_delays) SemanticFail("delays", "missing for agent " + a.id);
  };
  for (const Line& line : SplitLines(text)) {
    std::string_view inside;
    if (SectionHeader(line, inside)) {
      finish_agent();
      std::vector<std::string_view> w = Words(inside);
      if (w.size() == 1 && w[0] == "market") {
        section = Section::kMarket;
      } else if (w.size() == 1 && w[0] == "goods") {
        section = Section::kGoods;
      } else if (w.size() == 2 && w[0] == "agent") {
        section = Section::kAgent;
        out.agents.push_back(Agent{std::string(w[1]), 0, {}, {}});
        have_budget = have_delays = false;
      } else {
        SyntaxFail(line, inside, "unknown section '" + std::string(inside) + "'");
      }
      continue;
    }
    std::string_view key, value;
    switch (section) {
      case Section::kNone:
        SyntaxFail(line, line.text, "content before any section");
      case Section::kMarket:
        if (!KeyValue(line.text, key, value) || key != "name") {
          SyntaxFail(line, line.text, "expected 'name = ...'");
        }
        out.name = std::string(value);
        break;
      case Section::kGoods: {
        std::vector<std::string_view> w = Words(line.text);
        Good g{std::string(w[0]), 1};
        for (size_t k = 1; k < w.size(); ++k) {
          if (w[k].substr(0, 6) != "scale=") {
            SyntaxFail(line, w[k], "unknown good attribute");
          }
          g.scale = Number(line, w[k].substr(6));
        }
        out.goods.push_back(std::move(g));
        break;
      }
      case Section::kAgent: {
        Agent& a = out.agents.back();
        const size_t m = out.goods.size();
        if (line.text.substr(0, 6) == "cover:") {
          std::string_view body = line.text.substr(6);
          size_t ge = body.find(">=");
          if (ge == std::string_view::npos) SyntaxFail(line, body, "expected '>='");
          CoverRow row{std::vector<Rational>(m), Number(line, body.substr(ge + 2))};
          std::string_view lhs = Trim(body.substr(0, ge));
          if (lhs.find(':') != std::string_view::npos) {
            for (std::string_view entry : Words(lhs)) {
              size_t colon = entry.find(':');
              if (colon == std::string_view::npos) {
                SyntaxFail(line, entry, "expected good:coefficient");
              }
              int j = out.GoodIndex(std::string(entry.substr(0, colon)));
              if (j < 0) {
                SemanticFail("good id", "unknown good '" +
                                            std::string(entry.substr(0, colon)) +
                                            "' on line " +
                                            std::to_string(line.number));
              }
              row.coef[j] += Number(line, entry.substr(colon + 1));
            }
          } else {
            std::vector<std::string_view> parts = Split(lhs, ',');
            if (parts.size() != m) {
              SemanticFail("good id", "cover row length " +
                                          std::to_string(parts.size()) +
                                          " on line " +
                                          std::to_string(line.number));
            }
            for (size_t j = 0; j < m; ++j) row.coef[j] = Number(line, parts[j]);
          }
          a.cover.push_back(std::move(row));
          break;
        }
        if (!KeyValue(line.text, key, value)) {
          SyntaxFail(line, line.text, "expected 'key = value' or 'cover:'");
        }
        if (key == "budget") {
          a.budget = Number(line, value);
          if (sgn(a.budget) <= 0) SemanticFail("budget", "agent " + a.id);
          have_budget = true;
        } else if (key == "delays") {
          std::vector<std::string_view> parts = Split(value, ',');
          if (parts.size() != m) SemanticFail("delays", "agent " + a.id);
          a.delays.clear();
          for (std::string_view p : parts) a.delays.push_back(Number(line, p));
          have_delays = true;
        } else {
          SyntaxFail(line, key, "unknown agent field '" + std::string(key) + "'");
        }
        break;
      }
    }
  }
  finish_agent();
  ValidateInstance(out);
  return out;
}

std::string WriteInstance(const MarketInstance& instance) {
  std::ostringstream out;
  out << "[market]\nname = " << instance.name << "\n\n[goods]\n";
  for (const Good& g : instance.goods) {
    out << g.id;
    if (g.scale != 1) out << " scale=" << ToString(g.scale);
    out << "\n";
  }
  for (const Agent& a : instance.agents) {
    out << "\n[agent " << a.id << "]\n";
    out << "budget = " << ToString(a.budget) << "\n";
    out << "delays = " << JoinRationals(a.delays) << "\n";
    for (const CoverRow& row : a.cover) {
      out << "cover: " << JoinRationals(row.coef) << " >= " << ToString(row.rhs)
          << "\n";
    }
  }
  return out.str();
}

Equilibrium ParseEquilibrium(std::string_view text,
                             const MarketInstance& instance) {
  Equilibrium eq;
  eq.prices.assign(instance.num_goods(), Rational(0));
  eq.allocation = ZeroAllocation(instance);
  enum class Section { kNone, kPrices, kLambda, kAllocation, kSegments };
  Section section = Section::kNone;
  auto good = [&](const Line& line, std::string_view id) {
    int j = instance.GoodIndex(std::string(id));
    if (j < 0) SemanticFail("good id", "unknown good '" + std::string(id) +
                                           "' on line " +
                                           std::to_string(line.number));
    return j;
  };
  auto agent = [&](const Line& line, std::string_view id) {
    int i = instance.AgentIndex(std::string(id));
    if (i < 0) SemanticFail("agent id", "unknown agent '" + std::string(id) +
                                            "' on line " +
                                            std::to_string(line.number));
    return i;
  };
  for (const Line& line : SplitLines(text)) {
    std::string_view inside;
    if (SectionHeader(line, inside)) {
      if (inside == "prices") {
        section = Section::kPrices;
      } else if (inside == "lambda") {
        section = Section::kLambda;
        eq.lambda.assign(instance.num_agents(), Rational(0));
      } else if (inside == "allocation") {
        section = Section::kAllocation;
      } else if (inside == "segments") {
        section = Section::kSegments;
      } else {
        SyntaxFail(line, inside, "unknown section");
      }
      continue;
    }
    std::string_view key, value;
    switch (section) {
      case Section::kNone:
        SyntaxFail(line, line.text, "content before any section");
      case Section::kPrices:
        if (!KeyValue(line.text, key, value)) SyntaxFail(line, line.text, "expected '='");
        eq.prices[good(line, key)] = Number(line, value);
        break;
      case Section::kLambda:
        if (!KeyValue(line.text, key, value)) SyntaxFail(line, line.text, "expected '='");
        eq.lambda[agent(line, key)] = Number(line, value);
        break;
      case Section::kAllocation: {
        std::vector<std::string_view> parts = Split(line.text, ',');
        if (parts.size() != 3) SyntaxFail(line, line.text, "expected agent, good, value");
        eq.allocation[agent(line, parts[0])][good(line, parts[1])] =
            Number(line, parts[2]);
        break;
      }
      case Section::kSegments: {
        size_t colon = line.text.find(':');
        size_t lam = line.text.find("lambda");
        if (colon == std::string_view::npos || lam == std::string_view::npos ||
            lam < colon) {
          SyntaxFail(line, line.text, "expected '<k>: agents lambda = q'");
        }
        Segment seg;
        for (std::string_view id :
             Words(line.text.substr(colon + 1, lam - colon - 1))) {
          seg.agents.push_back(agent(line, id));
        }
        if (!KeyValue(line.text.substr(lam), key, value)) {
          SyntaxFail(line, line.text.substr(lam), "expected 'lambda = q'");
        }
        seg.lambda = Number(line, value);
        eq.segments.push_back(std::move(seg));
        break;
      }
    }
  }
  return eq;
}

std::string WriteEquilibrium(const MarketInstance& instance,
                             const Equilibrium& eq) {
  std::ostringstream out;
  out << "[prices]\n";
  for (int j = 0; j < instance.num_goods(); ++j) {
    out << instance.goods[j].id << " = " << ToString(eq.prices[j]) << "\n";
  }
  if (!eq.lambda.empty()) {
    out << "\n[lambda]\n";
    for (int i = 0; i < instance.num_agents(); ++i) {
      out << instance.agents[i].id << " = " << ToString(eq.lambda[i]) << "\n";
    }
  }
  out << "\n[allocation]\n";
  for (int i = 0; i < instance.num_agents(); ++i) {
    for (int j = 0; j < instance.num_goods(); ++j) {
      if (sgn(eq.allocation[i][j]) == 0) continue;
      out << instance.agents[i].id << ", " << instance.goods[j].id << ", "
          << ToString(eq.allocation[i][j]) << "\n";
    }
  }
  if (!eq.segments.empty()) {
    out << "\n[segments]\n";
    for (size_t k = 0; k < eq.segments.size(); ++k) {
      out << k + 1 << ":";
      for (int i : eq.segments[k].agents) out << " " << instance.agents[i].id;
      out << " lambda = " << ToString(eq.segments[k].lambda) << "\n";
    }
  }
  return out.str();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kSemanticError, "file: cannot read " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void WriteFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kSemanticError, "file: cannot write " + path);
  out << contents;
}

}  // namespace cfm
